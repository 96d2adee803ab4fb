#include "pfedeg/federation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <set>
#include <thread>

#include "pfedeg/errors.hpp"

namespace pfedeg {

Mode mode_from_name(const std::string& name) {
    if (name == "pfedeg-star") return Mode::PFedEGStar;
    if (name == "pfedeg-plus") return Mode::PFedEGPlus;
    if (name == "fedavg") return Mode::FedEAvg;
    if (name == "single") return Mode::Single;
    if (name == "collective") return Mode::Collective;
    throw ConfigError("unknown mode: " + name +
                      " (expected pfedeg-star|pfedeg-plus|fedavg|single|collective)");
}

const char* mode_name(Mode mode) {
    switch (mode) {
        case Mode::PFedEGStar: return "pfedeg-star";
        case Mode::PFedEGPlus: return "pfedeg-plus";
        case Mode::FedEAvg: return "fedavg";
        case Mode::Single: return "single";
        case Mode::Collective: return "collective";
    }
    return "?";
}

Ablation ablation_from_name(const std::string& name) {
    if (name == "full") return Ablation::Full;
    if (name == "reg-only") return Ablation::RegOnly;
    if (name == "init-only") return Ablation::InitOnly;
    throw ConfigError("unknown ablation: " + name + " (expected full|reg-only|init-only)");
}

const char* ablation_name(Ablation ablation) {
    switch (ablation) {
        case Ablation::Full: return "full";
        case Ablation::RegOnly: return "reg-only";
        case Ablation::InitOnly: return "init-only";
    }
    return "?";
}

TrainingConfig TrainingConfig::resolved() const {
    TrainingConfig cfg = *this;
    if (cfg.fraction <= 0.0 || cfg.fraction > 1.0)
        throw ConfigError("selection fraction must lie in (0, 1]");
    if (cfg.patience < 1) throw ConfigError("early-stop patience must be >= 1");
    if (cfg.eval_every && *cfg.eval_every < 1) throw ConfigError("eval_every must be >= 1");
    if (cfg.epochs < 0 || cfg.batch_size < 1 || cfg.negatives < 1 || cfg.max_rounds < 0)
        throw ConfigError("epochs/batch/negatives/rounds out of range");
    if (cfg.beta < 0.0) throw ConfigError("prox coefficient beta must be >= 0");
    if (cfg.p < 0.0 || cfg.p > 1.0) throw ConfigError("residual coefficient p must lie in [0, 1]");

    const bool local_only = cfg.mode == Mode::Single || cfg.mode == Mode::Collective;
    if (!cfg.eval_every) cfg.eval_every = local_only ? 10 : 5;
    if (!cfg.strategy) {
        switch (cfg.mode) {
            case Mode::PFedEGStar: cfg.strategy = WeightStrategy::RatioBased; break;
            case Mode::PFedEGPlus: cfg.strategy = WeightStrategy::EmbeddingBased; break;
            default: cfg.strategy = WeightStrategy::Uniform; break;
        }
    }
    if (cfg.mode == Mode::FedEAvg) {
        // FedE is exactly this corner of the design space
        cfg.strategy = WeightStrategy::Uniform;
        cfg.p = 1.0;
        cfg.beta = 0.0;
        cfg.ablation = Ablation::InitOnly;
    }
    if (cfg.threads <= 0)
        cfg.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return cfg;
}

std::vector<int> select_clients(std::size_t client_count, double fraction, Rng& rng) {
    if (fraction <= 0.0 || fraction > 1.0)
        throw ConfigError("selection fraction must lie in (0, 1]");
    const std::size_t k = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(client_count)));
    std::vector<int> pool(client_count);
    for (std::size_t i = 0; i < client_count; ++i) pool[i] = static_cast<int>(i);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(client_count - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

double weighted_mrr(std::span<const double> values, std::span<const std::size_t> counts) {
    if (values.empty() || values.size() != counts.size())
        throw InvalidInputError("weighted_mrr: need matching, nonempty value/count lists");
    double total = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) throw InvalidInputError("weighted_mrr: zero triple count");
        total += static_cast<double>(c);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        acc += values[i] * (static_cast<double>(counts[i]) / total);
    return acc;
}

ClientKG merge_clients(const FederatedDataset& dataset) {
    if (dataset.clients.empty()) throw InvalidInputError("merge_clients: empty dataset");
    std::set<std::string> entities, relations;
    for (const ClientKG& kg : dataset.clients) {
        entities.insert(kg.entities.begin(), kg.entities.end());
        relations.insert(kg.relations.begin(), kg.relations.end());
    }

    ClientKG merged;
    merged.client_id = 0;
    merged.entities.assign(entities.begin(), entities.end());
    merged.relations.assign(relations.begin(), relations.end());

    struct TripleKey {
        bool operator()(const Triple& a, const Triple& b) const {
            return std::tie(a.head, a.relation, a.tail) < std::tie(b.head, b.relation, b.tail);
        }
    };
    std::set<Triple, TripleKey> seen;
    auto collect = [&](std::vector<Triple> ClientKG::*split, std::vector<Triple>& out) {
        for (const ClientKG& kg : dataset.clients)
            for (const Triple& t : kg.*split)
                if (seen.insert(t).second) out.push_back(t);
    };
    collect(&ClientKG::train, merged.train);
    collect(&ClientKG::valid, merged.valid);
    collect(&ClientKG::test, merged.test);
    merged.finalize();
    return merged;
}

namespace {

struct EvalOutcome {
    std::vector<int> evaluated;  // client ids
    std::vector<MetricReport> reports;
    double weighted = 0.0;
};

/// Runs fn(c) for every listed client, at most `threads` at a time.
template <typename Fn>
void parallel_over(const std::vector<int>& clients, int threads, Fn&& fn) {
    if (threads <= 1 || clients.size() <= 1) {
        for (int c : clients) fn(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= clients.size()) return;
            fn(clients[i]);
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(threads, static_cast<int>(clients.size()));
    pool.reserve(n);
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace

std::vector<MetricReport> evaluate_all(const std::vector<EmbeddingStore>& stores,
                                       const FederatedDataset& dataset, const std::string& split,
                                       const EvalOptions& options, int threads) {
    std::vector<MetricReport> reports(dataset.client_count());
    std::vector<int> all(dataset.client_count());
    for (std::size_t c = 0; c < all.size(); ++c) all[c] = static_cast<int>(c);
    parallel_over(all, threads, [&](int c) {
        reports[c] = evaluate_client(stores[c], dataset.clients[c], split, options);
    });
    return reports;
}

RunResult run(const FederatedDataset& dataset, const TrainingConfig& raw_config,
              const RunHooks* hooks, std::optional<std::vector<EmbeddingStore>> initial,
              int start_round) {
    const TrainingConfig cfg = raw_config.resolved();

    if (cfg.mode == Mode::Collective) {
        // collapse to a single merged client and train it locally
        FederatedDataset merged;
        merged.clients.push_back(merge_clients(dataset));
        merged.registry = build_registry(merged.clients);
        TrainingConfig inner = cfg;
        inner.mode = Mode::Single;
        RunResult result = run(merged, inner, hooks, std::move(initial), start_round);
        result.merged = std::move(merged.clients[0]);
        return result;
    }

    const std::size_t C = dataset.client_count();
    const bool local_only = cfg.mode == Mode::Single;
    const EvalOptions eval_options{.filtered = cfg.filtered_eval,
                                   .predict_heads = cfg.predict_heads};

    RunResult result;

    std::vector<EmbeddingStore> stores;
    if (initial) {
        stores = std::move(*initial);
        if (stores.size() != C) throw InvalidInputError("run: initial store count mismatch");
    } else {
        stores.reserve(C);
        for (std::size_t c = 0; c < C; ++c) {
            Rng rng(derive_seed(cfg.seed, Stream::Init, c));
            stores.push_back(make_store(cfg.scorer, cfg.dim, dataset.clients[c].entity_count(),
                                        dataset.clients[c].relation_count(), cfg.gamma, rng));
        }
    }

    // checkpoints for the two return policies
    std::vector<EmbeddingStore> anchor = stores;  // before any drop streak
    int anchor_round = start_round - 1;
    std::optional<double> anchor_mrr;
    std::vector<EmbeddingStore> best;
    int best_round = start_round - 1;
    std::optional<double> best_mrr;
    std::optional<double> previous_mrr;
    int drop_streak = 0;

    LocalTrainConfig local;
    local.epochs = cfg.epochs;
    local.batch_size = cfg.batch_size;
    local.negatives = cfg.negatives;
    local.learning_rate = cfg.learning_rate;
    local.beta = cfg.beta;
    local.gamma = cfg.gamma;
    local.alpha = cfg.alpha;
    local.slot = cfg.slot;
    local.init_from_supplementary = cfg.ablation != Ablation::RegOnly;
    local.use_prox = cfg.ablation != Ablation::InitOnly;

    for (int round = start_round; round <= cfg.max_rounds; ++round) {
        const auto t0 = std::chrono::steady_clock::now();
        RoundRecord record;
        record.round = round;
        record.client_metrics.resize(C);

        Rng select_rng(derive_seed(cfg.seed, Stream::Select, 0, static_cast<std::uint64_t>(round)));
        record.selected = select_clients(C, cfg.fraction, select_rng);

        std::vector<std::optional<Matrix>> supplementary(C);
        if (!local_only) {
            std::vector<Matrix> entity_matrices;
            entity_matrices.reserve(C);
            for (const EmbeddingStore& s : stores) entity_matrices.push_back(s.entities);
            const Matrix W = compute_weights(*cfg.strategy, dataset.registry, entity_matrices);
            if (hooks && hooks->on_weights) hooks->on_weights(round, W);
            std::vector<Matrix> K =
                server_update_with_weights(entity_matrices, dataset.registry, W, cfg.p);
            if (hooks && hooks->on_supplementary) hooks->on_supplementary(round, K);
            for (std::size_t c = 0; c < C; ++c) supplementary[c] = std::move(K[c]);
        }

        parallel_over(record.selected, cfg.threads, [&](int c) {
            Rng rng(derive_seed(cfg.seed, Stream::LocalTrain, static_cast<std::uint64_t>(c),
                                static_cast<std::uint64_t>(round)));
            client_update(stores[c], dataset.clients[c],
                          local_only ? std::nullopt : supplementary[c], local, rng);
        });

        // clients with an empty validation split cannot contribute a metric
        std::vector<int> evaluable;
        for (int c : record.selected)
            if (!dataset.clients[c].valid.empty()) evaluable.push_back(c);

        const bool scripted = hooks && hooks->scripted_weighted_mrr;
        const bool evaluate_now =
            round % *cfg.eval_every == 0 && (scripted || !evaluable.empty());
        if (evaluate_now) {
            double weighted = 0.0;
            if (scripted) {
                weighted = hooks->scripted_weighted_mrr(round);
            } else {
                std::vector<double> values(evaluable.size());
                std::vector<std::size_t> counts(evaluable.size());
                parallel_over(evaluable, cfg.threads, [&](int c) {
                    const auto it = std::find(evaluable.begin(), evaluable.end(), c);
                    const std::size_t slot_index = it - evaluable.begin();
                    const MetricReport report =
                        evaluate_client(stores[c], dataset.clients[c], "valid", eval_options);
                    values[slot_index] = report.mrr;
                    counts[slot_index] = report.triple_count;
                    record.client_metrics[c] = report;
                });
                weighted = weighted_mrr(values, counts);
            }
            record.weighted_mrr = weighted;

            if (!best_mrr || weighted > *best_mrr) {
                best_mrr = weighted;
                best = stores;
                best_round = round;
            }
            if (previous_mrr && weighted < *previous_mrr) {
                ++drop_streak;
            } else {
                drop_streak = 0;
                anchor = stores;
                anchor_round = round;
                anchor_mrr = weighted;
            }
            previous_mrr = weighted;
        }

        record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.rounds.push_back(std::move(record));
        result.rounds_run = round;

        if (drop_streak >= cfg.patience) {
            result.early_stopped = true;
            break;
        }
    }

    result.final_stores = std::move(stores);
    if (result.early_stopped) {
        result.stores = std::move(anchor);
        result.checkpoint_round = anchor_round;
        result.checkpoint_mrr = anchor_mrr;
    } else if (best_mrr) {
        result.stores = std::move(best);
        result.checkpoint_round = best_round;
        result.checkpoint_mrr = best_mrr;
    } else {
        // never evaluated: the last state is all there is
        result.stores = result.final_stores;
        result.checkpoint_round = result.rounds_run;
    }
    return result;
}

}  // namespace pfedeg
