#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pfedeg/aggregation.hpp"
#include "pfedeg/evaluation.hpp"
#include "pfedeg/kge.hpp"

namespace pfedeg {

/// Training modes. PFedEGStar/PFedEGPlus differ only in their default weight
/// strategy (ratio vs embedding). FedEAvg is the uniform-average baseline and
/// resolves to forced-uniform weights, p = 1, beta = 0, init-only. Single
/// trains every client on its local triples with no server exchange;
/// Collective merges all clients into one KG first.
enum class Mode { PFedEGStar, PFedEGPlus, FedEAvg, Single, Collective };

/// Which uses of the supplementary knowledge a client keeps.
enum class Ablation { Full, RegOnly, InitOnly };

Mode mode_from_name(const std::string& name);
const char* mode_name(Mode mode);
Ablation ablation_from_name(const std::string& name);
const char* ablation_name(Ablation ablation);

struct TrainingConfig {
    Mode mode = Mode::PFedEGPlus;
    Ablation ablation = Ablation::Full;
    ScorerKind scorer = ScorerKind::TransE;
    std::optional<WeightStrategy> strategy;  // unset: mode default

    double fraction = 1.0;  // F, client selection fraction in (0, 1]
    int epochs = 3;         // E, local epochs
    int batch_size = 512;   // B
    double learning_rate = 1e-3;
    double beta = 3e-3;  // prox coefficient
    double p = 0.7;      // residual combination
    double gamma = 10.0; // margin
    double alpha = 1.0;  // self-adversarial temperature
    int negatives = 256; // k
    int dim = 128;       // m
    int max_rounds = 200;
    std::optional<int> eval_every;  // unset: 5 federated, 10 Single/Collective
    int patience = 5;               // ESP, consecutive validation drops
    std::uint64_t seed = 1;
    NegativeSlot slot = NegativeSlot::Tail;
    bool filtered_eval = true;
    bool predict_heads = false;
    int threads = 0;  // client-update parallelism; 0 = hardware concurrency

    /// Copy with mode defaults applied: strategy and eval_every filled in,
    /// FedEAvg forced to (uniform, p=1, beta=0, init-only). Throws
    /// ConfigError on out-of-range values.
    TrainingConfig resolved() const;
};

struct RoundRecord {
    int round = 0;
    std::vector<int> selected;
    std::vector<std::optional<MetricReport>> client_metrics;  // indexed by client
    std::optional<double> weighted_mrr;
    double seconds = 0.0;  // wall clock; diagnostic, not part of the log contract
};

/// Test and tooling instrumentation for the round loop.
struct RunHooks {
    std::function<void(int round, const Matrix& weights)> on_weights;
    std::function<void(int round, const std::vector<Matrix>& supplementary)> on_supplementary;
    /// Replaces validation when set: scripted weighted MRR per evaluation.
    std::function<double(int round)> scripted_weighted_mrr;
};

struct RunResult {
    std::vector<EmbeddingStore> stores;  // the returned checkpoint
    int checkpoint_round = 0;
    std::optional<double> checkpoint_mrr;
    bool early_stopped = false;
    std::vector<RoundRecord> rounds;
    std::vector<EmbeddingStore> final_stores;  // state after the last round run
    int rounds_run = 0;
    std::optional<ClientKG> merged;  // Collective only: the KG the result refers to
};

/// ceil(F * C) distinct clients, uniform without replacement, ascending.
std::vector<int> select_clients(std::size_t client_count, double fraction, Rng& rng);

/// Triple-count-weighted average of per-client metric values.
double weighted_mrr(std::span<const double> values, std::span<const std::size_t> counts);

/// Union of all client KGs: sorted union vocabularies, union triples with
/// duplicates removed (cross-split collisions keep the earlier split:
/// train > valid > test).
ClientKG merge_clients(const FederatedDataset& dataset);

/// The outer loop: per round, select clients, server update (federated
/// modes), parallel client updates, periodic weighted validation with
/// early stopping. Early stop returns the checkpoint taken before the drop
/// streak began; round exhaustion returns the best-MRR checkpoint.
/// `initial`/`start_round` resume from a checkpoint's stores.
RunResult run(const FederatedDataset& dataset, const TrainingConfig& config,
              const RunHooks* hooks = nullptr,
              std::optional<std::vector<EmbeddingStore>> initial = std::nullopt,
              int start_round = 1);

/// Per-client test/valid reports for final reporting, in client order.
std::vector<MetricReport> evaluate_all(const std::vector<EmbeddingStore>& stores,
                                       const FederatedDataset& dataset, const std::string& split,
                                       const EvalOptions& options, int threads);

}  // namespace pfedeg
