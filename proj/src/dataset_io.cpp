#include "pfedeg/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "pfedeg/errors.hpp"
#include "pfedeg/rng.hpp"

namespace fs = std::filesystem;

namespace pfedeg {

namespace {

std::string entity_name(int pool_index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "e%06d", pool_index);
    return buf;
}

std::string relation_name(int client, int index) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "r%d_%03d", client, index);
    return buf;
}

/// Assigns pool entity indices to clients. Exact blocks when they fit (a core
/// block owned by everyone plus one block per unordered pair), otherwise
/// sampling from a shared pool with the right expected overlap.
std::vector<std::vector<int>> assign_entities(const SynthSpec& spec, Rng& rng, int& pool_size) {
    const int C = spec.clients;
    const int n = spec.entities_per_client;
    std::vector<std::vector<int>> owned(C);
    int next = 0;

    const int shared_per_pair = static_cast<int>(std::lround(spec.overlap * n));
    int core = C > 2 ? static_cast<int>(std::lround(spec.core_fraction * shared_per_pair)) : 0;
    int pair = shared_per_pair - core;
    if (core + (C - 1) * pair > n) core = 0, pair = shared_per_pair;  // fall back to pairs only
    if (C == 1 || shared_per_pair == 0) {
        for (int c = 0; c < C; ++c)
            for (int i = 0; i < n; ++i) owned[c].push_back(next++);
    } else if (core + (C - 1) * pair <= n) {
        for (int k = 0; k < core; ++k)
            for (int c = 0; c < C; ++c) owned[c].push_back(next + k);
        next += core;
        for (int i = 0; i < C; ++i)
            for (int j = i + 1; j < C; ++j) {
                for (int k = 0; k < pair; ++k) {
                    owned[i].push_back(next + k);
                    owned[j].push_back(next + k);
                }
                next += pair;
            }
        for (int c = 0; c < C; ++c) {
            const int private_count = n - static_cast<int>(owned[c].size());
            for (int k = 0; k < private_count; ++k) owned[c].push_back(next++);
        }
    } else {
        // overlap too dense for disjoint pair blocks; sample n of pool_size
        const int pool = std::max(n, static_cast<int>(std::lround(n / spec.overlap)));
        std::vector<int> indices(pool);
        for (int i = 0; i < pool; ++i) indices[i] = i;
        for (int c = 0; c < C; ++c) {
            std::vector<int> copy = indices;
            rng.shuffle(copy);
            copy.resize(n);
            std::sort(copy.begin(), copy.end());
            owned[c] = std::move(copy);
        }
        next = pool;
    }
    pool_size = next;
    for (auto& list : owned) std::sort(list.begin(), list.end());
    return owned;
}

struct RawTriple {
    int head, relation, tail;  // indices into the client's working vocab
};

}  // namespace

FederatedDataset generate_synthetic(const SynthSpec& spec, std::uint64_t seed) {
    if (spec.clients < 1) throw InvalidInputError("synth: clients must be >= 1");
    if (spec.entities_per_client < 2)
        throw InvalidInputError("synth: need at least 2 entities per client");
    if (spec.relations_per_client < 1 || spec.triples_per_client < 1)
        throw InvalidInputError("synth: relation and triple counts must be >= 1");
    if (spec.overlap < 0.0 || spec.overlap > 1.0)
        throw InvalidInputError("synth: overlap must lie in [0, 1]");
    if (spec.core_fraction < 0.0 || spec.core_fraction > 1.0)
        throw InvalidInputError("synth: core_fraction must lie in [0, 1]");
    if (spec.heterogeneity < 0.0 || spec.heterogeneity > 1.0)
        throw InvalidInputError("synth: heterogeneity must lie in [0, 1]");
    if (spec.valid_fraction < 0.0 || spec.test_fraction < 0.0 ||
        spec.valid_fraction + spec.test_fraction >= 1.0)
        throw InvalidInputError("synth: split fractions must be nonnegative and sum below 1");

    const int C = spec.clients;
    const int d = spec.latent_dim;
    Rng rng(derive_seed(seed, Stream::Synth));

    int pool_size = 0;
    const auto owned = assign_entities(spec, rng, pool_size);

    // shared latent geometry
    Matrix pool_latents(pool_size, d);
    for (std::size_t i = 0; i < pool_latents.size(); ++i) pool_latents.data()[i] = rng.normal();

    FederatedDataset dataset;
    dataset.clients.resize(C);

    for (int c = 0; c < C; ++c) {
        Rng crng(derive_seed(seed, Stream::Synth, static_cast<std::uint64_t>(c) + 1));
        const auto& vocab_pool = owned[c];
        const int n = static_cast<int>(vocab_pool.size());

        // client view of the latents: interpolate toward client-private noise
        const double drift = C > 1 ? spec.heterogeneity * c / (C - 1) : 0.0;
        const double keep = std::sqrt(1.0 - drift);
        const double mix = std::sqrt(drift);
        Matrix latents(n, d);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < d; ++k)
                latents(i, k) = keep * pool_latents(vocab_pool[i], k) + mix * crng.normal();

        Matrix rel_latents(spec.relations_per_client, d);
        for (std::size_t i = 0; i < rel_latents.size(); ++i)
            rel_latents.data()[i] = spec.relation_scale * crng.normal();

        // triples: heads round-robin first so most entities occur, then uniform
        std::vector<RawTriple> triples;
        std::unordered_set<std::uint64_t> unique;
        std::vector<double> dist(n);
        auto emit = [&](int h, int r) {
            for (int t = 0; t < n; ++t) {
                double acc = 0.0;
                for (int k = 0; k < d; ++k) {
                    const double diff = latents(h, k) + rel_latents(r, k) - latents(t, k);
                    acc += diff * diff;
                }
                dist[t] = std::sqrt(acc);
            }
            dist[h] = std::numeric_limits<double>::infinity();  // no self-loops
            const int top = std::min(spec.tail_candidates, n - 1);
            std::vector<int> order(n);
            for (int t = 0; t < n; ++t) order[t] = t;
            std::partial_sort(order.begin(), order.begin() + top, order.end(),
                              [&](int a, int b) { return dist[a] < dist[b]; });
            // softmax over the nearest candidates
            std::vector<double> w(top);
            double total = 0.0;
            for (int k = 0; k < top; ++k) {
                w[k] = std::exp(-(dist[order[k]] - dist[order[0]]) / spec.tail_temperature);
                total += w[k];
            }
            double pick = crng.next_double() * total;
            int tail = order[top - 1];
            for (int k = 0; k < top; ++k) {
                pick -= w[k];
                if (pick <= 0.0) {
                    tail = order[k];
                    break;
                }
            }
            const std::uint64_t key =
                (static_cast<std::uint64_t>(h) * spec.relations_per_client + r) * n + tail;
            if (unique.insert(key).second) triples.push_back({h, r, tail});
        };

        std::vector<int> heads(n);
        for (int i = 0; i < n; ++i) heads[i] = i;
        crng.shuffle(heads);
        for (int h : heads) {
            if (static_cast<int>(triples.size()) >= spec.triples_per_client) break;
            emit(h, static_cast<int>(crng.below(spec.relations_per_client)));
        }
        const long attempt_cap = 30L * spec.triples_per_client + 1000;
        for (long attempt = 0; attempt < attempt_cap &&
                               static_cast<int>(triples.size()) < spec.triples_per_client;
             ++attempt)
            emit(static_cast<int>(crng.below(n)),
                 static_cast<int>(crng.below(spec.relations_per_client)));

        // split with coverage repair: a triple may move to valid/test only if
        // each of its elements still occurs elsewhere in train-or-unprocessed
        crng.shuffle(triples);
        const std::size_t total = triples.size();
        std::size_t valid_quota = static_cast<std::size_t>(spec.valid_fraction * total);
        std::size_t test_quota = static_cast<std::size_t>(spec.test_fraction * total);
        std::vector<int> entity_left(n, 0), relation_left(spec.relations_per_client, 0);
        for (const RawTriple& t : triples) {
            ++entity_left[t.head];
            ++entity_left[t.tail];
            ++relation_left[t.relation];
        }
        std::vector<RawTriple> train_raw, valid_raw, test_raw;
        for (const RawTriple& t : triples) {
            const bool movable = entity_left[t.head] > 1 && entity_left[t.tail] > 1 &&
                                 relation_left[t.relation] > 1 && t.head != t.tail;
            if (movable && valid_raw.size() < valid_quota) {
                valid_raw.push_back(t);
                --entity_left[t.head];
                --entity_left[t.tail];
                --relation_left[t.relation];
            } else if (movable && test_raw.size() < test_quota) {
                test_raw.push_back(t);
                --entity_left[t.head];
                --entity_left[t.tail];
                --relation_left[t.relation];
            } else {
                train_raw.push_back(t);
            }
        }

        // vocab in first-appearance order over train, matching load_dataset
        ClientKG& kg = dataset.clients[c];
        kg.client_id = c;
        std::vector<int> entity_local(n, -1);
        std::vector<int> relation_local(spec.relations_per_client, -1);
        auto intern_entity = [&](int raw) {
            if (entity_local[raw] < 0) {
                entity_local[raw] = static_cast<int>(kg.entities.size());
                kg.entities.push_back(entity_name(vocab_pool[raw]));
            }
        };
        auto intern_relation = [&](int raw) {
            if (relation_local[raw] < 0) {
                relation_local[raw] = static_cast<int>(kg.relations.size());
                kg.relations.push_back(relation_name(c, raw));
            }
        };
        auto materialize = [&](const std::vector<RawTriple>& raw, std::vector<Triple>& out) {
            out.reserve(raw.size());
            for (const RawTriple& t : raw) {
                intern_entity(t.head);
                intern_relation(t.relation);
                intern_entity(t.tail);
                out.push_back({entity_name(vocab_pool[t.head]), relation_name(c, t.relation),
                               entity_name(vocab_pool[t.tail])});
            }
        };
        materialize(train_raw, kg.train);
        materialize(valid_raw, kg.valid);
        materialize(test_raw, kg.test);
        kg.finalize();
    }

    dataset.registry = build_registry(dataset.clients);
    return dataset;
}

namespace {

std::vector<Triple> read_tsv(const fs::path& file) {
    std::vector<Triple> triples;
    std::ifstream in(file);
    if (!in) throw LoadError("cannot open " + file.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto first = line.find('\t');
        const auto second = first == std::string::npos ? std::string::npos
                                                       : line.find('\t', first + 1);
        if (first == std::string::npos || second == std::string::npos ||
            line.find('\t', second + 1) != std::string::npos)
            throw LoadError(file.string() + ":" + std::to_string(line_no) +
                            ": expected head<TAB>relation<TAB>tail");
        Triple t{line.substr(0, first), line.substr(first + 1, second - first - 1),
                 line.substr(second + 1)};
        if (t.head.empty() || t.relation.empty() || t.tail.empty())
            throw LoadError(file.string() + ":" + std::to_string(line_no) + ": empty field");
        triples.push_back(std::move(t));
    }
    return triples;
}

}  // namespace

FederatedDataset load_dataset(const fs::path& root) {
    if (!fs::is_directory(root)) throw LoadError("dataset root is not a directory: " + root.string());

    FederatedDataset dataset;
    for (int c = 0;; ++c) {
        const fs::path dir = root / ("client_" + std::to_string(c));
        if (!fs::is_directory(dir)) {
            if (c == 0) throw LoadError("no client_0 directory under " + root.string());
            break;
        }
        ClientKG kg;
        kg.client_id = c;
        kg.train = read_tsv(dir / "train.tsv");

        std::unordered_set<std::string> entity_seen, relation_seen;
        for (const Triple& t : kg.train) {
            if (entity_seen.insert(t.head).second) kg.entities.push_back(t.head);
            if (relation_seen.insert(t.relation).second) kg.relations.push_back(t.relation);
            if (entity_seen.insert(t.tail).second) kg.entities.push_back(t.tail);
        }

        for (const char* split : {"valid", "test"}) {
            const fs::path file = dir / (std::string(split) + ".tsv");
            auto triples = read_tsv(file);
            for (std::size_t i = 0; i < triples.size(); ++i) {
                const Triple& t = triples[i];
                // the load-time position of a triple is unknown after read_tsv
                // skipped blanks, so re-derive the line number lazily on error
                auto fail = [&](const std::string& name, const char* kind) {
                    std::ifstream in(file);
                    std::string line;
                    std::size_t line_no = 0;
                    while (std::getline(in, line)) {
                        ++line_no;
                        if (!line.empty() && line.back() == '\r') line.pop_back();
                        const auto a = line.find('\t');
                        const auto b = a == std::string::npos ? a : line.find('\t', a + 1);
                        if (b == std::string::npos) continue;
                        if (line.substr(0, a) == name ||
                            line.substr(a + 1, b - a - 1) == name || line.substr(b + 1) == name)
                            throw LoadError(file.string() + ":" + std::to_string(line_no) + ": " +
                                            kind + " '" + name + "' does not appear in train");
                    }
                    throw LoadError(file.string() + ": " + kind + " '" + name +
                                    "' does not appear in train");
                };
                if (!entity_seen.count(t.head)) fail(t.head, "entity");
                if (!relation_seen.count(t.relation)) fail(t.relation, "relation");
                if (!entity_seen.count(t.tail)) fail(t.tail, "entity");
            }
            (split[0] == 'v' ? kg.valid : kg.test) = std::move(triples);
        }
        kg.finalize();
        dataset.clients.push_back(std::move(kg));
    }
    dataset.registry = build_registry(dataset.clients);
    return dataset;
}

void save_dataset(const FederatedDataset& dataset, const fs::path& root) {
    fs::create_directories(root);
    for (const ClientKG& kg : dataset.clients) {
        const fs::path dir = root / ("client_" + std::to_string(kg.client_id));
        fs::create_directories(dir);
        auto write = [&](const std::vector<Triple>& triples, const char* name) {
            std::ofstream out(dir / (std::string(name) + ".tsv"), std::ios::binary);
            if (!out) throw LoadError("cannot write " + (dir / name).string());
            for (const Triple& t : triples)
                out << t.head << '\t' << t.relation << '\t' << t.tail << '\n';
        };
        write(kg.train, "train");
        write(kg.valid, "valid");
        write(kg.test, "test");
    }
}

}  // namespace pfedeg
