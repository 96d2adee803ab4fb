#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pfedeg/kg.hpp"
#include "pfedeg/matrix.hpp"
#include "pfedeg/rng.hpp"

namespace pfedeg {

enum class ScorerKind { TransE, RotatE, ComplEx };

const char* scorer_name(ScorerKind kind);
ScorerKind scorer_from_name(const std::string& name);

/// One client's learnable parameters.
///
/// Entities are n x m reals; for RotatE and ComplEx the m reals are m/2
/// complex coordinates stored as interleaved (re, im) pairs. RotatE relations
/// are stored as m/2 phases, so every relation coordinate has unit modulus by
/// construction no matter what the optimizer does to the phases.
struct EmbeddingStore {
    ScorerKind scorer = ScorerKind::TransE;
    int dim = 0;  // m, real parameters per entity
    Matrix entities;
    Matrix relations;

    static int relation_dim(ScorerKind kind, int m);

    std::size_t entity_count() const { return entities.rows(); }
    std::size_t relation_count() const { return relations.rows(); }

    bool bit_equal(const EmbeddingStore& other) const {
        return scorer == other.scorer && dim == other.dim &&
               entities.bit_equal(other.entities) && relations.bit_equal(other.relations);
    }
};

/// Uniform init in [-(gamma+2)/m, +(gamma+2)/m] (phases in [-pi, pi] for
/// RotatE). Throws ConfigError for odd m with RotatE/ComplEx.
EmbeddingStore make_store(ScorerKind kind, int m, std::size_t n_entities,
                          std::size_t n_relations, double gamma, Rng& rng);

/// Plausibility score; higher is more plausible for every scorer.
/// TransE: -||h + r - t||_1. RotatE: -sum of per-coordinate complex moduli of
/// h*e^{i theta} - t. ComplEx: Re<h, r, conj(t)>.
double score(const EmbeddingStore& store, int h, int r, int t);

/// Same math on raw vectors, for callers that hold no store.
double score_vectors(ScorerKind kind, std::span<const double> h, std::span<const double> r,
                     std::span<const double> t);

enum class NegativeSlot { Tail, Head, Both };

NegativeSlot negative_slot_from_name(const std::string& name);
const char* negative_slot_name(NegativeSlot slot);

struct NegativeSample {
    int entity = -1;        // the corrupting entity
    bool head_slot = false; // true: (entity, r, t); false: (h, r, entity)
};

struct NegativeBatch {
    IndexedTriple positive;
    std::vector<NegativeSample> negatives;
    double alpha = 1.0;  // self-adversarial temperature
    double gamma = 10.0; // margin
};

/// k corruptions drawn uniformly from the local vocabulary, skipping any
/// candidate that forms a train triple. Throws InvalidInputError when no
/// corruption exists (e.g. a single-entity client).
NegativeBatch sample_negatives(const ClientKG& kg, const IndexedTriple& positive, int k,
                               double alpha, double gamma, Rng& rng,
                               NegativeSlot slot = NegativeSlot::Tail);

/// Softmax of alpha * scores; the weights the negative terms carry.
std::vector<double> self_adversarial_weights(std::span<const double> scores, double alpha);

/// Dense gradient accumulators matching a store's parameter shapes.
struct GradientBuffer {
    Matrix entities;
    Matrix relations;

    explicit GradientBuffer(const EmbeddingStore& store)
        : entities(Matrix::zeros_like(store.entities)),
          relations(Matrix::zeros_like(store.relations)) {}

    void reset() {
        entities.fill(0.0);
        relations.fill(0.0);
    }
};

/// Self-adversarial loss of one positive and its negatives:
///   -log sigma(gamma + s(pos)) - sum_i p_i log sigma(-s(neg_i) - gamma)
/// with p_i = softmax_i(alpha * s(neg_i)). Gradients (including through the
/// softmax weights) are accumulated into `grad`.
double kge_loss_grad(const EmbeddingStore& store, const NegativeBatch& batch,
                     GradientBuffer& grad);

/// beta * D(E, K) with D the Frobenius distance; gradient beta*(E-K)/D is
/// accumulated over the whole entity matrix (zero when D = 0).
double prox_loss_grad(const EmbeddingStore& store, const Matrix& supplementary, double beta,
                      GradientBuffer& grad);

/// kge_loss_grad + prox_loss_grad. Throws ConfigError for beta < 0.
double loss_and_grad(const EmbeddingStore& store, const NegativeBatch& batch,
                     const Matrix& supplementary, double beta, GradientBuffer& grad);

struct AdamState {
    Matrix m_entities, v_entities, m_relations, v_relations;
    long step = 0;
    double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;
    double learning_rate = 0.001;

    AdamState(const EmbeddingStore& store, double lr)
        : m_entities(Matrix::zeros_like(store.entities)),
          v_entities(Matrix::zeros_like(store.entities)),
          m_relations(Matrix::zeros_like(store.relations)),
          v_relations(Matrix::zeros_like(store.relations)),
          learning_rate(lr) {}
};

/// One bias-corrected Adam update over all parameters. Throws NumericError
/// naming the first non-finite gradient entry.
void adam_step(EmbeddingStore& store, AdamState& state, const GradientBuffer& grad);

/// Per-round local training knobs, resolved by the federation layer.
struct LocalTrainConfig {
    int epochs = 3;
    int batch_size = 512;
    int negatives = 256;
    double learning_rate = 0.001;
    double beta = 3e-3;
    double gamma = 10.0;
    double alpha = 1.0;
    NegativeSlot slot = NegativeSlot::Tail;
    bool init_from_supplementary = true;  // E_c <- K_c at round start
    bool use_prox = true;                 // keep the beta * D term
};

struct ClientUpdateResult {
    bool skipped = false;        // empty train split
    double first_epoch_loss = 0; // mean loss per positive, first epoch
    double last_epoch_loss = 0;
    int steps = 0;               // optimizer steps taken
};

namespace detail {

/// Reused buffers for the hot training path.
struct TailScratch {
    std::vector<int> negatives;
    std::vector<double> scores, weights, logsig, sig;
    std::vector<double> cache_a, cache_b;  // per-scorer forward caches
    Matrix diffs;                          // per-negative intermediates
};

/// Allocation-free tail-corruption training step used by client_update.
/// Math-identical to sample_negatives + kge_loss_grad with the same rng
/// (covered by an equivalence test).
double tail_batch_loss_grad(const EmbeddingStore& store, const ClientKG& kg,
                            const IndexedTriple& positive, int k, double alpha, double gamma,
                            Rng& rng, GradientBuffer& grad, TailScratch& scratch);

}  // namespace detail

/// Algorithm-level local update: optional init from the supplementary matrix,
/// then `epochs` passes of shuffled mini-batches, each batch combining the
/// summed KGE losses with one prox term. `rng` drives shuffling and negative
/// sampling; pass a stream derived per (client, round).
ClientUpdateResult client_update(EmbeddingStore& store, const ClientKG& kg,
                                 const std::optional<Matrix>& supplementary,
                                 const LocalTrainConfig& config, Rng& rng);

}  // namespace pfedeg
