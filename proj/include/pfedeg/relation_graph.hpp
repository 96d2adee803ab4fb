#pragma once

#include <string>
#include <vector>

#include "pfedeg/kg.hpp"
#include "pfedeg/matrix.hpp"

namespace pfedeg {

enum class WeightStrategy { RatioBased, EmbeddingBased, Uniform };

WeightStrategy strategy_from_name(const std::string& name);
const char* strategy_name(WeightStrategy strategy);

/// Raw ratio weights: W_ij = |E_i n E_j| / |E_i u E_j| off the diagonal,
/// W_ii = min over k != i of W_ik. Symmetric; entries in [0, 1]. For C = 1
/// returns [[1]].
Matrix weights_ratio(const GlobalRegistry& registry);

/// sum_k exp(cos(a_k, b_k)) over row-aligned shared-entity blocks.
/// A zero-norm row on either side contributes exp(0).
double embedding_affinity(const Matrix& a, const Matrix& b, bool mean_instead_of_sum = false);

/// Raw embedding weights: W_ij = embedding_affinity over the pair's shared
/// entities (0 when they share none), W_ii = e^{-1}. Recomputed from the
/// given entity matrices on every call; never cached.
Matrix weights_embedding(const GlobalRegistry& registry,
                         const std::vector<Matrix>& entity_matrices,
                         bool mean_instead_of_sum = false);

/// Uniform 1/C everywhere; with the aggregation mask this reproduces FedE's
/// per-entity arithmetic mean over owners.
Matrix weights_uniform(std::size_t client_count);

/// Raises too-small diagonal entries to `epsilon`. Applied under the ratio
/// strategy before scaling so no client row can lose its own embedding to a
/// zero self-weight.
void floor_self_weights(Matrix& raw, double epsilon = 1e-6);

/// Row normalization W_ij = W^_ij / sum_j W^_ij. An all-zero row falls back
/// to a one-hot on the diagonal (the client only listens to itself).
Matrix scale_rows(const Matrix& raw);

/// Full pipeline for a strategy: raw weights, ratio-strategy self-weight
/// floor, then row scaling. `entity_matrices` is only read for
/// EmbeddingBased.
Matrix compute_weights(WeightStrategy strategy, const GlobalRegistry& registry,
                       const std::vector<Matrix>& entity_matrices);

}  // namespace pfedeg
