#pragma once

#include <vector>

#include "pfedeg/kg.hpp"
#include "pfedeg/matrix.hpp"
#include "pfedeg/relation_graph.hpp"

namespace pfedeg {

/// Stacks C padded N x m matrices into the C x (N*m) global matrix, each row
/// a client's padded embedding matrix flattened row-major.
Matrix stack_global(const std::vector<Matrix>& padded);

/// Inverse of the flattening for one row: N x m view of row `row`.
Matrix unstack_row(const Matrix& stacked, std::size_t row, std::size_t m);

/// Z[i][j] = X[i][j] / Y[i][j // m]; zero denominators yield zero entries.
Matrix norm_divide(const Matrix& X, const Matrix& Y, std::size_t m);

/// norm_divide(W x G, W x M): per client and entity, the owners' embeddings
/// averaged with the client's row of W renormalized over owners. Computed
/// blockwise per entity; bit-identical to materializing the full products.
Matrix aggregate(const Matrix& W, const Matrix& G, const Matrix& M, std::size_t m);

/// p * K_raw + (1 - p) * G. Throws ConfigError unless p is in [0, 1].
Matrix residual_combine(const Matrix& K_raw, const Matrix& G, double p);

/// Per-client n_c x m supplementary matrices: unflatten each client's row and
/// gather its owned rows.
std::vector<Matrix> extract_all(const Matrix& K, const GlobalRegistry& registry, std::size_t m);

/// One server update over immutable snapshots of all client entity matrices:
/// recompute W for the strategy, pad and stack, aggregate, residual-combine,
/// extract. Pure function of its inputs; relations never enter.
std::vector<Matrix> server_update(const std::vector<Matrix>& entity_matrices,
                                  const GlobalRegistry& registry, WeightStrategy strategy,
                                  double p);

/// Same, with a precomputed weight matrix (the federation loop reuses W for
/// the round dump).
std::vector<Matrix> server_update_with_weights(const std::vector<Matrix>& entity_matrices,
                                               const GlobalRegistry& registry, const Matrix& W,
                                               double p);

}  // namespace pfedeg
