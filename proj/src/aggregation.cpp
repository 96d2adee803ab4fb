#include "pfedeg/aggregation.hpp"

#include <algorithm>

#include "pfedeg/errors.hpp"

namespace pfedeg {

Matrix stack_global(const std::vector<Matrix>& padded) {
    if (padded.empty()) throw InvalidInputError("stack_global: no client matrices");
    const std::size_t N = padded[0].rows();
    const std::size_t m = padded[0].cols();
    for (const Matrix& e : padded)
        if (e.rows() != N || e.cols() != m)
            throw InvalidInputError("stack_global: inconsistent padded shapes");

    Matrix G(padded.size(), N * m);
    for (std::size_t c = 0; c < padded.size(); ++c)
        std::copy(padded[c].data(), padded[c].data() + N * m, G.row(c).begin());
    return G;
}

Matrix unstack_row(const Matrix& stacked, std::size_t row, std::size_t m) {
    if (m == 0 || stacked.cols() % m != 0)
        throw InvalidInputError("unstack_row: row length is not a multiple of m");
    Matrix out(stacked.cols() / m, m);
    std::copy(stacked.row(row).begin(), stacked.row(row).end(), out.data());
    return out;
}

Matrix norm_divide(const Matrix& X, const Matrix& Y, std::size_t m) {
    if (m == 0 || X.cols() % m != 0 || X.cols() / m != Y.cols() || X.rows() != Y.rows())
        throw InvalidInputError("norm_divide: shape mismatch");
    Matrix Z(X.rows(), X.cols());
    for (std::size_t i = 0; i < X.rows(); ++i)
        for (std::size_t j = 0; j < X.cols(); ++j) {
            const double denom = Y(i, j / m);
            Z(i, j) = denom == 0.0 ? 0.0 : X(i, j) / denom;
        }
    return Z;
}

Matrix aggregate(const Matrix& W, const Matrix& G, const Matrix& M, std::size_t m) {
    const std::size_t C = W.rows();
    if (W.cols() != C || G.rows() != C || M.rows() != C)
        throw InvalidInputError("aggregate: client-count mismatch");
    if (m == 0 || G.cols() % m != 0 || G.cols() / m != M.cols())
        throw InvalidInputError("aggregate: global matrix width does not match existence matrix");
    const std::size_t N = M.cols();

    // per-entity blocks; summation order matches the naive W x G product
    Matrix K(C, N * m);
    for (std::size_t i = 0; i < C; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            double denom = 0.0;
            for (std::size_t c = 0; c < C; ++c) denom += W(i, c) * M(c, j);
            double* out = K.row(i).data() + j * m;
            if (denom == 0.0) continue;  // 0/0 convention: stays zero
            for (std::size_t d = 0; d < m; ++d) {
                double num = 0.0;
                for (std::size_t c = 0; c < C; ++c) num += W(i, c) * G(c, j * m + d);
                out[d] = num / denom;
            }
        }
    return K;
}

Matrix residual_combine(const Matrix& K_raw, const Matrix& G, double p) {
    if (p < 0.0 || p > 1.0)
        throw ConfigError("residual coefficient p must lie in [0, 1], got " + std::to_string(p));
    if (!K_raw.same_shape(G)) throw InvalidInputError("residual_combine: shape mismatch");
    Matrix K(K_raw.rows(), K_raw.cols());
    const double* a = K_raw.data();
    const double* b = G.data();
    double* out = K.data();
    for (std::size_t i = 0; i < K.size(); ++i) out[i] = p * a[i] + (1.0 - p) * b[i];
    return K;
}

std::vector<Matrix> extract_all(const Matrix& K, const GlobalRegistry& registry, std::size_t m) {
    if (K.rows() != registry.client_count() ||
        K.cols() != registry.global_entity_count() * m)
        throw InvalidInputError("extract_all: shape mismatch");
    std::vector<Matrix> out;
    out.reserve(registry.client_count());
    for (std::size_t c = 0; c < registry.client_count(); ++c)
        out.push_back(extract_from_global(unstack_row(K, c, m), registry.local_to_global[c]));
    return out;
}

std::vector<Matrix> server_update_with_weights(const std::vector<Matrix>& entity_matrices,
                                               const GlobalRegistry& registry, const Matrix& W,
                                               double p) {
    if (entity_matrices.size() != registry.client_count())
        throw InvalidInputError("server_update: need one entity matrix per client");
    const std::size_t m = entity_matrices.empty() ? 0 : entity_matrices[0].cols();

    std::vector<Matrix> padded;
    padded.reserve(entity_matrices.size());
    for (std::size_t c = 0; c < entity_matrices.size(); ++c)
        padded.push_back(pad_to_global(entity_matrices[c], registry.local_to_global[c],
                                       registry.global_entity_count()));

    const Matrix G = stack_global(padded);
    const Matrix K_raw = aggregate(W, G, registry.existence_matrix(), m);
    const Matrix K = residual_combine(K_raw, G, p);
    return extract_all(K, registry, m);
}

std::vector<Matrix> server_update(const std::vector<Matrix>& entity_matrices,
                                  const GlobalRegistry& registry, WeightStrategy strategy,
                                  double p) {
    const Matrix W = compute_weights(strategy, registry, entity_matrices);
    return server_update_with_weights(entity_matrices, registry, W, p);
}

}  // namespace pfedeg
