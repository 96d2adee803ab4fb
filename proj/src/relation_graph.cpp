#include "pfedeg/relation_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pfedeg/errors.hpp"

namespace pfedeg {

WeightStrategy strategy_from_name(const std::string& name) {
    if (name == "ratio") return WeightStrategy::RatioBased;
    if (name == "embedding") return WeightStrategy::EmbeddingBased;
    if (name == "uniform") return WeightStrategy::Uniform;
    throw ConfigError("unknown weight strategy: " + name + " (expected ratio|embedding|uniform)");
}

const char* strategy_name(WeightStrategy strategy) {
    switch (strategy) {
        case WeightStrategy::RatioBased: return "ratio";
        case WeightStrategy::EmbeddingBased: return "embedding";
        case WeightStrategy::Uniform: return "uniform";
    }
    return "?";
}

Matrix weights_ratio(const GlobalRegistry& registry) {
    const std::size_t C = registry.client_count();
    Matrix raw(C, C);
    if (C == 1) {
        raw(0, 0) = 1.0;  // degenerate single-client federation
        return raw;
    }
    std::vector<std::size_t> sizes(C);
    for (std::size_t c = 0; c < C; ++c) sizes[c] = registry.local_to_global[c].size();

    for (std::size_t i = 0; i < C; ++i)
        for (std::size_t j = i + 1; j < C; ++j) {
            const std::size_t inter = registry.shared_count(i, j);
            const std::size_t uni = sizes[i] + sizes[j] - inter;
            const double w = uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
            raw(i, j) = w;
            raw(j, i) = w;
        }
    for (std::size_t i = 0; i < C; ++i) {
        double self = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < C; ++k)
            if (k != i) self = std::min(self, raw(i, k));
        raw(i, i) = self;
    }
    return raw;
}

double embedding_affinity(const Matrix& a, const Matrix& b, bool mean_instead_of_sum) {
    if (!a.same_shape(b))
        throw InvalidInputError("embedding_affinity: shared blocks must be row-aligned");
    if (a.rows() == 0) return 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < a.rows(); ++k) {
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (std::size_t d = 0; d < a.cols(); ++d) {
            dot += a(k, d) * b(k, d);
            na += a(k, d) * a(k, d);
            nb += b(k, d) * b(k, d);
        }
        const double denom = std::sqrt(na) * std::sqrt(nb);
        const double cosine = denom == 0.0 ? 0.0 : dot / denom;
        total += std::exp(cosine);
    }
    return mean_instead_of_sum ? total / static_cast<double>(a.rows()) : total;
}

Matrix weights_embedding(const GlobalRegistry& registry,
                         const std::vector<Matrix>& entity_matrices, bool mean_instead_of_sum) {
    const std::size_t C = registry.client_count();
    if (entity_matrices.size() != C)
        throw InvalidInputError("weights_embedding: need one entity matrix per client");

    Matrix raw(C, C);
    for (std::size_t i = 0; i < C; ++i) raw(i, i) = std::exp(-1.0);
    if (C == 1) return raw;

    // local row index of each global entity, per client
    std::vector<std::vector<int>> global_to_local(C);
    for (std::size_t c = 0; c < C; ++c) {
        global_to_local[c].assign(registry.global_entity_count(), -1);
        const auto& perm = registry.local_to_global[c];
        for (std::size_t l = 0; l < perm.size(); ++l) global_to_local[c][perm[l]] = static_cast<int>(l);
    }

    for (std::size_t i = 0; i < C; ++i)
        for (std::size_t j = i + 1; j < C; ++j) {
            const std::vector<int> shared = registry.shared_globals(i, j);
            if (shared.empty()) continue;
            const std::size_t m = entity_matrices[i].cols();
            Matrix block_i(shared.size(), m), block_j(shared.size(), m);
            for (std::size_t k = 0; k < shared.size(); ++k) {
                const auto src_i = entity_matrices[i].row(global_to_local[i][shared[k]]);
                const auto src_j = entity_matrices[j].row(global_to_local[j][shared[k]]);
                std::copy(src_i.begin(), src_i.end(), block_i.row(k).begin());
                std::copy(src_j.begin(), src_j.end(), block_j.row(k).begin());
            }
            const double affinity = embedding_affinity(block_i, block_j, mean_instead_of_sum);
            raw(i, j) = affinity;
            raw(j, i) = affinity;
        }
    return raw;
}

Matrix weights_uniform(std::size_t client_count) {
    if (client_count == 0) throw InvalidInputError("weights_uniform: need at least one client");
    return Matrix(client_count, client_count, 1.0 / static_cast<double>(client_count));
}

void floor_self_weights(Matrix& raw, double epsilon) {
    for (std::size_t i = 0; i < raw.rows(); ++i) raw(i, i) = std::max(raw(i, i), epsilon);
}

Matrix scale_rows(const Matrix& raw) {
    Matrix scaled(raw.rows(), raw.cols());
    for (std::size_t i = 0; i < raw.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < raw.cols(); ++j) {
            if (raw(i, j) < 0.0) throw InvalidInputError("scale_rows: negative weight");
            sum += raw(i, j);
        }
        if (sum == 0.0) {
            scaled(i, i) = 1.0;  // isolated client: keep its own embedding
            continue;
        }
        for (std::size_t j = 0; j < raw.cols(); ++j) scaled(i, j) = raw(i, j) / sum;
    }
    return scaled;
}

Matrix compute_weights(WeightStrategy strategy, const GlobalRegistry& registry,
                       const std::vector<Matrix>& entity_matrices) {
    switch (strategy) {
        case WeightStrategy::Uniform: return weights_uniform(registry.client_count());
        case WeightStrategy::RatioBased: {
            Matrix raw = weights_ratio(registry);
            floor_self_weights(raw);
            return scale_rows(raw);
        }
        case WeightStrategy::EmbeddingBased:
            return scale_rows(weights_embedding(registry, entity_matrices));
    }
    throw ConfigError("bad weight strategy");
}

}  // namespace pfedeg
