#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "pfedeg/dataset_io.hpp"
#include "pfedeg/kg.hpp"
#include "pfedeg/kge.hpp"
#include "pfedeg/rng.hpp"

namespace pfedeg::testing {

/// ClientKG from inline vocab + train triples given as index triples.
inline ClientKG make_kg(int client_id, std::vector<std::string> entities,
                        std::vector<std::string> relations,
                        const std::vector<std::array<int, 3>>& train_triples = {},
                        const std::vector<std::array<int, 3>>& valid_triples = {},
                        const std::vector<std::array<int, 3>>& test_triples = {}) {
    ClientKG kg;
    kg.client_id = client_id;
    kg.entities = std::move(entities);
    kg.relations = std::move(relations);
    auto expand = [&](const std::vector<std::array<int, 3>>& idx, std::vector<Triple>& out) {
        for (const auto& [h, r, t] : idx)
            out.push_back({kg.entities[h], kg.relations[r], kg.entities[t]});
    };
    expand(train_triples, kg.train);
    expand(valid_triples, kg.valid);
    expand(test_triples, kg.test);
    kg.finalize();
    return kg;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-scale, scale);
    return m;
}

inline EmbeddingStore random_store(ScorerKind kind, int dim, std::size_t n_entities,
                                   std::size_t n_relations, Rng& rng, double gamma = 10.0) {
    return make_store(kind, dim, n_entities, n_relations, gamma, rng);
}

/// Central finite difference of the full loss (KGE term + prox term) over
/// every parameter, compared against the analytic gradient. Returns the worst
/// relative error; components below `floor` on both sides are compared
/// absolutely. The oracle re-evaluates the loss itself, so it is independent
/// of the gradient code path.
struct FdReport {
    double worst_rel_error = 0.0;
    std::size_t checked = 0;
};

inline FdReport finite_difference_check(const EmbeddingStore& store, const NegativeBatch& batch,
                                        const Matrix& supplementary, double beta,
                                        double step = 1e-5, double floor = 1e-7) {
    EmbeddingStore work = store;
    GradientBuffer analytic(work);
    loss_and_grad(work, batch, supplementary, beta, analytic);

    auto loss_at = [&]() {
        GradientBuffer scratch(work);
        return loss_and_grad(work, batch, supplementary, beta, scratch);
    };

    FdReport report;
    auto sweep = [&](Matrix& params, const Matrix& grad) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double saved = params.data()[i];
            params.data()[i] = saved + step;
            const double plus = loss_at();
            params.data()[i] = saved - step;
            const double minus = loss_at();
            params.data()[i] = saved;
            const double fd = (plus - minus) / (2.0 * step);
            const double an = grad.data()[i];
            const double denom = std::max(std::fabs(fd), std::fabs(an));
            const double err = denom < floor ? std::fabs(fd - an) : std::fabs(fd - an) / denom;
            report.worst_rel_error = std::max(report.worst_rel_error, err);
            ++report.checked;
        }
    };
    sweep(work.entities, analytic.entities);
    sweep(work.relations, analytic.relations);
    return report;
}

/// Random gradient-check instance kept away from the |.| kinks so the
/// central difference is valid: TransE difference coordinates and RotatE
/// moduli are resampled until they clear `margin`.
struct FdInstance {
    EmbeddingStore store;
    NegativeBatch batch;
    Matrix supplementary;
};

inline FdInstance random_fd_instance(ScorerKind kind, Rng& rng, int dim = 8,
                                     std::size_t n_entities = 6, std::size_t n_relations = 3,
                                     int negatives = 6, double gamma = 10.0,
                                     double margin = 1e-3) {
    for (;;) {
        FdInstance inst;
        inst.store = random_store(kind, dim, n_entities, n_relations, rng, gamma);
        inst.batch.alpha = 1.0;
        inst.batch.gamma = gamma;
        inst.batch.positive = {static_cast<int>(rng.below(n_entities)),
                               static_cast<int>(rng.below(n_relations)),
                               static_cast<int>(rng.below(n_entities))};
        inst.batch.negatives.clear();
        for (int i = 0; i < negatives; ++i)
            inst.batch.negatives.push_back({static_cast<int>(rng.below(n_entities)), false});

        inst.supplementary = Matrix::zeros_like(inst.store.entities);
        for (std::size_t i = 0; i < inst.supplementary.size(); ++i)
            inst.supplementary.data()[i] =
                inst.store.entities.data()[i] + rng.uniform(-0.5, 0.5);

        if (kind == ScorerKind::ComplEx) return inst;

        // reject instances with a triple sitting within `margin` of a kink
        auto clears_kinks = [&](int h, int r, int t) {
            const auto hv = inst.store.entities.row(h);
            const auto rv = inst.store.relations.row(r);
            const auto tv = inst.store.entities.row(t);
            if (kind == ScorerKind::TransE) {
                for (std::size_t d = 0; d < hv.size(); ++d)
                    if (std::fabs(hv[d] + rv[d] - tv[d]) < margin) return false;
            } else {
                for (std::size_t k = 0; k < rv.size(); ++k) {
                    const double c = std::cos(rv[k]), s = std::sin(rv[k]);
                    const double re = hv[2 * k] * c - hv[2 * k + 1] * s - tv[2 * k];
                    const double im = hv[2 * k] * s + hv[2 * k + 1] * c - tv[2 * k + 1];
                    if (std::sqrt(re * re + im * im) < margin) return false;
                }
            }
            return true;
        };
        bool ok = clears_kinks(inst.batch.positive.head, inst.batch.positive.relation,
                               inst.batch.positive.tail);
        for (const NegativeSample& neg : inst.batch.negatives)
            ok = ok && clears_kinks(inst.batch.positive.head, inst.batch.positive.relation,
                                    neg.entity);
        if (ok) return inst;
    }
}

/// Independent aggregation oracle: per client and entity, the plain double
/// loop sum_c W[i][c] E_c[j] / sum_{c owns j} W[i][c] over padded client
/// matrices. No matrix products involved.
inline Matrix aggregate_oracle(const Matrix& W, const std::vector<Matrix>& padded,
                               const std::vector<std::vector<std::uint8_t>>& owns,
                               std::size_t m) {
    const std::size_t C = padded.size();
    const std::size_t N = padded[0].rows();
    Matrix K(C, N * m);
    for (std::size_t i = 0; i < C; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            double denom = 0.0;
            for (std::size_t c = 0; c < C; ++c)
                if (owns[c][j]) denom += W(i, c);
            for (std::size_t d = 0; d < m; ++d) {
                double num = 0.0;
                for (std::size_t c = 0; c < C; ++c) num += W(i, c) * padded[c](j, d);
                K(i, j * m + d) = denom == 0.0 ? 0.0 : num / denom;
            }
        }
    return K;
}

/// Random aggregation instance: random ownership with every entity owned at
/// least once, random row-stochastic W.
struct AggregationInstance {
    std::size_t C, N, m;
    Matrix W;
    std::vector<std::vector<std::uint8_t>> owns;
    std::vector<Matrix> padded;
    Matrix M;
};

inline AggregationInstance random_aggregation_instance(Rng& rng) {
    AggregationInstance inst;
    inst.C = 1 + rng.below(4);
    inst.N = 1 + rng.below(20);
    inst.m = 1 + rng.below(8);

    inst.owns.assign(inst.C, std::vector<std::uint8_t>(inst.N, 0));
    for (std::size_t j = 0; j < inst.N; ++j) {
        for (std::size_t c = 0; c < inst.C; ++c) inst.owns[c][j] = rng.next_double() < 0.6;
        inst.owns[rng.below(inst.C)][j] = 1;
    }

    inst.W = Matrix(inst.C, inst.C);
    for (std::size_t i = 0; i < inst.C; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < inst.C; ++j) {
            inst.W(i, j) = rng.uniform(0.01, 1.0);
            sum += inst.W(i, j);
        }
        for (std::size_t j = 0; j < inst.C; ++j) inst.W(i, j) /= sum;
    }

    inst.M = Matrix(inst.C, inst.N);
    inst.padded.assign(inst.C, Matrix(inst.N, inst.m));
    for (std::size_t c = 0; c < inst.C; ++c)
        for (std::size_t j = 0; j < inst.N; ++j) {
            inst.M(c, j) = inst.owns[c][j];
            if (inst.owns[c][j])
                for (std::size_t d = 0; d < inst.m; ++d)
                    inst.padded[c](j, d) = rng.uniform(-2.0, 2.0);
        }
    return inst;
}

}  // namespace pfedeg::testing
