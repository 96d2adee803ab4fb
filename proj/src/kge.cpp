#include "pfedeg/kge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pfedeg/errors.hpp"

namespace pfedeg {

namespace {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// log(sigma(x)) = -softplus(-x), stable on both tails.
double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

/// log(sigma(x)) and sigma(-x) from a single exp; rounds exactly like the
/// two separate calls above.
struct SigPair {
    double log_sig;
    double sig_neg;
};

SigPair log_sigmoid_pair(double x) {
    if (x >= 0.0) {
        const double t = std::exp(-x);
        return {-std::log1p(t), t / (1.0 + t)};
    }
    const double t = std::exp(x);
    return {x - std::log1p(t), 1.0 / (1.0 + t)};
}

double score_transe(std::span<const double> h, std::span<const double> r,
                    std::span<const double> t) {
    double acc = 0.0;
    for (std::size_t d = 0; d < h.size(); ++d) acc += std::fabs(h[d] + r[d] - t[d]);
    return -acc;
}

void backward_transe(std::span<const double> h, std::span<const double> r,
                     std::span<const double> t, double coef, std::span<double> gh,
                     std::span<double> gr, std::span<double> gt) {
    for (std::size_t d = 0; d < h.size(); ++d) {
        const double diff = h[d] + r[d] - t[d];
        const double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
        gh[d] += coef * -sgn;
        gr[d] += coef * -sgn;
        gt[d] += coef * sgn;
    }
}

double score_rotate(std::span<const double> h, std::span<const double> theta,
                    std::span<const double> t) {
    double acc = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        const double c = std::cos(theta[k]);
        const double s = std::sin(theta[k]);
        const double re = h[2 * k] * c - h[2 * k + 1] * s - t[2 * k];
        const double im = h[2 * k] * s + h[2 * k + 1] * c - t[2 * k + 1];
        acc += std::sqrt(re * re + im * im);
    }
    return -acc;
}

void backward_rotate(std::span<const double> h, std::span<const double> theta,
                     std::span<const double> t, double coef, std::span<double> gh,
                     std::span<double> gtheta, std::span<double> gt) {
    for (std::size_t k = 0; k < theta.size(); ++k) {
        const double c = std::cos(theta[k]);
        const double s = std::sin(theta[k]);
        const double rot_re = h[2 * k] * c - h[2 * k + 1] * s;
        const double rot_im = h[2 * k] * s + h[2 * k + 1] * c;
        const double re = rot_re - t[2 * k];
        const double im = rot_im - t[2 * k + 1];
        const double mod = std::sqrt(re * re + im * im);
        if (mod == 0.0) continue;  // subgradient 0 at the kink
        const double inv = 1.0 / mod;
        gh[2 * k] += coef * -(re * c + im * s) * inv;
        gh[2 * k + 1] += coef * -(-re * s + im * c) * inv;
        gt[2 * k] += coef * re * inv;
        gt[2 * k + 1] += coef * im * inv;
        gtheta[k] += coef * (re * rot_im - im * rot_re) * inv;
    }
}

double score_complex(std::span<const double> h, std::span<const double> r,
                     std::span<const double> t) {
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < h.size(); k += 2) {
        const double a = h[k], b = h[k + 1];
        const double c = r[k], d = r[k + 1];
        const double e = t[k], f = t[k + 1];
        acc += (a * c - b * d) * e + (a * d + b * c) * f;
    }
    return acc;
}

void backward_complex(std::span<const double> h, std::span<const double> r,
                      std::span<const double> t, double coef, std::span<double> gh,
                      std::span<double> gr, std::span<double> gt) {
    for (std::size_t k = 0; k + 1 < h.size(); k += 2) {
        const double a = h[k], b = h[k + 1];
        const double c = r[k], d = r[k + 1];
        const double e = t[k], f = t[k + 1];
        gh[k] += coef * (c * e + d * f);
        gh[k + 1] += coef * (-d * e + c * f);
        gr[k] += coef * (a * e + b * f);
        gr[k + 1] += coef * (-b * e + a * f);
        gt[k] += coef * (a * c - b * d);
        gt[k + 1] += coef * (a * d + b * c);
    }
}

}  // namespace

const char* scorer_name(ScorerKind kind) {
    switch (kind) {
        case ScorerKind::TransE: return "transe";
        case ScorerKind::RotatE: return "rotate";
        case ScorerKind::ComplEx: return "complex";
    }
    return "?";
}

ScorerKind scorer_from_name(const std::string& name) {
    if (name == "transe") return ScorerKind::TransE;
    if (name == "rotate") return ScorerKind::RotatE;
    if (name == "complex") return ScorerKind::ComplEx;
    throw ConfigError("unknown scorer: " + name + " (expected transe|rotate|complex)");
}

NegativeSlot negative_slot_from_name(const std::string& name) {
    if (name == "tail") return NegativeSlot::Tail;
    if (name == "head") return NegativeSlot::Head;
    if (name == "both") return NegativeSlot::Both;
    throw ConfigError("unknown negative slot: " + name + " (expected tail|head|both)");
}

const char* negative_slot_name(NegativeSlot slot) {
    switch (slot) {
        case NegativeSlot::Tail: return "tail";
        case NegativeSlot::Head: return "head";
        case NegativeSlot::Both: return "both";
    }
    return "?";
}

int EmbeddingStore::relation_dim(ScorerKind kind, int m) {
    return kind == ScorerKind::RotatE ? m / 2 : m;
}

EmbeddingStore make_store(ScorerKind kind, int m, std::size_t n_entities,
                          std::size_t n_relations, double gamma, Rng& rng) {
    if (m < 1) throw ConfigError("embedding dimension must be >= 1");
    if ((kind == ScorerKind::RotatE || kind == ScorerKind::ComplEx) && m % 2 != 0)
        throw ConfigError(std::string(scorer_name(kind)) +
                          " needs an even embedding dimension, got " + std::to_string(m));

    EmbeddingStore store;
    store.scorer = kind;
    store.dim = m;
    store.entities = Matrix(n_entities, m);
    store.relations = Matrix(n_relations, EmbeddingStore::relation_dim(kind, m));

    const double range = (gamma + 2.0) / m;
    for (std::size_t i = 0; i < store.entities.size(); ++i)
        store.entities.data()[i] = rng.uniform(-range, range);
    if (kind == ScorerKind::RotatE) {
        for (std::size_t i = 0; i < store.relations.size(); ++i)
            store.relations.data()[i] = rng.uniform(-std::numbers::pi, std::numbers::pi);
    } else {
        for (std::size_t i = 0; i < store.relations.size(); ++i)
            store.relations.data()[i] = rng.uniform(-range, range);
    }
    return store;
}

double score_vectors(ScorerKind kind, std::span<const double> h, std::span<const double> r,
                     std::span<const double> t) {
    if (h.size() != t.size()) throw InvalidInputError("score: head/tail dimension mismatch");
    switch (kind) {
        case ScorerKind::TransE:
            if (r.size() != h.size()) throw InvalidInputError("score: relation dimension mismatch");
            return score_transe(h, r, t);
        case ScorerKind::RotatE:
            if (r.size() * 2 != h.size())
                throw InvalidInputError("score: RotatE expects m/2 phases");
            return score_rotate(h, r, t);
        case ScorerKind::ComplEx:
            if (r.size() != h.size()) throw InvalidInputError("score: relation dimension mismatch");
            return score_complex(h, r, t);
    }
    throw InvalidInputError("score: bad scorer");
}

double score(const EmbeddingStore& store, int h, int r, int t) {
    return score_vectors(store.scorer, store.entities.row(h), store.relations.row(r),
                         store.entities.row(t));
}

namespace {

/// Uniform draw from [0, n) excluding a sorted blocked list. Rejection first,
/// direct complement indexing when the blocked set is dense.
int draw_excluding(const std::vector<int>& blocked, std::size_t n, Rng& rng) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        const int pick = static_cast<int>(rng.below(n));
        if (!std::binary_search(blocked.begin(), blocked.end(), pick)) return pick;
    }
    int candidate = static_cast<int>(rng.below(n - blocked.size()));
    for (int b : blocked) {
        if (b <= candidate) ++candidate;
        else break;
    }
    return candidate;
}

[[noreturn]] void throw_sampling_impossible(const ClientKG& kg, bool head_slot) {
    throw InvalidInputError(
        "negative sampling impossible for client " + std::to_string(kg.client_id) +
        ": every entity already forms a known triple in the " +
        (head_slot ? std::string("head") : std::string("tail")) + " slot");
}

}  // namespace

NegativeBatch sample_negatives(const ClientKG& kg, const IndexedTriple& positive, int k,
                               double alpha, double gamma, Rng& rng, NegativeSlot slot) {
    if (k < 1) throw InvalidInputError("sample_negatives: k must be >= 1");
    const std::size_t n = kg.entity_count();

    NegativeBatch batch;
    batch.positive = positive;
    batch.alpha = alpha;
    batch.gamma = gamma;
    batch.negatives.reserve(k);

    for (int i = 0; i < k; ++i) {
        const bool head_slot =
            slot == NegativeSlot::Head || (slot == NegativeSlot::Both && (rng.next_u64() & 1));
        const std::vector<int>& blocked =
            head_slot ? kg.train_heads(positive.relation, positive.tail)
                      : kg.train_tails(positive.head, positive.relation);
        if (blocked.size() >= n) throw_sampling_impossible(kg, head_slot);
        batch.negatives.push_back({draw_excluding(blocked, n, rng), head_slot});
    }
    return batch;
}

namespace {

void softmax_into(std::span<const double> scores, double alpha, std::span<double> out) {
    if (scores.empty()) return;
    double best = scores[0];
    for (double s : scores) best = std::max(best, s);
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = std::exp(alpha * (scores[i] - best));
        total += out[i];
    }
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] /= total;
}

}  // namespace

std::vector<double> self_adversarial_weights(std::span<const double> scores, double alpha) {
    std::vector<double> weights(scores.size());
    softmax_into(scores, alpha, weights);
    return weights;
}

double kge_loss_grad(const EmbeddingStore& store, const NegativeBatch& batch,
                     GradientBuffer& grad) {
    const IndexedTriple& pos = batch.positive;
    const auto h = store.entities.row(pos.head);
    const auto r = store.relations.row(pos.relation);
    const auto t = store.entities.row(pos.tail);

    auto backward = [&](int hi, int ri, int ti, double coef) {
        const auto hv = store.entities.row(hi);
        const auto rv = store.relations.row(ri);
        const auto tv = store.entities.row(ti);
        auto gh = grad.entities.row(hi);
        auto gr = grad.relations.row(ri);
        auto gt = grad.entities.row(ti);
        switch (store.scorer) {
            case ScorerKind::TransE: backward_transe(hv, rv, tv, coef, gh, gr, gt); break;
            case ScorerKind::RotatE: backward_rotate(hv, rv, tv, coef, gh, gr, gt); break;
            case ScorerKind::ComplEx: backward_complex(hv, rv, tv, coef, gh, gr, gt); break;
        }
    };

    const double s_pos = score_vectors(store.scorer, h, r, t);
    const SigPair pos_sig = log_sigmoid_pair(batch.gamma + s_pos);
    double loss = -pos_sig.log_sig;
    backward(pos.head, pos.relation, pos.tail, -pos_sig.sig_neg);

    const std::size_t k = batch.negatives.size();
    if (k == 0) return loss;

    std::vector<double> s_neg(k);
    for (std::size_t i = 0; i < k; ++i) {
        const NegativeSample& neg = batch.negatives[i];
        const int hi = neg.head_slot ? neg.entity : pos.head;
        const int ti = neg.head_slot ? pos.tail : neg.entity;
        s_neg[i] = score(store, hi, pos.relation, ti);
    }
    const std::vector<double> p = self_adversarial_weights(s_neg, batch.alpha);

    std::vector<double> logsig(k), sig(k);
    double mean_logsig = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const SigPair pair = log_sigmoid_pair(-s_neg[i] - batch.gamma);
        logsig[i] = pair.log_sig;
        sig[i] = pair.sig_neg;  // sigma(s_i + gamma)
        mean_logsig += p[i] * logsig[i];
        loss -= p[i] * logsig[i];
    }
    for (std::size_t i = 0; i < k; ++i) {
        const NegativeSample& neg = batch.negatives[i];
        const int hi = neg.head_slot ? neg.entity : pos.head;
        const int ti = neg.head_slot ? pos.tail : neg.entity;
        // d/ds of -sum_j p_j(s) log sigma(-s_j - gamma), softmax included
        const double coef = -batch.alpha * p[i] * (logsig[i] - mean_logsig) + p[i] * sig[i];
        backward(hi, pos.relation, ti, coef);
    }
    return loss;
}

namespace detail {

double tail_batch_loss_grad(const EmbeddingStore& store, const ClientKG& kg,
                            const IndexedTriple& pos, int k, double alpha, double gamma,
                            Rng& rng, GradientBuffer& grad, TailScratch& ws) {
    const std::size_t n = kg.entity_count();
    const std::vector<int>& blocked = kg.train_tails(pos.head, pos.relation);
    if (blocked.size() >= n) throw_sampling_impossible(kg, false);
    ws.negatives.resize(k);
    for (int i = 0; i < k; ++i) ws.negatives[i] = draw_excluding(blocked, n, rng);

    const std::size_t m = static_cast<std::size_t>(store.dim);
    const auto h = store.entities.row(pos.head);
    const auto r = store.relations.row(pos.relation);
    auto gh = grad.entities.row(pos.head);
    auto gr = grad.relations.row(pos.relation);

    const double s_pos = score(store, pos.head, pos.relation, pos.tail);
    const SigPair pos_sig = log_sigmoid_pair(gamma + s_pos);
    double loss = -pos_sig.log_sig;
    {
        const double coef = -pos_sig.sig_neg;
        const auto t = store.entities.row(pos.tail);
        auto gt = grad.entities.row(pos.tail);
        switch (store.scorer) {
            case ScorerKind::TransE: backward_transe(h, r, t, coef, gh, gr, gt); break;
            case ScorerKind::RotatE: backward_rotate(h, r, t, coef, gh, gr, gt); break;
            case ScorerKind::ComplEx: backward_complex(h, r, t, coef, gh, gr, gt); break;
        }
    }

    ws.scores.resize(k);
    ws.weights.resize(k);
    ws.logsig.resize(k);
    if (ws.diffs.rows() != static_cast<std::size_t>(k) || ws.diffs.cols() != m)
        ws.diffs = Matrix(k, m);

    // per-positive caches: the head/relation half of every negative's score
    switch (store.scorer) {
        case ScorerKind::TransE: {
            ws.cache_a.resize(m);  // h + r
            for (std::size_t d = 0; d < m; ++d) ws.cache_a[d] = h[d] + r[d];
            for (int i = 0; i < k; ++i) {
                const auto t = store.entities.row(ws.negatives[i]);
                auto diff = ws.diffs.row(i);
                double acc = 0.0;
                for (std::size_t d = 0; d < m; ++d) {
                    diff[d] = ws.cache_a[d] - t[d];
                    acc += std::fabs(diff[d]);
                }
                ws.scores[i] = -acc;
            }
            break;
        }
        case ScorerKind::RotatE: {
            ws.cache_a.resize(m);  // rotated head
            ws.cache_b.resize(m);  // interleaved cos/sin of the phases
            for (std::size_t c = 0; c < m / 2; ++c) {
                ws.cache_b[2 * c] = std::cos(r[c]);
                ws.cache_b[2 * c + 1] = std::sin(r[c]);
                ws.cache_a[2 * c] = h[2 * c] * ws.cache_b[2 * c] -
                                    h[2 * c + 1] * ws.cache_b[2 * c + 1];
                ws.cache_a[2 * c + 1] = h[2 * c] * ws.cache_b[2 * c + 1] +
                                        h[2 * c + 1] * ws.cache_b[2 * c];
            }
            for (int i = 0; i < k; ++i) {
                const auto t = store.entities.row(ws.negatives[i]);
                auto diff = ws.diffs.row(i);
                double acc = 0.0;
                for (std::size_t c = 0; c < m / 2; ++c) {
                    diff[2 * c] = ws.cache_a[2 * c] - t[2 * c];
                    diff[2 * c + 1] = ws.cache_a[2 * c + 1] - t[2 * c + 1];
                    acc += std::sqrt(diff[2 * c] * diff[2 * c] +
                                     diff[2 * c + 1] * diff[2 * c + 1]);
                }
                ws.scores[i] = -acc;
            }
            break;
        }
        case ScorerKind::ComplEx: {
            ws.cache_a.resize(m);  // h * r in complex coordinates
            for (std::size_t c = 0; c < m / 2; ++c) {
                ws.cache_a[2 * c] = h[2 * c] * r[2 * c] - h[2 * c + 1] * r[2 * c + 1];
                ws.cache_a[2 * c + 1] = h[2 * c] * r[2 * c + 1] + h[2 * c + 1] * r[2 * c];
            }
            for (int i = 0; i < k; ++i) {
                const auto t = store.entities.row(ws.negatives[i]);
                double acc = 0.0;
                for (std::size_t c = 0; c < m / 2; ++c)
                    acc += ws.cache_a[2 * c] * t[2 * c] + ws.cache_a[2 * c + 1] * t[2 * c + 1];
                ws.scores[i] = acc;
            }
            break;
        }
    }

    softmax_into(ws.scores, alpha, ws.weights);
    ws.sig.resize(k);
    double mean_logsig = 0.0;
    for (int i = 0; i < k; ++i) {
        const SigPair pair = log_sigmoid_pair(-ws.scores[i] - gamma);
        ws.logsig[i] = pair.log_sig;
        ws.sig[i] = pair.sig_neg;
        mean_logsig += ws.weights[i] * ws.logsig[i];
        loss -= ws.weights[i] * ws.logsig[i];
    }

    for (int i = 0; i < k; ++i) {
        const double coef = -alpha * ws.weights[i] * (ws.logsig[i] - mean_logsig) +
                            ws.weights[i] * ws.sig[i];
        auto gt = grad.entities.row(ws.negatives[i]);
        const auto diff = ws.diffs.row(i);
        switch (store.scorer) {
            case ScorerKind::TransE:
                for (std::size_t d = 0; d < m; ++d) {
                    const double sgn = diff[d] > 0.0 ? 1.0 : (diff[d] < 0.0 ? -1.0 : 0.0);
                    gh[d] += coef * -sgn;
                    gr[d] += coef * -sgn;
                    gt[d] += coef * sgn;
                }
                break;
            case ScorerKind::RotatE:
                for (std::size_t c = 0; c < m / 2; ++c) {
                    const double re = diff[2 * c], im = diff[2 * c + 1];
                    const double mod = std::sqrt(re * re + im * im);
                    if (mod == 0.0) continue;
                    const double inv = 1.0 / mod;
                    const double cosv = ws.cache_b[2 * c], sinv = ws.cache_b[2 * c + 1];
                    gh[2 * c] += coef * -(re * cosv + im * sinv) * inv;
                    gh[2 * c + 1] += coef * -(-re * sinv + im * cosv) * inv;
                    gt[2 * c] += coef * re * inv;
                    gt[2 * c + 1] += coef * im * inv;
                    gr[c] += coef * (re * ws.cache_a[2 * c + 1] - im * ws.cache_a[2 * c]) * inv;
                }
                break;
            case ScorerKind::ComplEx: {
                const auto t = store.entities.row(ws.negatives[i]);
                backward_complex(h, r, t, coef, gh, gr, gt);
                break;
            }
        }
    }
    return loss;
}

}  // namespace detail

double prox_loss_grad(const EmbeddingStore& store, const Matrix& supplementary, double beta,
                      GradientBuffer& grad) {
    if (beta < 0.0) throw ConfigError("prox coefficient beta must be >= 0");
    if (!store.entities.same_shape(supplementary))
        throw InvalidInputError("supplementary knowledge shape does not match entity matrix");
    const double distance = frobenius_distance(store.entities, supplementary);
    if (distance > 0.0 && beta > 0.0) {
        const double scale = beta / distance;
        const double* e = store.entities.data();
        const double* s = supplementary.data();
        double* g = grad.entities.data();
        for (std::size_t i = 0; i < store.entities.size(); ++i) g[i] += scale * (e[i] - s[i]);
    }
    return beta * distance;
}

double loss_and_grad(const EmbeddingStore& store, const NegativeBatch& batch,
                     const Matrix& supplementary, double beta, GradientBuffer& grad) {
    return kge_loss_grad(store, batch, grad) +
           prox_loss_grad(store, supplementary, beta, grad);
}

void adam_step(EmbeddingStore& store, AdamState& state, const GradientBuffer& grad) {
    if (!grad.entities.same_shape(store.entities) || !grad.relations.same_shape(store.relations))
        throw InvalidInputError("adam_step: gradient shapes do not match the store");

    auto check_finite = [](const Matrix& g, const char* name) {
        const double* p = g.data();
        for (std::size_t i = 0; i < g.size(); ++i)
            if (!std::isfinite(p[i]))
                throw NumericError("non-finite gradient at " + std::string(name) + "[" +
                                   std::to_string(i / g.cols()) + "][" +
                                   std::to_string(i % g.cols()) + "]");
    };
    check_finite(grad.entities, "entity");
    check_finite(grad.relations, "relation");

    ++state.step;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

    auto update = [&](Matrix& params, Matrix& m, Matrix& v, const Matrix& g) {
        double* pp = params.data();
        double* mp = m.data();
        double* vp = v.data();
        const double* gp = g.data();
        for (std::size_t i = 0; i < params.size(); ++i) {
            mp[i] = state.beta1 * mp[i] + (1.0 - state.beta1) * gp[i];
            vp[i] = state.beta2 * vp[i] + (1.0 - state.beta2) * gp[i] * gp[i];
            pp[i] -= state.learning_rate * (mp[i] / bc1) / (std::sqrt(vp[i] / bc2) + state.epsilon);
        }
    };
    update(store.entities, state.m_entities, state.v_entities, grad.entities);
    update(store.relations, state.m_relations, state.v_relations, grad.relations);
}

ClientUpdateResult client_update(EmbeddingStore& store, const ClientKG& kg,
                                 const std::optional<Matrix>& supplementary,
                                 const LocalTrainConfig& config, Rng& rng) {
    if (config.beta < 0.0) throw ConfigError("prox coefficient beta must be >= 0");
    const auto& train = kg.indexed_train();
    if (train.empty()) return {.skipped = true};

    if (supplementary && !store.entities.same_shape(*supplementary))
        throw InvalidInputError("supplementary knowledge shape does not match entity matrix");
    if (supplementary && config.init_from_supplementary) store.entities = *supplementary;

    AdamState adam(store, config.learning_rate);
    GradientBuffer grad(store);
    detail::TailScratch scratch;
    ClientUpdateResult result;

    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            grad.reset();
            for (std::size_t i = start; i < stop; ++i) {
                if (config.slot == NegativeSlot::Tail) {
                    epoch_loss += detail::tail_batch_loss_grad(
                        store, kg, train[order[i]], config.negatives, config.alpha,
                        config.gamma, rng, grad, scratch);
                } else {
                    const NegativeBatch batch =
                        sample_negatives(kg, train[order[i]], config.negatives, config.alpha,
                                         config.gamma, rng, config.slot);
                    epoch_loss += kge_loss_grad(store, batch, grad);
                }
            }
            if (config.use_prox && supplementary)
                epoch_loss += prox_loss_grad(store, *supplementary, config.beta, grad);
            adam_step(store, adam, grad);
            ++result.steps;
        }
        const double mean = epoch_loss / static_cast<double>(train.size());
        if (epoch == 0) result.first_epoch_loss = mean;
        result.last_epoch_loss = mean;
    }
    return result;
}

}  // namespace pfedeg
