#include "pfedeg/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "pfedeg/errors.hpp"

namespace pfedeg {

std::size_t rank_from_scores(std::span<const double> scores, std::size_t true_index,
                             std::span<const std::uint8_t> filtered_out) {
    if (true_index >= scores.size()) throw EvalError("rank_from_scores: true index out of range");
    const double truth = scores[true_index];
    std::size_t higher = 0, ties = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (i == true_index || (!filtered_out.empty() && filtered_out[i])) continue;
        if (scores[i] > truth) ++higher;
        else if (scores[i] == truth) ++ties;
    }
    // ties count half above the truth, rounded up: deterministic and unbiased
    return 1 + higher + (ties + 1) / 2;
}

namespace {

RankResult rank_slot(const EmbeddingStore& store, const ClientKG& kg, const IndexedTriple& query,
                     const EvalOptions& options, bool head_slot) {
    const std::size_t n = kg.entity_count();
    const int truth = head_slot ? query.head : query.tail;
    if (truth < 0 || static_cast<std::size_t>(truth) >= n)
        throw EvalError("rank: true " + std::string(head_slot ? "head" : "tail") +
                        " is not a local candidate for client " + std::to_string(kg.client_id));

    std::vector<double> scores(n);
    for (std::size_t cand = 0; cand < n; ++cand)
        scores[cand] = head_slot
                           ? score(store, static_cast<int>(cand), query.relation, query.tail)
                           : score(store, query.head, query.relation, static_cast<int>(cand));

    std::vector<std::uint8_t> filtered_out;
    if (options.filtered) {
        filtered_out.assign(n, 0);
        const std::vector<int>& known = head_slot ? kg.known_heads(query.relation, query.tail)
                                                  : kg.known_tails(query.head, query.relation);
        for (int e : known)
            if (e != truth) filtered_out[e] = 1;
    }

    RankResult result;
    result.query = query;
    result.candidate_count = n;
    result.rank = rank_from_scores(scores, static_cast<std::size_t>(truth), filtered_out);
    return result;
}

}  // namespace

RankResult rank_tail(const EmbeddingStore& store, const ClientKG& kg, const IndexedTriple& query,
                     const EvalOptions& options) {
    return rank_slot(store, kg, query, options, false);
}

RankResult rank_head(const EmbeddingStore& store, const ClientKG& kg, const IndexedTriple& query,
                     const EvalOptions& options) {
    return rank_slot(store, kg, query, options, true);
}

MetricReport metrics(std::span<const std::size_t> ranks) {
    if (ranks.empty()) throw EvalError("metrics: empty rank list");
    MetricReport report;
    report.triple_count = ranks.size();
    for (std::size_t r : ranks) {
        if (r < 1) throw EvalError("metrics: ranks are 1-based");
        report.mrr += 1.0 / static_cast<double>(r);
        report.hits1 += r <= 1;
        report.hits5 += r <= 5;
        report.hits10 += r <= 10;
    }
    const double n = static_cast<double>(ranks.size());
    report.mrr /= n;
    report.hits1 /= n;
    report.hits5 /= n;
    report.hits10 /= n;
    return report;
}

MetricReport evaluate_client(const EmbeddingStore& store, const ClientKG& kg,
                             const std::string& split, const EvalOptions& options) {
    const std::vector<IndexedTriple>& triples = kg.indexed(split);
    if (triples.empty()) throw EvalError("evaluate_client: split '" + split + "' is empty");
    std::vector<std::size_t> ranks;
    ranks.reserve(triples.size() * (options.predict_heads ? 2 : 1));
    for (const IndexedTriple& t : triples) {
        ranks.push_back(rank_tail(store, kg, t, options).rank);
        if (options.predict_heads) ranks.push_back(rank_head(store, kg, t, options).rank);
    }
    return metrics(ranks);
}

}  // namespace pfedeg
