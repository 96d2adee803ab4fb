#pragma once

#include <span>
#include <vector>

#include "pfedeg/kg.hpp"
#include "pfedeg/kge.hpp"

namespace pfedeg {

struct RankResult {
    IndexedTriple query;
    std::size_t rank = 0;            // 1-based
    std::size_t candidate_count = 0; // before filtering
};

struct MetricReport {
    double mrr = 0.0;
    double hits1 = 0.0, hits5 = 0.0, hits10 = 0.0;
    std::size_t triple_count = 0;
};

struct EvalOptions {
    bool filtered = true;       // remove known-true competitors before ranking
    bool predict_heads = false; // additionally rank the head slot per triple
};

/// Rank of the true candidate among scores: 1 + #strictly-higher +
/// ceil(#ties / 2), skipping filtered candidates. `filtered_out[i]` marks
/// candidates removed from the ranking (the true index is never removed).
std::size_t rank_from_scores(std::span<const double> scores, std::size_t true_index,
                             std::span<const std::uint8_t> filtered_out);

/// Filtered tail ranking of (h, r, ?) against the client's local entity
/// vocabulary; known tails other than the truth are removed when
/// options.filtered holds. The filter set is the client's train u valid u
/// test. Throws EvalError if the true tail has no embedding.
RankResult rank_tail(const EmbeddingStore& store, const ClientKG& kg, const IndexedTriple& query,
                     const EvalOptions& options = {});

/// Head-slot counterpart of rank_tail, used when options.predict_heads is on.
RankResult rank_head(const EmbeddingStore& store, const ClientKG& kg, const IndexedTriple& query,
                     const EvalOptions& options = {});

/// MRR = mean 1/rank, Hits@N = fraction of ranks <= N. Throws on empty input.
MetricReport metrics(std::span<const std::size_t> ranks);

/// rank_tail (and rank_head when enabled) over every triple of a split, then
/// metrics. Multiset semantics: duplicated triples count twice.
MetricReport evaluate_client(const EmbeddingStore& store, const ClientKG& kg,
                             const std::string& split, const EvalOptions& options = {});

}  // namespace pfedeg
