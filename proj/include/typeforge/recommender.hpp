#pragma once
// Scores a query vector against every type vector, normalizes the scores
// into a probability distribution, and ranks.
//
// Raw score is the dot product (cosine similarity on the unit sphere). The
// default normalizer is softmax at temperature 1; "shifted-sum" maps scores
// through (1+s)/2 and divides by the sum. Both are monotone, so the ranking
// never depends on the choice.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "typeforge/embedding_store.hpp"
#include "typeforge/type_embedder.hpp"

namespace typeforge {

enum class Normalizer { softmax, shifted_sum };

Normalizer normalizer_from_name(std::string_view name);  // UsageError on unknown
std::string_view normalizer_name(Normalizer normalizer);

struct Recommendation {
    std::string type_iri;
    double raw = 0.0;   // dot product in [-1, 1]
    double prob = 0.0;  // normalized, sums to 1 over the full list
};

struct RecommendationList {
    std::string query_id;
    std::vector<Recommendation> entries;  // raw desc, ties lexicographic by IRI
};

// Full |T|-length distribution. The query is re-normalized when its norm is
// off unit by more than 1e-6; a zero query or a dimension mismatch is fatal.
RecommendationList score_types(const TypeEmbeddingModel& model, std::span<const double> query,
                               Normalizer normalizer = Normalizer::softmax);

// First min(k, |entries|) entries, order preserved. Probabilities are kept
// as scored over the full type set.
RecommendationList top_k(const RecommendationList& list, std::size_t k);

struct BatchReport {
    std::uint64_t scored = 0;
    std::uint64_t skipped_unknown_id = 0;
};

// One list per resolvable id, emitted in input order. threads <= 1 scores
// sequentially; more fan out and re-serialize.
void recommend_batch(const TypeEmbeddingModel& model, const EntityEmbeddingStore& store,
                     const std::vector<std::string>& entity_ids, std::size_t k,
                     Normalizer normalizer,
                     const std::function<void(const RecommendationList&)>& emit,
                     BatchReport* report = nullptr, unsigned threads = 0);

}  // namespace typeforge
