#pragma once
// Weighted k-nearest-neighbor type recommender: the non-parametric baseline.
// Keeps every labeled training vector in memory and does an exact full scan
// per query, which is the cost profile it exists to demonstrate.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "typeforge/embedding_store.hpp"
#include "typeforge/ntriples.hpp"
#include "typeforge/recommender.hpp"

namespace typeforge {

class KnnIndex {
public:
    // Rows are the embedded entities with at least one asserted type, in
    // store order. Empty intersection is fatal.
    static KnnIndex build(const EntityEmbeddingStore& store, AssertionStream& assertions,
                          std::size_t k);

    std::size_t dim() const { return dim_; }
    std::size_t rows() const { return row_iris_.size(); }
    std::size_t k() const { return k_; }

    std::span<const double> row(std::size_t index) const {
        return {matrix_.data() + index * dim_, dim_};
    }
    const std::string& row_iri(std::size_t index) const { return row_iris_[index]; }
    const std::vector<std::uint32_t>& labels(std::size_t index) const { return labels_[index]; }
    const std::vector<std::string>& type_iris() const { return type_iris_; }

    std::uint64_t memory_bytes() const;

private:
    std::size_t dim_ = 0;
    std::size_t k_ = 0;
    std::vector<double> matrix_;  // row-major unit vectors
    std::vector<std::string> row_iris_;
    std::vector<std::vector<std::uint32_t>> labels_;  // per row, type ids
    std::vector<std::string> type_iris_;              // id -> IRI
};

// Exact full scan. Neighbor weight is cosine similarity clamped at zero;
// neighbor ties break by row order. Only types with nonzero score appear,
// sorted by score then IRI; probabilities are scores over their sum.
RecommendationList knn_recommend(const KnnIndex& index, std::span<const double> query);

}  // namespace typeforge
