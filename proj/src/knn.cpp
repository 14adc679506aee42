#include "typeforge/knn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "typeforge/log.hpp"

namespace typeforge {

KnnIndex KnnIndex::build(const EntityEmbeddingStore& store, AssertionStream& assertions,
                         std::size_t k) {
    if (k == 0) throw UsageError("k must be at least 1");

    // store row -> distinct type ids
    std::unordered_map<std::string, std::uint32_t, StringHash, StringEq> type_ids;
    std::vector<std::string> type_names;
    std::map<std::uint32_t, std::set<std::uint32_t>> row_labels;
    TypeAssertion assertion;
    while (assertions.next(assertion)) {
        auto row = store.row_of(assertion.subject);
        if (!row) continue;
        auto it = type_ids.find(assertion.type_iri);
        std::uint32_t type_id;
        if (it == type_ids.end()) {
            type_id = static_cast<std::uint32_t>(type_names.size());
            type_names.push_back(assertion.type_iri);
            type_ids.emplace(type_names.back(), type_id);
        } else {
            type_id = it->second;
        }
        row_labels[*row].insert(type_id);
    }
    if (row_labels.empty()) throw DataError("no training data: no embedded entity has a type");

    KnnIndex index;
    index.dim_ = store.dim();
    index.k_ = k;
    index.type_iris_ = std::move(type_names);
    index.matrix_.reserve(row_labels.size() * store.dim());
    index.row_iris_.reserve(row_labels.size());
    index.labels_.reserve(row_labels.size());
    for (const auto& [store_row, label_set] : row_labels) {
        auto vec = store.row(store_row);
        index.matrix_.insert(index.matrix_.end(), vec.begin(), vec.end());
        index.row_iris_.push_back(store.iri_at(store_row));
        index.labels_.emplace_back(label_set.begin(), label_set.end());
    }
    return index;
}

std::uint64_t KnnIndex::memory_bytes() const {
    std::uint64_t bytes = matrix_.size() * sizeof(double);
    for (const auto& labels : labels_) bytes += labels.size() * sizeof(std::uint32_t);
    for (const auto& iri : row_iris_) bytes += iri.size();
    return bytes;
}

RecommendationList knn_recommend(const KnnIndex& index, std::span<const double> query) {
    if (query.size() != index.dim())
        throw DataError("query dimension " + std::to_string(query.size()) +
                        " does not match index dimension " + std::to_string(index.dim()));
    std::vector<double> unit(query.begin(), query.end());
    double norm = l2_norm(unit);
    if (norm < 1e-12) throw DataError("degenerate query vector (zero norm)");
    if (std::abs(norm - 1.0) > 1e-6) scale(unit, 1.0 / norm);

    const std::size_t n = index.rows();
    std::size_t k = index.k();
    if (k > n) {
        logging::warn("k=" + std::to_string(k) + " exceeds training rows=" + std::to_string(n) +
                      ", using all rows");
        k = n;
    }

    std::vector<double> sims(n);
    for (std::size_t i = 0; i < n; ++i) sims[i] = dot(unit, index.row(i));

    // similarity desc, row index asc on ties
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::partial_sort(order.begin(), order.begin() + k, order.end(),
                      [&](std::uint32_t a, std::uint32_t b) {
                          if (sims[a] != sims[b]) return sims[a] > sims[b];
                          return a < b;
                      });

    std::unordered_map<std::uint32_t, double> scores;
    for (std::size_t j = 0; j < k; ++j) {
        std::uint32_t row = order[j];
        double weight = std::max(sims[row], 0.0);
        for (std::uint32_t type_id : index.labels(row)) scores[type_id] += weight;
    }

    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(scores.size());
    double sum = 0.0;
    for (const auto& [type_id, score] : scores) {
        if (score <= 0.0) continue;
        scored.emplace_back(index.type_iris()[type_id], score);
        sum += score;
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    RecommendationList list;
    list.entries.reserve(scored.size());
    for (auto& [iri, score] : scored)
        list.entries.push_back({std::move(iri), score, score / sum});
    return list;
}

}  // namespace typeforge
