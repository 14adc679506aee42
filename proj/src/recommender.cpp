#include "typeforge/recommender.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "typeforge/log.hpp"

namespace typeforge {

Normalizer normalizer_from_name(std::string_view name) {
    if (name == "softmax") return Normalizer::softmax;
    if (name == "shifted-sum") return Normalizer::shifted_sum;
    throw UsageError("unknown normalizer: " + std::string(name) +
                     " (expected softmax or shifted-sum)");
}

std::string_view normalizer_name(Normalizer normalizer) {
    return normalizer == Normalizer::softmax ? "softmax" : "shifted-sum";
}

RecommendationList score_types(const TypeEmbeddingModel& model, std::span<const double> query,
                               Normalizer normalizer) {
    RecommendationList list;
    if (model.size() == 0) return list;
    if (query.size() != model.dim())
        throw DataError("query dimension " + std::to_string(query.size()) +
                        " does not match model dimension " + std::to_string(model.dim()));

    std::vector<double> unit(query.begin(), query.end());
    double norm = l2_norm(unit);
    if (norm < 1e-12) throw DataError("degenerate query vector (zero norm)");
    if (std::abs(norm - 1.0) > 1e-6) scale(unit, 1.0 / norm);

    const std::size_t n = model.size();
    std::vector<double> raw(n);
    for (std::size_t i = 0; i < n; ++i) raw[i] = dot(unit, model.row(i));

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (raw[a] != raw[b]) return raw[a] > raw[b];
        return model.type_iris()[a] < model.type_iris()[b];
    });

    std::vector<double> prob(n);
    if (normalizer == Normalizer::softmax) {
        double max_raw = *std::max_element(raw.begin(), raw.end());
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            prob[i] = std::exp(raw[i] - max_raw);
            sum += prob[i];
        }
        for (double& p : prob) p /= sum;
    } else {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            prob[i] = std::max(0.0, (1.0 + raw[i]) / 2.0);
            sum += prob[i];
        }
        if (sum <= 0.0) throw DataError("shifted-sum normalizer got all-(-1) scores");
        for (double& p : prob) p /= sum;
    }

    list.entries.reserve(n);
    for (std::uint32_t idx : order)
        list.entries.push_back({model.type_iris()[idx], raw[idx], prob[idx]});
    return list;
}

RecommendationList top_k(const RecommendationList& list, std::size_t k) {
    RecommendationList out;
    out.query_id = list.query_id;
    std::size_t keep = std::min(k, list.entries.size());
    out.entries.assign(list.entries.begin(), list.entries.begin() + keep);
    return out;
}

void recommend_batch(const TypeEmbeddingModel& model, const EntityEmbeddingStore& store,
                     const std::vector<std::string>& entity_ids, std::size_t k,
                     Normalizer normalizer,
                     const std::function<void(const RecommendationList&)>& emit,
                     BatchReport* report, unsigned threads) {
    BatchReport local;

    auto score_one = [&](const std::string& id, RecommendationList& out) {
        auto vec = store.vector_of(id);
        if (!vec) return false;
        out = k > 0 ? top_k(score_types(model, *vec, normalizer), k)
                    : score_types(model, *vec, normalizer);
        out.query_id = id;
        return true;
    };

    if (threads <= 1) {
        RecommendationList list;
        for (const auto& id : entity_ids) {
            if (!score_one(id, list)) {
                ++local.skipped_unknown_id;
                logging::warn("unknown entity id skipped id=" + id);
                continue;
            }
            ++local.scored;
            emit(list);
        }
    } else {
        // Workers fill slots; emission stays in input order.
        std::vector<RecommendationList> slots(entity_ids.size());
        std::vector<char> ok(entity_ids.size(), 0);
        std::vector<std::thread> workers;
        std::atomic<std::size_t> cursor{0};
        for (unsigned t = 0; t < threads; ++t) {
            workers.emplace_back([&] {
                for (std::size_t i = cursor.fetch_add(1); i < entity_ids.size();
                     i = cursor.fetch_add(1))
                    ok[i] = score_one(entity_ids[i], slots[i]) ? 1 : 0;
            });
        }
        for (auto& worker : workers) worker.join();
        for (std::size_t i = 0; i < entity_ids.size(); ++i) {
            if (!ok[i]) {
                ++local.skipped_unknown_id;
                logging::warn("unknown entity id skipped id=" + entity_ids[i]);
                continue;
            }
            ++local.scored;
            emit(slots[i]);
        }
    }
    if (report) *report = local;
}

}  // namespace typeforge
