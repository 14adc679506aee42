#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "support/fixtures.hpp"
#include "typeforge/common.hpp"
#include "typeforge/recommender.hpp"
#include "typeforge/type_embedder.hpp"

using namespace typeforge;
using namespace testsupport;

namespace {

TypeEmbeddingModel build_f1_model(const TempDir& dir) {
    auto store = EntityEmbeddingStore::load(dir.write("f1.txt", f1_embeddings_text()));
    std::string path = dir.write("f1.nt", f1_assertions_text());
    return build_model({path}, store);
}

TypeEmbeddingModel model_from_rows(std::size_t dim, std::vector<std::string> iris,
                                   std::vector<double> rows) {
    std::vector<std::uint64_t> support(iris.size(), 1);
    return TypeEmbeddingModel::from_rows(dim, std::move(iris), std::move(rows),
                                         std::move(support));
}

}  // namespace

TEST_CASE("f1 queries rank by dot product") {
    TempDir dir;
    auto model = build_f1_model(dir);

    SUBCASE("query along e1") {
        auto list = score_types(model, std::vector<double>{1.0, 0.0});
        REQUIRE(list.entries.size() == 2);
        CHECK(list.entries[0].type_iri == kTypeA);
        CHECK(list.entries[0].raw == doctest::Approx(0.894427).epsilon(1e-6));
        CHECK(list.entries[1].raw == doctest::Approx(0.419058).epsilon(1e-6));
    }
    SUBCASE("query along e2 prefers B") {
        auto list = score_types(model, std::vector<double>{0.0, 1.0});
        CHECK(list.entries[0].type_iri == kTypeB);
        CHECK(list.entries[0].raw == doctest::Approx(0.907958).epsilon(1e-6));
        CHECK(list.entries[1].raw == doctest::Approx(0.447214).epsilon(1e-6));
    }
    SUBCASE("self query scores 1") {
        auto a = *model.vector_of(kTypeA);
        auto list = score_types(model, std::vector<double>(a.begin(), a.end()));
        CHECK(list.entries[0].type_iri == kTypeA);
        CHECK(std::abs(list.entries[0].raw - 1.0) <= 1e-12);
    }
}

TEST_CASE("probabilities sum to one and follow the raw order") {
    TempDir dir;
    auto model = build_f1_model(dir);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;

    for (Normalizer norm : {Normalizer::softmax, Normalizer::shifted_sum}) {
        for (int i = 0; i < 200; ++i) {
            std::vector<double> query{gauss(rng), gauss(rng)};
            double n = l2_norm(query);
            if (n < 1e-6) continue;
            for (double& v : query) v /= n;
            auto list = score_types(model, query, norm);
            double sum = 0.0;
            for (const auto& entry : list.entries) sum += entry.prob;
            CHECK(std::abs(sum - 1.0) <= 1e-9);
            for (std::size_t j = 1; j < list.entries.size(); ++j) {
                CHECK(list.entries[j - 1].raw >= list.entries[j].raw);
                CHECK(list.entries[j - 1].prob >= list.entries[j].prob);
            }
            if (norm == Normalizer::softmax)
                for (const auto& entry : list.entries) CHECK(entry.prob > 0.0);
        }
    }
}

TEST_CASE("query scale leaves the ranking unchanged") {
    TempDir dir;
    auto model = build_f1_model(dir);
    std::vector<double> query{0.3, 0.7};
    auto unit = score_types(model, query);
    std::vector<double> scaled{query[0] * 5.0, query[1] * 5.0};
    auto big = score_types(model, scaled);
    REQUIRE(unit.entries.size() == big.entries.size());
    for (std::size_t i = 0; i < unit.entries.size(); ++i)
        CHECK(unit.entries[i].type_iri == big.entries[i].type_iri);
}

TEST_CASE("score ties break lexicographically") {
    auto model = model_from_rows(
        2, {"http://x/zeta", "http://x/alpha", "http://x/mid"},
        {1.0, 0.0, 1.0, 0.0, 0.0, 1.0});
    auto list = score_types(model, std::vector<double>{1.0, 0.0});
    REQUIRE(list.entries.size() == 3);
    CHECK(list.entries[0].type_iri == "http://x/alpha");
    CHECK(list.entries[1].type_iri == "http://x/zeta");
    CHECK(list.entries[2].type_iri == "http://x/mid");
}

TEST_CASE("top_k truncates but keeps full-distribution probabilities") {
    TempDir dir;
    auto model = build_f1_model(dir);
    auto full = score_types(model, std::vector<double>{1.0, 0.0});
    auto one = top_k(full, 1);
    REQUIRE(one.entries.size() == 1);
    CHECK(one.entries[0].type_iri == full.entries[0].type_iri);
    CHECK(one.entries[0].prob == full.entries[0].prob);
    CHECK(top_k(full, 10).entries.size() == 2);
}

TEST_CASE("empty model yields an empty list") {
    TypeEmbeddingModel model;
    auto list = score_types(model, std::vector<double>{1.0, 0.0});
    CHECK(list.entries.empty());
}

TEST_CASE("dimension mismatch and zero query are fatal") {
    TempDir dir;
    auto model = build_f1_model(dir);
    CHECK_THROWS_AS(score_types(model, std::vector<double>{1.0, 0.0, 0.0}), DataError);
    CHECK_THROWS_AS(score_types(model, std::vector<double>{0.0, 0.0}), DataError);
}

TEST_CASE("shifted-sum rejects an all-negative-one degenerate distribution") {
    auto model = model_from_rows(2, {"http://x/t"}, {1.0, 0.0});
    CHECK_THROWS_AS(
        score_types(model, std::vector<double>{-1.0, 0.0}, Normalizer::shifted_sum),
        DataError);
}

TEST_CASE("normalizer names parse") {
    CHECK(normalizer_from_name("softmax") == Normalizer::softmax);
    CHECK(normalizer_from_name("shifted-sum") == Normalizer::shifted_sum);
    CHECK_THROWS_AS(normalizer_from_name("bogus"), UsageError);
    CHECK(normalizer_name(Normalizer::softmax) == "softmax");
}

TEST_CASE("batch scoring emits in input order and skips unknown ids") {
    TempDir dir;
    auto store = EntityEmbeddingStore::load(dir.write("f1.txt", f1_embeddings_text()));
    auto model = build_f1_model(dir);

    std::vector<std::string> ids{kE3, "http://example.org/ghost", kE1};
    std::vector<RecommendationList> got;
    BatchReport report;
    recommend_batch(model, store, ids, 2, Normalizer::softmax,
                    [&](const RecommendationList& list) { got.push_back(list); }, &report);

    REQUIRE(got.size() == 2);
    CHECK(got[0].query_id == kE3);
    CHECK(got[1].query_id == kE1);
    CHECK(report.scored == 2);
    CHECK(report.skipped_unknown_id == 1);
}

TEST_CASE("batch scoring is identical with and without workers") {
    TempDir dir;
    auto store = EntityEmbeddingStore::load(dir.write("f1.txt", f1_embeddings_text()));
    auto model = build_f1_model(dir);
    std::vector<std::string> ids{kE1, kE2, kE3, kE1, kE2, kE3};

    auto run = [&](unsigned threads) {
        std::vector<RecommendationList> out;
        recommend_batch(model, store, ids, 0, Normalizer::softmax,
                        [&](const RecommendationList& list) { out.push_back(list); }, nullptr,
                        threads);
        return out;
    };
    auto sequential = run(0);
    auto threaded = run(4);
    REQUIRE(sequential.size() == threaded.size());
    for (std::size_t i = 0; i < sequential.size(); ++i) {
        CHECK(sequential[i].query_id == threaded[i].query_id);
        REQUIRE(sequential[i].entries.size() == threaded[i].entries.size());
        for (std::size_t j = 0; j < sequential[i].entries.size(); ++j) {
            CHECK(sequential[i].entries[j].type_iri == threaded[i].entries[j].type_iri);
            CHECK(sequential[i].entries[j].raw == threaded[i].entries[j].raw);
            CHECK(sequential[i].entries[j].prob == threaded[i].entries[j].prob);
        }
    }
}
