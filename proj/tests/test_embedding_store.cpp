#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "support/fixtures.hpp"
#include "typeforge/common.hpp"
#include "typeforge/embedding_store.hpp"
#include "typeforge/line_reader.hpp"
#include "typeforge/ntriples.hpp"

using namespace typeforge;
using testsupport::TempDir;

TEST_CASE("identity vectors load as-is") {
    TempDir dir;
    std::string path = dir.write("v.txt", "2 2\na 1 0\nb 0 1\n");
    auto store = EntityEmbeddingStore::load(path);
    CHECK(store.size() == 2);
    CHECK(store.dim() == 2);
    auto a = *store.vector_of("a");
    CHECK(a[0] == 1.0);
    CHECK(a[1] == 0.0);
    auto b = *store.vector_of("b");
    CHECK(b[0] == 0.0);
    CHECK(b[1] == 1.0);
}

TEST_CASE("rows are normalized on load") {
    TempDir dir;
    std::string path = dir.write("v.txt", "1 2\na 3 4\n");
    auto store = EntityEmbeddingStore::load(path);
    auto a = *store.vector_of("a");
    CHECK(a[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(a[1] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("degenerate rows are skipped with a reason") {
    TempDir dir;
    std::string path = dir.write("v.txt", "2 2\na 1 0\nb 0 0\n");
    std::ostringstream skip;
    SkipSink sink(skip);
    EmbeddingLoadReport report;
    auto store = EntityEmbeddingStore::load(path, true, &report, &sink);
    CHECK(store.size() == 1);
    CHECK(report.skipped_degenerate == 1);
    CHECK(skip.str().find("degenerate vector") != std::string::npos);
}

TEST_CASE("unknown iri is a miss not an error") {
    TempDir dir;
    std::string path = dir.write("v.txt", "1 2\na 1 0\n");
    auto store = EntityEmbeddingStore::load(path);
    CHECK(!store.vector_of("zzz"));
    CHECK(!store.row_of("zzz"));
}

TEST_CASE("every stored row is unit norm") {
    TempDir dir;
    auto kb = testsupport::make_random_kb(200, 5, 7, 2, 11);
    std::string path = dir.write("v.txt", kb.embeddings_text);
    auto store = EntityEmbeddingStore::load(path);
    for (std::uint32_t r = 0; r < store.size(); ++r)
        CHECK(std::abs(l2_norm(store.row(r)) - 1.0) <= 1e-9);
}

TEST_CASE("malformed header is fatal with line number") {
    TempDir dir;
    std::string path = dir.write("v.txt", "not a header\na 1 0\n");
    CHECK_THROWS_WITH_AS(EntityEmbeddingStore::load(path), doctest::Contains(":1:"), DataError);
}

TEST_CASE("wrong value count skips the row") {
    TempDir dir;
    std::string path = dir.write("v.txt", "3 3\na 1 0 0\nb 1 0\nc 1 0 0 0\n");
    EmbeddingLoadReport report;
    auto store = EntityEmbeddingStore::load(path, true, &report, nullptr);
    CHECK(store.size() == 1);
    CHECK(report.skipped_bad_field_count == 2);
    CHECK(report.declared_rows == 3);
}

TEST_CASE("duplicate tokens keep the last occurrence") {
    TempDir dir;
    std::string path = dir.write("v.txt", "2 2\na 1 0\na 0 1\n");
    EmbeddingLoadReport report;
    auto store = EntityEmbeddingStore::load(path, true, &report, nullptr);
    CHECK(store.size() == 1);
    CHECK(report.duplicates_replaced == 1);
    auto a = *store.vector_of("a");
    CHECK(a[1] == 1.0);
}

TEST_CASE("loading the same file twice is idempotent") {
    TempDir dir;
    auto kb = testsupport::make_random_kb(100, 4, 5, 2, 3);
    std::string path = dir.write("v.txt", kb.embeddings_text);
    auto first = EntityEmbeddingStore::load(path);
    auto second = EntityEmbeddingStore::load(path);
    REQUIRE(first.size() == second.size());
    for (std::uint32_t r = 0; r < first.size(); ++r) {
        CHECK(first.iri_at(r) == second.iri_at(r));
        auto a = first.row(r);
        auto b = second.row(r);
        for (std::size_t c = 0; c < first.dim(); ++c) CHECK(a[c] == b[c]);
    }
}

TEST_CASE("export and reload round trips within 1e-12") {
    TempDir dir;
    auto kb = testsupport::make_random_kb(50, 4, 9, 2, 5);
    std::string path = dir.write("v.txt", kb.embeddings_text);
    auto store = EntityEmbeddingStore::load(path);

    std::string exported = dir.path() + "/exported.txt";
    store.export_text(exported);
    auto reloaded = EntityEmbeddingStore::load(exported, false);
    REQUIRE(reloaded.size() == store.size());
    for (std::uint32_t r = 0; r < store.size(); ++r) {
        auto a = store.row(r);
        auto b = *reloaded.vector_of(store.iri_at(r));
        for (std::size_t c = 0; c < store.dim(); ++c)
            CHECK(std::abs(a[c] - b[c]) <= 1e-12);
    }
}

TEST_CASE("gzip embeddings load transparently") {
    TempDir dir;
    std::string path = dir.path() + "/v.txt.gz";
    {
        auto writer = open_line_writer(path);
        writer->write_line("2 2");
        writer->write_line("a 1 0");
        writer->write_line("b 0 1");
    }
    auto store = EntityEmbeddingStore::load(path);
    CHECK(store.size() == 2);
}

TEST_CASE("declared row count mismatch still loads parseable rows") {
    TempDir dir;
    std::string path = dir.write("v.txt", "5 2\na 1 0\nb 0 1\n");
    EmbeddingLoadReport report;
    auto store = EntityEmbeddingStore::load(path, true, &report, nullptr);
    CHECK(store.size() == 2);
    CHECK(report.declared_rows == 5);
    CHECK(report.loaded == 2);
}
