#pragma once
// Immutable store of l2-normalized entity vectors loaded from word2vec-style
// text files ("N d" header, then "token v1 ... vd" per line; .gz supported).
// Construction is single-threaded; afterwards the store is read-only and
// safe for any number of concurrent readers.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "typeforge/common.hpp"
#include "typeforge/ntriples.hpp"

namespace typeforge {

struct EmbeddingLoadReport {
    std::uint64_t declared_rows = 0;
    std::uint64_t loaded = 0;
    std::uint64_t skipped_bad_field_count = 0;
    std::uint64_t skipped_degenerate = 0;
    std::uint64_t duplicates_replaced = 0;
};

class EntityEmbeddingStore {
public:
    // Rows whose l2 norm is below 1e-12 are rejected as degenerate; rows with
    // the wrong number of fields are skipped. Both are tallied in the report.
    // A malformed header is fatal.
    static EntityEmbeddingStore load(const std::string& path, bool normalize = true,
                                     EmbeddingLoadReport* report = nullptr,
                                     SkipSink* sink = nullptr);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return iris_.size(); }

    // Miss is a value, not an error.
    std::optional<std::uint32_t> row_of(std::string_view iri) const {
        auto it = index_.find(iri);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<std::span<const double>> vector_of(std::string_view iri) const {
        auto row_index = row_of(iri);
        if (!row_index) return std::nullopt;
        return row(*row_index);
    }

    std::span<const double> row(std::uint32_t index) const {
        return {data_.data() + static_cast<std::size_t>(index) * dim_, dim_};
    }

    const std::string& iri_at(std::uint32_t index) const { return iris_[index]; }

    // Same text format back out, with shortest round-trip doubles.
    void export_text(const std::string& path) const;

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;  // row-major, size() x dim()
    std::vector<std::string> iris_;
    std::unordered_map<std::string, std::uint32_t, StringHash, StringEq> index_;
};

}  // namespace typeforge
