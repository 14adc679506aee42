#pragma once
// Two-pass streaming derivation of unit-norm type vectors from entity
// vectors and type assertions.
//
// Pass 1 counts distinct types per embedded entity. Pass 2 re-streams the
// file and adds entity_vec / type_count_of_entity into each asserted type's
// accumulator, once per distinct (entity, type) pair. Finalization projects
// each accumulator onto the unit sphere. Memory grows with the number of
// entities, types, and distinct pairs, never with raw triple count.

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "typeforge/embedding_store.hpp"
#include "typeforge/ntriples.hpp"

namespace typeforge {

// Finalized, immutable; safe for concurrent readers.
class TypeEmbeddingModel {
public:
    std::size_t dim() const { return dim_; }
    std::size_t size() const { return type_iris_.size(); }

    // Type IRIs in lexicographic order; row i belongs to type_iris()[i].
    const std::vector<std::string>& type_iris() const { return type_iris_; }

    std::span<const double> row(std::size_t index) const {
        return {vectors_.data() + index * dim_, dim_};
    }

    std::optional<std::size_t> row_of(std::string_view iri) const {
        auto it = index_.find(iri);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<std::span<const double>> vector_of(std::string_view iri) const {
        auto r = row_of(iri);
        if (!r) return std::nullopt;
        return row(*r);
    }

    std::uint64_t support_of(std::size_t index) const { return support_[index]; }

    void save(const std::string& path) const;
    static TypeEmbeddingModel load(const std::string& path);

    // Used by finalize()
    static TypeEmbeddingModel from_rows(std::size_t dim, std::vector<std::string> iris,
                                        std::vector<double> vectors,
                                        std::vector<std::uint64_t> support);

private:
    std::size_t dim_ = 0;
    std::vector<std::string> type_iris_;
    std::vector<double> vectors_;  // row-major, size() x dim, unit rows
    std::vector<std::uint64_t> support_;
    std::unordered_map<std::string, std::size_t, StringHash, StringEq> index_;
};

// Pass-1 output: distinct-type counts per embedded entity, keyed by store row.
struct TypeCounts {
    std::unordered_map<std::uint32_t, std::uint32_t> per_entity;  // store row -> |T(s)|
    std::vector<std::string> types;                               // distinct types, lexicographic
    std::uint64_t assertions_seen = 0;
    std::uint64_t skipped_missing_embedding = 0;
    std::uint64_t duplicate_pairs = 0;
};

TypeCounts pass1_count_types(AssertionStream& assertions, const EntityEmbeddingStore& store);

// Pre-normalization accumulators M[t] plus per-type contributor counts.
struct Accumulators {
    std::size_t dim = 0;
    std::vector<std::string> types;       // lexicographic, row i is types[i]
    std::vector<double> sums;             // row-major
    std::vector<std::uint64_t> support;   // contributing entities per type
    std::uint64_t assertions_seen = 0;
    std::uint64_t skipped_missing_embedding = 0;
    std::uint64_t skipped_missing_count = 0;
    std::uint64_t duplicate_pairs = 0;

    std::span<double> row(std::size_t index) { return {sums.data() + index * dim, dim}; }
    std::span<const double> row(std::size_t index) const { return {sums.data() + index * dim, dim}; }
};

Accumulators pass2_accumulate(AssertionStream& assertions, const EntityEmbeddingStore& store,
                              const TypeCounts& counts);

struct FinalizeReport {
    std::vector<std::string> dropped_types;  // zero-norm accumulators
};

TypeEmbeddingModel finalize(const Accumulators& accumulators, FinalizeReport* report = nullptr);

struct BuildOptions {
    std::string type_predicate = std::string(kRdfType);
    // >1 partitions pass 2 by type hash across that many threads, each
    // re-reading the file and accumulating its own slice.
    unsigned shards = 1;
    SkipSink* skip_sink = nullptr;
};

struct BuildReport {
    ParseStats pass1_stats;
    ParseStats pass2_stats;
    std::uint64_t entities_with_types = 0;
    std::uint64_t distinct_types = 0;
    std::uint64_t skipped_missing_embedding = 0;
    std::uint64_t duplicate_pairs = 0;
    std::vector<std::string> dropped_types;
};

// Algorithm end to end: two physical passes over the assertion files.
TypeEmbeddingModel build_model(const std::vector<std::string>& assertion_paths,
                               const EntityEmbeddingStore& store,
                               const BuildOptions& options = {},
                               BuildReport* report = nullptr);

}  // namespace typeforge
