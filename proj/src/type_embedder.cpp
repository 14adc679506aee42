#include "typeforge/type_embedder.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <thread>

#include "typeforge/line_reader.hpp"
#include "typeforge/log.hpp"

namespace typeforge {

namespace {

constexpr std::string_view kModelMagic = "typeforge-model";
constexpr int kModelVersion = 1;
constexpr double kDropNorm = 1e-12;

struct TypeInterner {
    std::unordered_map<std::string, std::uint32_t, StringHash, StringEq> ids;
    std::vector<std::string> names;

    std::uint32_t intern(std::string_view iri) {
        auto it = ids.find(iri);
        if (it != ids.end()) return it->second;
        auto id = static_cast<std::uint32_t>(names.size());
        names.emplace_back(iri);
        ids.emplace(names.back(), id);
        return id;
    }
};

// Accumulates one shard's slice of the type rows. With one shard this is the
// whole pass; type rows are partitioned by row index modulo shard count.
void accumulate_shard(AssertionStream& assertions, const EntityEmbeddingStore& store,
                      const TypeCounts& counts,
                      const std::unordered_map<std::string, std::size_t, StringHash, StringEq>& type_rows,
                      unsigned shard, unsigned shard_count, Accumulators& acc) {
    const std::uint64_t num_types = counts.types.size();
    std::unordered_set<std::uint64_t> seen_pairs;
    TypeAssertion assertion;
    while (assertions.next(assertion)) {
        ++acc.assertions_seen;
        auto row = store.row_of(assertion.subject);
        if (!row) {
            ++acc.skipped_missing_embedding;
            continue;
        }
        auto type_it = type_rows.find(assertion.type_iri);
        if (type_it == type_rows.end()) {
            ++acc.skipped_missing_count;  // stream mismatch: type unseen in pass 1
            continue;
        }
        const auto type_row = static_cast<std::uint64_t>(type_it->second);
        auto count_it = counts.per_entity.find(*row);
        if (count_it == counts.per_entity.end()) {
            ++acc.skipped_missing_count;
            continue;
        }
        if (type_row % shard_count != shard) continue;
        const std::uint64_t pair_key = static_cast<std::uint64_t>(*row) * num_types + type_row;
        if (!seen_pairs.insert(pair_key).second) {
            ++acc.duplicate_pairs;
            continue;
        }
        axpy(acc.row(type_row), 1.0 / count_it->second, store.row(*row));
        ++acc.support[type_row];
    }
}

std::unordered_map<std::string, std::size_t, StringHash, StringEq>
row_index_of(const std::vector<std::string>& types) {
    std::unordered_map<std::string, std::size_t, StringHash, StringEq> rows;
    rows.reserve(types.size());
    for (std::size_t i = 0; i < types.size(); ++i) rows.emplace(types[i], i);
    return rows;
}

}  // namespace

TypeCounts pass1_count_types(AssertionStream& assertions, const EntityEmbeddingStore& store) {
    TypeCounts counts;
    TypeInterner interner;
    std::unordered_set<std::uint64_t> seen_pairs;
    TypeAssertion assertion;
    while (assertions.next(assertion)) {
        ++counts.assertions_seen;
        auto row = store.row_of(assertion.subject);
        if (!row) {
            ++counts.skipped_missing_embedding;
            continue;
        }
        std::uint32_t type_id = interner.intern(assertion.type_iri);
        std::uint64_t pair_key = (static_cast<std::uint64_t>(*row) << 32) | type_id;
        if (!seen_pairs.insert(pair_key).second) {
            ++counts.duplicate_pairs;
            continue;
        }
        ++counts.per_entity[*row];
    }
    counts.types = std::move(interner.names);
    std::sort(counts.types.begin(), counts.types.end());
    return counts;
}

Accumulators pass2_accumulate(AssertionStream& assertions, const EntityEmbeddingStore& store,
                              const TypeCounts& counts) {
    Accumulators acc;
    acc.dim = store.dim();
    acc.types = counts.types;
    acc.sums.assign(acc.types.size() * acc.dim, 0.0);
    acc.support.assign(acc.types.size(), 0);
    accumulate_shard(assertions, store, counts, row_index_of(acc.types), 0, 1, acc);
    return acc;
}

TypeEmbeddingModel finalize(const Accumulators& accumulators, FinalizeReport* report) {
    std::vector<std::string> iris;
    std::vector<double> vectors;
    std::vector<std::uint64_t> support;
    iris.reserve(accumulators.types.size());
    vectors.reserve(accumulators.sums.size());
    FinalizeReport local;
    for (std::size_t i = 0; i < accumulators.types.size(); ++i) {
        auto sum = accumulators.row(i);
        double norm = l2_norm(sum);
        if (norm < kDropNorm) {
            local.dropped_types.push_back(accumulators.types[i]);
            continue;
        }
        iris.push_back(accumulators.types[i]);
        support.push_back(accumulators.support[i]);
        std::size_t offset = vectors.size();
        vectors.insert(vectors.end(), sum.begin(), sum.end());
        scale({vectors.data() + offset, accumulators.dim}, 1.0 / norm);
    }
    if (!local.dropped_types.empty())
        logging::warn("dropped zero-norm type accumulators count=" +
                      std::to_string(local.dropped_types.size()));
    if (report) *report = std::move(local);
    return TypeEmbeddingModel::from_rows(accumulators.dim, std::move(iris), std::move(vectors),
                                         std::move(support));
}

TypeEmbeddingModel build_model(const std::vector<std::string>& assertion_paths,
                               const EntityEmbeddingStore& store, const BuildOptions& options,
                               BuildReport* report) {
    AssertionStream pass1_stream(assertion_paths, options.type_predicate, options.skip_sink);
    TypeCounts counts = pass1_count_types(pass1_stream, store);
    logging::info("pass1 done entities=" + std::to_string(counts.per_entity.size()) +
                  " types=" + std::to_string(counts.types.size()) +
                  " assertions=" + std::to_string(counts.assertions_seen));

    const unsigned shards = std::max(1u, options.shards);
    Accumulators acc;
    ParseStats pass2_stats;
    if (shards == 1) {
        AssertionStream pass2_stream(assertion_paths, options.type_predicate, options.skip_sink);
        acc = pass2_accumulate(pass2_stream, store, counts);
        pass2_stats = pass2_stream.stats();
    } else {
        auto type_rows = row_index_of(counts.types);
        std::vector<Accumulators> shard_acc(shards);
        std::vector<ParseStats> shard_stats(shards);
        std::vector<std::exception_ptr> errors(shards);
        std::vector<std::thread> workers;
        for (unsigned s = 0; s < shards; ++s) {
            shard_acc[s].dim = store.dim();
            shard_acc[s].types = counts.types;
            shard_acc[s].sums.assign(counts.types.size() * store.dim(), 0.0);
            shard_acc[s].support.assign(counts.types.size(), 0);
            workers.emplace_back([&, s] {
                try {
                    AssertionStream stream(assertion_paths, options.type_predicate, nullptr);
                    accumulate_shard(stream, store, counts, type_rows, s, shards, shard_acc[s]);
                    shard_stats[s] = stream.stats();
                } catch (...) {
                    errors[s] = std::current_exception();
                }
            });
        }
        for (auto& worker : workers) worker.join();
        for (auto& error : errors)
            if (error) std::rethrow_exception(error);

        // Type rows are disjoint across shards; merging is row-wise adoption.
        acc.dim = store.dim();
        acc.types = counts.types;
        acc.sums.assign(counts.types.size() * store.dim(), 0.0);
        acc.support.assign(counts.types.size(), 0);
        for (std::size_t t = 0; t < counts.types.size(); ++t) {
            const Accumulators& owner = shard_acc[t % shards];
            std::copy(owner.row(t).begin(), owner.row(t).end(), acc.row(t).begin());
            acc.support[t] = owner.support[t];
        }
        // Every shard reads the full stream, so per-stream counters agree
        // across shards; only the post-filter duplicate tally is partitioned.
        acc.assertions_seen = shard_acc[0].assertions_seen;
        acc.skipped_missing_embedding = shard_acc[0].skipped_missing_embedding;
        acc.skipped_missing_count = shard_acc[0].skipped_missing_count;
        for (const auto& shard : shard_acc) acc.duplicate_pairs += shard.duplicate_pairs;
        pass2_stats = shard_stats[0];
    }

    FinalizeReport finalize_report;
    TypeEmbeddingModel model = finalize(acc, &finalize_report);
    if (report) {
        report->pass1_stats = pass1_stream.stats();
        report->pass2_stats = pass2_stats;
        report->entities_with_types = counts.per_entity.size();
        report->distinct_types = counts.types.size();
        report->skipped_missing_embedding = counts.skipped_missing_embedding;
        report->duplicate_pairs = counts.duplicate_pairs;
        report->dropped_types = std::move(finalize_report.dropped_types);
    }
    return model;
}

TypeEmbeddingModel TypeEmbeddingModel::from_rows(std::size_t dim, std::vector<std::string> iris,
                                                 std::vector<double> vectors,
                                                 std::vector<std::uint64_t> support) {
    TypeEmbeddingModel model;
    model.dim_ = dim;
    model.type_iris_ = std::move(iris);
    model.vectors_ = std::move(vectors);
    model.support_ = std::move(support);
    model.index_.reserve(model.type_iris_.size());
    for (std::size_t i = 0; i < model.type_iris_.size(); ++i)
        model.index_.emplace(model.type_iris_[i], i);
    return model;
}

void TypeEmbeddingModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open file for writing: " + path);
    out << kModelMagic << ' ' << kModelVersion << ' ' << dim_ << ' ' << size() << '\n';
    for (std::size_t i = 0; i < size(); ++i) {
        out << type_iris_[i] << ' ' << support_[i];
        for (double v : row(i)) out << ' ' << format_double(v);
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

TypeEmbeddingModel TypeEmbeddingModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file: " + path);
    std::string magic;
    int version = -1;
    std::size_t dim = 0, count = 0;
    if (!(in >> magic >> version >> dim >> count) || magic != kModelMagic)
        throw DataError(path + ": not a typeforge model file");
    if (version != kModelVersion)
        throw DataError(path + ": model version mismatch: found " + std::to_string(version) +
                        ", expected " + std::to_string(kModelVersion));
    std::vector<std::string> iris;
    std::vector<double> vectors;
    std::vector<std::uint64_t> support;
    iris.reserve(count);
    vectors.reserve(count * dim);
    support.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::string iri;
        std::uint64_t sup = 0;
        if (!(in >> iri >> sup))
            throw DataError(path + ": truncated model file at record " + std::to_string(i));
        std::string field;
        for (std::size_t d = 0; d < dim; ++d) {
            double v;
            if (!(in >> field) || !parse_double(field, v))
                throw DataError(path + ": truncated model file at record " + std::to_string(i));
            vectors.push_back(v);
        }
        iris.push_back(std::move(iri));
        support.push_back(sup);
    }
    return from_rows(dim, std::move(iris), std::move(vectors), std::move(support));
}

}  // namespace typeforge
