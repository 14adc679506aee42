#include "typeforge/embedding_store.hpp"

#include <charconv>
#include <fstream>

#include "typeforge/line_reader.hpp"
#include "typeforge/log.hpp"

namespace typeforge {

namespace {

// Splits on runs of spaces/tabs.
void split_fields(std::string_view line, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
        std::size_t start = pos;
        while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
        if (pos > start) out.push_back(line.substr(start, pos - start));
    }
}

constexpr double kDegenerateNorm = 1e-12;

}  // namespace

EntityEmbeddingStore EntityEmbeddingStore::load(const std::string& path, bool normalize,
                                                EmbeddingLoadReport* report,
                                                SkipSink* sink) {
    auto reader = open_line_reader(path);
    std::string line;
    if (!reader->next(line))
        throw DataError(path + ":1: malformed header: empty file");

    std::vector<std::string_view> fields;
    split_fields(line, fields);
    std::uint64_t declared_rows = 0;
    std::uint64_t dim = 0;
    auto parse_u64 = [](std::string_view s, std::uint64_t& out) {
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc() && ptr == s.data() + s.size();
    };
    if (fields.size() != 2 || !parse_u64(fields[0], declared_rows) ||
        !parse_u64(fields[1], dim) || dim == 0)
        throw DataError(path + ":1: malformed header: expected \"<rows> <dim>\", got \"" + line + "\"");

    EntityEmbeddingStore store;
    store.dim_ = static_cast<std::size_t>(dim);
    store.data_.reserve(static_cast<std::size_t>(declared_rows) * store.dim_);
    store.iris_.reserve(declared_rows);

    EmbeddingLoadReport local;
    local.declared_rows = declared_rows;
    std::vector<double> values(store.dim_);

    while (reader->next(line)) {
        split_fields(line, fields);
        if (fields.empty()) continue;
        if (fields.size() != store.dim_ + 1) {
            ++local.skipped_bad_field_count;
            if (sink) sink->record(path, reader->line_number(), "wrong value count");
            continue;
        }
        bool ok = true;
        for (std::size_t i = 0; i < store.dim_; ++i) {
            if (!parse_double(fields[i + 1], values[i])) { ok = false; break; }
        }
        if (!ok) {
            ++local.skipped_bad_field_count;
            if (sink) sink->record(path, reader->line_number(), "unparseable value");
            continue;
        }
        double norm = l2_norm(values);
        if (norm < kDegenerateNorm) {
            ++local.skipped_degenerate;
            if (sink) sink->record(path, reader->line_number(), "degenerate vector");
            continue;
        }
        if (normalize) scale(values, 1.0 / norm);

        std::string token(fields[0]);
        auto it = store.index_.find(token);
        if (it != store.index_.end()) {
            // last occurrence wins
            ++local.duplicates_replaced;
            std::copy(values.begin(), values.end(),
                      store.data_.begin() + static_cast<std::size_t>(it->second) * store.dim_);
        } else {
            auto row_index = static_cast<std::uint32_t>(store.iris_.size());
            store.iris_.push_back(token);
            store.index_.emplace(std::move(token), row_index);
            store.data_.insert(store.data_.end(), values.begin(), values.end());
        }
        ++local.loaded;
    }

    if (local.loaded != declared_rows)
        logging::warn("embedding header row count mismatch declared=" +
                      std::to_string(declared_rows) + " parsed=" + std::to_string(local.loaded));
    if (local.duplicates_replaced > 0)
        logging::warn("duplicate embedding tokens replaced=" +
                      std::to_string(local.duplicates_replaced));
    if (report) *report = local;
    return store;
}

void EntityEmbeddingStore::export_text(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open file for writing: " + path);
    out << size() << ' ' << dim() << '\n';
    for (std::size_t i = 0; i < size(); ++i) {
        out << iris_[i];
        auto values = row(static_cast<std::uint32_t>(i));
        for (double v : values) out << ' ' << format_double(v);
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

}  // namespace typeforge
