#include "typeforge/cluster.hpp"

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <thread>

#include <json.hpp>

#include "typeforge/line_reader.hpp"
#include "typeforge/log.hpp"

namespace typeforge {

namespace {

struct ShardResult {
    std::uint64_t written = 0;
    std::uint64_t skipped = 0;
};

std::string part_name(unsigned index, bool gzip) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "part-%05u", index);
    return std::string(buf) + (gzip ? ".jsonl.gz" : ".jsonl");
}

ShardResult write_range(const TypeEmbeddingModel& model, const EntityEmbeddingStore& store,
                        const ClusterOptions& options, std::size_t begin, std::size_t end,
                        LineWriter& writer) {
    ShardResult result;
    for (std::size_t r = begin; r < end; ++r) {
        RecommendationList list;
        try {
            list = score_types(model, store.row(static_cast<std::uint32_t>(r)),
                               options.normalizer);
        } catch (const DataError& e) {
            logging::warn("skipping " + store.iri_at(static_cast<std::uint32_t>(r)) + ": " +
                          e.what());
            ++result.skipped;
            continue;
        }
        if (options.top_k > 0) list = top_k(list, options.top_k);
        nlohmann::json types = nlohmann::json::array();
        for (const auto& entry : list.entries)
            types.push_back({entry.type_iri, entry.prob});
        nlohmann::json line{{"entity", store.iri_at(static_cast<std::uint32_t>(r))},
                            {"types", std::move(types)}};
        writer.write_line(line.dump());
        ++result.written;
    }
    return result;
}

}  // namespace

ClusterSummary cluster_all(const TypeEmbeddingModel& model, const EntityEmbeddingStore& store,
                           const std::string& out_dir, const ClusterOptions& options) {
    if (model.dim() != store.dim() && model.size() > 0 && store.size() > 0)
        throw DataError("model dimension " + std::to_string(model.dim()) +
                        " does not match embedding dimension " + std::to_string(store.dim()));
    std::filesystem::create_directories(out_dir);

    unsigned shards = options.threads > 1 ? options.threads : 1;
    if (shards > store.size() && store.size() > 0)
        shards = static_cast<unsigned>(store.size());

    ClusterSummary summary;
    for (unsigned s = 0; s < shards; ++s)
        summary.part_paths.push_back(out_dir + "/" + part_name(s, options.gzip));

    auto start = std::chrono::steady_clock::now();
    std::vector<ShardResult> results(shards);
    if (shards == 1) {
        auto writer = open_line_writer(summary.part_paths[0]);
        results[0] = write_range(model, store, options, 0, store.size(), *writer);
    } else {
        std::vector<std::thread> workers;
        std::vector<std::exception_ptr> errors(shards);
        std::size_t per = store.size() / shards;
        std::size_t extra = store.size() % shards;
        std::size_t begin = 0;
        for (unsigned s = 0; s < shards; ++s) {
            std::size_t end = begin + per + (s < extra ? 1 : 0);
            workers.emplace_back([&, s, begin, end] {
                try {
                    auto writer = open_line_writer(summary.part_paths[s]);
                    results[s] = write_range(model, store, options, begin, end, *writer);
                } catch (...) {
                    errors[s] = std::current_exception();
                }
            });
            begin = end;
        }
        for (auto& worker : workers) worker.join();
        for (auto& error : errors)
            if (error) std::rethrow_exception(error);
    }
    summary.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    for (const auto& result : results) {
        summary.entities_written += result.written;
        summary.skipped += result.skipped;
    }
    for (const auto& path : summary.part_paths)
        summary.output_bytes += std::filesystem::file_size(path);
    if (summary.seconds > 0)
        summary.entities_per_second =
            static_cast<double>(summary.entities_written) / summary.seconds;
    if (summary.skipped > 0)
        logging::warn("skipped " + std::to_string(summary.skipped) + " entities while clustering");
    return summary;
}

}  // namespace typeforge
