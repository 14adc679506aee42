#pragma once
// Online fuzzy clustering: stream every embedded entity through the scorer
// and write its type distribution as one JSON line. Each entity is scored
// and forgotten, so memory stays flat regardless of entity count.

#include <cstdint>
#include <string>
#include <vector>

#include "typeforge/embedding_store.hpp"
#include "typeforge/recommender.hpp"

namespace typeforge {

struct ClusterOptions {
    std::size_t top_k = 0;  // 0 keeps the full distribution
    bool gzip = false;
    // 0 or 1 writes one part file sequentially (the timing reference);
    // more split the store into contiguous row ranges, one thread and one
    // part file each.
    unsigned threads = 0;
    Normalizer normalizer = Normalizer::softmax;
};

struct ClusterSummary {
    std::uint64_t entities_written = 0;
    std::uint64_t skipped = 0;
    std::uint64_t output_bytes = 0;
    double seconds = 0.0;
    double entities_per_second = 0.0;
    std::vector<std::string> part_paths;  // concatenate in this order to
                                          // recover store row order
};

// Writes part-00000.jsonl (.jsonl.gz with gzip) files under out_dir, one
// line per store entity in row order:
//   {"entity": "<iri>", "types": [["<iri>", prob], ...]}
// Plain-text parts flush per line, so an interrupted run leaves only whole
// lines; gzip parts are only complete once closed.
ClusterSummary cluster_all(const TypeEmbeddingModel& model, const EntityEmbeddingStore& store,
                           const std::string& out_dir, const ClusterOptions& options = {});

}  // namespace typeforge
