#pragma once
// Stratified assertion partitioning, Recall@k, and the experiment runner
// that compares the embedding recommender against the kNN baseline.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "typeforge/embedding_store.hpp"
#include "typeforge/recommender.hpp"

namespace typeforge {

struct PartitionSpec {
    std::uint32_t fold_count = 0;
    std::uint64_t seed = 0;
    // fold id per yielded assertion, in stream order
    std::vector<std::uint8_t> assignment;
    std::vector<std::uint64_t> fold_sizes;
    std::uint64_t distinct_types = 0;
    std::uint64_t small_types = 0;  // types with fewer assertions than folds
};

// Splits the type assertions in `assertion_path` into `fold_count` N-Triples
// files under `out_dir` (fold-0.nt ... fold-N.nt) plus a partition.json.
// Within each type the split is a seeded shuffle dealt round-robin, so
// per-type fold counts differ by at most one.
PartitionSpec partition(const std::string& assertion_path, std::uint32_t fold_count,
                        std::uint64_t seed, const std::string& out_dir,
                        const std::string& type_predicate = std::string(kRdfType));

// |top-k of ranked ∩ truth| / |truth|. Empty truth is the caller's error.
double recall_at_k(const RecommendationList& ranked, const std::set<std::string>& truth,
                   std::size_t k);

struct EvalOptions {
    std::uint32_t test_fold = 0;
    std::size_t sample_size = 5000;
    std::string method = "embedding";  // "embedding" or "knn-<k>"
    std::uint64_t seed = 0;
    std::size_t k_max = 15;
    std::string type_predicate = std::string(kRdfType);
};

struct FoldResult {
    std::uint32_t fold = 0;
    std::uint64_t entities_scored = 0;
    std::uint64_t excluded_no_embedding = 0;
    std::uint64_t excluded_empty_truth = 0;
    std::vector<double> recall_at_k;  // index k-1
    double recs_per_entity = 0.0;
    double train_seconds = 0.0;
    double score_seconds = 0.0;
    std::uint64_t model_bytes = 0;
};

struct EvalReport {
    std::string method;
    std::size_t k_max = 0;
    std::uint64_t seed = 0;
    std::size_t sample_size = 0;
    std::vector<FoldResult> folds;
    std::vector<double> recall_at_k;  // unweighted mean across folds
    double recs_per_entity = 0.0;
    double score_seconds = 0.0;  // total across folds

    std::string to_json() const;
    static EvalReport from_json(const std::string& text);
};

// Trains on every fold but `test_fold`, samples test entities from the test
// fold (strict relevance: only types asserted there count), and evaluates.
EvalReport run_experiment(const std::vector<std::string>& fold_paths,
                          const EntityEmbeddingStore& store, const EvalOptions& options);

// Concatenates fold results and recomputes the cross-fold means.
EvalReport aggregate_reports(const std::vector<EvalReport>& reports);

// TSV with one column per report: recall curve, recs/entity, timings, the
// wall-clock speedup factor relative to the first report, and recall deltas
// against the first report. Mismatched k_max truncates to the minimum.
std::string compare_methods(const std::vector<EvalReport>& reports);

}  // namespace typeforge
