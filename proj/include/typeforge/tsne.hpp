#pragma once
// Exact 2-D t-SNE over a few hundred type vectors, plus the row selector
// that pulls the direct sub-types of chosen ontology roots out of a model.
// Exact O(m^2) on purpose: the inputs are small and exactness keeps the
// optimizer auditable.

#include <cstdint>
#include <string>
#include <vector>

#include "typeforge/ntriples.hpp"
#include "typeforge/type_embedder.hpp"

namespace typeforge {

struct ProjectionJob {
    std::size_t dim = 0;
    std::vector<double> matrix;  // row-major rows() x dim, unit rows
    std::vector<std::string> row_iris;
    std::vector<std::string> labels;  // per-row root IRI
    double perplexity = 30.0;         // clamped to (m-1)/3 at run time
    std::size_t iterations = 1000;
    double learning_rate = 200.0;
    std::uint64_t seed = 0;

    std::size_t rows() const { return row_iris.size(); }
};

struct SelectReport {
    // sub-types sitting under several requested roots; they contribute one
    // row per root, each carrying that root's label
    std::uint64_t multi_root_types = 0;
    std::vector<std::string> empty_roots;     // no direct sub-types indexed
    std::uint64_t skipped_no_vector = 0;      // sub-type absent from model
};

// One row per (root, direct sub-type with a model vector) pair, labeled by
// the root. Fewer than 5 usable rows is fatal.
ProjectionJob select_subtype_matrix(const TypeEmbeddingModel& model, const OntologyIndex& index,
                                    const std::vector<std::string>& roots,
                                    SelectReport* report = nullptr);

struct TsneDiagnostics {
    // KL divergence per iteration over the second half of the run, long
    // after early exaggeration ends
    std::vector<double> kl_trace;
    std::vector<double> point_entropy;  // achieved conditional entropy, nats
    double effective_perplexity = 0.0;
    double final_kl = 0.0;
};

// Standard exact t-SNE: per-point Gaussian bandwidths solved by bisection
// against the perplexity target, symmetrized and normalized affinities,
// Student-t low-dimensional kernel, gradient descent with gains, momentum
// 0.5 -> 0.8 at iteration 250 and 12x early exaggeration until then.
// Deterministic for a fixed seed. Returns row-major rows() x 2 coordinates
// centered on the origin. Non-finite values abort with the iteration number.
std::vector<double> tsne_project(const ProjectionJob& job, TsneDiagnostics* diagnostics = nullptr);

}  // namespace typeforge
