// Python bindings for the core operations: embedding store, model build,
// scoring, the kNN baseline, partitioning, evaluation, clustering, and the
// 2-D projection. Report-shaped results cross as JSON strings; the package
// wrapper turns them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "typeforge/cluster.hpp"
#include "typeforge/embedding_store.hpp"
#include "typeforge/eval.hpp"
#include "typeforge/knn.hpp"
#include "typeforge/recommender.hpp"
#include "typeforge/tsne.hpp"
#include "typeforge/type_embedder.hpp"

namespace py = pybind11;
using namespace typeforge;

namespace {

std::vector<std::tuple<std::string, double, double>> to_tuples(const RecommendationList& list) {
    std::vector<std::tuple<std::string, double, double>> out;
    out.reserve(list.entries.size());
    for (const auto& entry : list.entries)
        out.emplace_back(entry.type_iri, entry.raw, entry.prob);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Type embeddings from entity embeddings";

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

    py::class_<EntityEmbeddingStore>(m, "EmbeddingStore")
        .def(py::init([](const std::string& path, bool normalize) {
                 auto store = std::make_unique<EntityEmbeddingStore>();
                 store->load(path, normalize);
                 return store;
             }),
             py::arg("path"), py::arg("normalize") = true)
        .def_property_readonly("dim", &EntityEmbeddingStore::dim)
        .def("__len__", &EntityEmbeddingStore::size)
        .def("__contains__",
             [](const EntityEmbeddingStore& store, const std::string& iri) {
                 return store.row_of(iri).has_value();
             })
        .def("ids",
             [](const EntityEmbeddingStore& store) {
                 std::vector<std::string> out;
                 out.reserve(store.size());
                 for (std::uint32_t r = 0; r < store.size(); ++r) out.push_back(store.iri_at(r));
                 return out;
             })
        .def("vector", [](const EntityEmbeddingStore& store, const std::string& iri) {
            auto vec = store.vector_of(iri);
            if (!vec) throw py::key_error(iri);
            return std::vector<double>(vec->begin(), vec->end());
        });

    py::class_<TypeEmbeddingModel>(m, "TypeModel")
        .def_static("load", &TypeEmbeddingModel::load, py::arg("path"))
        .def("save", &TypeEmbeddingModel::save, py::arg("path"))
        .def_property_readonly("dim", &TypeEmbeddingModel::dim)
        .def("__len__", &TypeEmbeddingModel::size)
        .def("types", &TypeEmbeddingModel::type_iris)
        .def("__contains__",
             [](const TypeEmbeddingModel& model, const std::string& iri) {
                 return model.row_of(iri).has_value();
             })
        .def("vector",
             [](const TypeEmbeddingModel& model, const std::string& iri) {
                 auto row_index = model.row_of(iri);
                 if (!row_index) throw py::key_error(iri);
                 auto vec = model.row(*row_index);
                 return std::vector<double>(vec.begin(), vec.end());
             })
        .def("support", [](const TypeEmbeddingModel& model, const std::string& iri) {
            auto row_index = model.row_of(iri);
            if (!row_index) throw py::key_error(iri);
            return model.support_of(*row_index);
        });

    m.def(
        "build_model",
        [](const EntityEmbeddingStore& store, const std::vector<std::string>& assertions,
           const std::string& type_predicate, unsigned shards) {
            BuildOptions options;
            options.type_predicate = type_predicate;
            options.shards = shards;
            BuildReport report;
            TypeEmbeddingModel model = build_model(assertions, store, options, &report);
            nlohmann::json summary{{"entities_with_types", report.entities_with_types},
                                   {"distinct_types", report.distinct_types},
                                   {"duplicate_pairs", report.duplicate_pairs},
                                   {"skipped_missing_embedding", report.skipped_missing_embedding},
                                   {"dropped_types", report.dropped_types}};
            return py::make_tuple(std::move(model), summary.dump());
        },
        py::arg("store"), py::arg("assertions"),
        py::arg("type_predicate") = std::string(kRdfType), py::arg("shards") = 1);

    m.def(
        "score",
        [](const TypeEmbeddingModel& model, const std::vector<double>& query,
           const std::string& norm, std::size_t k) {
            RecommendationList list = score_types(model, query, normalizer_from_name(norm));
            if (k > 0) list = top_k(list, k);
            return to_tuples(list);
        },
        py::arg("model"), py::arg("query"), py::arg("norm") = "softmax", py::arg("k") = 0);

    py::class_<KnnIndex>(m, "KnnIndex")
        .def_static(
            "build",
            [](const EntityEmbeddingStore& store, const std::vector<std::string>& assertions,
               std::size_t k, const std::string& type_predicate) {
                AssertionStream stream(assertions, type_predicate);
                return KnnIndex::build(store, stream, k);
            },
            py::arg("store"), py::arg("assertions"), py::arg("k") = 10,
            py::arg("type_predicate") = std::string(kRdfType))
        .def_property_readonly("rows", &KnnIndex::rows)
        .def_property_readonly("k", &KnnIndex::k)
        .def("memory_bytes", &KnnIndex::memory_bytes)
        .def("score", [](const KnnIndex& index, const std::vector<double>& query) {
            return to_tuples(knn_recommend(index, query));
        });

    m.def(
        "partition",
        [](const std::string& assertions, std::uint32_t folds, std::uint64_t seed,
           const std::string& out_dir, const std::string& type_predicate) {
            PartitionSpec spec = partition(assertions, folds, seed, out_dir, type_predicate);
            nlohmann::json summary{{"fold_count", spec.fold_count},
                                   {"fold_sizes", spec.fold_sizes},
                                   {"distinct_types", spec.distinct_types},
                                   {"small_types", spec.small_types}};
            return summary.dump();
        },
        py::arg("assertions"), py::arg("folds"), py::arg("seed"), py::arg("out_dir"),
        py::arg("type_predicate") = std::string(kRdfType));

    m.def(
        "evaluate",
        [](const std::vector<std::string>& folds, const EntityEmbeddingStore& store,
           std::uint32_t test_fold, const std::string& method, std::size_t sample_size,
           std::uint64_t seed, std::size_t k_max, const std::string& type_predicate) {
            EvalOptions options;
            options.test_fold = test_fold;
            options.method = method;
            options.sample_size = sample_size;
            options.seed = seed;
            options.k_max = k_max;
            options.type_predicate = type_predicate;
            return run_experiment(folds, store, options).to_json();
        },
        py::arg("folds"), py::arg("store"), py::arg("test_fold") = 0,
        py::arg("method") = "embedding", py::arg("sample_size") = 5000, py::arg("seed") = 0,
        py::arg("k_max") = 15, py::arg("type_predicate") = std::string(kRdfType));

    m.def(
        "cluster",
        [](const TypeEmbeddingModel& model, const EntityEmbeddingStore& store,
           const std::string& out_dir, std::size_t top_k, bool gzip, unsigned threads,
           const std::string& norm) {
            ClusterOptions options;
            options.top_k = top_k;
            options.gzip = gzip;
            options.threads = threads;
            options.normalizer = normalizer_from_name(norm);
            ClusterSummary summary = cluster_all(model, store, out_dir, options);
            nlohmann::json doc{{"entities", summary.entities_written},
                               {"skipped", summary.skipped},
                               {"output_bytes", summary.output_bytes},
                               {"seconds", summary.seconds},
                               {"parts", summary.part_paths}};
            return doc.dump();
        },
        py::arg("model"), py::arg("store"), py::arg("out_dir"), py::arg("top_k") = 0,
        py::arg("gzip") = false, py::arg("threads") = 0, py::arg("norm") = "softmax");

    m.def(
        "tsne",
        [](const std::vector<std::vector<double>>& matrix, double perplexity,
           std::size_t iterations, double learning_rate, std::uint64_t seed) {
            ProjectionJob job;
            job.dim = matrix.empty() ? 0 : matrix[0].size();
            for (const auto& row : matrix) {
                if (row.size() != job.dim) throw UsageError("ragged projection matrix");
                job.matrix.insert(job.matrix.end(), row.begin(), row.end());
                job.row_iris.emplace_back();
                job.labels.emplace_back();
            }
            job.perplexity = perplexity;
            job.iterations = iterations;
            job.learning_rate = learning_rate;
            job.seed = seed;
            std::vector<double> coords = tsne_project(job);
            std::vector<std::pair<double, double>> out;
            out.reserve(job.rows());
            for (std::size_t i = 0; i < job.rows(); ++i)
                out.emplace_back(coords[i * 2], coords[i * 2 + 1]);
            return out;
        },
        py::arg("matrix"), py::arg("perplexity") = 30.0, py::arg("iterations") = 1000,
        py::arg("learning_rate") = 200.0, py::arg("seed") = 0);

    m.def(
        "project_subtypes",
        [](const TypeEmbeddingModel& model, const std::string& ontology_path,
           const std::vector<std::string>& roots, double perplexity, std::size_t iterations,
           double learning_rate, std::uint64_t seed) {
            OntologyIndex index = build_ontology_index(ontology_path);
            ProjectionJob job = select_subtype_matrix(model, index, roots);
            job.perplexity = perplexity;
            job.iterations = iterations;
            job.learning_rate = learning_rate;
            job.seed = seed;
            std::vector<double> coords = tsne_project(job);
            std::vector<std::tuple<std::string, std::string, double, double>> out;
            out.reserve(job.rows());
            for (std::size_t i = 0; i < job.rows(); ++i)
                out.emplace_back(job.row_iris[i], job.labels[i], coords[i * 2],
                                 coords[i * 2 + 1]);
            return out;
        },
        py::arg("model"), py::arg("ontology"), py::arg("roots"), py::arg("perplexity") = 30.0,
        py::arg("iterations") = 1000, py::arg("learning_rate") = 200.0, py::arg("seed") = 0);
}
