// typeforge: type embeddings from entity embeddings, plus the evaluation
// and analysis commands built around them. One binary, subcommand style.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "typeforge/cluster.hpp"
#include "typeforge/common.hpp"
#include "typeforge/embedding_store.hpp"
#include "typeforge/eval.hpp"
#include "typeforge/knn.hpp"
#include "typeforge/line_reader.hpp"
#include "typeforge/log.hpp"
#include "typeforge/ntriples.hpp"
#include "typeforge/recommender.hpp"
#include "typeforge/tsne.hpp"
#include "typeforge/type_embedder.hpp"

namespace {

using namespace typeforge;

struct GlobalOptions {
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0 = sequential timing mode
    std::string log_level = "info";
    std::string type_predicate = std::string(kRdfType);
};

// Shared flags on every subcommand; environment supplies defaults, explicit
// flags win.
void add_global_options(CLI::App* cmd, GlobalOptions& options) {
    cmd->add_option("--seed", options.seed, "Seed for all randomness")
        ->envname("TYPEFORGE_SEED");
    cmd->add_option("--threads", options.threads, "Worker threads; 0 runs sequentially")
        ->envname("TYPEFORGE_THREADS");
    cmd->add_option("--log-level", options.log_level, "debug, info, warn, or error")
        ->envname("TYPEFORGE_LOG_LEVEL");
}

void apply_log_level(const GlobalOptions& options) {
    if (!logging::set_level_by_name(options.log_level))
        throw UsageError("unknown log level: " + options.log_level);
}

std::unique_ptr<std::ofstream> open_skip_report(const std::string& path,
                                                std::optional<SkipSink>& sink) {
    if (path.empty()) return nullptr;
    auto out = std::make_unique<std::ofstream>(path);
    if (!*out) throw DataError("cannot open skip report " + path);
    sink.emplace(*out);
    return out;
}

EntityEmbeddingStore load_store(const std::string& path, SkipSink* sink) {
    EmbeddingLoadReport report;
    auto store = EntityEmbeddingStore::load(path, true, &report, sink);
    logging::info("embeddings loaded: " + std::to_string(store.size()) + " of " +
                  std::to_string(report.declared_rows) + " declared rows, dim " +
                  std::to_string(store.dim()));
    return store;
}

std::vector<std::string> read_id_file(const std::string& path) {
    auto reader = open_line_reader(path);
    std::vector<std::string> ids;
    std::string line;
    while (reader->next(line)) {
        if (line.empty()) continue;
        ids.push_back(line);
    }
    return ids;
}

nlohmann::json recommendation_json(const RecommendationList& list) {
    nlohmann::json types = nlohmann::json::array();
    for (const auto& entry : list.entries)
        types.push_back({entry.type_iri, entry.raw, entry.prob});
    return nlohmann::json{{"id", list.query_id}, {"types", std::move(types)}};
}

// Emits one JSON line per list, to a file when `out_path` is set, else to
// stdout.
class JsonLineOutput {
public:
    explicit JsonLineOutput(const std::string& out_path) {
        if (!out_path.empty()) writer_ = open_line_writer(out_path);
    }
    void write(const nlohmann::json& doc) {
        if (writer_)
            writer_->write_line(doc.dump());
        else
            std::cout << doc.dump() << '\n';
    }

private:
    std::unique_ptr<LineWriter> writer_;
};

int run_build_types(const GlobalOptions& global, const std::string& embeddings_path,
                    const std::vector<std::string>& assertion_paths, const std::string& out_path,
                    const std::string& skip_report_path) {
    std::optional<SkipSink> sink;
    auto skip_stream = open_skip_report(skip_report_path, sink);
    auto store = load_store(embeddings_path, sink ? &*sink : nullptr);

    BuildOptions options;
    options.type_predicate = global.type_predicate;
    options.shards = global.threads > 1 ? global.threads : 1;
    options.skip_sink = sink ? &*sink : nullptr;
    BuildReport report;
    TypeEmbeddingModel model = build_model(assertion_paths, store, options, &report);
    model.save(out_path);

    nlohmann::json summary{{"model", out_path},
                           {"dim", model.dim()},
                           {"types", model.size()},
                           {"entities_with_types", report.entities_with_types},
                           {"assertions_used", report.pass2_stats.yielded},
                           {"duplicate_pairs", report.duplicate_pairs},
                           {"skipped_missing_embedding", report.skipped_missing_embedding},
                           {"malformed_lines", report.pass1_stats.malformed},
                           {"dropped_types", report.dropped_types}};
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int run_recommend(const GlobalOptions& global, const std::string& model_path,
                  const std::string& embeddings_path, const std::string& ids_path, std::size_t k,
                  const std::string& norm_name, const std::string& out_path) {
    TypeEmbeddingModel model = TypeEmbeddingModel::load(model_path);
    auto store = load_store(embeddings_path, nullptr);
    auto ids = read_id_file(ids_path);
    Normalizer normalizer = normalizer_from_name(norm_name);

    JsonLineOutput output(out_path);
    BatchReport report;
    recommend_batch(model, store, ids, k, normalizer,
                    [&](const RecommendationList& list) { output.write(recommendation_json(list)); },
                    &report, global.threads);
    logging::info("scored " + std::to_string(report.scored) + " ids, skipped " +
                  std::to_string(report.skipped_unknown_id) + " unknown");
    return 0;
}

int run_knn(const GlobalOptions& global, const std::string& embeddings_path,
            const std::vector<std::string>& assertion_paths, const std::string& ids_path,
            std::size_t k, const std::string& out_path) {
    auto store = load_store(embeddings_path, nullptr);
    AssertionStream assertions(assertion_paths, global.type_predicate);
    KnnIndex index = KnnIndex::build(store, assertions, k);
    logging::info("knn index: " + std::to_string(index.rows()) + " labeled rows, k=" +
                  std::to_string(k));
    auto ids = read_id_file(ids_path);

    JsonLineOutput output(out_path);
    std::uint64_t skipped = 0;
    for (const auto& id : ids) {
        auto vec = store.vector_of(id);
        if (!vec) {
            logging::warn("unknown id: " + id);
            ++skipped;
            continue;
        }
        RecommendationList list = knn_recommend(index, *vec);
        list.query_id = id;
        output.write(recommendation_json(list));
    }
    logging::info("scored " + std::to_string(ids.size() - skipped) + " ids, skipped " +
                  std::to_string(skipped) + " unknown");
    return 0;
}

int run_partition(const GlobalOptions& global, const std::string& assertions_path,
                  std::uint32_t folds, const std::string& out_dir) {
    PartitionSpec spec = partition(assertions_path, folds, global.seed, out_dir,
                                   global.type_predicate);
    nlohmann::json summary{{"out_dir", out_dir},
                           {"fold_count", spec.fold_count},
                           {"fold_sizes", spec.fold_sizes},
                           {"distinct_types", spec.distinct_types},
                           {"small_types", spec.small_types}};
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int run_eval(const GlobalOptions& global, const std::vector<std::string>& fold_paths,
             const std::string& embeddings_path, int test_fold, bool all_folds,
             const std::string& method, std::size_t sample_size, std::size_t k_max,
             const std::string& out_path, const std::string& recall_csv_path) {
    auto store = load_store(embeddings_path, nullptr);
    EvalOptions options;
    options.method = method;
    options.sample_size = sample_size;
    options.seed = global.seed;
    options.k_max = k_max;
    options.type_predicate = global.type_predicate;

    EvalReport report;
    if (all_folds) {
        std::vector<EvalReport> per_fold;
        for (std::size_t f = 0; f < fold_paths.size(); ++f) {
            options.test_fold = static_cast<std::uint32_t>(f);
            per_fold.push_back(run_experiment(fold_paths, store, options));
            logging::info("fold " + std::to_string(f) + " done");
        }
        report = aggregate_reports(per_fold);
    } else {
        if (test_fold < 0 || static_cast<std::size_t>(test_fold) >= fold_paths.size())
            throw UsageError("test fold out of range");
        options.test_fold = static_cast<std::uint32_t>(test_fold);
        report = run_experiment(fold_paths, store, options);
    }

    if (!recall_csv_path.empty()) {
        std::ofstream csv(recall_csv_path);
        if (!csv) throw DataError("cannot open " + recall_csv_path);
        csv << "k,recall\n";
        for (std::size_t k = 1; k <= report.k_max; ++k)
            csv << k << ',' << format_double(report.recall_at_k[k - 1]) << '\n';
    }
    if (out_path.empty()) {
        std::cout << report.to_json() << '\n';
    } else {
        std::ofstream out(out_path);
        if (!out) throw DataError("cannot open " + out_path);
        out << report.to_json() << '\n';
    }
    return 0;
}

int run_compare(const std::vector<std::string>& report_paths, const std::string& out_path,
                const std::string& recall_csv_path) {
    std::vector<EvalReport> reports;
    for (const auto& path : report_paths) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open report " + path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        reports.push_back(EvalReport::from_json(text));
    }
    std::string table = compare_methods(reports);
    if (!recall_csv_path.empty()) {
        std::size_t k_max = reports[0].k_max;
        for (const auto& report : reports) k_max = std::min(k_max, report.k_max);
        std::ofstream csv(recall_csv_path);
        if (!csv) throw DataError("cannot open " + recall_csv_path);
        csv << "k";
        for (const auto& report : reports) csv << ',' << report.method;
        csv << '\n';
        for (std::size_t k = 1; k <= k_max; ++k) {
            csv << k;
            for (const auto& report : reports)
                csv << ',' << format_double(report.recall_at_k[k - 1]);
            csv << '\n';
        }
    }
    if (out_path.empty()) {
        std::cout << table;
    } else {
        std::ofstream out(out_path);
        if (!out) throw DataError("cannot open " + out_path);
        out << table;
    }
    return 0;
}

int run_cluster(const GlobalOptions& global, const std::string& model_path,
                const std::string& embeddings_path, const std::string& out_dir, std::size_t top_k,
                bool gzip, const std::string& norm_name) {
    TypeEmbeddingModel model = TypeEmbeddingModel::load(model_path);
    auto store = load_store(embeddings_path, nullptr);
    ClusterOptions options;
    options.top_k = top_k;
    options.gzip = gzip;
    options.threads = global.threads;
    options.normalizer = normalizer_from_name(norm_name);
    ClusterSummary summary = cluster_all(model, store, out_dir, options);
    nlohmann::json doc{{"out_dir", out_dir},
                       {"entities", summary.entities_written},
                       {"skipped", summary.skipped},
                       {"output_bytes", summary.output_bytes},
                       {"seconds", summary.seconds},
                       {"entities_per_second", summary.entities_per_second},
                       {"parts", summary.part_paths}};
    std::cout << doc.dump(2) << '\n';
    return 0;
}

int run_project(const GlobalOptions& global, const std::string& model_path,
                const std::string& ontology_path, const std::vector<std::string>& roots,
                const std::string& out_path, double perplexity, std::size_t iterations,
                double learning_rate) {
    TypeEmbeddingModel model = TypeEmbeddingModel::load(model_path);
    OntologyIndex index = build_ontology_index(ontology_path);
    logging::info("ontology: " + std::to_string(index.triples_indexed) + " subclass edges");

    SelectReport select_report;
    ProjectionJob job = select_subtype_matrix(model, index, roots, &select_report);
    job.perplexity = perplexity;
    job.iterations = iterations;
    job.learning_rate = learning_rate;
    job.seed = global.seed;
    logging::info("projecting " + std::to_string(job.rows()) + " type vectors");

    TsneDiagnostics diagnostics;
    std::vector<double> coords = tsne_project(job, &diagnostics);
    logging::info("final KL divergence " + format_double(diagnostics.final_kl));

    auto writer = open_line_writer(out_path);
    writer->write_line("type\tlabel\tx\ty");
    for (std::size_t i = 0; i < job.rows(); ++i)
        writer->write_line(job.row_iris[i] + '\t' + job.labels[i] + '\t' +
                           format_double(coords[i * 2]) + '\t' + format_double(coords[i * 2 + 1]));
    return 0;
}

int run_ontology_subtypes(const std::string& ontology_path, const std::vector<std::string>& roots,
                          const std::string& out_path) {
    OntologyIndex index = build_ontology_index(ontology_path);
    std::unique_ptr<LineWriter> writer;
    if (!out_path.empty()) writer = open_line_writer(out_path);
    auto emit = [&](const std::string& line) {
        if (writer)
            writer->write_line(line);
        else
            std::cout << line << '\n';
    };
    for (const auto& root : roots) {
        auto subtypes = index.direct_subtypes(root);
        if (subtypes.empty()) logging::warn("root has no direct sub-types: " + root);
        for (const auto& subtype : subtypes) emit(root + '\t' + subtype);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Type embeddings from entity embeddings: build, recommend, evaluate"};
    app.require_subcommand(1);
    GlobalOptions global;

    auto* build_cmd = app.add_subcommand("build-types", "Build type vectors from assertions");
    std::string build_embeddings, build_out, build_skip_report;
    std::vector<std::string> build_assertions;
    build_cmd->add_option("--embeddings", build_embeddings, "Entity embeddings, word2vec text")
        ->required();
    build_cmd->add_option("--assertions", build_assertions, "Type assertion N-Triples files")
        ->required();
    build_cmd->add_option("--out", build_out, "Model output path")->required();
    build_cmd->add_option("--type-predicate", global.type_predicate, "Type predicate IRI")
        ->envname("TYPEFORGE_TYPE_PREDICATE");
    build_cmd->add_option("--skip-report", build_skip_report, "JSON-lines skip report path");
    add_global_options(build_cmd, global);

    auto* recommend_cmd = app.add_subcommand("recommend", "Score entities against a type model");
    std::string rec_model, rec_embeddings, rec_ids, rec_out, rec_norm = "softmax";
    std::size_t rec_k = 10;
    recommend_cmd->add_option("--model", rec_model, "Type model file")->required();
    recommend_cmd->add_option("--embeddings", rec_embeddings, "Entity embeddings")->required();
    recommend_cmd->add_option("--ids", rec_ids, "File with one entity IRI per line")->required();
    recommend_cmd->add_option("--k", rec_k, "Types per entity; 0 keeps all");
    recommend_cmd->add_option("--norm", rec_norm, "softmax or shifted-sum")
        ->envname("TYPEFORGE_NORM");
    recommend_cmd->add_option("--out", rec_out, "JSON-lines output; stdout when omitted");
    add_global_options(recommend_cmd, global);

    auto* knn_cmd = app.add_subcommand("knn", "Weighted k-nearest-neighbor baseline");
    std::string knn_embeddings, knn_ids, knn_out;
    std::vector<std::string> knn_assertions;
    std::size_t knn_k = 10;
    knn_cmd->add_option("--embeddings", knn_embeddings, "Entity embeddings")->required();
    knn_cmd->add_option("--assertions", knn_assertions, "Training type assertions")->required();
    knn_cmd->add_option("--ids", knn_ids, "File with one entity IRI per line")->required();
    knn_cmd->add_option("--k", knn_k, "Neighbor count");
    knn_cmd->add_option("--type-predicate", global.type_predicate, "Type predicate IRI")
        ->envname("TYPEFORGE_TYPE_PREDICATE");
    knn_cmd->add_option("--out", knn_out, "JSON-lines output; stdout when omitted");
    add_global_options(knn_cmd, global);

    auto* partition_cmd = app.add_subcommand("partition", "Stratified split into fold files");
    std::string part_assertions, part_out;
    std::uint32_t part_folds = 5;
    partition_cmd->add_option("--assertions", part_assertions, "Type assertion N-Triples file")
        ->required();
    partition_cmd->add_option("--folds", part_folds, "Fold count");
    partition_cmd->add_option("--out", part_out, "Output directory")->required();
    partition_cmd->add_option("--type-predicate", global.type_predicate, "Type predicate IRI")
        ->envname("TYPEFORGE_TYPE_PREDICATE");
    add_global_options(partition_cmd, global);

    auto* eval_cmd = app.add_subcommand("eval", "Train on all folds but one, score the rest");
    std::vector<std::string> eval_folds;
    std::string eval_embeddings, eval_method = "embedding", eval_out, eval_csv;
    int eval_test_fold = 0;
    bool eval_all = false;
    std::size_t eval_sample = 5000, eval_k_max = 15;
    eval_cmd->add_option("--folds", eval_folds, "Fold files from partition")->required();
    eval_cmd->add_option("--embeddings", eval_embeddings, "Entity embeddings")->required();
    eval_cmd->add_option("--test-fold", eval_test_fold, "Held-out fold index");
    eval_cmd->add_flag("--all-folds", eval_all, "Rotate through every fold and average");
    eval_cmd->add_option("--method", eval_method, "embedding or knn-<k>");
    eval_cmd->add_option("--sample-size", eval_sample, "Test entities to sample");
    eval_cmd->add_option("--k-max", eval_k_max, "Largest k in the recall curve");
    eval_cmd->add_option("--out", eval_out, "Report JSON path; stdout when omitted");
    eval_cmd->add_option("--recall-csv", eval_csv, "Optional per-k recall CSV");
    eval_cmd->add_option("--type-predicate", global.type_predicate, "Type predicate IRI")
        ->envname("TYPEFORGE_TYPE_PREDICATE");
    add_global_options(eval_cmd, global);

    auto* compare_cmd = app.add_subcommand("compare", "Tabulate eval reports side by side");
    std::vector<std::string> compare_reports;
    std::string compare_out, compare_csv;
    compare_cmd->add_option("--reports", compare_reports, "Report JSON files")->required();
    compare_cmd->add_option("--out", compare_out, "TSV path; stdout when omitted");
    compare_cmd->add_option("--recall-csv", compare_csv, "Optional per-k recall CSV");
    add_global_options(compare_cmd, global);

    auto* cluster_cmd = app.add_subcommand("cluster", "Type distribution for every entity");
    std::string cluster_model, cluster_embeddings, cluster_out, cluster_norm = "softmax";
    std::size_t cluster_top_k = 0;
    bool cluster_gzip = false;
    cluster_cmd->add_option("--model", cluster_model, "Type model file")->required();
    cluster_cmd->add_option("--embeddings", cluster_embeddings, "Entity embeddings")->required();
    cluster_cmd->add_option("--out", cluster_out, "Output directory")->required();
    cluster_cmd->add_option("--top-k", cluster_top_k, "Truncate each line; 0 keeps all");
    cluster_cmd->add_flag("--gzip", cluster_gzip, "Compress part files");
    cluster_cmd->add_option("--norm", cluster_norm, "softmax or shifted-sum")
        ->envname("TYPEFORGE_NORM");
    add_global_options(cluster_cmd, global);

    auto* project_cmd = app.add_subcommand("project", "2-D t-SNE of selected type vectors");
    std::string proj_model, proj_ontology, proj_out;
    std::vector<std::string> proj_roots;
    double proj_perplexity = 30.0, proj_lr = 200.0;
    std::size_t proj_iterations = 1000;
    project_cmd->add_option("--model", proj_model, "Type model file")->required();
    project_cmd->add_option("--ontology", proj_ontology, "Subclass N-Triples file")->required();
    project_cmd->add_option("--roots", proj_roots, "Root type IRIs, comma separated")
        ->required()
        ->delimiter(',');
    project_cmd->add_option("--out", proj_out, "Coordinates TSV path")->required();
    project_cmd->add_option("--perplexity", proj_perplexity, "Gaussian perplexity target");
    project_cmd->add_option("--iterations", proj_iterations, "Gradient descent iterations");
    project_cmd->add_option("--learning-rate", proj_lr, "Gradient descent step size");
    add_global_options(project_cmd, global);

    auto* subtypes_cmd =
        app.add_subcommand("ontology-subtypes", "List direct sub-types of given roots");
    std::string sub_ontology, sub_out;
    std::vector<std::string> sub_roots;
    subtypes_cmd->add_option("--ontology", sub_ontology, "Subclass N-Triples file")->required();
    subtypes_cmd->add_option("--roots", sub_roots, "Root type IRIs, comma separated")
        ->required()
        ->delimiter(',');
    subtypes_cmd->add_option("--out", sub_out, "TSV path; stdout when omitted");
    add_global_options(subtypes_cmd, global);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        apply_log_level(global);
        if (*build_cmd)
            return run_build_types(global, build_embeddings, build_assertions, build_out,
                                   build_skip_report);
        if (*recommend_cmd)
            return run_recommend(global, rec_model, rec_embeddings, rec_ids, rec_k, rec_norm,
                                 rec_out);
        if (*knn_cmd)
            return run_knn(global, knn_embeddings, knn_assertions, knn_ids, knn_k, knn_out);
        if (*partition_cmd) return run_partition(global, part_assertions, part_folds, part_out);
        if (*eval_cmd)
            return run_eval(global, eval_folds, eval_embeddings, eval_test_fold, eval_all,
                            eval_method, eval_sample, eval_k_max, eval_out, eval_csv);
        if (*compare_cmd) return run_compare(compare_reports, compare_out, compare_csv);
        if (*cluster_cmd)
            return run_cluster(global, cluster_model, cluster_embeddings, cluster_out,
                               cluster_top_k, cluster_gzip, cluster_norm);
        if (*project_cmd)
            return run_project(global, proj_model, proj_ontology, proj_roots, proj_out,
                               proj_perplexity, proj_iterations, proj_lr);
        if (*subtypes_cmd) return run_ontology_subtypes(sub_ontology, sub_roots, sub_out);
    } catch (const UsageError& e) {
        logging::error(e.what());
        return 1;
    } catch (const DataError& e) {
        logging::error(e.what());
        return 2;
    } catch (const std::exception& e) {
        logging::error(std::string("unexpected: ") + e.what());
        return 2;
    }
    return 0;
}
