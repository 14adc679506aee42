#include "typeforge/eval.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include <json.hpp>

#include "typeforge/knn.hpp"
#include "typeforge/line_reader.hpp"
#include "typeforge/log.hpp"
#include "typeforge/type_embedder.hpp"

namespace typeforge {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

PartitionSpec partition(const std::string& assertion_path, std::uint32_t fold_count,
                        std::uint64_t seed, const std::string& out_dir,
                        const std::string& type_predicate) {
    if (fold_count < 2) throw UsageError("fold count must be at least 2");
    std::filesystem::create_directories(out_dir);

    // Pass 1: per-type lists of assertion ordinals, in stream order.
    std::map<std::string, std::vector<std::uint64_t>> per_type;
    {
        AssertionStream stream(assertion_path, type_predicate);
        TypeAssertion assertion;
        std::uint64_t ordinal = 0;
        while (stream.next(assertion)) per_type[assertion.type_iri].push_back(ordinal++);
    }

    PartitionSpec spec;
    spec.fold_count = fold_count;
    spec.seed = seed;
    spec.distinct_types = per_type.size();
    std::uint64_t total = 0;
    for (const auto& [type, ordinals] : per_type) total += ordinals.size();
    spec.assignment.assign(total, 0);
    spec.fold_sizes.assign(fold_count, 0);

    // Types in lexicographic order (std::map) keep the RNG stream stable.
    std::mt19937_64 rng(seed);
    for (auto& [type, ordinals] : per_type) {
        std::shuffle(ordinals.begin(), ordinals.end(), rng);
        auto start = static_cast<std::uint32_t>(rng() % fold_count);
        if (ordinals.size() < fold_count) ++spec.small_types;
        for (std::size_t j = 0; j < ordinals.size(); ++j) {
            auto fold = static_cast<std::uint8_t>((start + j) % fold_count);
            spec.assignment[ordinals[j]] = fold;
            ++spec.fold_sizes[fold];
        }
    }
    if (spec.small_types > 0)
        logging::warn("types with fewer assertions than folds count=" +
                      std::to_string(spec.small_types));

    // Pass 2: deal each assertion to its fold file.
    std::vector<std::unique_ptr<LineWriter>> writers;
    std::vector<std::string> fold_paths;
    for (std::uint32_t f = 0; f < fold_count; ++f) {
        fold_paths.push_back(out_dir + "/fold-" + std::to_string(f) + ".nt");
        writers.push_back(open_line_writer(fold_paths.back()));
    }
    {
        AssertionStream stream(assertion_path, type_predicate);
        TypeAssertion assertion;
        std::uint64_t ordinal = 0;
        while (stream.next(assertion))
            writers[spec.assignment[ordinal++]]->write_line(
                format_assertion(assertion, type_predicate));
    }
    writers.clear();

    nlohmann::json meta{{"fold_count", fold_count},
                        {"seed", seed},
                        {"assertions", total},
                        {"distinct_types", spec.distinct_types},
                        {"small_types", spec.small_types},
                        {"fold_sizes", spec.fold_sizes},
                        {"fold_files", fold_paths},
                        {"type_predicate", type_predicate}};
    std::ofstream meta_out(out_dir + "/partition.json");
    meta_out << meta.dump(2) << '\n';
    if (!meta_out) throw DataError("cannot write partition.json under " + out_dir);
    return spec;
}

double recall_at_k(const RecommendationList& ranked, const std::set<std::string>& truth,
                   std::size_t k) {
    if (truth.empty()) throw std::invalid_argument("recall_at_k: empty truth set");
    std::size_t limit = std::min(k, ranked.entries.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < limit; ++i)
        if (truth.count(ranked.entries[i].type_iri)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

EvalReport run_experiment(const std::vector<std::string>& fold_paths,
                          const EntityEmbeddingStore& store, const EvalOptions& options) {
    if (options.test_fold >= fold_paths.size())
        throw UsageError("test fold " + std::to_string(options.test_fold) + " out of range");
    bool use_embedding = options.method == "embedding";
    std::size_t knn_k = 0;
    if (!use_embedding) {
        if (options.method.rfind("knn-", 0) != 0)
            throw UsageError("unknown method: " + options.method +
                             " (expected embedding or knn-<k>)");
        try {
            knn_k = std::stoul(options.method.substr(4));
        } catch (...) {
            throw UsageError("unknown method: " + options.method);
        }
        if (knn_k == 0) throw UsageError("knn neighbor count must be at least 1");
    }

    std::vector<std::string> train_paths;
    for (std::size_t i = 0; i < fold_paths.size(); ++i)
        if (i != options.test_fold) train_paths.push_back(fold_paths[i]);

    FoldResult fold;
    fold.fold = options.test_fold;
    fold.recall_at_k.assign(options.k_max, 0.0);

    // Train.
    auto train_start = std::chrono::steady_clock::now();
    TypeEmbeddingModel model;
    KnnIndex knn_index;
    if (use_embedding) {
        BuildOptions build_options;
        build_options.type_predicate = options.type_predicate;
        model = build_model(train_paths, store, build_options);
        fold.model_bytes = static_cast<std::uint64_t>(model.size()) * model.dim() * sizeof(double);
    } else {
        AssertionStream stream(train_paths, options.type_predicate);
        knn_index = KnnIndex::build(store, stream, knn_k);
        fold.model_bytes = knn_index.memory_bytes();
    }
    fold.train_seconds = seconds_since(train_start);

    // Strict-relevance ground truth from the test fold only.
    std::map<std::string, std::set<std::string>> truth;
    std::set<std::string> unembedded;
    {
        AssertionStream stream(fold_paths[options.test_fold], options.type_predicate);
        TypeAssertion assertion;
        while (stream.next(assertion)) {
            if (!store.row_of(assertion.subject)) {
                unembedded.insert(assertion.subject);
                continue;
            }
            truth[assertion.subject].insert(assertion.type_iri);
        }
    }
    fold.excluded_no_embedding = unembedded.size();

    // Unique test entities, sampled without replacement.
    std::vector<std::string> entities;
    entities.reserve(truth.size());
    for (const auto& [entity, types] : truth) entities.push_back(entity);
    std::mt19937_64 rng(options.seed);
    std::shuffle(entities.begin(), entities.end(), rng);
    if (options.sample_size < entities.size()) {
        entities.resize(options.sample_size);
    } else if (options.sample_size > entities.size()) {
        logging::warn("sample size " + std::to_string(options.sample_size) +
                      " exceeds test-fold entities " + std::to_string(entities.size()) +
                      ", using all");
    }

    // Scoring loop, timed on its own.
    double recs_total = 0.0;
    auto score_start = std::chrono::steady_clock::now();
    for (const auto& entity : entities) {
        auto query = *store.vector_of(entity);
        RecommendationList list =
            use_embedding ? score_types(model, query) : knn_recommend(knn_index, query);
        const auto& entity_truth = truth[entity];
        std::size_t limit = std::min(options.k_max, list.entries.size());
        std::size_t hits = 0;
        for (std::size_t k = 0; k < options.k_max; ++k) {
            if (k < limit && entity_truth.count(list.entries[k].type_iri)) ++hits;
            fold.recall_at_k[k] += static_cast<double>(hits) / entity_truth.size();
        }
        for (const auto& entry : list.entries)
            if (entry.prob > 0.0) recs_total += 1.0;
    }
    fold.score_seconds = seconds_since(score_start);
    fold.entities_scored = entities.size();
    if (!entities.empty()) {
        for (double& r : fold.recall_at_k) r /= static_cast<double>(entities.size());
        fold.recs_per_entity = recs_total / static_cast<double>(entities.size());
    }

    EvalReport report;
    report.method = options.method;
    report.k_max = options.k_max;
    report.seed = options.seed;
    report.sample_size = options.sample_size;
    report.folds.push_back(std::move(fold));
    report.recall_at_k = report.folds[0].recall_at_k;
    report.recs_per_entity = report.folds[0].recs_per_entity;
    report.score_seconds = report.folds[0].score_seconds;
    return report;
}

EvalReport aggregate_reports(const std::vector<EvalReport>& reports) {
    if (reports.empty()) throw DataError("no reports to aggregate");
    EvalReport merged;
    merged.method = reports[0].method;
    merged.k_max = reports[0].k_max;
    merged.seed = reports[0].seed;
    merged.sample_size = reports[0].sample_size;
    for (const auto& report : reports) {
        if (report.method != merged.method)
            throw DataError("cannot aggregate reports for different methods");
        merged.k_max = std::min(merged.k_max, report.k_max);
        for (const auto& fold : report.folds) merged.folds.push_back(fold);
    }
    merged.recall_at_k.assign(merged.k_max, 0.0);
    for (const auto& fold : merged.folds) {
        for (std::size_t k = 0; k < merged.k_max; ++k) merged.recall_at_k[k] += fold.recall_at_k[k];
        merged.recs_per_entity += fold.recs_per_entity;
        merged.score_seconds += fold.score_seconds;
    }
    auto fold_count = static_cast<double>(merged.folds.size());
    for (double& r : merged.recall_at_k) r /= fold_count;
    merged.recs_per_entity /= fold_count;
    return merged;
}

std::string EvalReport::to_json() const {
    nlohmann::json folds_json = nlohmann::json::array();
    for (const auto& fold : folds) {
        folds_json.push_back({{"fold", fold.fold},
                              {"entities_scored", fold.entities_scored},
                              {"excluded_no_embedding", fold.excluded_no_embedding},
                              {"excluded_empty_truth", fold.excluded_empty_truth},
                              {"recall_at_k", fold.recall_at_k},
                              {"recs_per_entity", fold.recs_per_entity},
                              {"train_seconds", fold.train_seconds},
                              {"score_seconds", fold.score_seconds},
                              {"model_bytes", fold.model_bytes}});
    }
    nlohmann::json doc{{"method", method},
                       {"k_max", k_max},
                       {"seed", seed},
                       {"sample_size", sample_size},
                       {"folds", folds_json},
                       {"recall_at_k", recall_at_k},
                       {"recs_per_entity", recs_per_entity},
                       {"score_seconds", score_seconds}};
    return doc.dump(2);
}

EvalReport EvalReport::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad report JSON: ") + e.what());
    }
    EvalReport report;
    try {
        report.method = doc.at("method").get<std::string>();
        report.k_max = doc.at("k_max").get<std::size_t>();
        report.seed = doc.at("seed").get<std::uint64_t>();
        report.sample_size = doc.at("sample_size").get<std::size_t>();
        report.recall_at_k = doc.at("recall_at_k").get<std::vector<double>>();
        report.recs_per_entity = doc.at("recs_per_entity").get<double>();
        report.score_seconds = doc.at("score_seconds").get<double>();
        for (const auto& fold_json : doc.at("folds")) {
            FoldResult fold;
            fold.fold = fold_json.at("fold").get<std::uint32_t>();
            fold.entities_scored = fold_json.at("entities_scored").get<std::uint64_t>();
            fold.excluded_no_embedding = fold_json.at("excluded_no_embedding").get<std::uint64_t>();
            fold.excluded_empty_truth = fold_json.at("excluded_empty_truth").get<std::uint64_t>();
            fold.recall_at_k = fold_json.at("recall_at_k").get<std::vector<double>>();
            fold.recs_per_entity = fold_json.at("recs_per_entity").get<double>();
            fold.train_seconds = fold_json.at("train_seconds").get<double>();
            fold.score_seconds = fold_json.at("score_seconds").get<double>();
            fold.model_bytes = fold_json.at("model_bytes").get<std::uint64_t>();
            report.folds.push_back(std::move(fold));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad report JSON: ") + e.what());
    }
    return report;
}

std::string compare_methods(const std::vector<EvalReport>& reports) {
    if (reports.empty()) throw DataError("compare needs at least one report");
    std::size_t k_max = reports[0].k_max;
    for (const auto& report : reports) k_max = std::min(k_max, report.k_max);
    for (const auto& report : reports)
        if (report.k_max != k_max)
            logging::warn("k_max mismatch, truncating to " + std::to_string(k_max));

    std::vector<std::string> names;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        std::string name = reports[i].method;
        for (std::size_t j = 0; j < i; ++j)
            if (reports[j].method == name) {
                name += "#" + std::to_string(i);
                break;
            }
        names.push_back(name);
    }

    std::string out = "metric";
    for (const auto& name : names) out += '\t' + name;
    out += '\n';
    auto row = [&](const std::string& label, auto value_of) {
        out += label;
        for (std::size_t i = 0; i < reports.size(); ++i)
            out += '\t' + format_double(value_of(reports[i]));
        out += '\n';
    };
    for (std::size_t k = 1; k <= k_max; ++k)
        row("recall@" + std::to_string(k),
            [k](const EvalReport& r) { return r.recall_at_k[k - 1]; });
    row("recs_per_entity", [](const EvalReport& r) { return r.recs_per_entity; });
    row("score_seconds", [](const EvalReport& r) { return r.score_seconds; });
    row("entities_per_second", [](const EvalReport& r) {
        std::uint64_t entities = 0;
        for (const auto& fold : r.folds) entities += fold.entities_scored;
        return r.score_seconds > 0 ? entities / r.score_seconds : 0.0;
    });
    const double base_seconds = reports[0].score_seconds;
    row("speedup_vs_" + names[0], [base_seconds](const EvalReport& r) {
        return base_seconds > 0 ? r.score_seconds / base_seconds : 0.0;
    });
    for (std::size_t k = 1; k <= k_max; ++k)
        row("delta_recall@" + std::to_string(k), [k, &reports](const EvalReport& r) {
            return r.recall_at_k[k - 1] - reports[0].recall_at_k[k - 1];
        });
    return out;
}

}  // namespace typeforge
