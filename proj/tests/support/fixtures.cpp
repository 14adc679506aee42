#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>

#include "typeforge/common.hpp"
#include "typeforge/ntriples.hpp"

namespace testsupport {

TempDir::TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "typeforge-XXXXXX").string();
    std::vector<char> buf(pattern.begin(), pattern.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
    path_ = buf.data();
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::string TempDir::write(const std::string& name, const std::string& content) const {
    std::string full = path_ + "/" + name;
    std::ofstream out(full, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + full);
    return full;
}

std::string f1_embeddings_text() {
    return "3 2\n" + kE1 + " 1 0\n" + kE2 + " 0 1\n" + kE3 + " 0.6 0.8\n";
}

std::string assertion_line(const std::string& subject, const std::string& type_iri) {
    return "<" + subject + "> <" + std::string(typeforge::kRdfType) + "> <" + type_iri + "> .\n";
}

std::string f1_assertions_text() {
    return assertion_line(kE1, kTypeA) + assertion_line(kE2, kTypeA) +
           assertion_line(kE2, kTypeB) + assertion_line(kE3, kTypeB);
}

std::map<std::string, std::vector<double>> naive_type_vectors(
    const typeforge::EntityEmbeddingStore& store,
    const std::vector<std::pair<std::string, std::string>>& assertions) {
    // Distinct pairs, embedded entities only.
    std::map<std::string, std::set<std::string>> types_of;
    for (const auto& [subject, type_iri] : assertions)
        if (store.row_of(subject)) types_of[subject].insert(type_iri);

    std::map<std::string, std::vector<double>> sums;
    for (const auto& [subject, types] : types_of) {
        auto vec = *store.vector_of(subject);
        double weight = 1.0 / static_cast<double>(types.size());
        for (const auto& type_iri : types) {
            auto& sum = sums[type_iri];
            if (sum.empty()) sum.assign(store.dim(), 0.0);
            for (std::size_t c = 0; c < store.dim(); ++c) sum[c] += vec[c] * weight;
        }
    }

    std::map<std::string, std::vector<double>> out;
    for (auto& [type_iri, sum] : sums) {
        double norm = typeforge::l2_norm(sum);
        if (norm < 1e-12) continue;
        for (double& v : sum) v /= norm;
        out[type_iri] = std::move(sum);
    }
    return out;
}

namespace {

std::string format_vector_row(const std::string& token, const std::vector<double>& vec) {
    std::string row = token;
    for (double v : vec) {
        row += ' ';
        row += typeforge::format_double(v);
    }
    row += '\n';
    return row;
}

std::vector<double> random_unit_vector(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> vec(dim);
    double norm = 0.0;
    while (norm < 1e-6) {
        for (double& v : vec) v = gauss(rng);
        norm = typeforge::l2_norm(vec);
    }
    for (double& v : vec) v /= norm;
    return vec;
}

}  // namespace

SyntheticKb make_random_kb(std::size_t entities, std::size_t types, std::size_t dim,
                           std::size_t max_types_per_entity, std::uint64_t seed,
                           std::size_t absent_every, std::size_t duplicate_every) {
    std::mt19937_64 rng(seed);
    SyntheticKb kb;

    std::size_t embedded = 0;
    std::string rows;
    std::vector<bool> present(entities, true);
    for (std::size_t i = 0; i < entities; ++i) {
        if (absent_every > 0 && i % absent_every == absent_every - 1) {
            present[i] = false;
            continue;
        }
        rows += format_vector_row("e" + std::to_string(i), random_unit_vector(rng, dim));
        ++embedded;
    }
    kb.embeddings_text =
        std::to_string(embedded) + " " + std::to_string(dim) + "\n" + rows;

    std::uniform_int_distribution<std::size_t> type_count(1, max_types_per_entity);
    std::uniform_int_distribution<std::size_t> type_pick(0, types - 1);
    for (std::size_t i = 0; i < entities; ++i) {
        std::set<std::size_t> chosen;
        std::size_t want = type_count(rng);
        while (chosen.size() < want) chosen.insert(type_pick(rng));
        for (std::size_t t : chosen) {
            kb.assertions.emplace_back("e" + std::to_string(i), "t" + std::to_string(t));
            if (duplicate_every > 0 && kb.assertions.size() % duplicate_every == 0)
                kb.assertions.push_back(kb.assertions.back());
        }
    }
    std::shuffle(kb.assertions.begin(), kb.assertions.end(), rng);
    for (const auto& [subject, type_iri] : kb.assertions)
        kb.assertions_text += assertion_line(subject, type_iri);
    return kb;
}

SyntheticKb make_cluster_corpus(std::size_t entities, std::size_t types, std::size_t dim,
                                double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    SyntheticKb kb;

    std::vector<std::vector<double>> centers;
    centers.reserve(types);
    for (std::size_t t = 0; t < types; ++t) centers.push_back(random_unit_vector(rng, dim));

    std::string rows;
    for (std::size_t i = 0; i < entities; ++i) {
        std::size_t t = i % types;
        std::vector<double> vec = centers[t];
        for (double& v : vec) v += noise(rng);
        double norm = typeforge::l2_norm(vec);
        for (double& v : vec) v /= norm;
        rows += format_vector_row("e" + std::to_string(i), vec);
        kb.assertions.emplace_back("e" + std::to_string(i), "t" + std::to_string(t));
    }
    kb.embeddings_text =
        std::to_string(entities) + " " + std::to_string(dim) + "\n" + rows;
    std::shuffle(kb.assertions.begin(), kb.assertions.end(), rng);
    for (const auto& [subject, type_iri] : kb.assertions)
        kb.assertions_text += assertion_line(subject, type_iri);
    return kb;
}

}  // namespace testsupport
