#pragma once
// Shared test fixtures: temp directories, the 3-entity/2-type reference KB,
// synthetic corpora, and the naive weighted-mean oracle the streaming
// builder is checked against.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "typeforge/embedding_store.hpp"

namespace testsupport {

// mkdtemp wrapper; removes the tree on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::string& path() const { return path_; }
    // Writes content to <dir>/<name> and returns the full path.
    std::string write(const std::string& name, const std::string& content) const;

private:
    std::string path_;
};

// Reference KB: e1=(1,0) types {A}; e2=(0,1) types {A,B}; e3=(0.6,0.8)
// types {B}. Accumulators M[A]=(1.0,0.5), M[B]=(0.6,1.3).
inline const std::string kE1 = "http://example.org/e1";
inline const std::string kE2 = "http://example.org/e2";
inline const std::string kE3 = "http://example.org/e3";
inline const std::string kTypeA = "http://example.org/A";
inline const std::string kTypeB = "http://example.org/B";

std::string f1_embeddings_text();
std::string f1_assertions_text();
std::string assertion_line(const std::string& subject, const std::string& type_iri);

// Naive reference: materialize distinct (entity, type) pairs in memory,
// take the weighted mean with weight 1/|T(s)|, normalize. Types whose sum
// has norm < 1e-12 are dropped. Result keyed by type IRI.
std::map<std::string, std::vector<double>> naive_type_vectors(
    const typeforge::EntityEmbeddingStore& store,
    const std::vector<std::pair<std::string, std::string>>& assertions);

// Random KB: entity vectors on the unit sphere, entities named e<i>, types
// t<j>, every entity 1..max_types_per_entity distinct random types.
// `absent_every` > 0 leaves every n-th entity out of the embeddings file to
// exercise the embedded-entity guard.
struct SyntheticKb {
    std::string embeddings_text;
    std::string assertions_text;
    std::vector<std::pair<std::string, std::string>> assertions;  // as written
};
SyntheticKb make_random_kb(std::size_t entities, std::size_t types, std::size_t dim,
                           std::size_t max_types_per_entity, std::uint64_t seed,
                           std::size_t absent_every = 0, std::size_t duplicate_every = 0);

// Separable corpus: `types` random unit centers, entities drawn per type by
// adding Gaussian noise (sigma) to the center and re-normalizing. Each
// entity asserts exactly its own cluster type.
SyntheticKb make_cluster_corpus(std::size_t entities, std::size_t types, std::size_t dim,
                                double sigma, std::uint64_t seed);

}  // namespace testsupport
