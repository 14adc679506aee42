#pragma once
// Streaming N-Triples ingestion: type assertions and the subClassOf index.
//
// The parser is a strict line parser for the one-triple-per-line dumps
// DBpedia distributes (full Turtle is out of scope). A stream is
// single-consumer; re-open the file for another pass.

#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "typeforge/line_reader.hpp"

namespace typeforge {

inline constexpr std::string_view kRdfType =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kRdfsSubClassOf =
    "http://www.w3.org/2000/01/rdf-schema#subClassOf";

struct TypeAssertion {
    std::string subject;   // entity IRI, no angle brackets
    std::string type_iri;  // type IRI, no angle brackets
};

enum class TermKind { iri, blank, literal };

struct Triple {
    TermKind subject_kind;
    TermKind object_kind;
    std::string subject;
    std::string predicate;
    std::string object;
};

enum class LineStatus { triple, blank_or_comment, malformed };

// Parses one N-Triples line. IRIs come back without angle brackets, blank
// nodes keep their "_:" prefix, literals keep their lexical form only.
LineStatus parse_triple_line(std::string_view line, Triple& out);

// Tallies for one streaming pass. The invariant over non-blank lines is
//   yielded + skipped_non_type() + malformed == parsed lines.
struct ParseStats {
    std::uint64_t total_lines = 0;
    std::uint64_t blank_or_comment = 0;
    std::uint64_t yielded = 0;
    std::uint64_t skipped_other_predicate = 0;
    std::uint64_t skipped_non_iri_object = 0;
    std::uint64_t skipped_blank_subject = 0;
    std::uint64_t malformed = 0;

    std::uint64_t skipped_non_type() const {
        return skipped_other_predicate + skipped_non_iri_object + skipped_blank_subject;
    }
};

// Optional JSON-lines sink for per-line skip details.
class SkipSink {
public:
    explicit SkipSink(std::ostream& out) : out_(&out) {}
    void record(std::string_view file, std::uint64_t line, std::string_view reason);

private:
    std::ostream* out_;
};

// Streams TypeAssertions out of one or more N-Triples files. Yields every
// triple whose predicate equals `type_predicate`, whose subject is an IRI
// and whose object is an IRI; everything else is counted and skipped.
class AssertionStream {
public:
    explicit AssertionStream(std::vector<std::string> paths,
                             std::string type_predicate = std::string(kRdfType),
                             SkipSink* sink = nullptr);
    AssertionStream(const std::string& path,
                    std::string type_predicate = std::string(kRdfType),
                    SkipSink* sink = nullptr);

    bool next(TypeAssertion& out);

    const ParseStats& stats() const { return stats_; }
    const std::string& type_predicate() const { return type_predicate_; }
    const std::vector<std::string>& paths() const { return paths_; }

private:
    bool advance_file();

    std::vector<std::string> paths_;
    std::string type_predicate_;
    SkipSink* sink_ = nullptr;
    std::size_t file_index_ = 0;
    std::unique_ptr<LineReader> reader_;
    ParseStats stats_;
    std::string line_;
};

// Direct subClassOf edges only; no transitive closure.
struct OntologyIndex {
    // subject type -> its direct super-types
    std::map<std::string, std::set<std::string>> super_of;
    // super type -> its direct sub-types
    std::map<std::string, std::set<std::string>> sub_of;

    std::uint64_t triples_indexed = 0;
    std::uint64_t self_loops_dropped = 0;
    ParseStats stats;

    std::set<std::string> direct_subtypes(const std::string& type_iri) const {
        auto it = sub_of.find(type_iri);
        return it == sub_of.end() ? std::set<std::string>{} : it->second;
    }
};

OntologyIndex build_ontology_index(const std::string& path, SkipSink* sink = nullptr);

// Canonical serialization used when writing fold files.
std::string format_assertion(const TypeAssertion& assertion, std::string_view predicate);

}  // namespace typeforge
