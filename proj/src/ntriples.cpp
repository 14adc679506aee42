#include "typeforge/ntriples.hpp"

#include <json.hpp>

#include "typeforge/common.hpp"

namespace typeforge {

namespace {

void skip_ws(std::string_view line, std::size_t& pos) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
}

// <...> with no embedded whitespace or '>'.
bool scan_iri(std::string_view line, std::size_t& pos, std::string& out) {
    if (pos >= line.size() || line[pos] != '<') return false;
    std::size_t end = line.find('>', pos + 1);
    if (end == std::string_view::npos) return false;
    out.assign(line, pos + 1, end - pos - 1);
    if (out.empty() || out.find(' ') != std::string::npos) return false;
    pos = end + 1;
    return true;
}

bool scan_blank(std::string_view line, std::size_t& pos, std::string& out) {
    if (pos + 1 >= line.size() || line[pos] != '_' || line[pos + 1] != ':') return false;
    std::size_t end = pos + 2;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    if (end == pos + 2) return false;
    out.assign(line, pos, end - pos);
    pos = end;
    return true;
}

// "..." with \-escapes, optionally followed by @lang or ^^<datatype>.
bool scan_literal(std::string_view line, std::size_t& pos, std::string& out) {
    if (pos >= line.size() || line[pos] != '"') return false;
    std::size_t i = pos + 1;
    out.clear();
    while (i < line.size() && line[i] != '"') {
        if (line[i] == '\\') {
            if (i + 1 >= line.size()) return false;
            out.push_back(line[i + 1]);
            i += 2;
        } else {
            out.push_back(line[i]);
            ++i;
        }
    }
    if (i >= line.size()) return false;  // unterminated
    ++i;                                 // closing quote
    if (i < line.size() && line[i] == '@') {
        ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i == start) return false;
    } else if (i + 1 < line.size() && line[i] == '^' && line[i + 1] == '^') {
        i += 2;
        std::string datatype;
        if (!scan_iri(line, i, datatype)) return false;
    }
    pos = i;
    return true;
}

}  // namespace

LineStatus parse_triple_line(std::string_view line, Triple& out) {
    std::size_t pos = 0;
    skip_ws(line, pos);
    if (pos >= line.size() || line[pos] == '#') return LineStatus::blank_or_comment;

    // subject: IRI or blank node
    if (line[pos] == '<') {
        if (!scan_iri(line, pos, out.subject)) return LineStatus::malformed;
        out.subject_kind = TermKind::iri;
    } else if (line[pos] == '_') {
        if (!scan_blank(line, pos, out.subject)) return LineStatus::malformed;
        out.subject_kind = TermKind::blank;
    } else {
        return LineStatus::malformed;
    }

    skip_ws(line, pos);
    if (!scan_iri(line, pos, out.predicate)) return LineStatus::malformed;

    skip_ws(line, pos);
    if (pos >= line.size()) return LineStatus::malformed;
    if (line[pos] == '<') {
        if (!scan_iri(line, pos, out.object)) return LineStatus::malformed;
        out.object_kind = TermKind::iri;
    } else if (line[pos] == '_') {
        if (!scan_blank(line, pos, out.object)) return LineStatus::malformed;
        out.object_kind = TermKind::blank;
    } else if (line[pos] == '"') {
        if (!scan_literal(line, pos, out.object)) return LineStatus::malformed;
        out.object_kind = TermKind::literal;
    } else {
        return LineStatus::malformed;
    }

    skip_ws(line, pos);
    if (pos >= line.size() || line[pos] != '.') return LineStatus::malformed;
    ++pos;
    skip_ws(line, pos);
    if (pos < line.size() && line[pos] != '#') return LineStatus::malformed;
    return LineStatus::triple;
}

void SkipSink::record(std::string_view file, std::uint64_t line, std::string_view reason) {
    nlohmann::json entry{{"file", std::string(file)}, {"line", line}, {"reason", std::string(reason)}};
    (*out_) << entry.dump() << '\n';
}

AssertionStream::AssertionStream(std::vector<std::string> paths,
                                 std::string type_predicate, SkipSink* sink)
    : paths_(std::move(paths)), type_predicate_(std::move(type_predicate)), sink_(sink) {
    if (paths_.empty()) throw DataError("assertion stream needs at least one file");
    advance_file();
}

AssertionStream::AssertionStream(const std::string& path, std::string type_predicate,
                                 SkipSink* sink)
    : AssertionStream(std::vector<std::string>{path}, std::move(type_predicate), sink) {}

bool AssertionStream::advance_file() {
    if (file_index_ >= paths_.size()) {
        reader_.reset();
        return false;
    }
    reader_ = open_line_reader(paths_[file_index_]);
    ++file_index_;
    return true;
}

bool AssertionStream::next(TypeAssertion& out) {
    while (reader_) {
        if (!reader_->next(line_)) {
            if (!advance_file()) return false;
            continue;
        }
        ++stats_.total_lines;
        Triple triple;
        switch (parse_triple_line(line_, triple)) {
            case LineStatus::blank_or_comment:
                ++stats_.blank_or_comment;
                continue;
            case LineStatus::malformed:
                ++stats_.malformed;
                if (sink_) sink_->record(paths_[file_index_ - 1], reader_->line_number(), "malformed line");
                continue;
            case LineStatus::triple:
                break;
        }
        if (triple.predicate != type_predicate_) {
            ++stats_.skipped_other_predicate;
            continue;
        }
        if (triple.subject_kind != TermKind::iri) {
            ++stats_.skipped_blank_subject;
            if (sink_) sink_->record(paths_[file_index_ - 1], reader_->line_number(), "blank-node subject");
            continue;
        }
        if (triple.object_kind != TermKind::iri) {
            ++stats_.skipped_non_iri_object;
            if (sink_) sink_->record(paths_[file_index_ - 1], reader_->line_number(), "non-IRI object in type position");
            continue;
        }
        ++stats_.yielded;
        out.subject = std::move(triple.subject);
        out.type_iri = std::move(triple.object);
        return true;
    }
    return false;
}

OntologyIndex build_ontology_index(const std::string& path, SkipSink* sink) {
    OntologyIndex index;
    auto reader = open_line_reader(path);
    std::string line;
    Triple triple;
    while (reader->next(line)) {
        ++index.stats.total_lines;
        switch (parse_triple_line(line, triple)) {
            case LineStatus::blank_or_comment:
                ++index.stats.blank_or_comment;
                continue;
            case LineStatus::malformed:
                ++index.stats.malformed;
                if (sink) sink->record(path, reader->line_number(), "malformed line");
                continue;
            case LineStatus::triple:
                break;
        }
        if (triple.predicate != kRdfsSubClassOf) {
            ++index.stats.skipped_other_predicate;
            continue;
        }
        if (triple.subject_kind != TermKind::iri) {
            ++index.stats.skipped_blank_subject;
            continue;
        }
        if (triple.object_kind != TermKind::iri) {
            ++index.stats.skipped_non_iri_object;
            continue;
        }
        if (triple.subject == triple.object) {
            ++index.self_loops_dropped;
            continue;
        }
        ++index.stats.yielded;
        ++index.triples_indexed;
        index.super_of[triple.subject].insert(triple.object);
        index.sub_of[triple.object].insert(triple.subject);
    }
    return index;
}

std::string format_assertion(const TypeAssertion& assertion, std::string_view predicate) {
    std::string out;
    out.reserve(assertion.subject.size() + predicate.size() + assertion.type_iri.size() + 8);
    out.push_back('<');
    out += assertion.subject;
    out += "> <";
    out += predicate;
    out += "> <";
    out += assertion.type_iri;
    out += "> .";
    return out;
}

}  // namespace typeforge
