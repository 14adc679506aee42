#include "typeforge/line_reader.hpp"

#include <boost/iostreams/device/file.hpp>
#include <boost/iostreams/filter/bzip2.hpp>
#include <boost/iostreams/filter/gzip.hpp>
#include <boost/iostreams/filtering_stream.hpp>

#include <filesystem>
#include <fstream>

#include "typeforge/common.hpp"

namespace bio = boost::iostreams;

namespace typeforge {

namespace {

bool has_suffix(const std::string& path, std::string_view suffix) {
    return path.size() >= suffix.size() &&
           path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
}

class FilteredLineReader final : public LineReader {
public:
    explicit FilteredLineReader(const std::string& path) {
        if (!std::filesystem::exists(path))
            throw DataError("cannot open file: " + path);
        if (has_suffix(path, ".gz"))
            stream_.push(bio::gzip_decompressor());
        else if (has_suffix(path, ".bz2"))
            stream_.push(bio::bzip2_decompressor());
        stream_.push(bio::file_source(path, std::ios::binary));
        if (!stream_.good())
            throw DataError("cannot open file: " + path);
    }

    bool next(std::string& line) override {
        if (!std::getline(stream_, line)) return false;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++line_no_;
        return true;
    }

private:
    bio::filtering_istream stream_;
};

class PlainLineWriter final : public LineWriter {
public:
    explicit PlainLineWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw DataError("cannot open file for writing: " + path);
    }

    void write_line(std::string_view line) override {
        out_.write(line.data(), static_cast<std::streamsize>(line.size()));
        out_.put('\n');
        out_.flush();
        if (!out_) throw DataError("write failed");
        bytes_ += line.size() + 1;
        ++lines_;
    }

private:
    std::ofstream out_;
};

// Compressed output cannot be made kill-safe per line; it is flushed on close.
class GzipLineWriter final : public LineWriter {
public:
    explicit GzipLineWriter(const std::string& path) {
        stream_.push(bio::gzip_compressor());
        stream_.push(bio::file_sink(path, std::ios::binary));
        if (!stream_.good())
            throw DataError("cannot open file for writing: " + path);
    }

    void write_line(std::string_view line) override {
        stream_.write(line.data(), static_cast<std::streamsize>(line.size()));
        stream_.put('\n');
        if (!stream_.good()) throw DataError("write failed");
        bytes_ += line.size() + 1;
        ++lines_;
    }

private:
    bio::filtering_ostream stream_;
};

}  // namespace

std::unique_ptr<LineReader> open_line_reader(const std::string& path) {
    return std::make_unique<FilteredLineReader>(path);
}

std::unique_ptr<LineWriter> open_line_writer(const std::string& path) {
    if (has_suffix(path, ".gz")) return std::make_unique<GzipLineWriter>(path);
    return std::make_unique<PlainLineWriter>(path);
}

}  // namespace typeforge
