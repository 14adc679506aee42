#pragma once
// Line-oriented file I/O with transparent compression, picked by extension:
// ".gz" -> gzip, ".bz2" -> bzip2, anything else plain text.

#include <cstdint>
#include <memory>
#include <string>

namespace typeforge {

class LineReader {
public:
    virtual ~LineReader() = default;

    // Reads the next line without its terminator. Returns false at EOF.
    virtual bool next(std::string& line) = 0;

    std::uint64_t line_number() const { return line_no_; }

protected:
    std::uint64_t line_no_ = 0;
};

// Throws DataError when the file cannot be opened.
std::unique_ptr<LineReader> open_line_reader(const std::string& path);

class LineWriter {
public:
    virtual ~LineWriter() = default;

    // Writes the line plus '\n'. Plain-text writers flush every line so a
    // killed process leaves only whole lines behind.
    virtual void write_line(std::string_view line) = 0;

    std::uint64_t bytes_written() const { return bytes_; }
    std::uint64_t lines_written() const { return lines_; }

protected:
    std::uint64_t bytes_ = 0;
    std::uint64_t lines_ = 0;
};

std::unique_ptr<LineWriter> open_line_writer(const std::string& path);

}  // namespace typeforge
