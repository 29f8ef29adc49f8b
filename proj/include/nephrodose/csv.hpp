#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nephrodose::csv {

// RFC 4180 style reader: comma separated, double-quote escaping, LF or
// CRLF record ends. Quoted fields may contain commas, doubled quotes and
// newlines. Blank lines are skipped.
class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    std::optional<std::vector<std::string>> next();

    // 1-based line number of the first line of the last record returned.
    int record_line() const { return record_line_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int record_line_ = 0;
};

std::string escape_field(std::string_view field);
void write_row(std::ostream& out, std::span<const std::string> fields);

} // namespace nephrodose::csv
