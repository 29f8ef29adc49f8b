#include "nephrodose/csv.hpp"

namespace nephrodose::csv {

std::optional<std::vector<std::string>> Reader::next() {
    // Skip blank lines between records.
    while (pos_ < text_.size() && (text_[pos_] == '\n' || text_[pos_] == '\r')) {
        if (text_[pos_] == '\n') ++line_;
        ++pos_;
    }
    if (pos_ >= text_.size()) return std::nullopt;

    record_line_ = line_;
    std::vector<std::string> fields;
    std::string current;
    bool in_quotes = false;

    while (pos_ < text_.size()) {
        const char c = text_[pos_];
        if (in_quotes) {
            if (c == '"') {
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
                    current.push_back('"');
                    pos_ += 2;
                } else {
                    in_quotes = false;
                    ++pos_;
                }
            } else {
                if (c == '\n') ++line_;
                current.push_back(c);
                ++pos_;
            }
            continue;
        }
        if (c == '"' && current.empty()) {
            in_quotes = true;
            ++pos_;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
            ++pos_;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') ++pos_;
            ++pos_;
            ++line_;
            break;
        } else {
            current.push_back(c);
            ++pos_;
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

std::string escape_field(std::string_view field) {
    const bool needs_quotes =
        field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, std::span<const std::string> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i != 0) out << ',';
        out << escape_field(fields[i]);
    }
    out << '\n';
}

} // namespace nephrodose::csv
