#pragma once

#include "cbx/error.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace cbx::detail {

/// RFC 4180 record reader: comma separated, double-quote escaping, CRLF or
/// LF line ends, quoted fields may span lines.
class CsvReader {
public:
    explicit CsvReader(std::string_view text) : text_(text) {
        if (text_.substr(0, 3) == "\xEF\xBB\xBF") text_.remove_prefix(3);
    }

    /// 1-based line number of the next record.
    std::size_t line() const noexcept { return line_; }

    bool next(std::vector<std::string>& fields) {
        fields.clear();
        if (pos_ >= text_.size()) return false;
        const std::size_t start_line = line_;
        std::string field;
        bool quoted = false;
        bool field_was_quoted = false;
        while (pos_ < text_.size()) {
            const char ch = text_[pos_++];
            if (quoted) {
                if (ch == '"') {
                    if (pos_ < text_.size() && text_[pos_] == '"') {
                        field.push_back('"');
                        ++pos_;
                    } else {
                        quoted = false;
                    }
                } else {
                    if (ch == '\n') ++line_;
                    field.push_back(ch);
                }
                continue;
            }
            if (ch == '"') {
                if (!field.empty() || field_was_quoted)
                    throw Error(ErrorCode::ParseError, "unexpected quote inside field (line " + std::to_string(line_) + ")",
                                "line " + std::to_string(line_));
                quoted = true;
                field_was_quoted = true;
            } else if (ch == ',') {
                fields.push_back(std::move(field));
                field.clear();
                field_was_quoted = false;
            } else if (ch == '\r' || ch == '\n') {
                if (ch == '\r' && pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
                ++line_;
                fields.push_back(std::move(field));
                return true;
            } else {
                field.push_back(ch);
            }
        }
        if (quoted)
            throw Error(ErrorCode::ParseError, "unterminated quoted field starting on line " + std::to_string(start_line),
                        "line " + std::to_string(start_line));
        fields.push_back(std::move(field));
        return true;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

} // namespace cbx::detail
