#pragma once
// Small line-oriented CSV helpers shared by the file readers.

#include <charconv>
#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace depsel::text {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
    return s;
}

struct CsvCell {
    std::string text;
    std::size_t column = 0; // 1-based character column of the first non-blank character
};

// Comma-separated cells with optional double-quoted fields ("" escapes a
// quote). Unquoted cells are trimmed.
inline std::vector<CsvCell> split_csv_cells(std::string_view line) {
    std::vector<CsvCell> cells;
    std::size_t pos = 0;
    while (true) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
        CsvCell cell;
        cell.column = pos + 1;
        if (pos < line.size() && line[pos] == '"') {
            ++pos;
            while (pos < line.size()) {
                if (line[pos] == '"') {
                    if (pos + 1 < line.size() && line[pos + 1] == '"') {
                        cell.text += '"';
                        pos += 2;
                        continue;
                    }
                    ++pos;
                    break;
                }
                cell.text += line[pos++];
            }
            const std::size_t comma = line.find(',', pos);
            pos = comma == std::string_view::npos ? line.size() : comma;
        } else {
            const std::size_t comma = line.find(',', pos);
            const std::size_t end = comma == std::string_view::npos ? line.size() : comma;
            cell.text = std::string(trim(line.substr(pos, end - pos)));
            pos = end;
        }
        cells.push_back(std::move(cell));
        if (pos >= line.size()) break;
        ++pos; // comma
    }
    return cells;
}

inline std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> cells;
    for (auto& c : split_csv_cells(line)) cells.push_back(std::move(c.text));
    return cells;
}

// Quotes a field when it contains a comma, quote or surrounding blanks.
inline std::string quote_csv(std::string_view field) {
    const bool needs = field.find_first_of(",\"") != std::string_view::npos ||
                       (!field.empty() && (field.front() == ' ' || field.back() == ' ' || field.front() == '#'));
    if (!needs) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// Yields non-blank, non-comment lines with their 1-based line numbers.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next(std::string& line) {
        while (std::getline(in_, line)) {
            ++number_;
            const std::string_view t = trim(line);
            if (t.empty() || t.front() == '#') continue;
            return true;
        }
        return false;
    }

    std::size_t line_number() const noexcept { return number_; }

private:
    std::istream& in_;
    std::size_t number_ = 0;
};

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return value;
}

inline std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, ec == std::errc{} ? ptr : buffer);
}

} // namespace depsel::text
