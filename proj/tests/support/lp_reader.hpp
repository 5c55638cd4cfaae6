#pragma once
// Minimal LP-format reader for round-trip checks. Independent of the
// library writer: tokenises the text and rebuilds rows by variable name.

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lp {

struct Row {
    std::string name;
    std::map<std::string, double> coef;
    std::string relation; // "<=", ">=", "="
    double rhs = 0.0;
};

struct Model {
    bool maximize = true;
    std::map<std::string, double> objective;
    std::vector<Row> rows;
    std::map<std::string, std::pair<double, double>> bounds;
    std::vector<std::string> binaries;
    std::size_t max_line_length = 0;
};

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline bool is_number(const std::string& t, double& v) {
    if (t.empty()) return false;
    char* end = nullptr;
    v = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

inline bool is_relation(const std::string& t) { return t == "<=" || t == ">=" || t == "=" || t == "=<" || t == "=>"; }

// Parses `[label:] [+|-] [coef] var ... ` into coef; returns position after.
inline std::size_t parse_expression(const std::vector<std::string>& tok, std::size_t k, std::map<std::string, double>& coef,
                                    bool stop_at_relation) {
    double sign = 1.0;
    double pending = 1.0;
    bool have_coef = false;
    while (k < tok.size()) {
        const std::string& t = tok[k];
        if (stop_at_relation && is_relation(t)) break;
        if (!stop_at_relation && t.back() == ':') break;
        double v = 0.0;
        if (t == "+") {
            sign = 1.0;
        } else if (t == "-") {
            sign = -1.0;
        } else if (is_number(t, v)) {
            if (have_coef) throw std::runtime_error("two consecutive coefficients");
            pending = v;
            have_coef = true;
        } else {
            coef[t] += sign * pending;
            sign = 1.0;
            pending = 1.0;
            have_coef = false;
        }
        ++k;
    }
    if (have_coef && !stop_at_relation) throw std::runtime_error("dangling coefficient");
    return k;
}

inline Model parse(const std::string& text) {
    Model m;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::vector<std::string> objective_tokens, constraint_tokens;
    bool ended = false;
    while (std::getline(in, line)) {
        m.max_line_length = std::max(m.max_line_length, line.size());
        if (!line.empty() && line[0] == '\\') continue;
        const std::string key = lower(line);
        auto trimmed = key;
        while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) trimmed.pop_back();
        if (trimmed == "maximize" || trimmed == "minimize") {
            m.maximize = trimmed == "maximize";
            section = "objective";
            continue;
        }
        if (trimmed == "subject to" || trimmed == "st") {
            section = "rows";
            continue;
        }
        if (trimmed == "bounds" || trimmed == "binary" || trimmed == "binaries" || trimmed == "general") {
            section = trimmed == "binaries" ? "binary" : trimmed;
            continue;
        }
        if (trimmed == "end") {
            ended = true;
            section.clear();
            continue;
        }
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (ended) throw std::runtime_error("content after End");
        if (section == "objective") {
            objective_tokens.insert(objective_tokens.end(), tok.begin(), tok.end());
        } else if (section == "rows") {
            constraint_tokens.insert(constraint_tokens.end(), tok.begin(), tok.end());
        } else if (section == "bounds") {
            double lo = 0.0, hi = 0.0;
            if (tok.size() != 5 || tok[1] != "<=" || tok[3] != "<=" || !is_number(tok[0], lo) || !is_number(tok[4], hi))
                throw std::runtime_error("unsupported bound line: " + line);
            m.bounds[tok[2]] = {lo, hi};
        } else if (section == "binary") {
            m.binaries.insert(m.binaries.end(), tok.begin(), tok.end());
        } else {
            throw std::runtime_error("content outside a section: " + line);
        }
    }
    if (!ended) throw std::runtime_error("missing End");

    std::size_t k = 0;
    if (!objective_tokens.empty() && objective_tokens[0].back() == ':') k = 1;
    k = parse_expression(objective_tokens, k, m.objective, false);
    if (k != objective_tokens.size()) throw std::runtime_error("trailing objective tokens");

    k = 0;
    while (k < constraint_tokens.size()) {
        Row row;
        if (constraint_tokens[k].back() == ':') {
            row.name = constraint_tokens[k].substr(0, constraint_tokens[k].size() - 1);
            ++k;
        }
        k = parse_expression(constraint_tokens, k, row.coef, true);
        if (k + 1 >= constraint_tokens.size() || !is_relation(constraint_tokens[k]))
            throw std::runtime_error("row '" + row.name + "' lacks a relation");
        row.relation = constraint_tokens[k];
        if (row.relation == "=<") row.relation = "<=";
        if (row.relation == "=>") row.relation = ">=";
        if (!is_number(constraint_tokens[k + 1], row.rhs)) throw std::runtime_error("row '" + row.name + "' lacks a rhs");
        k += 2;
        m.rows.push_back(std::move(row));
    }
    return m;
}

inline double activity(const std::map<std::string, double>& coef, const std::map<std::string, double>& values) {
    double s = 0.0;
    for (const auto& [name, c] : coef) {
        const auto it = values.find(name);
        if (it != values.end()) s += c * it->second;
    }
    return s;
}

} // namespace lp
