#include "depsel/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "depsel/errors.hpp"
#include "text.hpp"

#ifndef DEPSEL_VERSION
#define DEPSEL_VERSION "0.0.0"
#endif

namespace depsel {

using nlohmann::json;

std::string_view tool_version() noexcept { return DEPSEL_VERSION; }

std::uint64_t fnv1a(std::string_view data) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string provenance_line(std::string_view config) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(config)));
    return "# depsel " + std::string(tool_version()) + " config=" + hex;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

namespace {

using IdIndex = std::map<std::string, std::size_t, std::less<>>;

IdIndex index_ids(std::span<const std::string> ids) {
    IdIndex index;
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (!index.emplace(ids[i], i).second) throw ArgumentError("duplicate requirement id '" + ids[i] + "'");
    return index;
}

class CsvReader {
public:
    CsvReader(std::istream& in, std::vector<std::string_view> header) : reader_(in), header_(std::move(header)) {
        if (!reader_.next(line_)) throw FormatError("empty file, expected header '" + joined() + "'", 1);
        cells_ = text::split_csv_cells(line_);
        if (cells_.size() != header_.size()) throw FormatError("expected header '" + joined() + "'", reader_.line_number(), 1);
        for (std::size_t k = 0; k < cells_.size(); ++k)
            if (cells_[k].text != header_[k])
                fail("expected column '" + std::string(header_[k]) + "', found '" + cells_[k].text + "'", k);
    }

    bool next() {
        if (!reader_.next(line_)) return false;
        cells_ = text::split_csv_cells(line_);
        if (cells_.size() != header_.size())
            fail("expected " + std::to_string(header_.size()) + " fields, found " + std::to_string(cells_.size()),
                 std::min(cells_.size(), header_.size()));
        return true;
    }

    const std::string& cell(std::size_t k) const { return cells_[k].text; }

    double number(std::size_t k) const {
        const auto v = text::parse_double(cell(k));
        if (!v || !std::isfinite(*v)) fail("'" + cell(k) + "' is not a number", k);
        return *v;
    }

    std::size_t id(std::size_t k, const IdIndex& index) const {
        const auto it = index.find(cell(k));
        if (it == index.end()) fail("unknown requirement id '" + cell(k) + "'", k);
        return it->second;
    }

    // Column of field k, or one past the line end when the field is missing.
    [[noreturn]] void fail(const std::string& what, std::size_t k) const {
        const std::size_t column = k < cells_.size() ? cells_[k].column : line_.size() + 1;
        throw FormatError(what, reader_.line_number(), column);
    }

private:
    std::string joined() const {
        std::string s;
        for (std::size_t k = 0; k < header_.size(); ++k) s += (k ? "," : "") + std::string(header_[k]);
        return s;
    }

    text::LineReader reader_;
    std::vector<std::string_view> header_;
    std::string line_;
    std::vector<text::CsvCell> cells_;
};

// Parses JSON after blanking '#' comment lines (line numbers preserved).
json parse_json(std::istream& in) {
    std::string content;
    std::string line;
    while (std::getline(in, line)) {
        if (!text::trim(line).empty() && text::trim(line).front() == '#') line.clear();
        content += line;
        content += '\n';
    }
    try {
        return json::parse(content);
    } catch (const json::parse_error& e) {
        std::size_t l = 1;
        std::size_t c = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < content.size(); ++i) {
            if (content[i] == '\n') {
                ++l;
                c = 1;
            } else {
                ++c;
            }
        }
        throw FormatError("invalid JSON", l, c);
    }
}

std::size_t json_id(const json& v, const IdIndex& index, const std::string& where) {
    if (!v.is_string()) throw FormatError(where + ": requirement ids must be strings");
    const auto it = index.find(v.get<std::string>());
    if (it == index.end()) throw FormatError(where + ": unknown requirement id '" + v.get<std::string>() + "'");
    return it->second;
}

std::string fmt(double v) { return text::format_double(v); }

} // namespace

std::vector<Requirement> read_requirements(std::istream& in) {
    CsvReader csv(in, {"id", "name", "cost", "value", "probability"});
    std::vector<Requirement> reqs;
    IdIndex seen;
    while (csv.next()) {
        Requirement r{csv.cell(0), csv.cell(1), csv.number(2), csv.number(3), csv.number(4)};
        if (r.id.empty()) csv.fail("empty requirement id", 0);
        if (!seen.emplace(r.id, reqs.size()).second) csv.fail("duplicate requirement id '" + r.id + "'", 0);
        if (r.cost < 0.0) csv.fail("cost must be non-negative", 2);
        if (r.value < 0.0) csv.fail("value must be non-negative", 3);
        if (r.probability < 0.0 || r.probability > 1.0) csv.fail("probability must lie in [0, 1]", 4);
        reqs.push_back(std::move(r));
    }
    return reqs;
}

void write_requirements(std::span<const Requirement> reqs, std::ostream& out) {
    out << "id,name,cost,value,probability\n";
    for (const auto& r : reqs)
        out << text::quote_csv(r.id) << ',' << text::quote_csv(r.name) << ',' << fmt(r.cost) << ',' << fmt(r.value) << ',' << fmt(r.probability) << '\n';
}

ValueDependencyGraph read_vdg(std::istream& in, std::span<const std::string> ids) {
    const IdIndex index = index_ids(ids);
    CsvReader csv(in, {"from", "to", "strength", "quality"});
    ValueDependencyGraph g(ids.size());
    while (csv.next()) {
        const std::size_t from = csv.id(0, index);
        const std::size_t to = csv.id(1, index);
        const double strength = csv.number(2);
        Quality q;
        if (csv.cell(3) == "+")
            q = Quality::positive;
        else if (csv.cell(3) == "-")
            q = Quality::negative;
        else
            csv.fail("quality must be '+' or '-'", 3);
        if (from == to) csv.fail("self-dependency", 1);
        if (!(strength > 0.0 && strength <= 1.0)) csv.fail("strength must lie in (0, 1]", 2);
        if (g.edge(from, to)) csv.fail("duplicate dependency", 0);
        g.set_edge(from, to, strength, q);
    }
    return g;
}

void write_vdg(const ValueDependencyGraph& g, std::span<const std::string> ids, std::ostream& out) {
    if (ids.size() != g.size()) throw ArgumentError("write_vdg: id list does not match the graph");
    out << "from,to,strength,quality\n";
    for (const auto& [pair, e] : g.edges())
        out << text::quote_csv(ids[pair.first]) << ',' << text::quote_csv(ids[pair.second]) << ',' << fmt(e.strength) << ',' << quality_symbol(e.quality)
            << '\n';
}

PrecedenceGraph read_constraints(std::istream& in, std::span<const std::string> ids) {
    const IdIndex index = index_ids(ids);
    const json doc = parse_json(in);
    if (!doc.is_array()) throw FormatError("constraints: expected a JSON array of records");
    PrecedenceGraph g(ids.size());
    for (std::size_t k = 0; k < doc.size(); ++k) {
        const std::string where = "constraint record " + std::to_string(k + 1);
        const json& rec = doc[k];
        if (!rec.is_object() || !rec.contains("type") || !rec["type"].is_string())
            throw FormatError(where + ": expected an object with a string \"type\"");
        for (const auto& [key, _] : rec.items())
            if (key != "type" && key != "source" && key != "targets") throw FormatError(where + ": unknown field '" + key + "'");
        const std::string type = rec["type"];
        if (!rec.contains("targets") || !rec["targets"].is_array()) throw FormatError(where + ": \"targets\" must be an array");
        std::vector<std::size_t> targets;
        for (const auto& t : rec["targets"]) targets.push_back(json_id(t, index, where));
        auto source = [&] {
            if (!rec.contains("source")) throw FormatError(where + ": missing \"source\"");
            return json_id(rec["source"], index, where);
        };
        try {
            if (type == "requires_all") {
                const std::size_t s = source();
                if (targets.empty()) throw FormatError(where + ": requires_all needs targets");
                for (std::size_t t : targets) g.add_requires(s, t);
            } else if (type == "requires_any") {
                g.add_requires_any(source(), targets);
            } else if (type == "conflicts") {
                const std::size_t s = source();
                if (targets.empty()) throw FormatError(where + ": conflicts needs targets");
                for (std::size_t t : targets) g.add_conflict(s, t);
            } else if (type == "exactly_one") {
                if (rec.contains("source")) targets.insert(targets.begin(), json_id(rec["source"], index, where));
                g.add_exactly_one(targets);
            } else {
                throw FormatError(where + ": unknown type '" + type + "'");
            }
        } catch (const ArgumentError& e) {
            throw FormatError(where + ": " + e.what());
        }
    }
    return g;
}

void write_constraints(const PrecedenceGraph& g, std::span<const std::string> ids, std::ostream& out) {
    json doc = json::array();
    for (const auto& c : g.constraints()) {
        json targets = json::array();
        for (std::size_t t : c.targets) targets.push_back(ids[t]);
        switch (c.kind) {
        case PrecedenceKind::requires_all:
            doc.push_back({{"type", "requires_all"}, {"source", ids[c.source]}, {"targets", targets}});
            break;
        case PrecedenceKind::requires_any:
            doc.push_back({{"type", "requires_any"}, {"source", ids[c.source]}, {"targets", targets}});
            break;
        case PrecedenceKind::conflicts:
            doc.push_back({{"type", "conflicts"}, {"source", ids[c.source]}, {"targets", targets}});
            break;
        case PrecedenceKind::exactly_one: doc.push_back({{"type", "exactly_one"}, {"targets", targets}}); break;
        }
    }
    out << doc.dump(2) << '\n';
}

std::vector<SubsetEstimate> read_subsets(std::istream& in, std::span<const std::string> ids) {
    const IdIndex index = index_ids(ids);
    const json doc = parse_json(in);
    if (!doc.is_array()) throw FormatError("subsets: expected a JSON array of records");
    std::vector<SubsetEstimate> out;
    for (std::size_t k = 0; k < doc.size(); ++k) {
        const std::string where = "subset record " + std::to_string(k + 1);
        const json& rec = doc[k];
        if (!rec.is_object() || !rec.contains("members") || !rec["members"].is_array() || !rec.contains("value") ||
            !rec["value"].is_number())
            throw FormatError(where + ": expected {\"members\": [ids], \"value\": number}");
        SubsetEstimate s;
        for (const auto& m : rec["members"]) s.members.push_back(json_id(m, index, where));
        if (s.members.size() < 2) throw FormatError(where + ": a subset needs at least two members");
        s.value = rec["value"].get<double>();
        out.push_back(std::move(s));
    }
    return out;
}

InfluenceMatrix read_influence(std::istream& in, std::span<const std::string> ids) {
    const IdIndex index = index_ids(ids);
    CsvReader csv(in, {"from", "to", "positive", "negative", "influence"});
    const std::size_t n = ids.size();
    RealMatrix pos(n, n);
    RealMatrix neg(n, n);
    while (csv.next()) {
        const std::size_t from = csv.id(0, index);
        const std::size_t to = csv.id(1, index);
        const double p = csv.number(2);
        const double q = csv.number(3);
        const double i = csv.number(4);
        if (from == to) csv.fail("self-influence", 1);
        if (!(p >= 0.0 && p <= 1.0)) csv.fail("positive strength must lie in [0, 1]", 2);
        if (!(q >= 0.0 && q <= 1.0)) csv.fail("negative strength must lie in [0, 1]", 3);
        if (i != p - q) csv.fail("influence must equal positive - negative", 4);
        pos(from, to) = p;
        neg(from, to) = q;
    }
    return InfluenceMatrix::from_components(std::move(pos), std::move(neg));
}

void write_influence(const InfluenceMatrix& m, std::span<const std::string> ids, std::ostream& out) {
    const std::size_t n = m.size();
    if (ids.size() != n) throw ArgumentError("write_influence: id list does not match the matrix");
    out << "from,to,positive,negative,influence\n";
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && (m.pos(i, j) != 0.0 || m.neg(i, j) != 0.0))
                out << text::quote_csv(ids[i]) << ',' << text::quote_csv(ids[j]) << ',' << fmt(m.pos(i, j)) << ',' << fmt(m.neg(i, j)) << ','
                    << fmt(m.influence(i, j)) << '\n';
}

std::string solution_json(const Solution& s, std::span<const std::string> ids, const SolutionJsonOptions& options) {
    json doc;
    doc["status"] = std::string(status_name(s.status));
    json selected = json::array();
    for (std::size_t i = 0; i < s.x.size() && i < ids.size(); ++i)
        if (s.x[i]) selected.push_back(ids[i]);
    doc["selected"] = std::move(selected);
    doc["objective"] = s.objective;
    json theta = json::object();
    for (std::size_t i = 0; i < s.theta.size() && i < ids.size(); ++i) theta[ids[i]] = s.theta[i];
    doc["theta"] = std::move(theta);
    if (options.evaluation) {
        doc["av"] = options.evaluation->av;
        doc["ev"] = options.evaluation->ev;
        doc["ov"] = options.evaluation->ov;
    }
    json stats{{"nodes", s.stats.nodes}, {"root_bound", s.stats.root_bound}};
    if (options.include_timing) stats["elapsed_seconds"] = s.stats.elapsed_seconds;
    doc["stats"] = std::move(stats);
    return doc.dump(2);
}

} // namespace depsel
