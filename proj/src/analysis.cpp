#include "depsel/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <random>
#include <set>

#include <json.hpp>

#include "depsel/errors.hpp"
#include "text.hpp"

namespace depsel {

namespace {

double total_value(const SelectionProblem& p) {
    double total = 0.0;
    for (const auto& r : p.requirements) total += r.value;
    return total;
}

std::string bits(const Selection& x) {
    std::string s(x.size(), '0');
    for (std::size_t i = 0; i < x.size(); ++i) s[i] = x[i] ? '1' : '0';
    return s;
}

} // namespace

SweepReport sweep(const SelectionProblem& p, std::span<const double> percents, std::span<const Method> methods,
                  const SweepOptions& options) {
    validate(p);
    for (double pct : percents)
        if (!(pct >= 0.0) || !std::isfinite(pct)) throw ArgumentError("sweep: percent levels must be non-negative");
    SweepReport report;
    for (const auto& r : p.requirements) report.requirement_ids.push_back(r.id);
    report.total_value = total_value(p);
    const InfluenceMatrix influence = p.influence ? *p.influence : InfluenceMatrix::zero(p.size());

    SelectionProblem cell = p;
    cell.mode = ConstraintMode::price_value;
    if (!cell.influence) cell.influence = influence;
    for (double pct : percents) {
        cell.budget = pct / 100.0 * report.total_value;
        for (Method method : methods) {
            const LinearModel model = build_model(cell, method, options.subsets, options.model);
            const Solution sol = solve(model, options.solver);
            SweepRow row{pct, method, sol.status, 0.0, 0.0, 0.0, Selection(p.size(), 0)};
            if (!sol.x.empty()) row.x = sol.x;
            if (report.total_value > 0.0) {
                const SelectionEvaluation e = evaluate_selection(p.requirements, influence, row.x);
                row.av_percent = 100.0 * e.av / report.total_value;
                row.ev_percent = 100.0 * e.ev / report.total_value;
                row.ov_percent = 100.0 * e.ov / report.total_value;
            }
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

SelectionDistance compare_selections(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size()) throw ArgumentError("compare_selections: selection lengths differ");
    SelectionDistance d;
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        sum += diff * diff;
        d.hamming += a[i] != b[i] ? 1 : 0;
    }
    d.euclidean = std::sqrt(sum);
    return d;
}

std::vector<double> frequency_profile(const SweepReport& report, Method a, Method b) {
    const std::size_t n = report.requirement_ids.size();
    auto frequencies = [&](Method m) {
        std::vector<double> counts(n, 0.0);
        std::size_t levels = 0;
        for (const auto& row : report.rows) {
            if (row.method != m) continue;
            ++levels;
            for (std::size_t i = 0; i < n; ++i) counts[i] += row.x[i];
        }
        if (levels == 0) throw ArgumentError("frequency_profile: method '" + std::string(method_name(m)) + "' not in report");
        for (double& c : counts) c = 100.0 * c / static_cast<double>(levels);
        return counts;
    };
    const auto fa = frequencies(a);
    const auto fb = frequencies(b);
    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) delta[i] = fa[i] - fb[i];
    return delta;
}

double risk_of_value_loss(const SelectionEvaluation& e, double total) {
    if (!(total > 0.0)) throw ArgumentError("risk_of_value_loss: total value must be positive");
    return 100.0 * e.ev / total - 100.0 * e.ov / total;
}

void validate(const SyntheticSpec& s) {
    if (s.n < 2) throw ArgumentError("synthetic instances need at least two requirements");
    for (double t : {s.vdl, s.nvdl, s.pdl, s.npdl})
        if (!(t >= 0.0 && t <= 1.0)) throw ArgumentError("dependency level targets must lie in [0, 1]");
    if (s.nvdl > 0.0 && s.vdl == 0.0) throw ArgumentError("NVDL > 0 needs VDL > 0");
    if (s.npdl > 0.0 && s.pdl == 0.0) throw ArgumentError("NPDL > 0 needs PDL > 0");
    if (!(s.cost_min <= s.cost_max) || s.cost_min < 0.0) throw ArgumentError("invalid cost range");
    if (!(s.value_min <= s.value_max) || s.value_min < 0.0) throw ArgumentError("invalid value range");
    if (!(s.probability_min <= s.probability_max) || s.probability_min < 0.0 || s.probability_max > 1.0)
        throw ArgumentError("invalid probability range");
    if (!(s.budget_fraction >= 0.0)) throw ArgumentError("budget fraction must be non-negative");
}

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) from the top 53 bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    std::uint64_t below(std::uint64_t bound) { return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_); }

    // k distinct values of [0, total), ascending (Floyd's sampling).
    std::vector<std::uint64_t> sample(std::uint64_t total, std::uint64_t k) {
        std::set<std::uint64_t> chosen;
        for (std::uint64_t j = total - k; j < total; ++j) {
            const std::uint64_t t = below(j + 1);
            if (!chosen.insert(t).second) chosen.insert(j);
        }
        return {chosen.begin(), chosen.end()};
    }

private:
    std::mt19937_64 engine_;
};

std::pair<std::size_t, std::size_t> ordered_pair(std::uint64_t code, std::size_t n) {
    const std::size_t from = static_cast<std::size_t>(code / (n - 1));
    std::size_t to = static_cast<std::size_t>(code % (n - 1));
    if (to >= from) ++to;
    return {from, to};
}

} // namespace

SyntheticInstance generate_synthetic(const SyntheticSpec& spec) {
    validate(spec);
    const std::size_t n = spec.n;
    const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1);
    Rng rng(spec.seed);

    SyntheticInstance inst{SelectionProblem{}, ValueDependencyGraph(n)};
    SelectionProblem& p = inst.problem;
    double total_cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Requirement r;
        r.id = "r" + std::to_string(i + 1);
        r.name = r.id;
        r.cost = rng.uniform(spec.cost_min, spec.cost_max);
        r.value = rng.uniform(spec.value_min, spec.value_max);
        r.probability = rng.uniform(spec.probability_min, spec.probability_max);
        total_cost += r.cost;
        p.requirements.push_back(std::move(r));
    }
    p.budget = spec.budget_fraction * total_cost;
    p.mode = ConstraintMode::budget_cost;

    const auto k = static_cast<std::uint64_t>(std::llround(spec.vdl * static_cast<double>(pairs)));
    const auto edges = rng.sample(pairs, k);
    const auto negative = static_cast<std::uint64_t>(std::llround(spec.nvdl * static_cast<double>(k)));
    const auto neg_slots = rng.sample(k, negative);
    std::vector<std::uint8_t> is_negative(k, 0);
    for (auto s : neg_slots) is_negative[s] = 1;
    for (std::uint64_t e = 0; e < k; ++e) {
        const auto [from, to] = ordered_pair(edges[e], n);
        const double strength = 1.0 - rng.unit(); // (0, 1]
        inst.vdg.set_edge(from, to, strength, is_negative[e] ? Quality::negative : Quality::positive);
    }

    p.precedence = PrecedenceGraph(n);
    const auto m = static_cast<std::uint64_t>(std::llround(spec.pdl * static_cast<double>(pairs)));
    const auto prec = rng.sample(pairs, m);
    const auto conflicts = static_cast<std::uint64_t>(std::llround(spec.npdl * static_cast<double>(m)));
    const auto conflict_slots = rng.sample(m, conflicts);
    std::vector<std::uint8_t> is_conflict(m, 0);
    for (auto s : conflict_slots) is_conflict[s] = 1;
    for (std::uint64_t e = 0; e < m; ++e) {
        const auto [from, to] = ordered_pair(prec[e], n);
        if (is_conflict[e])
            p.precedence.add_conflict(from, to);
        else
            p.precedence.add_requires(from, to);
    }

    p.influence = propagate_strengths(inst.vdg);
    return inst;
}

std::vector<BenchRow> benchmark(std::span<const SyntheticSpec> specs, Method method, const SolverOptions& options) {
    std::vector<BenchRow> rows;
    for (const auto& spec : specs) {
        const SyntheticInstance inst = generate_synthetic(spec);
        const auto start = std::chrono::steady_clock::now();
        const LinearModel model = build_model(inst.problem, method);
        const Solution sol = solve(model, options);
        BenchRow row;
        row.spec = spec;
        row.status = sol.status;
        row.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        row.nodes = sol.stats.nodes;
        row.selected = static_cast<std::size_t>(std::count(sol.x.begin(), sol.x.end(), std::uint8_t{1}));
        row.objective = sol.objective;
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_csv(const SweepReport& r, std::ostream& out) {
    out << "percent,method,status,av_percent,ev_percent,ov_percent,selection\n";
    for (const auto& row : r.rows)
        out << text::format_double(row.percent) << ',' << method_name(row.method) << ',' << status_name(row.status) << ','
            << text::format_double(row.av_percent) << ',' << text::format_double(row.ev_percent) << ','
            << text::format_double(row.ov_percent) << ',' << bits(row.x) << '\n';
}

void write_sweep_json(const SweepReport& r, std::ostream& out) {
    nlohmann::json doc;
    doc["requirements"] = r.requirement_ids;
    doc["total_value"] = r.total_value;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json selected = nlohmann::json::array();
        for (std::size_t i = 0; i < row.x.size(); ++i)
            if (row.x[i]) selected.push_back(r.requirement_ids[i]);
        rows.push_back({{"percent", row.percent},
                        {"method", std::string(method_name(row.method))},
                        {"status", std::string(status_name(row.status))},
                        {"av_percent", row.av_percent},
                        {"ev_percent", row.ev_percent},
                        {"ov_percent", row.ov_percent},
                        {"selected", std::move(selected)}});
    }
    doc["rows"] = std::move(rows);
    out << doc.dump(2) << '\n';
}

void write_sweep_long(const SweepReport& r, std::ostream& out) {
    out << "level,method,metric,value\n";
    for (const auto& row : r.rows) {
        const std::string prefix = text::format_double(row.percent) + "," + std::string(method_name(row.method)) + ",";
        out << prefix << "av_percent," << text::format_double(row.av_percent) << '\n';
        out << prefix << "ev_percent," << text::format_double(row.ev_percent) << '\n';
        out << prefix << "ov_percent," << text::format_double(row.ov_percent) << '\n';
    }
}

void write_bench_csv(std::span<const BenchRow> rows, std::ostream& out) {
    out << "n,vdl,nvdl,pdl,npdl,budget_fraction,seed,status,elapsed_seconds,nodes,selected,objective\n";
    for (const auto& row : rows) {
        const auto& s = row.spec;
        out << s.n << ',' << text::format_double(s.vdl) << ',' << text::format_double(s.nvdl) << ','
            << text::format_double(s.pdl) << ',' << text::format_double(s.npdl) << ','
            << text::format_double(s.budget_fraction) << ',' << s.seed << ',' << status_name(row.status) << ','
            << text::format_double(row.elapsed_seconds) << ',' << row.nodes << ',' << row.selected << ','
            << text::format_double(row.objective) << '\n';
    }
}

} // namespace depsel
