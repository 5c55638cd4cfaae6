#pragma once
// Price sweeps, selection comparison metrics, synthetic instances and
// runtime benchmarks.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "depsel/dependency_graph.hpp"
#include "depsel/selection_models.hpp"
#include "depsel/solver.hpp"

namespace depsel {

struct SweepRow {
    double percent = 0.0;
    Method method = Method::dars;
    SolveStatus status = SolveStatus::optimal;
    double av_percent = 0.0;
    double ev_percent = 0.0;
    double ov_percent = 0.0;
    Selection x;
};

struct SweepReport {
    std::vector<std::string> requirement_ids;
    double total_value = 0.0;
    std::vector<SweepRow> rows; // percent-major, methods in the requested order
};

struct SweepOptions {
    SolverOptions solver;
    ModelOptions model;
    std::vector<SubsetEstimate> subsets; // used by increase_decrease only
};

// One price-mode solve per (percent, method); price = percent / 100 * sum v.
SweepReport sweep(const SelectionProblem& p, std::span<const double> percents, std::span<const Method> methods,
                  const SweepOptions& options = {});

struct SelectionDistance {
    double euclidean = 0.0;
    std::size_t hamming = 0;
};

SelectionDistance compare_selections(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

// %F_i(a) - %F_i(b) over the levels of the report.
std::vector<double> frequency_profile(const SweepReport& report, Method a, Method b);

// %EV - %OV in percentage points.
double risk_of_value_loss(const SelectionEvaluation& e, double total_value);

struct SyntheticSpec {
    std::size_t n = 10;
    double vdl = 0.0;
    double nvdl = 0.0;
    double pdl = 0.0;
    double npdl = 0.0;
    double cost_min = 1.0, cost_max = 20.0;
    double value_min = 1.0, value_max = 20.0;
    double probability_min = 0.0, probability_max = 1.0;
    double budget_fraction = 0.5; // of the total cost
    std::uint64_t seed = 0;
};

void validate(const SyntheticSpec& spec);

struct SyntheticInstance {
    SelectionProblem problem; // budget mode, influence propagated from vdg
    ValueDependencyGraph vdg;
};

SyntheticInstance generate_synthetic(const SyntheticSpec& spec);

struct BenchRow {
    SyntheticSpec spec;
    SolveStatus status = SolveStatus::optimal;
    double elapsed_seconds = 0.0;
    std::uint64_t nodes = 0;
    std::size_t selected = 0;
    double objective = 0.0;
};

std::vector<BenchRow> benchmark(std::span<const SyntheticSpec> specs, Method method, const SolverOptions& options);

void write_sweep_csv(const SweepReport& r, std::ostream& out);
void write_sweep_json(const SweepReport& r, std::ostream& out);
void write_sweep_long(const SweepReport& r, std::ostream& out); // level,method,metric,value
void write_bench_csv(std::span<const BenchRow> rows, std::ostream& out);

} // namespace depsel
