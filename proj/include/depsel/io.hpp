#pragma once
// File formats: requirements CSV, VDG CSV, constraints JSON, subset
// estimates JSON, influence CSV and Solution JSON.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "depsel/dependency_graph.hpp"
#include "depsel/selection_models.hpp"
#include "depsel/solver.hpp"
#include "depsel/valuation.hpp"

namespace depsel {

// "# depsel <version> config=<16 hex digits>" with an FNV-1a hash of config.
std::string provenance_line(std::string_view config);
std::uint64_t fnv1a(std::string_view data) noexcept;
std::string_view tool_version() noexcept;

// Header `id,name,cost,value,probability`. Blank and '#' lines are skipped.
std::vector<Requirement> read_requirements(std::istream& in);
void write_requirements(std::span<const Requirement> reqs, std::ostream& out);

// Header `from,to,strength,quality`; ids resolved against `ids`.
ValueDependencyGraph read_vdg(std::istream& in, std::span<const std::string> ids);
void write_vdg(const ValueDependencyGraph& g, std::span<const std::string> ids, std::ostream& out);

// Array of {"type", "source", "targets"} records.
PrecedenceGraph read_constraints(std::istream& in, std::span<const std::string> ids);
void write_constraints(const PrecedenceGraph& g, std::span<const std::string> ids, std::ostream& out);

// Array of {"members": [ids], "value": w}.
std::vector<SubsetEstimate> read_subsets(std::istream& in, std::span<const std::string> ids);

// Header `from,to,positive,negative,influence`, one row per non-zero pair.
InfluenceMatrix read_influence(std::istream& in, std::span<const std::string> ids);
void write_influence(const InfluenceMatrix& m, std::span<const std::string> ids, std::ostream& out);

struct SolutionJsonOptions {
    bool include_timing = false;
    const SelectionEvaluation* evaluation = nullptr; // adds "av", "ev", "ov" when set
};

// {"status","selected","objective","theta","stats"}; theta keyed by id.
std::string solution_json(const Solution& s, std::span<const std::string> ids, const SolutionJsonOptions& options = {});

std::string read_file(const std::filesystem::path& path); // throws ArgumentError when unreadable

} // namespace depsel
