#pragma once
// Exact branch-and-bound over the selection binaries of a compiled model.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "depsel/selection_models.hpp"

namespace depsel {

enum class SolveStatus { optimal, infeasible, limit };

std::string_view status_name(SolveStatus s) noexcept;

struct SolverStats {
    std::uint64_t nodes = 0;
    double elapsed_seconds = 0.0;
    double root_bound = 0.0;
};

struct Solution {
    SolveStatus status = SolveStatus::infeasible;
    std::vector<double> values; // one entry per model variable
    Selection x;
    double objective = 0.0;
    std::vector<double> theta; // empty unless the model has penalty variables
    std::vector<double> y;
    SolverStats stats;
};

struct SolverOptions {
    std::uint64_t node_limit = 0; // 0 = unlimited
    double time_limit = 0.0;      // seconds, 0 = unlimited
};

// Optimal solution with the smallest selection vector (x1 most significant)
// among those within 1e-9 of the optimum. Throws ArgumentError for models
// outside the shapes produced by build_model.
Solution solve(const LinearModel& m, const SolverOptions& options = {});

struct RowViolation {
    std::string row;
    double amount = 0.0;
};

struct VerificationReport {
    double max_violation = 0.0;
    std::vector<RowViolation> violations; // rows (and bounds) violated by more than 1e-9
    double objective_delta = 0.0;         // |recomputed objective - reported objective|

    bool ok(double tolerance = 1e-9) const noexcept { return max_violation <= tolerance; }
};

VerificationReport verify_solution(const LinearModel& m, const Solution& s);

} // namespace depsel
