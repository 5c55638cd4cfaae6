#pragma once
// Identification of explicit value dependencies from preference data:
// Eells causal strength, odds-ratio significance filtering and fuzzy
// membership mapping.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "depsel/dependency_graph.hpp"
#include "depsel/matrix.hpp"
#include "depsel/preferences.hpp"

namespace depsel {

struct CausalAnalysis {
    std::size_t n = 0;
    std::size_t user_count = 0;
    std::vector<std::string> requirement_ids;
    // counts(i, j)     users selecting both r_i and r_j
    // counts(i, j + n) users selecting r_i but not r_j
    Matrix<std::int64_t> counts;
    RealMatrix cond_pos; // p(r_i | r_j)
    RealMatrix cond_neg; // p(r_i | not r_j)
    RealMatrix eells;    // cond_pos - cond_neg; 0 where undefined and on the diagonal
    // 0 when r_j was selected by nobody or by everybody, so one of the
    // conditionals is undefined.
    Matrix<std::uint8_t> defined;
};

struct SignificanceConfig {
    double z_prime = 1.96;
    std::string confidence_label = "95%";
};

struct MembershipConfig {
    double lower_cut = 0.0;
    double upper_cut = 1.0;
};

// 2x2 table of user counts for a requirement pair (i, j).
struct ContingencyTable {
    double both = 0.0;       // r_i and r_j
    double only_first = 0.0; // r_i, not r_j
    double only_second = 0.0;
    double neither = 0.0;

    double total() const noexcept { return both + only_first + only_second + neither; }
};

struct SignificanceResult {
    double odds_ratio = 1.0;
    double log_lower = 0.0;
    double log_upper = 0.0;
    double lower = 1.0;
    double upper = 1.0;
    bool significant = false;
};

CausalAnalysis compute_eells(const PreferenceMatrix& m);

ContingencyTable contingency(const CausalAnalysis& analysis, std::size_t i, std::size_t j);

// Adds 0.5 to every cell when any cell is zero.
ContingencyTable haldane_corrected(const ContingencyTable& t);

double odds_ratio(const ContingencyTable& t);
double odds_ratio(const CausalAnalysis& analysis, std::size_t i, std::size_t j);

// Woolf interval on the log-odds scale, exponentiated; insignificant when
// the interval contains 1.
SignificanceResult significance_test(const ContingencyTable& t, const SignificanceConfig& cfg);
SignificanceResult significance_test(const CausalAnalysis& analysis, std::size_t i, std::size_t j,
                                     const SignificanceConfig& cfg);

// Piecewise-linear strength of |eta| between the cuts.
double membership(double eta, const MembershipConfig& cfg);

void validate(const SignificanceConfig& cfg);
void validate(const MembershipConfig& cfg);

ValueDependencyGraph build_vdg(const CausalAnalysis& analysis, const SignificanceConfig& sig,
                               const MembershipConfig& mem);

// Per-pair diagnostics for the identification report.
struct PairReport {
    std::size_t i = 0;
    std::size_t j = 0;
    bool defined = false;
    double eells = 0.0;
    SignificanceResult significance;
    double strength = 0.0;
};

std::vector<PairReport> identification_report(const CausalAnalysis& analysis, const SignificanceConfig& sig,
                                              const MembershipConfig& mem);

} // namespace depsel
