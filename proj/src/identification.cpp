#include "depsel/identification.hpp"

#include <cmath>

#include "depsel/errors.hpp"
#include "depsel/kernels/kernels.hpp"

namespace depsel {

CausalAnalysis compute_eells(const PreferenceMatrix& m) {
    const std::size_t n = m.requirement_count();
    const std::size_t k = m.user_count();
    const PackedRows packed = pack_rows(m);
    const auto& kernel = kernels::active();

    CausalAnalysis a;
    a.n = n;
    a.user_count = k;
    a.requirement_ids = m.requirement_ids();
    a.counts = Matrix<std::int64_t>(n, 2 * n);
    a.cond_pos = RealMatrix(n, n);
    a.cond_neg = RealMatrix(n, n);
    a.eells = RealMatrix(n, n);
    a.defined = Matrix<std::uint8_t>(n, n);

    std::vector<std::int64_t> occurrences(n);
    for (std::size_t i = 0; i < n; ++i)
        occurrences[i] = static_cast<std::int64_t>(kernel.count(packed.row(i), packed.words));

    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto both = i == j ? occurrences[i]
                                     : static_cast<std::int64_t>(kernel.and_count(packed.row(i), packed.row(j), packed.words));
            a.counts(i, j) = both;
            a.counts(i, j + n) = occurrences[i] - both;
        }
    }

    const auto users = static_cast<std::int64_t>(k);
    for (std::size_t j = 0; j < n; ++j) {
        const std::int64_t selected = a.counts(j, j);
        const std::int64_t ignored = users - selected;
        for (std::size_t i = 0; i < n; ++i) {
            if (selected > 0) a.cond_pos(i, j) = static_cast<double>(a.counts(i, j)) / static_cast<double>(selected);
            if (ignored > 0) a.cond_neg(i, j) = static_cast<double>(a.counts(i, j + n)) / static_cast<double>(ignored);
            if (i == j) continue;
            if (selected > 0 && ignored > 0) {
                a.defined(i, j) = 1;
                a.eells(i, j) = a.cond_pos(i, j) - a.cond_neg(i, j);
            }
        }
    }
    return a;
}

ContingencyTable contingency(const CausalAnalysis& analysis, std::size_t i, std::size_t j) {
    const std::size_t n = analysis.n;
    if (i >= n || j >= n) throw ArgumentError("contingency: requirement index out of range");
    const auto both = analysis.counts(i, j);
    const auto only_i = analysis.counts(i, j + n);
    const auto only_j = analysis.counts(j, i + n);
    const auto neither = static_cast<std::int64_t>(analysis.user_count) - both - only_i - only_j;
    return {static_cast<double>(both), static_cast<double>(only_i), static_cast<double>(only_j),
            static_cast<double>(neither)};
}

ContingencyTable haldane_corrected(const ContingencyTable& t) {
    if (t.both > 0.0 && t.only_first > 0.0 && t.only_second > 0.0 && t.neither > 0.0) return t;
    return {t.both + 0.5, t.only_first + 0.5, t.only_second + 0.5, t.neither + 0.5};
}

double odds_ratio(const ContingencyTable& t) {
    const ContingencyTable c = haldane_corrected(t);
    return (c.both * c.neither) / (c.only_first * c.only_second);
}

double odds_ratio(const CausalAnalysis& analysis, std::size_t i, std::size_t j) {
    if (i == j) throw ArgumentError("odds_ratio: requires two distinct requirements");
    return odds_ratio(contingency(analysis, i, j));
}

void validate(const SignificanceConfig& cfg) {
    if (!(cfg.z_prime > 0.0)) throw ArgumentError("significance critical value must be positive");
}

void validate(const MembershipConfig& cfg) {
    if (!(cfg.lower_cut >= 0.0 && cfg.lower_cut <= cfg.upper_cut && cfg.upper_cut <= 1.0))
        throw ArgumentError("membership cuts must satisfy 0 <= a <= b <= 1");
}

SignificanceResult significance_test(const ContingencyTable& t, const SignificanceConfig& cfg) {
    validate(cfg);
    const ContingencyTable c = haldane_corrected(t);
    const double u = c.total();
    if (!(u >= 1.0)) throw ArgumentError("significance_test: no observations");

    SignificanceResult r;
    r.odds_ratio = (c.both * c.neither) / (c.only_first * c.only_second);
    const double log_odds = std::log(r.odds_ratio);
    const double radical =
        std::sqrt(u / c.both + u / c.neither + u / c.only_second + u / c.only_first); // sum of 1 / p
    const double half_width = cfg.z_prime / std::sqrt(u) * radical;
    r.log_lower = log_odds - half_width;
    r.log_upper = log_odds + half_width;
    r.lower = std::exp(r.log_lower);
    r.upper = std::exp(r.log_upper);
    r.significant = !(r.lower <= 1.0 && r.upper >= 1.0);
    return r;
}

SignificanceResult significance_test(const CausalAnalysis& analysis, std::size_t i, std::size_t j,
                                     const SignificanceConfig& cfg) {
    if (i == j) throw ArgumentError("significance_test: requires two distinct requirements");
    if (analysis.user_count == 0) throw ArgumentError("significance_test: no users");
    return significance_test(contingency(analysis, i, j), cfg);
}

double membership(double eta, const MembershipConfig& cfg) {
    const double s = std::fmin(std::fabs(eta), 1.0);
    if (s <= cfg.lower_cut) return 0.0;
    if (s >= cfg.upper_cut) return 1.0;
    return (s - cfg.lower_cut) / (cfg.upper_cut - cfg.lower_cut);
}

std::vector<PairReport> identification_report(const CausalAnalysis& analysis, const SignificanceConfig& sig,
                                              const MembershipConfig& mem) {
    validate(sig);
    validate(mem);
    std::vector<PairReport> rows;
    rows.reserve(analysis.n * (analysis.n > 0 ? analysis.n - 1 : 0));
    for (std::size_t i = 0; i < analysis.n; ++i) {
        for (std::size_t j = 0; j < analysis.n; ++j) {
            if (i == j) continue;
            PairReport row;
            row.i = i;
            row.j = j;
            row.defined = analysis.defined(i, j) != 0;
            row.eells = analysis.eells(i, j);
            row.significance = significance_test(analysis, i, j, sig);
            if (!row.defined) row.significance.significant = false;
            if (row.significance.significant) row.strength = membership(row.eells, mem);
            rows.push_back(row);
        }
    }
    return rows;
}

ValueDependencyGraph build_vdg(const CausalAnalysis& analysis, const SignificanceConfig& sig,
                               const MembershipConfig& mem) {
    ValueDependencyGraph g(analysis.n);
    for (const PairReport& row : identification_report(analysis, sig, mem)) {
        if (row.strength <= 0.0 || row.eells == 0.0) continue;
        g.set_edge(row.i, row.j, row.strength, row.eells > 0.0 ? Quality::positive : Quality::negative);
    }
    return g;
}

} // namespace depsel
