#include "depsel/valuation.hpp"

#include <cmath>

#include "depsel/errors.hpp"
#include "depsel/kernels/kernels.hpp"

namespace depsel {

void validate(const Requirement& r) {
    if (r.id.empty()) throw ArgumentError("requirement id must not be empty");
    if (!(r.cost >= 0.0) || !std::isfinite(r.cost)) throw ArgumentError("requirement '" + r.id + "' has a negative cost");
    if (!(r.value >= 0.0) || !std::isfinite(r.value))
        throw ArgumentError("requirement '" + r.id + "' has a negative value");
    if (!(r.probability >= 0.0 && r.probability <= 1.0))
        throw ArgumentError("requirement '" + r.id + "' has a probability outside [0, 1]");
}

std::vector<double> penalties(const InfluenceMatrix& inf, std::span<const std::uint8_t> x) {
    const std::size_t n = inf.size();
    if (x.size() != n) throw ArgumentError("penalties: selection length does not match the influence matrix");
    std::vector<double> selection(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (x[j] > 1) throw ArgumentError("penalties: selection must be binary");
        selection[j] = x[j];
    }
    const auto& kernel = kernels::active();
    std::vector<double> theta(n);
    // I_ii = 0, so including the diagonal adds a zero term only.
    for (std::size_t i = 0; i < n; ++i) theta[i] = kernel.penalty_max(inf.influence.row(i).data(), selection.data(), n);
    return theta;
}

namespace {

SelectionEvaluation accumulate(std::span<const Requirement> reqs, std::span<const std::uint8_t> x,
                               std::vector<double> theta) {
    SelectionEvaluation e;
    e.x.assign(x.begin(), x.end());
    e.theta = std::move(theta);
    for (std::size_t i = 0; i < reqs.size(); ++i) {
        if (!x[i]) continue;
        const double expected = reqs[i].expected_value();
        e.av += reqs[i].value;
        e.ev += expected;
        e.ov += (1.0 - e.theta[i]) * expected;
    }
    return e;
}

} // namespace

SelectionEvaluation evaluate_selection(std::span<const Requirement> reqs, const InfluenceMatrix& inf,
                                       std::span<const std::uint8_t> x) {
    if (reqs.size() != x.size() || inf.size() != x.size())
        throw ArgumentError("evaluate_selection: dimension mismatch");
    return accumulate(reqs, x, penalties(inf, x));
}

SelectionEvaluation evaluate_selection(std::span<const Requirement> reqs, std::span<const std::uint8_t> x) {
    if (reqs.size() != x.size()) throw ArgumentError("evaluate_selection: dimension mismatch");
    for (auto v : x)
        if (v > 1) throw ArgumentError("evaluate_selection: selection must be binary");
    return accumulate(reqs, x, std::vector<double>(x.size(), 0.0));
}

} // namespace depsel
