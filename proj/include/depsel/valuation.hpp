#pragma once
// Expected value, dependency penalties and overall value of a selection.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "depsel/dependency_graph.hpp"

namespace depsel {

struct Requirement {
    std::string id;
    std::string name;
    double cost = 0.0;
    double value = 0.0;       // estimated value
    double probability = 1.0; // share of users selecting the requirement

    double expected_value() const noexcept { return probability * value; }
};

void validate(const Requirement& r);

using Selection = std::vector<std::uint8_t>;

struct SelectionEvaluation {
    Selection x;
    std::vector<double> theta;
    double av = 0.0; // sum of estimated values
    double ev = 0.0; // sum of expected values
    double ov = 0.0; // sum of (1 - theta) * expected value
};

// theta_i = max over j != i of (|I_ij| + (1 - 2 x_j) I_ij) / 2, for every i
// (selected or not).
std::vector<double> penalties(const InfluenceMatrix& inf, std::span<const std::uint8_t> x);

SelectionEvaluation evaluate_selection(std::span<const Requirement> reqs, const InfluenceMatrix& inf,
                                       std::span<const std::uint8_t> x);

// Same, with no value dependencies (theta = 0).
SelectionEvaluation evaluate_selection(std::span<const Requirement> reqs, std::span<const std::uint8_t> x);

} // namespace depsel
