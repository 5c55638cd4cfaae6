#pragma once
// Bundled 27-requirement case-study dataset.

#include <span>
#include <string_view>

#include "depsel/selection_models.hpp"

namespace depsel {

struct CaseStudyRecord {
    std::string_view id;
    double probability; // as printed (two decimals)
    double value;
    double expected; // as printed
};

std::span<const CaseStudyRecord> case_study_table();

// Price-mode problem with budget 0, the published precedence constraints
// and no influence matrix. probability = expected / value, cost = value.
SelectionProblem case_study_problem();

PrecedenceGraph case_study_precedence();

} // namespace depsel
