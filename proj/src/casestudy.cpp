#include "depsel/casestudy.hpp"

#include <array>
#include <string>

namespace depsel {

namespace {

constexpr std::array<CaseStudyRecord, 27> table{{
    {"r1", 0.94, 10.0, 9.43},  {"r2", 1.00, 20.0, 20.00}, {"r3", 0.37, 5.0, 1.85},   {"r4", 0.98, 17.0, 16.61},
    {"r5", 0.88, 6.0, 5.28},   {"r6", 0.91, 20.0, 18.30}, {"r7", 0.82, 15.0, 12.36}, {"r8", 1.00, 9.0, 9.00},
    {"r9", 0.97, 20.0, 19.43}, {"r10", 0.76, 16.0, 12.18}, {"r11", 0.57, 20.0, 11.36}, {"r12", 1.00, 12.0, 12.00},
    {"r13", 0.76, 8.0, 6.09},  {"r14", 0.45, 14.0, 6.28}, {"r15", 0.58, 8.0, 4.64},  {"r16", 0.82, 10.0, 8.24},
    {"r17", 0.12, 10.0, 1.19}, {"r18", 0.51, 15.0, 7.59}, {"r19", 0.67, 20.0, 13.41}, {"r20", 0.20, 20.0, 4.09},
    {"r21", 0.14, 15.0, 2.05}, {"r22", 0.33, 20.0, 6.59}, {"r23", 0.88, 20.0, 17.61}, {"r24", 1.00, 1.0, 1.00},
    {"r25", 0.24, 5.0, 1.19},  {"r26", 0.36, 1.0, 0.36},  {"r27", 0.97, 5.0, 4.86},
}};

// 1-based requirement number to index
constexpr std::size_t r(std::size_t k) { return k - 1; }

} // namespace

std::span<const CaseStudyRecord> case_study_table() { return table; }

PrecedenceGraph case_study_precedence() {
    PrecedenceGraph g(table.size());
    g.add_exactly_one({r(2), r(6)});
    for (std::size_t s : {4, 5, 8}) g.add_requires_any(r(s), {r(1), r(2)});
    g.add_requires(r(8), r(25));
    g.add_requires(r(19), r(2));
    g.add_requires(r(19), r(6));
    g.add_requires(r(20), r(2));
    g.add_requires(r(20), r(6));
    g.add_requires(r(26), r(27));
    g.add_requires(r(27), r(1));
    g.add_requires(r(27), r(6));
    g.add_conflict(r(17), r(18));
    return g;
}

SelectionProblem case_study_problem() {
    SelectionProblem p;
    for (const auto& rec : table) {
        Requirement req;
        req.id = std::string(rec.id);
        req.name = "Requirement " + std::string(rec.id.substr(1));
        req.cost = rec.value;
        req.value = rec.value;
        req.probability = rec.expected / rec.value;
        p.requirements.push_back(std::move(req));
    }
    p.mode = ConstraintMode::price_value;
    p.budget = 0.0;
    p.precedence = case_study_precedence();
    return p;
}

} // namespace depsel
