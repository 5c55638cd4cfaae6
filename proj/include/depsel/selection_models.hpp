#pragma once
// Compilation of a selection problem into a solver-agnostic mixed 0/1
// linear model for each selection method, plus LP-format export.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "depsel/dependency_graph.hpp"
#include "depsel/valuation.hpp"

namespace depsel {

enum class ConstraintMode {
    budget_cost, // sum c_i x_i <= budget
    price_value, // sum v_i x_i <= budget (price limit)
};

struct SelectionProblem {
    std::vector<Requirement> requirements;
    double budget = 0.0;
    ConstraintMode mode = ConstraintMode::budget_cost;
    PrecedenceGraph precedence;
    std::optional<InfluenceMatrix> influence; // absent means no value dependencies

    std::size_t size() const noexcept { return requirements.size(); }
};

// Throws ArgumentError on a negative budget, invalid requirements or
// mismatched precedence/influence dimensions.
void validate(const SelectionProblem& p);

enum class Method { bk, pcbk, sbk, dars, increase_decrease };

std::string_view method_name(Method m) noexcept;
Method parse_method(std::string_view name); // throws ArgumentError

struct SubsetEstimate {
    std::vector<std::size_t> members;
    double value = 0.0; // estimated value of the subset as a whole
};

enum class VariableKind { binary, continuous };
enum class Relation { less_equal, equal, greater_equal };
enum class Sense { maximize, minimize };

struct Variable {
    std::string name;
    VariableKind kind = VariableKind::binary;
    double lower = 0.0;
    double upper = 1.0;
};

struct Term {
    std::size_t var = 0;
    double coef = 0.0;
};

struct Constraint {
    std::string name;
    std::vector<Term> terms;
    Relation relation = Relation::less_equal;
    double rhs = 0.0;
};

struct Objective {
    Sense sense = Sense::maximize;
    std::vector<Term> terms;
};

// Where each role lives among the model variables. Vectors are indexed by
// requirement (or subset) and hold variable indices.
struct ModelLayout {
    std::vector<std::string> requirement_ids;
    std::vector<std::size_t> selection; // x_i
    std::vector<std::size_t> aux;       // g_i, empty when simplified
    std::vector<std::size_t> penalty;   // theta_i
    std::vector<std::size_t> product;   // y_i = x_i theta_i
    std::vector<std::size_t> subset;    // subset indicators
    std::vector<std::vector<std::size_t>> subset_members;
    std::optional<std::size_t> capacity_row;
};

struct LinearModel {
    Method kind = Method::bk;
    std::vector<Variable> variables;
    Objective objective;
    std::vector<Constraint> constraints;
    ModelLayout layout;

    std::size_t add_variable(std::string name, VariableKind kind, double lower, double upper);
    void add_constraint(std::string name, std::vector<Term> terms, Relation relation, double rhs);
};

// Throws ArgumentError when a row references an undeclared variable, a
// binary variable is not bounded by [0, 1], or bounds are inverted.
void validate(const LinearModel& m);

struct ModelOptions {
    // Substitute g := x in the DARS linking rows and drop g entirely.
    bool simplify = false;
};

LinearModel build_model(const SelectionProblem& p, Method method, const std::vector<SubsetEstimate>& subsets = {},
                        const ModelOptions& options = {});

LinearModel build_increase_decrease(const SelectionProblem& p, const std::vector<SubsetEstimate>& subsets);

// CPLEX LP text: Maximize/Minimize, Subject To, Bounds, Binary, End.
void export_lp(const LinearModel& m, std::ostream& out);

// Debug dump of variables and rows.
std::string model_to_json(const LinearModel& m);

} // namespace depsel
