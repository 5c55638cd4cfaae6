#include "depsel/selection_models.hpp"

#include <cmath>
#include <algorithm>
#include <set>

#include <json.hpp>

#include "depsel/errors.hpp"

namespace depsel {

void validate(const SelectionProblem& p) {
    if (!(p.budget >= 0.0) || !std::isfinite(p.budget)) throw ArgumentError("budget must be a non-negative number");
    std::set<std::string_view> ids;
    for (const auto& r : p.requirements) {
        validate(r);
        if (!ids.insert(r.id).second) throw ArgumentError("duplicate requirement id '" + r.id + "'");
    }
    if (p.precedence.size() != p.size())
        throw ArgumentError("precedence graph covers " + std::to_string(p.precedence.size()) +
                            " requirements, problem has " + std::to_string(p.size()));
    if (p.influence && p.influence->size() != p.size())
        throw ArgumentError("influence matrix dimension does not match the requirement count");
}

std::string_view method_name(Method m) noexcept {
    switch (m) {
    case Method::bk: return "bk";
    case Method::pcbk: return "pcbk";
    case Method::sbk: return "sbk";
    case Method::dars: return "dars";
    case Method::increase_decrease: return "id";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    for (Method m : {Method::bk, Method::pcbk, Method::sbk, Method::dars, Method::increase_decrease})
        if (name == method_name(m)) return m;
    if (name == "increase-decrease" || name == "increase_decrease") return Method::increase_decrease;
    throw ArgumentError("unknown selection method '" + std::string(name) + "'");
}

std::size_t LinearModel::add_variable(std::string name, VariableKind kind, double lower, double upper) {
    variables.push_back(Variable{std::move(name), kind, lower, upper});
    return variables.size() - 1;
}

void LinearModel::add_constraint(std::string name, std::vector<Term> terms, Relation relation, double rhs) {
    constraints.push_back(Constraint{std::move(name), std::move(terms), relation, rhs});
}

void validate(const LinearModel& m) {
    for (const auto& v : m.variables) {
        if (v.lower > v.upper) throw ArgumentError("variable '" + v.name + "' has inverted bounds");
        if (v.kind == VariableKind::binary && (v.lower != 0.0 || v.upper != 1.0))
            throw ArgumentError("binary variable '" + v.name + "' must be bounded by [0, 1]");
    }
    auto check = [&](const std::vector<Term>& terms, const std::string& where) {
        for (const auto& t : terms)
            if (t.var >= m.variables.size()) throw ArgumentError(where + " references an undeclared variable");
    };
    check(m.objective.terms, "objective");
    for (const auto& c : m.constraints) check(c.terms, "row '" + c.name + "'");
}

namespace {

std::string indexed(std::string_view stem, std::size_t i) { return std::string(stem) + std::to_string(i + 1); }

void add_capacity_row(const SelectionProblem& p, LinearModel& m) {
    std::vector<Term> terms;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& r = p.requirements[i];
        const double weight = p.mode == ConstraintMode::budget_cost ? r.cost : r.value;
        if (weight != 0.0) terms.push_back({m.layout.selection[i], weight});
    }
    m.layout.capacity_row = m.constraints.size();
    m.add_constraint(p.mode == ConstraintMode::budget_cost ? "budget" : "price", std::move(terms), Relation::less_equal,
                     p.budget);
}

void add_precedence_rows(const SelectionProblem& p, LinearModel& m) {
    const auto& x = m.layout.selection;
    std::size_t record = 0;
    for (const auto& c : p.precedence.constraints()) {
        ++record;
        const std::string stem = "prec" + std::to_string(record);
        switch (c.kind) {
        case PrecedenceKind::requires_all:
            m.add_constraint(stem, {{x[c.source], 1.0}, {x[c.targets[0]], -1.0}}, Relation::less_equal, 0.0);
            break;
        case PrecedenceKind::requires_any: {
            std::vector<Term> terms{{x[c.source], 1.0}};
            for (std::size_t t : c.targets) terms.push_back({x[t], -1.0});
            m.add_constraint(stem, std::move(terms), Relation::less_equal, 0.0);
            break;
        }
        case PrecedenceKind::conflicts:
            // x_a <= 1 - x_b and x_b <= 1 - x_a, one row per direction
            m.add_constraint(stem + "a", {{x[c.source], 1.0}, {x[c.targets[0]], 1.0}}, Relation::less_equal, 1.0);
            m.add_constraint(stem + "b", {{x[c.targets[0]], 1.0}, {x[c.source], 1.0}}, Relation::less_equal, 1.0);
            break;
        case PrecedenceKind::exactly_one: {
            std::vector<Term> terms;
            for (std::size_t t : c.targets) terms.push_back({x[t], 1.0});
            m.add_constraint(stem, std::move(terms), Relation::equal, 1.0);
            break;
        }
        }
    }
}

LinearModel base_model(const SelectionProblem& p, Method kind) {
    validate(p);
    LinearModel m;
    m.kind = kind;
    for (const auto& r : p.requirements) m.layout.requirement_ids.push_back(r.id);
    for (std::size_t i = 0; i < p.size(); ++i)
        m.layout.selection.push_back(m.add_variable(indexed("x", i), VariableKind::binary, 0.0, 1.0));
    return m;
}

void add_subsets(const SelectionProblem& p, const std::vector<SubsetEstimate>& subsets, LinearModel& m) {
    const auto& x = m.layout.selection;
    for (std::size_t s = 0; s < subsets.size(); ++s) {
        const auto& est = subsets[s];
        if (est.members.size() < 2) throw ArgumentError("subset estimates need at least two members");
        std::set<std::size_t> unique;
        double member_value = 0.0;
        for (std::size_t k : est.members) {
            if (k >= p.size()) throw ArgumentError("subset estimate references a requirement out of range");
            if (!unique.insert(k).second) throw ArgumentError("subset estimate lists a requirement twice");
            member_value += p.requirements[k].value;
        }
        const double adjustment = est.value - member_value;
        const std::size_t y = m.add_variable(indexed("s", s), VariableKind::binary, 0.0, 1.0);
        m.layout.subset.push_back(y);
        m.layout.subset_members.push_back(est.members);
        if (adjustment != 0.0) m.objective.terms.push_back({y, adjustment});

        const auto nj = static_cast<double>(est.members.size());
        std::vector<Term> realised{{y, nj}};
        for (std::size_t k : est.members) realised.push_back({x[k], -1.0});
        m.add_constraint(indexed("subset", s), std::move(realised), Relation::less_equal, 0.0);
        if (adjustment < 0.0) {
            // all members selected => indicator set, so the deficit is paid
            std::vector<Term> complete;
            for (std::size_t k : est.members) complete.push_back({x[k], 1.0});
            complete.push_back({y, -1.0});
            m.add_constraint(indexed("subset_full", s), std::move(complete), Relation::less_equal, nj - 1.0);
        }
    }
}

void add_dars_rows(const SelectionProblem& p, const ModelOptions& options, LinearModel& m) {
    const std::size_t n = p.size();
    const InfluenceMatrix& inf = *p.influence;
    auto& L = m.layout;
    if (!options.simplify)
        for (std::size_t i = 0; i < n; ++i) L.aux.push_back(m.add_variable(indexed("g", i), VariableKind::binary, 0.0, 1.0));
    for (std::size_t i = 0; i < n; ++i)
        L.penalty.push_back(m.add_variable(indexed("theta", i), VariableKind::continuous, 0.0, 1.0));
    for (std::size_t i = 0; i < n; ++i)
        L.product.push_back(m.add_variable(indexed("y", i), VariableKind::continuous, 0.0, 1.0));

    for (std::size_t i = 0; i < n; ++i) {
        const double expected = p.requirements[i].expected_value();
        if (expected != 0.0) {
            m.objective.terms.push_back({L.selection[i], expected});
            m.objective.terms.push_back({L.product[i], -expected});
        }
    }

    // theta_i >= (|I_ij| + (1 - 2 x_j) I_ij) / 2  <=>  theta_i + I_ij x_j >= (|I_ij| + I_ij) / 2
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = inf.influence(i, j);
            if (i == j || v == 0.0) continue;
            m.add_constraint("pen" + std::to_string(i + 1) + "_" + std::to_string(j + 1),
                             {{L.penalty[i], 1.0}, {L.selection[j], v}}, Relation::greater_equal,
                             (std::fabs(v) + v) * 0.5);
        }
    }

    // Linearisation of y_i = x_i theta_i through g_i. Halves implied by the
    // variable bounds are omitted; the two halves forcing g_i = x_i merge
    // into one equality row.
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t x = L.selection[i];
        const std::size_t g = options.simplify ? x : L.aux[i];
        const std::size_t y = L.product[i];
        const std::size_t t = L.penalty[i];
        const std::string id = std::to_string(i + 1);
        if (!options.simplify) m.add_constraint("link_xg" + id, {{x, 1.0}, {g, -1.0}}, Relation::equal, 0.0);
        m.add_constraint("link_yg" + id, {{y, 1.0}, {g, -1.0}}, Relation::less_equal, 0.0);
        m.add_constraint("link_ylo" + id, {{y, 1.0}, {t, -1.0}, {g, -1.0}}, Relation::greater_equal, -1.0);
        m.add_constraint("link_yhi" + id, {{y, 1.0}, {t, -1.0}, {g, 1.0}}, Relation::less_equal, 1.0);
    }
}

} // namespace

LinearModel build_model(const SelectionProblem& p, Method method, const std::vector<SubsetEstimate>& subsets,
                        const ModelOptions& options) {
    if (method == Method::increase_decrease) return build_increase_decrease(p, subsets);
    if (method == Method::dars && !p.influence) throw ArgumentError("the dars model needs an influence matrix");

    LinearModel m = base_model(p, method);
    const std::size_t n = p.size();
    switch (method) {
    case Method::bk:
    case Method::pcbk:
        for (std::size_t i = 0; i < n; ++i)
            if (p.requirements[i].value != 0.0) m.objective.terms.push_back({m.layout.selection[i], p.requirements[i].value});
        break;
    case Method::sbk:
        for (std::size_t i = 0; i < n; ++i) {
            const double expected = p.requirements[i].expected_value();
            if (expected != 0.0) m.objective.terms.push_back({m.layout.selection[i], expected});
        }
        break;
    case Method::dars:
        add_dars_rows(p, options, m);
        break;
    case Method::increase_decrease:
        break;
    }

    add_capacity_row(p, m);
    if (method != Method::bk) add_precedence_rows(p, m);
    if (method == Method::dars) {
        // row order: budget, precedence, penalty, linking
        std::vector<Constraint> dars_rows;
        std::vector<Constraint> rest;
        for (auto& c : m.constraints) (c.name.starts_with("pen") || c.name.starts_with("link") ? dars_rows : rest).push_back(std::move(c));
        m.constraints = std::move(rest);
        for (auto& c : dars_rows) m.constraints.push_back(std::move(c));
        m.layout.capacity_row = 0;
    }
    validate(m);
    return m;
}

LinearModel build_increase_decrease(const SelectionProblem& p, const std::vector<SubsetEstimate>& subsets) {
    LinearModel m = base_model(p, Method::increase_decrease);
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p.requirements[i].value != 0.0) m.objective.terms.push_back({m.layout.selection[i], p.requirements[i].value});
    add_subsets(p, subsets, m);
    // capacity row first, subset rows after
    const std::size_t subset_rows = m.constraints.size();
    add_capacity_row(p, m);
    std::rotate(m.constraints.begin(), m.constraints.begin() + static_cast<std::ptrdiff_t>(subset_rows), m.constraints.end());
    m.layout.capacity_row = 0;
    validate(m);
    return m;
}

std::string model_to_json(const LinearModel& m) {
    using nlohmann::json;
    auto relation = [](Relation r) {
        switch (r) {
        case Relation::less_equal: return "<=";
        case Relation::equal: return "=";
        case Relation::greater_equal: return ">=";
        }
        return "?";
    };
    auto terms_json = [&](const std::vector<Term>& terms) {
        json arr = json::array();
        for (const auto& t : terms) arr.push_back({{"var", m.variables[t.var].name}, {"coef", t.coef}});
        return arr;
    };
    json doc;
    doc["kind"] = std::string(method_name(m.kind));
    doc["sense"] = m.objective.sense == Sense::maximize ? "maximize" : "minimize";
    doc["objective"] = terms_json(m.objective.terms);
    json vars = json::array();
    for (const auto& v : m.variables)
        vars.push_back({{"name", v.name},
                        {"kind", v.kind == VariableKind::binary ? "binary" : "continuous"},
                        {"lower", v.lower},
                        {"upper", v.upper}});
    doc["variables"] = std::move(vars);
    json rows = json::array();
    for (const auto& c : m.constraints)
        rows.push_back({{"name", c.name}, {"terms", terms_json(c.terms)}, {"relation", relation(c.relation)}, {"rhs", c.rhs}});
    doc["constraints"] = std::move(rows);
    doc["requirements"] = m.layout.requirement_ids;
    return doc.dump(2);
}

} // namespace depsel
