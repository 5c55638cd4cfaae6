#include "depsel/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "depsel/errors.hpp"

namespace depsel {

std::string_view status_name(SolveStatus s) noexcept {
    switch (s) {
    case SolveStatus::optimal: return "OPTIMAL";
    case SolveStatus::infeasible: return "INFEASIBLE";
    case SolveStatus::limit: return "LIMIT";
    }
    return "UNKNOWN";
}

namespace {

constexpr double feasibility_tol = 1e-9;
constexpr double tie_tol = 1e-9;
constexpr double neg_inf = -std::numeric_limits<double>::infinity();

enum class Role : std::uint8_t { none, selection, aux, penalty, product, subset };

struct VarRole {
    Role role = Role::none;
    std::size_t index = 0;
};

struct RowTerm {
    std::size_t var; // selection index
    double coef;
};

struct BinaryRow {
    std::vector<RowTerm> terms;
    Relation relation;
    double rhs;
    double max_abs = 0.0;
};

// theta_i >= b - a x_j, stored under column j
struct PenaltyEntry {
    std::size_t i;
    double b;
    double a;
};

struct SubsetInfo {
    std::vector<std::size_t> members;
    double coef = 0.0;
    bool forced = false; // all members selected forces the indicator to 1
};

struct Compiled {
    std::size_t n = 0;
    std::vector<VarRole> roles;
    std::vector<double> profit;       // objective weight of x_i (and g_i)
    std::vector<double> product_coef; // objective weight of y_i
    std::vector<BinaryRow> rows;
    std::vector<std::vector<std::pair<std::size_t, double>>> rows_of;
    std::vector<std::vector<PenaltyEntry>> penalties_by_col;
    std::vector<SubsetInfo> subsets;
    std::optional<std::size_t> capacity;
    std::vector<double> weight;
    std::vector<std::size_t> order;
    bool trivially_infeasible = false;
};

Compiled compile(const LinearModel& m) {
    validate(m);
    if (m.objective.sense != Sense::maximize) throw ArgumentError("solve: only maximisation models are supported");
    const auto& L = m.layout;
    Compiled c;
    c.n = L.selection.size();
    c.roles.assign(m.variables.size(), VarRole{});
    auto assign_roles = [&](const std::vector<std::size_t>& vars, Role role) {
        for (std::size_t k = 0; k < vars.size(); ++k) {
            if (vars[k] >= m.variables.size() || c.roles[vars[k]].role != Role::none)
                throw ArgumentError("solve: inconsistent model layout");
            c.roles[vars[k]] = VarRole{role, k};
        }
    };
    assign_roles(L.selection, Role::selection);
    assign_roles(L.aux, Role::aux);
    assign_roles(L.penalty, Role::penalty);
    assign_roles(L.product, Role::product);
    assign_roles(L.subset, Role::subset);
    for (std::size_t v = 0; v < m.variables.size(); ++v)
        if (c.roles[v].role == Role::none) throw ArgumentError("solve: variable '" + m.variables[v].name + "' has no role");
    if ((!L.aux.empty() && L.aux.size() != c.n) || L.penalty.size() != L.product.size() ||
        (!L.penalty.empty() && L.penalty.size() != c.n) || L.subset_members.size() != L.subset.size())
        throw ArgumentError("solve: inconsistent model layout");

    c.profit.assign(c.n, 0.0);
    c.product_coef.assign(c.n, 0.0);
    c.subsets.resize(L.subset.size());
    for (std::size_t s = 0; s < L.subset.size(); ++s) c.subsets[s].members = L.subset_members[s];
    for (const auto& t : m.objective.terms) {
        const VarRole r = c.roles[t.var];
        switch (r.role) {
        case Role::selection:
        case Role::aux: c.profit[r.index] += t.coef; break;
        case Role::product:
            if (t.coef > 0.0) throw ArgumentError("solve: positive objective weight on a product variable");
            c.product_coef[r.index] += t.coef;
            break;
        case Role::subset: c.subsets[r.index].coef += t.coef; break;
        default: throw ArgumentError("solve: objective references a penalty variable");
        }
    }

    c.rows_of.resize(c.n);
    c.penalties_by_col.resize(c.n);
    std::optional<std::size_t> capacity_binary_row;
    for (std::size_t r = 0; r < m.constraints.size(); ++r) {
        const Constraint& row = m.constraints[r];
        bool has[6] = {};
        for (const auto& t : row.terms) has[static_cast<int>(c.roles[t.var].role)] = true;
        const bool has_sel = has[static_cast<int>(Role::selection)];
        if (row.terms.empty()) {
            const bool ok = (row.relation != Relation::less_equal || 0.0 <= row.rhs + feasibility_tol) &&
                            (row.relation != Relation::greater_equal || 0.0 >= row.rhs - feasibility_tol) &&
                            (row.relation != Relation::equal || std::fabs(row.rhs) <= feasibility_tol);
            c.trivially_infeasible = c.trivially_infeasible || !ok;
            continue;
        }
        if (has[static_cast<int>(Role::subset)]) {
            for (const auto& t : row.terms) {
                const VarRole vr = c.roles[t.var];
                if (vr.role == Role::subset && t.coef < 0.0 && row.relation == Relation::less_equal)
                    c.subsets[vr.index].forced = true;
            }
            continue;
        }
        if (has[static_cast<int>(Role::product)] || has[static_cast<int>(Role::aux)]) continue; // linking rows
        if (has[static_cast<int>(Role::penalty)]) {
            if (row.terms.size() != 2 || row.relation != Relation::greater_equal)
                throw ArgumentError("solve: unsupported penalty row '" + row.name + "'");
            const Term* theta = &row.terms[0];
            const Term* x = &row.terms[1];
            if (c.roles[theta->var].role != Role::penalty) std::swap(theta, x);
            if (c.roles[theta->var].role != Role::penalty || c.roles[x->var].role != Role::selection || theta->coef <= 0.0)
                throw ArgumentError("solve: unsupported penalty row '" + row.name + "'");
            c.penalties_by_col[c.roles[x->var].index].push_back(
                PenaltyEntry{c.roles[theta->var].index, row.rhs / theta->coef, x->coef / theta->coef});
            continue;
        }
        if (!has_sel) throw ArgumentError("solve: unsupported row '" + row.name + "'");
        BinaryRow br{{}, row.relation, row.rhs};
        for (const auto& t : row.terms) {
            br.terms.push_back(RowTerm{c.roles[t.var].index, t.coef});
            br.max_abs = std::max(br.max_abs, std::fabs(t.coef));
        }
        const std::size_t idx = c.rows.size();
        for (const auto& t : br.terms) c.rows_of[t.var].emplace_back(idx, t.coef);
        if (L.capacity_row && *L.capacity_row == r) capacity_binary_row = idx;
        c.rows.push_back(std::move(br));
    }

    c.weight.assign(c.n, 0.0);
    if (capacity_binary_row) {
        const BinaryRow& cap = c.rows[*capacity_binary_row];
        const bool knapsack = cap.relation == Relation::less_equal &&
                              std::all_of(cap.terms.begin(), cap.terms.end(), [](const RowTerm& t) { return t.coef >= 0.0; });
        if (knapsack) {
            c.capacity = capacity_binary_row;
            for (const auto& t : cap.terms) c.weight[t.var] += t.coef;
        }
    }

    c.order.resize(c.n);
    for (std::size_t i = 0; i < c.n; ++i) c.order[i] = i;
    auto ratio = [&](std::size_t i) {
        const double u = c.profit[i];
        return c.weight[i] > 0.0 ? u / c.weight[i] : (u > 0.0 ? std::numeric_limits<double>::infinity() : u);
    };
    std::stable_sort(c.order.begin(), c.order.end(), [&](std::size_t a, std::size_t b) { return ratio(a) > ratio(b); });
    return c;
}

struct State {
    std::vector<std::int8_t> dom; // -1 free, else fixed value
    std::vector<double> theta_lb;
    std::vector<double> minact;
    std::vector<double> maxact;
    std::size_t fixed = 0;
};

struct Fix {
    std::size_t var;
    std::int8_t value;
};

class Search {
public:
    Search(const LinearModel& m, const Compiled& c, const SolverOptions& o)
        : model_(m), c_(c), options_(o), start_(std::chrono::steady_clock::now()) {}

    std::optional<State> root() {
        if (c_.trivially_infeasible) return std::nullopt;
        State s;
        s.dom.assign(c_.n, -1);
        s.theta_lb.assign(c_.n, 0.0);
        s.minact.assign(c_.rows.size(), 0.0);
        s.maxact.assign(c_.rows.size(), 0.0);
        std::vector<Fix> pending;
        for (std::size_t r = 0; r < c_.rows.size(); ++r) {
            for (const auto& t : c_.rows[r].terms) {
                s.minact[r] += std::min(t.coef, 0.0);
                s.maxact[r] += std::max(t.coef, 0.0);
            }
        }
        for (std::size_t r = 0; r < c_.rows.size(); ++r)
            if (!check_row(s, r, pending)) return std::nullopt;
        if (!propagate(s, pending)) return std::nullopt;
        return s;
    }

    bool propagate(State& s, std::vector<Fix>& pending) const {
        while (!pending.empty()) {
            const Fix f = pending.back();
            pending.pop_back();
            if (s.dom[f.var] >= 0) {
                if (s.dom[f.var] != f.value) return false;
                continue;
            }
            s.dom[f.var] = f.value;
            ++s.fixed;
            const double v = f.value;
            for (const auto& e : c_.penalties_by_col[f.var]) s.theta_lb[e.i] = std::max(s.theta_lb[e.i], e.b - e.a * v);
            for (const auto& [r, a] : c_.rows_of[f.var]) {
                s.minact[r] += a * v - std::min(a, 0.0);
                s.maxact[r] += a * v - std::max(a, 0.0);
            }
            for (const auto& [r, a] : c_.rows_of[f.var])
                if (!check_row(s, r, pending)) return false;
        }
        return true;
    }

    bool assign(State& s, std::size_t var, std::int8_t value) const {
        std::vector<Fix> pending{{var, value}};
        return propagate(s, pending);
    }

    double bound(const State& s) {
        double total = 0.0;
        double residual = std::numeric_limits<double>::infinity();
        if (c_.capacity) residual = c_.rows[*c_.capacity].rhs - s.minact[*c_.capacity];
        candidates_.clear();
        for (std::size_t i = 0; i < c_.n; ++i) {
            if (s.dom[i] == 0) continue;
            const double u = c_.profit[i] + c_.product_coef[i] * s.theta_lb[i];
            if (s.dom[i] == 1)
                total += u;
            else if (u > 0.0)
                candidates_.push_back({u, c_.weight[i]});
        }
        std::sort(candidates_.begin(), candidates_.end(), [](const Item& a, const Item& b) {
            return a.profit * b.weight > b.profit * a.weight;
        });
        for (const Item& it : candidates_) {
            if (it.weight <= residual) {
                total += it.profit;
                residual -= it.weight;
            } else {
                if (residual > 0.0) total += it.profit * (residual / it.weight);
                break;
            }
        }
        for (const auto& sub : c_.subsets) {
            bool any_zero = false;
            bool all_one = true;
            for (std::size_t k : sub.members) {
                any_zero = any_zero || s.dom[k] == 0;
                all_one = all_one && s.dom[k] == 1;
            }
            if (sub.coef > 0.0 && !any_zero) total += sub.coef;
            if (sub.coef < 0.0 && all_one && sub.forced) total += sub.coef;
        }
        return total;
    }

    // Complete assignment -> full variable vector and objective.
    double evaluate(const State& s, std::vector<double>& values) const {
        const auto& L = model_.layout;
        values.assign(model_.variables.size(), 0.0);
        for (std::size_t i = 0; i < c_.n; ++i) {
            const double x = s.dom[i];
            values[L.selection[i]] = x;
            if (!L.aux.empty()) values[L.aux[i]] = x;
            if (!L.penalty.empty()) {
                values[L.penalty[i]] = s.theta_lb[i];
                values[L.product[i]] = x * s.theta_lb[i];
            }
        }
        for (std::size_t j = 0; j < c_.subsets.size(); ++j) {
            const auto& sub = c_.subsets[j];
            const bool complete = std::all_of(sub.members.begin(), sub.members.end(), [&](std::size_t k) { return s.dom[k] == 1; });
            values[L.subset[j]] = complete && (sub.forced || sub.coef > 0.0) ? 1.0 : 0.0;
        }
        double obj = 0.0;
        for (const auto& t : model_.objective.terms) obj += t.coef * values[t.var];
        return obj;
    }

    bool limit_hit() {
        if (stopped_) return true;
        if (options_.node_limit && nodes_ >= options_.node_limit) stopped_ = true;
        if (options_.time_limit > 0.0 && (nodes_ & 255) == 0 && elapsed() > options_.time_limit) stopped_ = true;
        return stopped_;
    }

    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    // Phase 1: best objective by depth-first branch and bound.
    void optimise(const State& s) {
        if (limit_hit()) return;
        ++nodes_;
        if (s.fixed == c_.n) {
            const double obj = evaluate(s, scratch_);
            if (obj > best_) {
                best_ = obj;
                incumbent_ = s;
            }
            return;
        }
        if (bound(s) <= best_ + tie_tol) return;
        const std::size_t k = next_free(s);
        for (std::int8_t v : {std::int8_t{1}, std::int8_t{0}}) {
            State child = s;
            if (assign(child, k, v)) optimise(child);
        }
    }

    // Any completion of s with objective >= target; stored in witness.
    bool reach(const State& s, double target, State& witness) {
        if (limit_hit()) return false;
        ++nodes_;
        if (s.fixed == c_.n) {
            if (evaluate(s, scratch_) >= target) {
                witness = s;
                return true;
            }
            return false;
        }
        if (bound(s) < target) return false;
        const std::size_t k = next_free(s);
        for (std::int8_t v : {std::int8_t{1}, std::int8_t{0}}) {
            State child = s;
            if (assign(child, k, v) && reach(child, target, witness)) return true;
        }
        return false;
    }

    std::size_t next_free(const State& s) const {
        for (std::size_t k : c_.order)
            if (s.dom[k] < 0) return k;
        throw std::logic_error("solve: no free variable left");
    }

    std::uint64_t nodes() const noexcept { return nodes_; }
    bool stopped() const noexcept { return stopped_; }
    double best() const noexcept { return best_; }
    const std::optional<State>& incumbent() const noexcept { return incumbent_; }

private:
    bool check_row(const State& s, std::size_t r, std::vector<Fix>& pending) const {
        const BinaryRow& row = c_.rows[r];
        const double lo = s.minact[r];
        const double hi = s.maxact[r];
        if (row.relation != Relation::greater_equal) {
            if (lo > row.rhs + feasibility_tol) return false;
            if (lo + row.max_abs > row.rhs + feasibility_tol) {
                for (const auto& t : row.terms) {
                    if (s.dom[t.var] >= 0) continue;
                    if (t.coef > 0.0 && lo + t.coef > row.rhs + feasibility_tol) pending.push_back({t.var, 0});
                    if (t.coef < 0.0 && lo - t.coef > row.rhs + feasibility_tol) pending.push_back({t.var, 1});
                }
            }
        }
        if (row.relation != Relation::less_equal) {
            if (hi < row.rhs - feasibility_tol) return false;
            if (hi - row.max_abs < row.rhs - feasibility_tol) {
                for (const auto& t : row.terms) {
                    if (s.dom[t.var] >= 0) continue;
                    if (t.coef > 0.0 && hi - t.coef < row.rhs - feasibility_tol) pending.push_back({t.var, 1});
                    if (t.coef < 0.0 && hi + t.coef < row.rhs - feasibility_tol) pending.push_back({t.var, 0});
                }
            }
        }
        return true;
    }

    struct Item {
        double profit;
        double weight;
    };

    const LinearModel& model_;
    const Compiled& c_;
    SolverOptions options_;
    std::chrono::steady_clock::time_point start_;
    std::uint64_t nodes_ = 0;
    bool stopped_ = false;
    double best_ = neg_inf;
    std::optional<State> incumbent_;
    std::vector<double> scratch_;
    std::vector<Item> candidates_;
};

Solution finish(const LinearModel& m, const Compiled& c, Search& search, const State* chosen, SolveStatus status) {
    Solution sol;
    sol.status = status;
    if (chosen) {
        sol.objective = search.evaluate(*chosen, sol.values);
        sol.x.resize(c.n);
        for (std::size_t i = 0; i < c.n; ++i) sol.x[i] = static_cast<std::uint8_t>(chosen->dom[i]);
        for (std::size_t i = 0; i < m.layout.penalty.size(); ++i) {
            sol.theta.push_back(sol.values[m.layout.penalty[i]]);
            sol.y.push_back(sol.values[m.layout.product[i]]);
        }
    }
    sol.stats.nodes = search.nodes();
    sol.stats.elapsed_seconds = search.elapsed();
    return sol;
}

} // namespace

Solution solve(const LinearModel& m, const SolverOptions& options) {
    const Compiled c = compile(m);
    Search search(m, c, options);
    std::optional<State> root = search.root();
    if (!root) return finish(m, c, search, nullptr, SolveStatus::infeasible);
    const double root_bound = search.bound(*root);

    search.optimise(*root);
    auto done = [&](const State* chosen, SolveStatus status) {
        Solution s = finish(m, c, search, chosen, status);
        s.stats.root_bound = root_bound;
        if (chosen) {
            const VerificationReport report = verify_solution(m, s);
            if (!report.ok()) throw std::logic_error("solve: internal error, row '" + report.violations.front().row + "' violated");
        }
        return s;
    };
    if (!search.incumbent()) return done(nullptr, search.stopped() ? SolveStatus::limit : SolveStatus::infeasible);
    if (search.stopped()) return done(&*search.incumbent(), SolveStatus::limit);

    // Phase 2: walk variables in index order, preferring 0 whenever an
    // assignment within tie_tol of the optimum survives.
    const double target = search.best() - tie_tol;
    State prefix = *root;
    State witness = *search.incumbent();
    for (std::size_t i = 0; i < c.n; ++i) {
        if (prefix.dom[i] >= 0) continue;
        if (witness.dom[i] == 0) {
            if (!search.assign(prefix, i, 0)) throw std::logic_error("solve: witness inconsistent with prefix");
            continue;
        }
        State trial = prefix;
        State found;
        if (search.assign(trial, i, 0) && search.reach(trial, target, found)) {
            prefix = std::move(trial);
            witness = std::move(found);
        } else {
            if (search.stopped()) return done(&witness, SolveStatus::limit);
            if (!search.assign(prefix, i, 1)) throw std::logic_error("solve: witness inconsistent with prefix");
        }
    }
    return done(&witness, SolveStatus::optimal);
}

VerificationReport verify_solution(const LinearModel& m, const Solution& s) {
    VerificationReport report;
    auto note = [&](const std::string& row, double amount) {
        report.max_violation = std::max(report.max_violation, amount);
        if (amount > feasibility_tol) report.violations.push_back(RowViolation{row, amount});
    };
    if (s.values.size() != m.variables.size()) {
        note("dimension", std::numeric_limits<double>::infinity());
        return report;
    }
    for (std::size_t v = 0; v < m.variables.size(); ++v) {
        const Variable& var = m.variables[v];
        const double x = s.values[v];
        note("bound:" + var.name, std::max({0.0, var.lower - x, x - var.upper}));
        if (var.kind == VariableKind::binary) note("integrality:" + var.name, std::min(std::fabs(x), std::fabs(x - 1.0)));
    }
    for (const auto& row : m.constraints) {
        double lhs = 0.0;
        for (const auto& t : row.terms) lhs += t.coef * s.values[t.var];
        double amount = 0.0;
        switch (row.relation) {
        case Relation::less_equal: amount = lhs - row.rhs; break;
        case Relation::greater_equal: amount = row.rhs - lhs; break;
        case Relation::equal: amount = std::fabs(lhs - row.rhs); break;
        }
        note(row.name, std::max(0.0, amount));
    }
    double obj = 0.0;
    for (const auto& t : m.objective.terms) obj += t.coef * s.values[t.var];
    report.objective_delta = std::fabs(obj - s.objective);
    return report;
}

} // namespace depsel
