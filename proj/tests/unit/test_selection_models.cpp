#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "depsel/errors.hpp"
#include "depsel/selection_models.hpp"
#include "lp_reader.hpp"
#include "oracles.hpp"

using namespace depsel;

namespace {

InfluenceMatrix influence_of(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    RealMatrix pos(n, n), neg(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (rows[i][j] > 0) pos(i, j) = rows[i][j];
            if (rows[i][j] < 0) neg(i, j) = -rows[i][j];
        }
    return InfluenceMatrix::from_components(pos, neg);
}

SelectionProblem two_requirements() {
    SelectionProblem p;
    p.requirements = {{"r1", "", 1, 10, 1.0}, {"r2", "", 1, 4, 0.5}};
    p.budget = 2;
    p.precedence = PrecedenceGraph(2);
    p.influence = influence_of({{0, -0.8}, {0.3, 0}});
    return p;
}

std::size_t count_kind(const LinearModel& m, VariableKind k) {
    return static_cast<std::size_t>(
        std::count_if(m.variables.begin(), m.variables.end(), [&](const Variable& v) { return v.kind == k; }));
}

std::size_t count_prefix(const LinearModel& m, const std::string& prefix) {
    return static_cast<std::size_t>(std::count_if(m.constraints.begin(), m.constraints.end(),
                                                  [&](const Constraint& c) { return c.name.starts_with(prefix); }));
}

std::string lp_text(const LinearModel& m) {
    std::ostringstream out;
    export_lp(m, out);
    return out.str();
}

std::map<std::string, double> by_name(const LinearModel& m, const std::vector<Term>& terms) {
    std::map<std::string, double> r;
    for (const auto& t : terms) r[m.variables[t.var].name] += t.coef;
    return r;
}

std::string relation_of(Relation r) {
    return r == Relation::less_equal ? "<=" : r == Relation::equal ? "=" : ">=";
}

// Model value of a full assignment, evaluated row by row.
bool satisfies(const LinearModel& m, const std::vector<double>& v) {
    for (const auto& c : m.constraints) {
        double a = 0.0;
        for (const auto& t : c.terms) a += t.coef * v[t.var];
        if (c.relation == Relation::less_equal && a > c.rhs + 1e-9) return false;
        if (c.relation == Relation::greater_equal && a < c.rhs - 1e-9) return false;
        if (c.relation == Relation::equal && std::fabs(a - c.rhs) > 1e-9) return false;
    }
    return true;
}

double objective_at(const LinearModel& m, const std::vector<double>& v) {
    double s = 0.0;
    for (const auto& t : m.objective.terms) s += t.coef * v[t.var];
    return s;
}

} // namespace

TEST_SUITE("selection_models") {

TEST_CASE("method names") {
    for (auto m : {Method::bk, Method::pcbk, Method::sbk, Method::dars})
        CHECK(parse_method(method_name(m)) == m);
    CHECK(parse_method("id") == Method::increase_decrease);
    CHECK(parse_method("increase-decrease") == Method::increase_decrease);
    CHECK_THROWS_AS(parse_method("knapsack"), ArgumentError);
}

TEST_CASE("problem validation") {
    auto p = two_requirements();
    p.budget = -1;
    CHECK_THROWS_AS(validate(p), ArgumentError);
    p = two_requirements();
    p.precedence = PrecedenceGraph(3);
    CHECK_THROWS_AS(validate(p), ArgumentError);
    p = two_requirements();
    p.influence = InfluenceMatrix::zero(3);
    CHECK_THROWS_AS(validate(p), ArgumentError);
    p = two_requirements();
    p.influence.reset();
    CHECK_THROWS_AS(build_model(p, Method::dars), ArgumentError);
}

TEST_CASE("DARS variable and row counts for two requirements") {
    const auto m = build_model(two_requirements(), Method::dars);
    CHECK(count_kind(m, VariableKind::binary) == 4);
    CHECK(count_kind(m, VariableKind::continuous) == 4);
    CHECK(m.constraints.size() == 1 + 2 + 8);
    CHECK(m.constraints[0].name == "budget");
    CHECK(m.layout.capacity_row == std::optional<std::size_t>(0));
    CHECK(count_prefix(m, "pen") == 2);
    CHECK(count_prefix(m, "link") == 8);

    const auto s = build_model(two_requirements(), Method::dars, {}, ModelOptions{true});
    CHECK(count_kind(s, VariableKind::binary) == 2);
    CHECK(count_prefix(s, "link") == 6);
    CHECK(s.layout.aux.empty());
}

TEST_CASE("DARS penalty rows encode theta bounds") {
    const auto m = build_model(two_requirements(), Method::dars);
    const auto& pen = *std::find_if(m.constraints.begin(), m.constraints.end(),
                                    [](const Constraint& c) { return c.name == "pen1_2"; });
    CHECK(pen.relation == Relation::greater_equal);
    CHECK(pen.rhs == 0.0);
    CHECK(by_name(m, pen.terms) == std::map<std::string, double>{{"theta1", 1.0}, {"x2", -0.8}});
    const auto& pen21 = *std::find_if(m.constraints.begin(), m.constraints.end(),
                                      [](const Constraint& c) { return c.name == "pen2_1"; });
    CHECK(pen21.rhs == doctest::Approx(0.3));
}

TEST_CASE("DARS rows keep budget, precedence, penalty, linking order") {
    auto p = two_requirements();
    p.precedence.add_requires(1, 0);
    const auto m = build_model(p, Method::dars);
    std::vector<std::string> heads;
    for (const auto& c : m.constraints) heads.push_back(c.name.substr(0, 3));
    CHECK(heads[0] == "bud");
    CHECK(heads[1] == "pre");
    CHECK(heads[2] == "pen");
    CHECK(heads[3] == "pen");
    for (std::size_t k = 4; k < heads.size(); ++k) CHECK(heads[k] == "lin");
}

TEST_CASE("DARS linearisation is exact at binary points") {
    // For every x and theta grid point, y = x theta is the only feasible product.
    const auto m = build_model(two_requirements(), Method::dars);
    const auto& L = m.layout;
    for (int x = 0; x <= 1; ++x)
        for (int k = 0; k <= 10; ++k) {
            const double theta = k / 10.0;
            for (int yk = 0; yk <= 10; ++yk) {
                const double y = yk / 10.0;
                std::vector<double> v(m.variables.size(), 0.0);
                v[L.selection[0]] = x;
                v[L.aux[0]] = x;
                v[L.penalty[0]] = theta;
                v[L.product[0]] = y;
                bool ok = true;
                for (const auto& c : m.constraints) {
                    if (!c.name.ends_with("1") || !c.name.starts_with("link")) continue;
                    double a = 0.0;
                    for (const auto& t : c.terms) a += t.coef * v[t.var];
                    if (c.relation == Relation::less_equal) ok = ok && a <= c.rhs + 1e-12;
                    if (c.relation == Relation::greater_equal) ok = ok && a >= c.rhs - 1e-12;
                    if (c.relation == Relation::equal) ok = ok && std::fabs(a - c.rhs) < 1e-12;
                }
                CHECK(ok == (std::fabs(y - x * theta) < 1e-12));
            }
        }
}

TEST_CASE("BK ignores precedence; PCBK emits both conflict rows") {
    SelectionProblem p;
    for (int i = 1; i <= 18; ++i) p.requirements.push_back({"r" + std::to_string(i), "", 1, 1, 1});
    p.budget = 10;
    p.precedence = PrecedenceGraph(18);
    p.precedence.add_conflict(16, 17);
    CHECK(build_model(p, Method::bk).constraints.size() == 1);
    const auto m = build_model(p, Method::pcbk);
    REQUIRE(m.constraints.size() == 3);
    CHECK(m.constraints[1].name == "prec1a");
    CHECK(m.constraints[2].name == "prec1b");
    CHECK(by_name(m, m.constraints[1].terms) == std::map<std::string, double>{{"x17", 1.0}, {"x18", 1.0}});
    CHECK(m.constraints[1].rhs == 1.0);
    CHECK(m.constraints[2].terms.front().var == m.layout.selection[17]);
}

TEST_CASE("PCBK rows for every precedence kind") {
    SelectionProblem p;
    for (int i = 1; i <= 4; ++i) p.requirements.push_back({"r" + std::to_string(i), "", 1, 1, 1});
    p.budget = 4;
    p.precedence = PrecedenceGraph(4);
    p.precedence.add_requires(0, 1);
    p.precedence.add_requires_any(2, {0, 1});
    p.precedence.add_exactly_one({1, 3});
    const auto m = build_model(p, Method::pcbk);
    REQUIRE(m.constraints.size() == 4);
    CHECK(by_name(m, m.constraints[1].terms) == std::map<std::string, double>{{"x1", 1.0}, {"x2", -1.0}});
    CHECK(by_name(m, m.constraints[2].terms) ==
          std::map<std::string, double>{{"x1", -1.0}, {"x2", -1.0}, {"x3", 1.0}});
    CHECK(m.constraints[3].relation == Relation::equal);
    CHECK(m.constraints[3].rhs == 1.0);
}

TEST_CASE("feasible model points match the precedence oracle") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 40; ++trial) {
        SelectionProblem p;
        const std::size_t n = 5;
        for (std::size_t i = 0; i < n; ++i) p.requirements.push_back({"r" + std::to_string(i), "", 1.0 + i, 2.0, 0.5});
        p.budget = 4.0 + trial % 9;
        p.precedence = PrecedenceGraph(n);
        std::uniform_int_distribution<std::size_t> node(0, n - 1);
        for (int k = 0; k < 3; ++k) {
            const std::size_t a = node(rng), b = (a + 1 + node(rng) % (n - 1)) % n;
            switch ((trial + k) % 4) {
            case 0: p.precedence.add_requires(a, b); break;
            case 1: p.precedence.add_conflict(a, b); break;
            case 2: p.precedence.add_requires_any(a, {b, (b + 1) % n == a ? (b + 2) % n : (b + 1) % n}); break;
            default: p.precedence.add_exactly_one({a, b}); break;
            }
        }
        const auto m = build_model(p, Method::pcbk);
        for (std::uint32_t code = 0; code < (1u << n); ++code) {
            std::vector<std::uint8_t> x(n);
            std::vector<double> v(m.variables.size(), 0.0);
            for (std::size_t i = 0; i < n; ++i) v[m.layout.selection[i]] = x[i] = (code >> i) & 1u;
            CHECK(satisfies(m, v) == oracle::feasible(p, x, true));
        }
    }
}

TEST_CASE("SBK objective uses expected values") {
    const auto m = build_model(two_requirements(), Method::sbk);
    CHECK(by_name(m, m.objective.terms) == std::map<std::string, double>{{"x1", 10.0}, {"x2", 2.0}});
    const auto bk = build_model(two_requirements(), Method::bk);
    CHECK(by_name(bk, bk.objective.terms) == std::map<std::string, double>{{"x1", 10.0}, {"x2", 4.0}});
}

TEST_CASE("price mode caps accumulated value") {
    auto p = two_requirements();
    p.mode = ConstraintMode::price_value;
    p.budget = 12;
    const auto m = build_model(p, Method::bk);
    CHECK(m.constraints[0].name == "price");
    CHECK(by_name(m, m.constraints[0].terms) == std::map<std::string, double>{{"x1", 10.0}, {"x2", 4.0}});
    CHECK(m.constraints[0].rhs == 12.0);
}

TEST_CASE("increase-decrease subsets") {
    auto p = two_requirements();
    p.precedence = PrecedenceGraph(2);

    SUBCASE("no subsets gives plain BK") {
        const auto m = build_increase_decrease(p, {});
        const auto bk = build_model(p, Method::bk);
        CHECK(by_name(m, m.objective.terms) == by_name(bk, bk.objective.terms));
        CHECK(m.constraints.size() == bk.constraints.size());
    }
    SUBCASE("exact subset value leaves the objective unchanged") {
        const auto m = build_increase_decrease(p, {{{0, 1}, 14.0}});
        CHECK(by_name(m, m.objective.terms) == std::map<std::string, double>{{"x1", 10.0}, {"x2", 4.0}});
    }
    for (double w : {9.0, 20.0}) {
        CAPTURE(w);
        const std::vector<SubsetEstimate> subsets{{{0, 1}, w}};
        const auto m = build_increase_decrease(p, subsets);
        CHECK(m.constraints[0].name == "budget");
        CHECK(count_prefix(m, "subset_full") == (w < 14.0 ? 1u : 0u));
        // best model objective over s for each x equals the oracle score
        for (int code = 0; code < 4; ++code) {
            const std::vector<std::uint8_t> x{static_cast<std::uint8_t>(code & 1), static_cast<std::uint8_t>(code >> 1)};
            double best = -1e300;
            for (int s = 0; s <= 1; ++s) {
                std::vector<double> v(m.variables.size(), 0.0);
                v[m.layout.selection[0]] = x[0];
                v[m.layout.selection[1]] = x[1];
                v[m.layout.subset[0]] = s;
                if (satisfies(m, v)) best = std::max(best, objective_at(m, v));
            }
            CHECK(best == doctest::Approx(oracle::score(p, Method::increase_decrease, x, subsets)));
        }
    }
    CHECK_THROWS_AS(build_increase_decrease(p, {{{0}, 3.0}}), ArgumentError);
    CHECK_THROWS_AS(build_increase_decrease(p, {{{0, 5}, 3.0}}), ArgumentError);
    CHECK_THROWS_AS(build_increase_decrease(p, {{{1, 1}, 3.0}}), ArgumentError);
}

TEST_CASE("LP export of a one-variable model") {
    SelectionProblem p;
    p.requirements = {{"r1", "", 3, 10, 1}};
    p.budget = 5;
    p.precedence = PrecedenceGraph(1);
    const auto text = lp_text(build_model(p, Method::bk));
    CHECK(text.find("Maximize\n obj: 10 x1\n") != std::string::npos);
    CHECK(text.find("Subject To\n budget: 3 x1 <= 5\n") != std::string::npos);
    CHECK(text.find("Binary\n") != std::string::npos);
    CHECK(text.ends_with("End\n"));
}

TEST_CASE("LP export round-trips through an independent reader") {
    auto p = two_requirements();
    p.precedence.add_requires(1, 0);
    for (bool simplify : {false, true}) {
        const auto m = build_model(p, Method::dars, {}, ModelOptions{simplify});
        const auto text = lp_text(m);
        CHECK(text.find(">=") != std::string::npos);
        const auto parsed = lp::parse(text);
        CHECK(parsed.maximize);
        CHECK(parsed.objective == by_name(m, m.objective.terms));
        REQUIRE(parsed.rows.size() == m.constraints.size());
        for (std::size_t r = 0; r < parsed.rows.size(); ++r) {
            CHECK(parsed.rows[r].name == m.constraints[r].name);
            CHECK(parsed.rows[r].coef == by_name(m, m.constraints[r].terms));
            CHECK(parsed.rows[r].relation == relation_of(m.constraints[r].relation));
            CHECK(parsed.rows[r].rhs == m.constraints[r].rhs);
        }
        CHECK(parsed.bounds.size() == count_kind(m, VariableKind::continuous));
        CHECK(parsed.binaries.size() == count_kind(m, VariableKind::binary));
    }
}

TEST_CASE("long LP rows wrap under the line limit") {
    SelectionProblem p;
    for (int i = 1; i <= 400; ++i) p.requirements.push_back({"r" + std::to_string(i), "", 1.25 * i, 3.5, 0.75});
    p.budget = 1000;
    p.precedence = PrecedenceGraph(400);
    const auto m = build_model(p, Method::sbk);
    const auto parsed = lp::parse(lp_text(m));
    CHECK(parsed.max_line_length <= 510);
    CHECK(parsed.rows[0].coef.size() == 400);
    CHECK(parsed.rows[0].coef.at("x400") == 500.0);
}

TEST_CASE("model validation rejects malformed models") {
    LinearModel m;
    m.add_variable("x1", VariableKind::binary, 0, 1);
    m.add_constraint("row", {{3, 1.0}}, Relation::less_equal, 1.0);
    CHECK_THROWS_AS(validate(m), ArgumentError);
    LinearModel bad;
    bad.add_variable("x1", VariableKind::binary, 0, 2);
    CHECK_THROWS_AS(validate(bad), ArgumentError);
    LinearModel inverted;
    inverted.add_variable("t", VariableKind::continuous, 1, 0);
    CHECK_THROWS_AS(validate(inverted), ArgumentError);
}

TEST_CASE("JSON dump lists every row") {
    const auto m = build_model(two_requirements(), Method::dars);
    const auto json = model_to_json(m);
    for (const auto& c : m.constraints) CHECK(json.find('"' + c.name + '"') != std::string::npos);
}

}
