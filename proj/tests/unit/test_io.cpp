#include <doctest.h>

#include <sstream>

#include "depsel/errors.hpp"
#include "depsel/io.hpp"
#include "oracles.hpp"

using namespace depsel;

namespace {

template <class F>
auto from_text(const std::string& text, F&& reader) {
    std::istringstream in(text);
    return reader(in);
}

template <class F>
FormatError format_error(const std::string& text, F&& reader) {
    try {
        from_text(text, reader);
    } catch (const FormatError& e) {
        return e;
    }
    FAIL("expected a format error");
    return FormatError("unreachable");
}

const std::vector<std::string> ids3{"a", "b", "c"};

} // namespace

TEST_SUITE("io") {

TEST_CASE("provenance header") {
    const auto line = provenance_line("select\x1f--method\x1f" "dars");
    CHECK(line.starts_with("# depsel " + std::string(tool_version()) + " config="));
    CHECK(line.size() == std::string("# depsel  config=").size() + tool_version().size() + 16);
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(provenance_line("x") != provenance_line("y"));
}

TEST_CASE("requirements round-trip") {
    const std::vector<Requirement> reqs{{"r1", "Login, with SSO", 1.5, 10, 0.25}, {"r2", "Export \"CSV\"", 0, 3, 1}};
    std::ostringstream out;
    write_requirements(reqs, out);
    const auto back = from_text(out.str(), [](std::istream& in) { return read_requirements(in); });
    REQUIRE(back.size() == 2);
    CHECK(back[0].name == "Login, with SSO");
    CHECK(back[1].name == "Export \"CSV\"");
    CHECK(back[0].cost == 1.5);
    CHECK(back[0].probability == 0.25);
}

TEST_CASE("requirements errors carry line and column") {
    auto read = [](std::istream& in) { return read_requirements(in); };
    const auto e = format_error("id,name,cost,value,probability\nr1,A,1,2,0.5\nr2,B,x,2,0.5\n", read);
    CHECK(e.line() == 3);
    CHECK(e.column() == 6);
    CHECK(format_error("id,name,cost,value,probability\n# note\nr1,A,1,2,1.5\n", read).line() == 3);
    CHECK(format_error("id,name,cost,value,probability\nr1,A,1,2\n", read).line() == 2);
    CHECK(format_error("id,cost\n", read).line() == 1);
    CHECK(format_error("id,name,cost,value,probability\nr1,A,1,2,0.5\nr1,B,1,2,0.5\n", read).line() == 3);
}

TEST_CASE("VDG round-trip") {
    ValueDependencyGraph g(3);
    g.set_edge(0, 1, 0.25, Quality::positive);
    g.set_edge(2, 0, 0.8, Quality::negative);
    std::ostringstream out;
    write_vdg(g, ids3, out);
    CHECK(out.str().starts_with("from,to,strength,quality\n"));
    CHECK(from_text(out.str(), [](std::istream& in) { return read_vdg(in, ids3); }) == g);
    auto read = [](std::istream& in) { return read_vdg(in, ids3); };
    CHECK(format_error("from,to,strength,quality\na,z,0.5,+\n", read).column() == 3);
    CHECK(format_error("from,to,strength,quality\na,b,0.5,?\n", read).column() == 9);
    CHECK(format_error("from,to,strength,quality\na,b,1.5,+\n", read).line() == 2);
}

TEST_CASE("random VDGs round-trip exactly") {
    std::mt19937_64 rng(2);
    std::vector<std::string> ids;
    for (int i = 0; i < 9; ++i) ids.push_back("req" + std::to_string(i));
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = oracle::random_vdg(rng, 9, 0.3, 0.4);
        std::ostringstream out;
        write_vdg(g, ids, out);
        CHECK(from_text(out.str(), [&](std::istream& in) { return read_vdg(in, ids); }) == g);
    }
}

TEST_CASE("constraints round-trip") {
    PrecedenceGraph p(3);
    p.add_requires(0, 1);
    p.add_requires_any(2, {0, 1});
    p.add_conflict(1, 2);
    p.add_exactly_one({0, 2});
    std::ostringstream out;
    write_constraints(p, ids3, out);
    CHECK(from_text(out.str(), [](std::istream& in) { return read_constraints(in, ids3); }) == p);
}

TEST_CASE("constraints errors") {
    auto read = [](std::istream& in) { return read_constraints(in, ids3); };
    CHECK(format_error("[{\"type\": \"requires_all\", \"source\": \"a\", \"targets\": [\"q\"]}]", read).what() !=
          std::string());
    CHECK_THROWS_AS(from_text("[{\"type\": \"implies\", \"source\": \"a\", \"targets\": [\"b\"]}]", read), FormatError);
    CHECK_THROWS_AS(from_text("[{\"type\": \"conflicts\", \"source\": \"a\", \"targets\": [\"b\"], \"w\": 1}]", read),
                    FormatError);
    const auto e = format_error("[\n  {\"type\": \"conflicts\",\n   \"source\": \"a\" \"targets\": []}\n]", read);
    CHECK(e.line() == 3);
    const auto exactly = from_text("[{\"type\": \"exactly_one\", \"source\": \"a\", \"targets\": [\"b\"]}]", read);
    CHECK(exactly.constraints().front().targets == std::vector<std::size_t>{0, 1});
}

TEST_CASE("subsets") {
    const auto s = from_text("[{\"members\": [\"a\", \"c\"], \"value\": 7.5}]",
                             [](std::istream& in) { return read_subsets(in, ids3); });
    REQUIRE(s.size() == 1);
    CHECK(s[0].members == std::vector<std::size_t>{0, 2});
    CHECK(s[0].value == 7.5);
    CHECK_THROWS_AS(from_text("[{\"members\": [\"a\"], \"value\": \"x\"}]",
                              [](std::istream& in) { return read_subsets(in, ids3); }),
                    FormatError);
}

TEST_CASE("influence round-trip") {
    std::mt19937_64 rng(3);
    const auto inf = propagate_strengths(oracle::random_vdg(rng, 3, 0.6, 0.5));
    std::ostringstream out;
    write_influence(inf, ids3, out);
    const auto back = from_text(out.str(), [](std::istream& in) { return read_influence(in, ids3); });
    CHECK(back == inf);
    CHECK_THROWS_AS(from_text("from,to,positive,negative,influence\na,b,0.5,0.1,0.9\n",
                              [](std::istream& in) { return read_influence(in, ids3); }),
                    FormatError);
}

TEST_CASE("solution JSON") {
    Solution s;
    s.status = SolveStatus::optimal;
    s.x = {1, 0, 1};
    s.objective = 12.5;
    s.theta = {0.0, 0.25, 0.5};
    s.stats.nodes = 4;
    const auto text = solution_json(s, ids3);
    CHECK(text.find("\"status\": \"OPTIMAL\"") != std::string::npos);
    CHECK(text.find("\"selected\": [\n    \"a\",\n    \"c\"\n  ]") != std::string::npos);
    CHECK(text.find("\"b\": 0.25") != std::string::npos);
    CHECK(text.find("elapsed") == std::string::npos);
    SolutionJsonOptions o;
    o.include_timing = true;
    CHECK(solution_json(s, ids3, o).find("elapsed_seconds") != std::string::npos);
}

TEST_CASE("missing files") {
    CHECK_THROWS_AS(read_file("/nonexistent/depsel/file.csv"), ArgumentError);
}

}
