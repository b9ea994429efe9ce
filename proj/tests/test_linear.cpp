#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lzc/linear.hpp"
#include "lp_oracle.hpp"

#include <random>
#include <sstream>

using namespace lzc;
using namespace lzc::test;

namespace {

LinConstraint row(std::vector<std::pair<int, Rat>> terms, Rel rel, Rat rhs) {
    LinConstraint c;
    c.terms = std::move(terms);
    c.rel = rel;
    c.rhs = std::move(rhs);
    c.origin = "test";
    return c;
}

bool satisfies(const LinearProgram& lp, const Solution& sol) {
    for (int v = 0; v < lp.num_vars; ++v)
        if (sol.assignment[v] < 0) return false;
    for (const auto& r : lp.rows) {
        Rat lhs = 0;
        for (const auto& [v, c] : r.terms) lhs += c * sol.assignment[v];
        switch (r.rel) {
        case Rel::Le: if (!(lhs <= r.rhs)) return false; break;
        case Rel::Eq: if (!(lhs == r.rhs)) return false; break;
        case Rel::Ge: if (!(lhs >= r.rhs)) return false; break;
        }
    }
    return true;
}

} // namespace

TEST_CASE("add_constraint stores, drops and rejects") {
    LinearProgram lp;
    int v1 = lp.fresh_var("v1"), v2 = lp.fresh_var("v2");
    lp.add(row({{v1, 1}, {v2, 1}}, Rel::Le, 5));
    CHECK(lp.rows.size() == 1);
    // all terms cancel: 0 = 0 is dropped
    lp.add(row({{v1, 1}, {v1, -1}}, Rel::Eq, 0));
    CHECK(lp.rows.size() == 1);
    CHECK(!lp.inconsistent);
    // 1 <= 0 after cancellation marks the program infeasible
    lp.add(row({{v2, 2}, {v2, -2}}, Rel::Ge, 1));
    CHECK(lp.inconsistent);
    CHECK(solve(lp).status == Solution::Status::Infeasible);
}

TEST_CASE("minimize v1 subject to v1 >= 3") {
    LinearProgram lp;
    int v1 = lp.fresh_var("v1");
    lp.add(row({{v1, 1}}, Rel::Ge, 3));
    lp.objective[v1] = 1;
    Solution s = solve(lp);
    REQUIRE(s.status == Solution::Status::Optimal);
    CHECK(s.assignment[v1] == 3);
    CHECK(s.objective_value == 3);
}

TEST_CASE("q >= 2q + 1 is impossible for non-negative q") {
    LinearProgram lp;
    int v1 = lp.fresh_var("v1");
    // v1 >= 2 v1 + 1 normalizes to -v1 >= 1
    lp.add(row({{v1, -1}}, Rel::Ge, 1));
    lp.objective[v1] = 1;
    CHECK(solve(lp).status == Solution::Status::Infeasible);
}

TEST_CASE("unbounded detection") {
    LinearProgram lp;
    int v1 = lp.fresh_var("v1");
    int v2 = lp.fresh_var("v2");
    lp.add(row({{v2, 1}}, Rel::Le, 5));
    lp.objective[v1] = -1;
    CHECK(solve(lp).status == Solution::Status::Unbounded);
}

TEST_CASE("presolve handles alias chains and pins") {
    LinearProgram lp;
    int a = lp.fresh_var("a"), b = lp.fresh_var("b"), c = lp.fresh_var("c");
    lp.add(row({{a, 1}, {b, -1}}, Rel::Eq, 0));
    lp.add(row({{b, 1}, {c, -1}}, Rel::Eq, 0));
    lp.add(row({{c, 1}}, Rel::Eq, 4));
    lp.objective[a] = 1;
    Solution s = solve(lp);
    REQUIRE(s.status == Solution::Status::Optimal);
    CHECK(s.assignment[a] == 4);
    CHECK(s.assignment[b] == 4);
    CHECK(s.assignment[c] == 4);

    // conflicting pin through an alias
    lp.add(row({{a, 1}}, Rel::Eq, 5));
    CHECK(solve(lp).status == Solution::Status::Infeasible);

    // a negative pin violates implicit non-negativity
    LinearProgram lp2;
    int d = lp2.fresh_var("d");
    lp2.add(row({{d, 2}}, Rel::Eq, -3));
    CHECK(solve(lp2).status == Solution::Status::Infeasible);
}

TEST_CASE("presolve keeps general two-term equalities") {
    LinearProgram lp;
    int a = lp.fresh_var("a"), b = lp.fresh_var("b");
    lp.add(row({{a, 1}, {b, 1}}, Rel::Eq, 3));
    lp.add(row({{a, 1}}, Rel::Ge, 2));
    lp.objective[b] = -1; // maximize b within the equality
    Solution s = solve(lp);
    REQUIRE(s.status == Solution::Status::Optimal);
    CHECK(s.assignment[a] + s.assignment[b] == 3);
    CHECK(s.assignment[b] <= 1);
}

TEST_CASE("simplex agrees with the vertex-enumeration oracle") {
    std::mt19937 rng(424242);
    int optimal = 0, infeasible = 0;
    for (int i = 0; i < 200; ++i) {
        // mostly small instances plus a few at the larger end
        LinearProgram lp = i < 180   ? random_lp(rng, 5, 8)
                           : i < 192 ? random_lp(rng, 6, 10)
                                     : random_lp(rng, 8, 14);
        CAPTURE(i);
        Solution got = solve(lp);
        OracleResult want = oracle_solve(lp);
        REQUIRE(got.status == want.status);
        if (got.status == Solution::Status::Optimal) {
            optimal++;
            CHECK(got.objective_value == want.objective);
            CHECK(satisfies(lp, got));
        } else {
            infeasible++;
        }
    }
    // the generator must exercise both outcomes
    CHECK(optimal > 40);
    CHECK(infeasible > 40);
}

TEST_CASE("determinism: identical programs yield identical solutions") {
    std::mt19937 rng(77);
    for (int i = 0; i < 20; ++i) {
        LinearProgram lp = random_lp(rng, 5, 8);
        Solution s1 = solve(lp);
        Solution s2 = solve(lp);
        CHECK(s1.status == s2.status);
        if (s1.status == Solution::Status::Optimal) {
            CHECK(s1.assignment == s2.assignment);
            CHECK(s1.objective_value == s2.objective_value);
        }
    }
}

TEST_CASE("monotonicity: adding a constraint never lowers the optimum") {
    std::mt19937 rng(123);
    int checked = 0;
    while (checked < 30) {
        LinearProgram lp = random_lp(rng, 4, 6);
        Solution before = solve(lp);
        if (before.status != Solution::Status::Optimal) continue;
        LinearProgram more = lp;
        // one extra random row
        LinearProgram extra = random_lp(rng, lp.num_vars, 1);
        for (auto& r : extra.rows) more.add(r);
        if (extra.rows.empty()) continue;
        Solution after = solve(more);
        if (after.status == Solution::Status::Optimal)
            CHECK(after.objective_value >= before.objective_value);
        else
            CHECK(after.status == Solution::Status::Infeasible);
        checked++;
    }
}

TEST_CASE("CPLEX-LP dump is integral") {
    LinearProgram lp;
    int a = lp.fresh_var("a"), b = lp.fresh_var("b");
    lp.add(row({{a, Rat(1, 2)}, {b, Rat(-1, 3)}}, Rel::Ge, Rat(5, 6)));
    lp.objective[a] = Rat(3, 2);
    std::ostringstream out;
    dump_cplex(lp, out);
    std::string text = out.str();
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.find("Bounds") != std::string::npos);
    CHECK(text.find("End") != std::string::npos);
    // the fractional row 1/2 a - 1/3 b >= 5/6 scales to 3 a - 2 b >= 5
    CHECK(text.find("c0: 3 v0 - 2 v1 >= 5") != std::string::npos);
    CHECK(text.find("/") == std::string::npos);
}
