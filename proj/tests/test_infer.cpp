#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lzc/infer.hpp"
#include "lzc/interp.hpp"
#include "lzc/parser.hpp"
#include "test_util.hpp"

#include <sstream>

using namespace lzc;
using namespace lzc::test;

namespace {

AnalysisResult run(const std::string& src, const std::string& preset = "alloc",
                   InferOptions opt = {}) {
    return analyze(parse_module(src), cost_preset(preset), opt);
}

const DerivationNode* find_rule(const DerivationNode& n, const std::string& rule) {
    if (n.rule == rule) return &n;
    for (const auto& p : n.premises)
        if (const DerivationNode* r = find_rule(*p, rule)) return r;
    return nullptr;
}

} // namespace

TEST_CASE("literals cost nothing and have the empty algebraic type") {
    auto res = run("main r = 1;", "steps");
    REQUIRE(res.ok());
    CHECK(res.solved_type->is_prim());
    // one let for the binding, one variable lookup
    CHECK(res.upper_value == 2);
    CHECK(res.lower_value == 0);
    const DerivationNode* lit = find_rule(*res.derivation, "GC-Lit");
    REQUIRE(lit);
    CHECK(res.solution.assignment[lit->conclusion.upper.var] == 0);
}

TEST_CASE("variable access pays the thunk debt plus the variable constant") {
    auto res = run("main r = let x = 1 in x;", "steps");
    REQUIRE(res.ok());
    // two lets and two variable lookups wrap the literal, whose thunks are free
    CHECK(res.upper_value == 4);
    const DerivationNode* var = find_rule(*res.derivation, "GC-Var");
    REQUIRE(var);
    CHECK(var->conclusion.expr->name == "x");
}

TEST_CASE("primitive operator schemas") {
    CostModel steps = cost_preset("steps");
    AnnPtr plus = lookup_prim("+#", steps);
    REQUIRE(plus->kind == AnnType::Kind::Fun);
    CHECK(!plus->is_artificial_arrow());
    CHECK(plus->arg->kind == AnnType::Kind::Thunk);
    CHECK(!plus->arg->ann.is_var());
    CHECK(plus->arg->ann.value == 0);
    CHECK(plus->ann.value == 0);
    REQUIRE(plus->res->kind == AnnType::Kind::Fun);
    CHECK(plus->res->ann.value == 1); // the final arrow carries the charge
    CHECK(plus->res->res->is_prim());
    CHECK_THROWS_AS(lookup_prim("nope", steps), TypeError);
    CHECK(lookup_prim("*#", cost_preset("alloc"))->res->ann.value == 0);
}

TEST_CASE("cost presets") {
    CostModel alloc = cost_preset("alloc");
    CHECK(alloc.var == 0);
    CHECK(alloc.app == 0);
    CHECK(alloc.cons == 1);
    CHECK(alloc.let_ == 1);
    CHECK(alloc.letrec == 1);
    CHECK(alloc.match == 0);
    CHECK(alloc.prim == 0);
    CHECK_THROWS_AS(cost_preset("bogus"), std::invalid_argument);

    // zero: every bound solves to 0
    for (const char* f : {"repeat.lzc", "append.lzc", "twice.lzc"}) {
        auto res = analyze(parse_corpus(f), cost_preset("zero"));
        REQUIRE(res.ok());
        CHECK(res.upper_value == 0);
    }
    // steps dominates alloc pointwise, so bounds are no smaller
    for (const char* f : {"repeat.lzc", "append.lzc", "const_list.lzc"}) {
        auto a = analyze(parse_corpus(f), cost_preset("alloc"));
        auto s = analyze(parse_corpus(f), cost_preset("steps"));
        REQUIRE(a.ok());
        REQUIRE(s.ok());
        CHECK(s.upper_value >= a.upper_value);
    }
}

TEST_CASE("parse_cost_model accepts explicit constants") {
    auto cm = parse_cost_model("let=2,cons=1/2,prim=3");
    REQUIRE(cm);
    CHECK(cm->let_ == 2);
    CHECK(cm->cons == Rat(1, 2));
    CHECK(cm->prim == 3);
    CHECK(cm->var == 0);
    CHECK(!parse_cost_model("bogus=1"));
    CHECK(!parse_cost_model("let=-1"));
    CHECK(!parse_cost_model("steps=x"));
}

TEST_CASE("repeat solves constant, unfolding repeat solves linear") {
    auto cyc = analyze(parse_corpus("repeat.lzc"), cost_preset("alloc"));
    REQUIRE(cyc.ok());
    Rat head, tail;
    REQUIRE(list_costs(cyc.solved_type, &head, &tail));
    CHECK(tail == 0);

    auto unf = analyze(parse_corpus("repeat_unfold.lzc"), cost_preset("alloc"));
    REQUIRE(unf.ok());
    REQUIRE(list_costs(unf.solved_type, &head, &tail));
    CHECK(tail >= 1);
}

TEST_CASE("the map-over-repeat pipeline yields a finite linear typing") {
    auto res = analyze(parse_corpus("map_repeat.lzc"), cost_preset("alloc"));
    REQUIRE(res.ok());
    Rat head, tail;
    REQUIRE(list_costs(res.solved_type, &head, &tail));
    CHECK(res.upper_value >= 0);
    CHECK(tail > 0);
    CHECK(head >= 0);
}

TEST_CASE("fibs is infeasible unless the legacy relaxation is enabled") {
    auto def = analyze(parse_corpus("fibs.lzc"), cost_preset("alloc"));
    CHECK(def.status == Solution::Status::Infeasible);
    CHECK(!def.solved_type);

    InferOptions legacy;
    legacy.legacy_lower_thunks = true;
    auto rel = analyze(parse_corpus("fibs.lzc"), cost_preset("alloc"), legacy);
    REQUIRE(rel.ok());
    Rat head, tail;
    REQUIRE(list_costs(rel.solved_type, &head, &tail));
    CHECK(tail == 0); // the bogus constant bound
}

TEST_CASE("prepay pays a shared thunk once") {
    std::string src = read_file(std::string(CORPUS_DIR) + "/prepay3.lzc");
    auto on = run(src, "alloc");
    InferOptions no_prepay;
    no_prepay.prepay = false;
    auto off = run(src, "alloc", no_prepay);
    REQUIRE(on.ok());
    REQUIRE(off.ok());
    // three forced uses re-pay the shared cell without prepay
    CHECK(on.upper_value == 3);
    CHECK(off.upper_value == 5);
}

TEST_CASE("relax is needed when branch costs exceed the scrutinee residue") {
    // the scrutinee variable is captured by a lambda, so its potential is
    // forced to zero and cannot pay for the allocating branch
    std::string src = "data BoolD = TrueD | FalseD;\n"
                      "data IntList = Nil | Cons(Prim, IntList);\n"
                      "main r = let b = TrueD in let one = 1 in\n"
                      "  let f = \\u -> case s = b of { TrueD -> Cons one Nil | FalseD -> Nil }\n"
                      "  in f 0;";
    auto on = run(src, "alloc");
    REQUIRE(on.ok());
    InferOptions no_relax;
    no_relax.relax = false;
    auto off = run(src, "alloc", no_relax);
    CHECK(off.status == Solution::Status::Infeasible);
}

TEST_CASE("variable arguments prefer the dedicated application rule") {
    std::string src = "main v = let one = 1 in let f = \\x -> x in f one;";
    auto var_rule = run(src, "steps");
    InferOptions forced;
    forced.force_general_app = true;
    auto gen_rule = run(src, "steps", forced);
    REQUIRE(var_rule.ok());
    REQUIRE(gen_rule.ok());
    CHECK(var_rule.upper_value <= gen_rule.upper_value);
    CHECK(find_rule(*var_rule.derivation, "GC-AppVar"));
    CHECK(find_rule(*gen_rule.derivation, "GC-App"));
    CHECK(!find_rule(*gen_rule.derivation, "GC-AppVar"));
}

TEST_CASE("type abstraction rules are transparent wrappers") {
    auto res = analyze(parse_corpus("tyabs.lzc"), cost_preset("alloc"));
    REQUIRE(res.ok());
    CHECK(find_rule(*res.derivation, "GC-TyAbs"));
    CHECK(find_rule(*res.derivation, "GC-TyApp"));
    CHECK(find_rule(*res.derivation, "GC-TyLet"));
    Rat head, tail;
    CHECK(list_costs(res.solved_type, &head, &tail));
}

TEST_CASE("derivations and programs are deterministic") {
    for (const char* f : {"map_repeat.lzc", "take_repeat.lzc", "fibs.lzc"}) {
        auto r1 = analyze(parse_corpus(f), cost_preset("alloc"));
        auto r2 = analyze(parse_corpus(f), cost_preset("alloc"));
        CHECK(r1.status == r2.status);
        CHECK(r1.lp.rows.size() == r2.lp.rows.size());
        CHECK(r1.lp.num_vars == r2.lp.num_vars);
        std::ostringstream d1, d2;
        dump_derivation(*r1.derivation, d1);
        dump_derivation(*r2.derivation, d2);
        CHECK(d1.str() == d2.str());
        if (r1.ok()) CHECK(r1.solution.assignment == r2.solution.assignment);
    }
}

TEST_CASE("relax nodes appear in the derivation tree") {
    auto res = analyze(parse_corpus("maybe.lzc"), cost_preset("alloc"));
    REQUIRE(res.ok());
    const DerivationNode* relax = find_rule(*res.derivation, "Relax");
    REQUIRE(relax);
    REQUIRE(relax->premises.size() == 1);
    std::ostringstream out;
    dump_derivation(*res.derivation, out, &res.solution);
    CHECK(out.str().find("Relax:") != std::string::npos);
    CHECK(out.str().find("GC-CaseAlg:") != std::string::npos);
}

TEST_CASE("objective weighting for a single-variable program") {
    LinearProgram lp;
    int p = lp.fresh_var("p");
    Judgment root;
    root.upper = Annotation::variable(p);
    root.lower = Annotation::constant(0);
    root.type = mk_prim();
    auto obj = default_objective(root, root.type, lp);
    REQUIRE(obj.size() == 1);
    CHECK(obj.at(p) == 4); // W = 1 + 1 = 2, squared on the root bound
}

TEST_CASE("prepaying a single-use variable changes nothing") {
    std::string src = "data L = N | C(Prim, L);\n"
                      "main v = let xs = C 1 N in case a = xs of { default -> 0 };";
    auto on = run(src, "steps");
    InferOptions off_opt;
    off_opt.prepay = false;
    auto off = run(src, "steps", off_opt);
    REQUIRE(on.ok());
    REQUIRE(off.ok());
    CHECK(on.upper_value == off.upper_value);
}

TEST_CASE("the default objective weights the root bound above type annotations") {
    auto res = analyze(parse_corpus("repeat.lzc"), cost_preset("alloc"));
    REQUIRE(res.ok());
    Rat w = Rat(1 + res.lp.num_vars);
    REQUIRE(res.upper.is_var());
    CHECK(res.lp.objective.at(res.upper.var) == w * w);
    std::vector<Annotation> costs;
    collect_cost_annotations(res.result_type, costs);
    REQUIRE(!costs.empty());
    for (const auto& a : costs)
        if (a.is_var()) CHECK(res.lp.objective.at(a.var) == w);
    // everything else sits at weight 1
    CHECK(res.lp.objective.at(res.lower.var) == 1);
}

TEST_CASE("field binders shadow outer variables used by sibling alternatives") {
    std::string src = "data IntList = Nil | Cons(Prim, IntList);\n"
                      "main r = let x = Cons 1 Nil in\n"
                      "  case s = x of { Nil -> x | Cons(x, t) -> Cons x t };";
    auto res = run(src, "alloc");
    REQUIRE(res.ok());
    Rat head, tail;
    CHECK(list_costs(res.solved_type, &head, &tail));
}

TEST_CASE("ill-typed programs report a type error") {
    CHECK_THROWS_AS(run("main r = let f = \\x -> x x in 1;"), TypeError);
    CHECK_THROWS_AS(run("data B = T | F;\nmain r = case s = 5 of { T -> 1 };"), TypeError);
    CHECK_THROWS_AS(run("main r = (/\\a -> \\x -> x) 5;"), TypeError);
    CHECK_THROWS_AS(run("main r = 1 2;"), TypeError);
}

TEST_CASE("lambda-captured potentials solve to zero") {
    for (const char* f : {"map_repeat.lzc", "iterate_inc.lzc", "repeat_unfold.lzc"}) {
        auto res = analyze(parse_corpus(f), cost_preset("alloc"));
        REQUIRE(res.ok());
        int checked = 0;
        auto walk = [&](auto&& self, const DerivationNode& n) -> void {
            if (n.rule == "GC-Abs") {
                for (const auto& entry : n.conclusion.ctx) {
                    std::vector<Annotation> pots;
                    collect_potentials(entry.type, pots);
                    for (const auto& p : pots) {
                        Rat v = p.is_var() ? res.solution.assignment[p.var] : p.value;
                        CHECK(v == 0);
                        checked++;
                    }
                }
            }
            for (const auto& pr : n.premises) self(self, *pr);
        };
        walk(walk, *res.derivation);
        CAPTURE(f);
        CHECK(checked > 0);
    }
}
