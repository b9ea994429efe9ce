#pragma once

#include "lzc/annotations.hpp"
#include "lzc/ast.hpp"
#include "lzc/costmodel.hpp"
#include "lzc/linear.hpp"

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace lzc {

// ctx |- expr : type with resource bounds: `upper` resources suffice to
// reach weak head normal form, at least `lower` remain afterwards.
struct Judgment {
    Context ctx;
    ExprPtr expr;
    AnnPtr type;
    Annotation upper, lower;
};

struct DerivationNode {
    std::string rule;
    Judgment conclusion;
    std::vector<std::unique_ptr<DerivationNode>> premises;
    // half-open range of constraint rows this rule emitted
    int emit_begin = 0, emit_end = 0;
};

struct InferOptions {
    bool legacy_lower_thunks = false; // re-enable the unsound letrec relaxation
    bool prepay = true;               // test hook
    bool relax = true;                // test hook
    bool force_general_app = false;   // test hook: never use the variable-argument rule
};

struct AnalysisResult {
    Solution::Status status = Solution::Status::Infeasible;
    std::string main_name;
    AnnPtr result_type;  // symbolic annotations
    AnnPtr solved_type;  // constants substituted (status Optimal only)
    Annotation upper, lower;
    Rat upper_value, lower_value;
    std::unique_ptr<DerivationNode> derivation;
    LinearProgram lp;
    Solution solution;

    bool ok() const { return status == Solution::Status::Optimal; }
};

// Hard-coded primitive operator schema over the primitive type; the final
// arrow carries the primitive cost constant. Throws TypeError for unknown
// names.
AnnPtr lookup_prim(const std::string& name, const CostModel& cm);

// Lexicographic-by-weighting objective: W^2 on the root upper bound, W on
// every thunk/arrow cost annotation reachable in the result type, 1 on all
// remaining variables, with W = 1 + number of variables.
std::map<int, Rat> default_objective(const Judgment& root, const AnnPtr& ty,
                                     const LinearProgram& lp);

// Runs the full pipeline on a module: nest the bindings, derive the typing
// judgment and its linear program, solve, and substitute the solution.
// Throws TypeError (with trace) on ill-typed input; an unsolvable linear
// program is reported through `status`.
AnalysisResult analyze(const Module& m, const CostModel& cm, const InferOptions& opt = {});

// One judgment per line, premises indented below their rule.
void dump_derivation(const DerivationNode& n, std::ostream& out, const Solution* sol = nullptr);

std::string print_judgment(const Judgment& j, const Solution* sol = nullptr);

} // namespace lzc
