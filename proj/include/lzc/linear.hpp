#pragma once

#include "lzc/rational.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace lzc {

enum class Rel { Le, Eq, Ge };

// terms * vars  rel  rhs, with terms sorted by variable id
struct LinConstraint {
    std::vector<std::pair<int, Rat>> terms;
    Rel rel = Rel::Le;
    Rat rhs;
    std::string origin;
};

// A linear program over annotation variables. Every variable is implicitly
// non-negative; the objective is minimized.
struct LinearProgram {
    int num_vars = 0;
    std::vector<std::string> var_origin;
    std::vector<LinConstraint> rows;
    std::map<int, Rat> objective;
    bool inconsistent = false; // a constant-only contradiction was added
    std::string inconsistency_origin;

    int fresh_var(std::string origin);

    // Normalizes (merges duplicate terms, drops zero coefficients). Trivially
    // true constant rows are dropped; trivially false ones mark the program
    // infeasible immediately.
    void add(LinConstraint c);
};

struct Solution {
    enum class Status { Optimal, Infeasible, Unbounded };
    Status status = Status::Infeasible;
    std::vector<Rat> assignment; // indexed by variable id, size num_vars
    Rat objective_value;
};

// Exact two-phase simplex with Bland's pivoting rule. Deterministic for a
// fixed insertion order. Equality aliases (a = b) and single-variable pins
// are eliminated up front; the reported assignment covers all variables.
Solution solve(const LinearProgram& lp);

// CPLEX-LP text format; rows are scaled to integer coefficients.
void dump_cplex(const LinearProgram& lp, std::ostream& out);

std::string rel_str(Rel r);

} // namespace lzc
