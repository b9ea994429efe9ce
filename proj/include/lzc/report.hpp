#pragma once

#include "lzc/costmodel.hpp"
#include "lzc/infer.hpp"
#include "lzc/interp.hpp"
#include "lzc/rational.hpp"

#include <string>
#include <vector>

namespace lzc {

struct CheckRow {
    std::string demand;
    Rat bound;
    Rat measured;
    bool ok = false;
};

// One CLI invocation's result, renderable as text or versioned JSON.
struct Report {
    std::string mode;   // analyze | measure | check
    std::string file;
    std::string main;
    std::string status; // ok | type-error | infeasible | unsound | eval-error | shape-error
    // analyze/check
    bool has_typing = false;
    std::string typing; // rendered solved type
    Rat upper, lower;
    // measure
    bool has_counts = false;
    CostCounter counts;
    Rat counts_total;
    // check
    std::vector<CheckRow> table;
    // failures
    std::string failure_kind;
    std::string failure_message;
    std::string failure_trace;

    std::string to_text() const;
    std::string to_json() const; // schema 1, rationals as {num, den} strings
};

} // namespace lzc
