#pragma once

#include "lzc/rational.hpp"

#include <optional>
#include <string>

namespace lzc {

// The seven cost constants. "alloc" charges the binding/allocation sites
// only, which makes the derived bounds count heap allocations.
struct CostModel {
    Rat var = 0;
    Rat app = 0;
    Rat cons = 0;
    Rat let_ = 0;
    Rat letrec = 0;
    Rat match = 0;
    Rat prim = 0;
};

// name in {alloc, steps, zero}; throws std::invalid_argument otherwise
CostModel cost_preset(const std::string& name);

// "alloc" | "steps" | "zero" | "k=v,..." with keys var,app,cons,let,letrec,match,prim
std::optional<CostModel> parse_cost_model(const std::string& spec);

} // namespace lzc
