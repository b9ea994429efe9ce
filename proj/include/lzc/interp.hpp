#pragma once

#include "lzc/annotations.hpp"
#include "lzc/ast.hpp"
#include "lzc/costmodel.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lzc {

// Execution tally: how often each charge site fired. The total under a cost
// model is the weighted sum of these counts.
struct CostCounter {
    unsigned long long var = 0, app = 0, cons = 0, let_ = 0, letrec = 0, match = 0, prim = 0;

    Rat total(const CostModel& cm) const {
        return Rat(var) * cm.var + Rat(app) * cm.app + Rat(cons) * cm.cons +
               Rat(let_) * cm.let_ + Rat(letrec) * cm.letrec + Rat(match) * cm.match +
               Rat(prim) * cm.prim;
    }
    bool operator==(const CostCounter&) const = default;
};

// How deeply a lazy value is forced: to weak head normal form, n spine
// cells, or n spine cells with each head forced as well.
struct Demand {
    enum class Kind { Whnf, SpineN, SpineElems };
    Kind kind = Kind::Whnf;
    long long n = 0;

    static Demand whnf() { return {}; }
    static Demand spine(long long n) { return {Kind::SpineN, n}; }
    static Demand elems(long long n) { return {Kind::SpineElems, n}; }

    // "whnf" | "spine:N" | "elems:N"
    static std::optional<Demand> parse(const std::string& s);
    std::string show() const;
};

struct EvalError : std::runtime_error {
    enum class Kind { Fuel, BlackHole, PatternMatch, Shape, Prim, Type };
    Kind kind;
    EvalError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

// Weak head normal form summary, enough for tests and reports.
struct WhnfInfo {
    enum class Kind { Con, Closure, TyClosure, Lit, PartialCon, PrimOp };
    Kind kind = Kind::Lit;
    std::string head; // constructor name, literal text, or operator name
};

inline constexpr long long kDefaultFuel = 1'000'000;

// Call-by-need evaluation of a closed expression (primitives excepted),
// charging the cost-model constants at the same syntactic sites the type
// rules do. Thunk results are memoized; cyclic strict dependencies raise
// BlackHole; the step budget guards against divergence.
std::pair<WhnfInfo, CostCounter> eval_whnf(const Module& m, const ExprPtr& e,
                                           const CostModel& cm,
                                           long long fuel = kDefaultFuel);

CostCounter eval_demand(const Module& m, const ExprPtr& e, const CostModel& cm, Demand d,
                        long long fuel = kDefaultFuel);

// Cumulative counters after forcing 0,1,...,n spine cells in one run
// (memoization makes the prefix costs identical to separate runs).
std::vector<CostCounter> eval_demand_trace(const Module& m, const ExprPtr& e,
                                           const CostModel& cm, long long n, bool force_heads,
                                           long long fuel = kDefaultFuel);

// Reads a demand bound off a solved annotated type: p for WHNF,
// p + n*tail for SpineN(n), p + n*(tail+head) for SpineElems(n).
// Redeemable potential is not subtracted; this is an upper bound.
Rat aggregate_bound(const AnnPtr& solved, const Rat& p, Demand d);

} // namespace lzc
