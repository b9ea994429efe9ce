#pragma once

#include "lzc/ast.hpp"
#include "lzc/linear.hpp"
#include "lzc/rational.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace lzc {

struct TypeError : std::runtime_error {
    std::string trace; // judgment stack, filled in by the inference engine
    explicit TypeError(const std::string& msg) : std::runtime_error(msg) {}
};

// A cost annotation: either an LP variable or a non-negative constant.
struct Annotation {
    int var = -1; // >= 0 means variable id
    Rat value;    // used when var < 0

    Annotation() = default;
    static Annotation variable(int id) {
        Annotation a;
        a.var = id;
        return a;
    }
    static Annotation constant(Rat v) {
        Annotation a;
        a.value = std::move(v);
        return a;
    }
    bool is_var() const { return var >= 0; }
};

struct AnnType;
using AnnPtr = std::shared_ptr<AnnType>;

struct AnnCtor {
    std::string name;
    Annotation potential;
    std::vector<AnnPtr> fields; // always thunk types
};

// Annotated types: type variables (recursive references only), functions,
// thunks, and algebraic mu-types. The primitive type is the empty mu-type.
// The artificial arrow that stands for a type abstraction is the only
// function whose argument is not thunk-wrapped.
struct AnnType {
    enum class Kind { TyVar, Fun, Thunk, Mu };
    Kind kind;
    std::string name;           // TyVar: binder; Mu: binder ("" for the primitive type)
    AnnPtr arg, res;            // Fun
    AnnPtr inner;               // Thunk
    Annotation ann;             // Fun cost / Thunk cost
    std::vector<AnnCtor> ctors; // Mu

    bool is_prim() const { return kind == Kind::Mu && ctors.empty(); }
    bool is_artificial_arrow() const {
        return kind == Kind::Fun && arg->kind != Kind::Thunk;
    }
};

AnnPtr mk_tyvar(std::string binder);
AnnPtr mk_fun(AnnPtr arg, Annotation cost, AnnPtr res);
AnnPtr mk_thunk(Annotation cost, AnnPtr inner);
AnnPtr mk_mu(std::string binder, std::vector<AnnCtor> ctors);
AnnPtr mk_prim();

// A typing context; every entry is a thunk type. Order is insertion order.
struct ContextEntry {
    std::string name;
    AnnPtr type;
};
using Context = std::vector<ContextEntry>;

const AnnPtr* context_lookup(const Context& ctx, const std::string& name);

// Fresh-variable factory plus the constraint sink for one analysis run.
struct AnnState {
    LinearProgram lp;
    // view-side recursive thunk costs the legacy relation relaxed; the legacy
    // objective drives these to zero to reproduce the historical behaviour
    std::vector<int> legacy_relaxed;

    Annotation fresh(const std::string& origin) {
        return Annotation::variable(lp.fresh_var(origin));
    }
    void emit(std::vector<std::pair<int, Rat>> terms, Rel rel, Rat rhs, std::string origin);
};

// Small linear-combination helper for building constraints.
struct LinExpr {
    std::vector<std::pair<int, Rat>> terms;
    Rat constant;

    LinExpr() = default;
    LinExpr(const Annotation& a); // NOLINT: implicit by design
    LinExpr(Rat c) : constant(std::move(c)) {}
    LinExpr(int c) : constant(c) {}

    LinExpr& operator+=(const LinExpr& o);
    LinExpr& operator-=(const LinExpr& o);
    friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
    friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
};

// emits lhs rel rhs
void emit_rel(AnnState& st, const LinExpr& lhs, Rel rel, const LinExpr& rhs,
              const std::string& origin);

// Instantiates a datatype declaration with fresh annotation variables:
// a fresh potential per constructor and a fresh thunk cost per field.
// Referenced declarations are instantiated recursively in field position.
AnnPtr instantiate_decl(const Module& m, const DataDecl& d, AnnState& st,
                        const std::string& origin);

// Structural copy with fresh variables for all variable annotations
// (constants are kept).
AnnPtr clone_fresh(const AnnPtr& t, AnnState& st, const std::string& origin);

// Substitutes TyVar(binder) by `to` (used to unfold constructor field types).
AnnPtr subst_tyvar(const AnnPtr& t, const std::string& binder, const AnnPtr& to);

// Type equality: structural match, one equality constraint per aligned
// annotation pair. Throws TypeError on structural mismatch.
void unify(const AnnPtr& a, const AnnPtr& b, AnnState& st);

// Sharing: splits potential downward (q >= sum of parts), duplicates thunk
// debt upward (each part >= original), functions are contravariant in the
// argument and share results jointly.
void share(const AnnPtr& t, const std::vector<AnnPtr>& parts, AnnState& st);

// t1 <: t2, shorthand for share(t1, [t2]).
void subtype(const AnnPtr& t1, const AnnPtr& t2, AnnState& st);

// Relates a recursive binding's view type to the shared copy of its real
// type. By default this is plain unification; with `legacy` the thunk costs
// of recursive references inside mu-types may be lower in the view, which
// reproduces the documented unsound behaviour.
void lower_rel(const AnnPtr& view, const AnnPtr& target, AnnState& st, bool legacy);

// n contexts over the same domain; every entry is cloned fresh per context
// and shared against the original.
std::vector<Context> share_context(const Context& ctx, int n, AnnState& st);

// Pretty-printing: T^q A, A -q-> B, mu X.{ C : (q, [..]) | .. }.
// With a solution, annotations print as their solved values.
std::string print_anntype(const AnnPtr& t, const Solution* sol = nullptr);
std::string print_annotation(const Annotation& a, const Solution* sol = nullptr);

// Replaces every annotation variable by its solved value.
AnnPtr substitute_solution(const AnnPtr& t, const Solution& sol);

// All annotations appearing in a type, in a fixed traversal order.
void collect_annotations(const AnnPtr& t, std::vector<Annotation>& out);
// Only thunk and arrow cost annotations (no constructor potentials).
void collect_cost_annotations(const AnnPtr& t, std::vector<Annotation>& out);
// Only constructor potentials.
void collect_potentials(const AnnPtr& t, std::vector<Annotation>& out);

} // namespace lzc
