#include "lzc/interp.hpp"

#include <cassert>
#include <map>
#include <memory>

namespace lzc {

std::optional<Demand> Demand::parse(const std::string& s) {
    if (s == "whnf") return whnf();
    auto colon = s.find(':');
    if (colon == std::string::npos) return std::nullopt;
    std::string kind = s.substr(0, colon);
    long long n = 0;
    try {
        n = std::stoll(s.substr(colon + 1));
    } catch (...) {
        return std::nullopt;
    }
    if (n < 0) return std::nullopt;
    if (kind == "spine") return spine(n);
    if (kind == "elems") return elems(n);
    return std::nullopt;
}

std::string Demand::show() const {
    switch (kind) {
    case Kind::Whnf: return "whnf";
    case Kind::SpineN: return "spine:" + std::to_string(n);
    case Kind::SpineElems: return "elems:" + std::to_string(n);
    }
    return "?";
}

namespace {

struct EnvNode;
using EnvPtr = std::shared_ptr<const EnvNode>;

struct EnvNode {
    EnvPtr parent;
    std::string name;
    int addr;
};

EnvPtr extend(EnvPtr env, std::string name, int addr) {
    auto n = std::make_shared<EnvNode>();
    n->parent = std::move(env);
    n->name = std::move(name);
    n->addr = addr;
    return n;
}

int lookup(const EnvPtr& env, const std::string& name) {
    for (const EnvNode* n = env.get(); n; n = n->parent.get())
        if (n->name == name) return n->addr;
    return -1;
}

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

struct Value {
    WhnfInfo::Kind kind = WhnfInfo::Kind::Lit;
    std::string ctor;        // Con/PartialCon constructor, PrimOp operator
    std::vector<int> fields; // Con fields / collected arguments
    EnvPtr env;              // Closure, TyClosure
    std::string binder;      // Closure
    ExprPtr body;            // Closure, TyClosure
    Literal lit;             // Lit
};

struct HeapCell {
    enum class Kind { Thunk, Ind, Whnf, Blackhole };
    Kind kind = Kind::Thunk;
    EnvPtr env;
    ExprPtr expr;
    int target = -1; // Ind
    ValuePtr value;  // Whnf
};

struct Machine {
    const Module& m;
    const CostModel& cm;
    long long fuel;
    std::vector<HeapCell> heap;
    CostCounter counter;

    Machine(const Module& mod, const CostModel& model, long long f)
        : m(mod), cm(model), fuel(f) {}

    void step() {
        if (--fuel < 0) throw EvalError(EvalError::Kind::Fuel, "step budget exhausted");
    }

    int alloc_thunk(EnvPtr env, ExprPtr e) {
        heap.push_back({HeapCell::Kind::Thunk, std::move(env), std::move(e), -1, nullptr});
        return static_cast<int>(heap.size()) - 1;
    }

    int alloc_whnf(ValuePtr v) {
        heap.push_back({HeapCell::Kind::Whnf, nullptr, nullptr, -1, std::move(v)});
        return static_cast<int>(heap.size()) - 1;
    }

    ValuePtr force(int addr) {
        HeapCell& cell = heap[addr];
        switch (cell.kind) {
        case HeapCell::Kind::Whnf:
            return cell.value;
        case HeapCell::Kind::Ind:
            return force(cell.target);
        case HeapCell::Kind::Blackhole:
            throw EvalError(EvalError::Kind::BlackHole, "cyclic strict dependency");
        case HeapCell::Kind::Thunk: {
            EnvPtr env = cell.env;
            ExprPtr body = cell.expr;
            cell.kind = HeapCell::Kind::Blackhole;
            cell.env = nullptr;
            cell.expr = nullptr;
            // variable bodies become indirections so the target cell is shared
            if (body->kind == Expr::Kind::Var) {
                counter.var++;
                step();
                int target = lookup(env, body->name);
                if (target < 0) {
                    ValuePtr v = prim_value(body->name);
                    heap[addr].kind = HeapCell::Kind::Whnf;
                    heap[addr].value = v;
                    return v;
                }
                // force first: the cell stays blackholed so cycles are caught
                ValuePtr v = force(target);
                heap[addr].kind = HeapCell::Kind::Ind;
                heap[addr].target = target;
                return v;
            }
            ValuePtr v = eval(env, body);
            heap[addr].kind = HeapCell::Kind::Whnf;
            heap[addr].value = v;
            return v;
        }
        }
        throw EvalError(EvalError::Kind::Type, "corrupt heap cell");
    }

    ValuePtr prim_value(const std::string& name) {
        if (!is_primitive(name))
            throw EvalError(EvalError::Kind::Type, "unbound identifier " + name);
        auto v = std::make_shared<Value>();
        v->kind = WhnfInfo::Kind::PrimOp;
        v->ctor = name;
        return v;
    }

    ValuePtr eval(const EnvPtr& env, const ExprPtr& e) {
        step();
        switch (e->kind) {
        case Expr::Kind::Var: {
            counter.var++;
            int addr = lookup(env, e->name);
            if (addr < 0) return prim_value(e->name);
            return force(addr);
        }
        case Expr::Kind::ConRef: {
            counter.cons++;
            int idx = -1;
            const DataDecl* d = m.find_ctor(e->name, &idx);
            if (!d) throw EvalError(EvalError::Kind::Type, "unknown constructor " + e->name);
            auto v = std::make_shared<Value>();
            v->ctor = e->name;
            v->kind = d->ctors[idx].fields.empty() ? WhnfInfo::Kind::Con
                                                   : WhnfInfo::Kind::PartialCon;
            return v;
        }
        case Expr::Kind::Lit: {
            auto v = std::make_shared<Value>();
            v->kind = WhnfInfo::Kind::Lit;
            v->lit = e->lit;
            return v;
        }
        case Expr::Kind::TypeTok:
            throw EvalError(EvalError::Kind::Type, "type token evaluated");
        case Expr::Kind::Lam: {
            auto v = std::make_shared<Value>();
            v->kind = WhnfInfo::Kind::Closure;
            v->env = env;
            v->binder = e->name;
            v->body = e->a;
            return v;
        }
        case Expr::Kind::TyLam: {
            auto v = std::make_shared<Value>();
            v->kind = WhnfInfo::Kind::TyClosure;
            v->env = env;
            v->body = e->a;
            return v;
        }
        case Expr::Kind::App: {
            if (e->b->kind == Expr::Kind::TypeTok) {
                ValuePtr f = eval(env, e->a);
                if (f->kind != WhnfInfo::Kind::TyClosure)
                    throw EvalError(EvalError::Kind::Type,
                                    "type application of a non type-abstraction");
                return eval(f->env, f->body);
            }
            counter.app++;
            ValuePtr f = eval(env, e->a);
            int arg;
            if (e->b->kind == Expr::Kind::Var) {
                arg = lookup(env, e->b->name);
                if (arg < 0) arg = alloc_whnf(prim_value(e->b->name));
            } else {
                arg = alloc_thunk(env, e->b);
            }
            return apply(f, arg);
        }
        case Expr::Kind::Let: {
            counter.let_++;
            int addr = alloc_thunk(env, e->a);
            return eval(extend(env, e->name, addr), e->b);
        }
        case Expr::Kind::LetRec: {
            counter.letrec += e->binds.size();
            EnvPtr inner = env;
            std::vector<int> addrs;
            addrs.reserve(e->binds.size());
            for (const auto& [n, _] : e->binds) {
                int addr = alloc_whnf(nullptr); // placeholder, patched below
                addrs.push_back(addr);
                inner = extend(inner, n, addr);
            }
            for (size_t i = 0; i < e->binds.size(); ++i) {
                heap[addrs[i]].kind = HeapCell::Kind::Thunk;
                heap[addrs[i]].env = inner;
                heap[addrs[i]].expr = e->binds[i].second;
                heap[addrs[i]].value = nullptr;
            }
            return eval(inner, e->a);
        }
        case Expr::Kind::CaseAlg: {
            counter.match++;
            ValuePtr scrut = eval(env, e->a);
            if (scrut->kind != WhnfInfo::Kind::Con)
                throw EvalError(EvalError::Kind::Type, "case on a non-constructor value");
            EnvPtr benv = extend(env, e->name, alloc_whnf(scrut));
            for (const auto& alt : e->alts_con) {
                if (alt.ctor != scrut->ctor) continue;
                EnvPtr aenv = benv;
                for (size_t j = 0; j < alt.binders.size(); ++j)
                    aenv = extend(aenv, alt.binders[j], scrut->fields[j]);
                return eval(aenv, alt.body);
            }
            if (e->def) return eval(benv, e->def);
            throw EvalError(EvalError::Kind::PatternMatch,
                            "no alternative for constructor " + scrut->ctor);
        }
        case Expr::Kind::CaseLit: {
            counter.match++;
            ValuePtr scrut = eval(env, e->a);
            EnvPtr benv = extend(env, e->name, alloc_whnf(scrut));
            if (!e->alts_lit.empty()) {
                if (scrut->kind != WhnfInfo::Kind::Lit)
                    throw EvalError(EvalError::Kind::Type, "literal case on a non-literal");
                for (const auto& alt : e->alts_lit)
                    if (alt.lit.same(scrut->lit)) return eval(benv, alt.body);
            }
            if (e->def) return eval(benv, e->def);
            throw EvalError(EvalError::Kind::PatternMatch,
                            "no alternative for literal " + scrut->lit.show());
        }
        case Expr::Kind::TypeLet:
            return eval(env, e->a);
        }
        throw EvalError(EvalError::Kind::Type, "unsupported expression");
    }

    ValuePtr apply(const ValuePtr& f, int arg) {
        switch (f->kind) {
        case WhnfInfo::Kind::Closure:
            return eval(extend(f->env, f->binder, arg), f->body);
        case WhnfInfo::Kind::PartialCon: {
            int idx = -1;
            const DataDecl* d = m.find_ctor(f->ctor, &idx);
            auto v = std::make_shared<Value>(*f);
            v->fields.push_back(arg);
            if (v->fields.size() == d->ctors[idx].fields.size())
                v->kind = WhnfInfo::Kind::Con;
            return v;
        }
        case WhnfInfo::Kind::PrimOp: {
            auto v = std::make_shared<Value>(*f);
            v->fields.push_back(arg);
            if (v->fields.size() < 2) return v;
            counter.prim++;
            ValuePtr a = force(v->fields[0]);
            ValuePtr b = force(v->fields[1]);
            if (a->kind != WhnfInfo::Kind::Lit || b->kind != WhnfInfo::Kind::Lit ||
                a->lit.kind != Literal::Kind::Int || b->lit.kind != Literal::Kind::Int)
                throw EvalError(EvalError::Kind::Prim,
                                v->ctor + " applied to non-integer operands");
            std::int64_t x = a->lit.int_value, y = b->lit.int_value, r = 0;
            if (v->ctor == "+#") r = x + y;
            else if (v->ctor == "-#") r = x - y;
            else if (v->ctor == "*#") r = x * y;
            else if (v->ctor == "<#") r = x < y ? 1 : 0;
            else if (v->ctor == "==#") r = x == y ? 1 : 0;
            auto res = std::make_shared<Value>();
            res->kind = WhnfInfo::Kind::Lit;
            res->lit.kind = Literal::Kind::Int;
            res->lit.int_value = r;
            res->lit.text = std::to_string(r);
            return res;
        }
        default:
            throw EvalError(EvalError::Kind::Type, "application of a non-function value");
        }
    }
};

WhnfInfo info_of(const ValuePtr& v) {
    WhnfInfo info;
    info.kind = v->kind;
    switch (v->kind) {
    case WhnfInfo::Kind::Con:
    case WhnfInfo::Kind::PartialCon:
    case WhnfInfo::Kind::PrimOp: info.head = v->ctor; break;
    case WhnfInfo::Kind::Lit: info.head = v->lit.show(); break;
    case WhnfInfo::Kind::Closure: info.head = "\\" + v->binder; break;
    case WhnfInfo::Kind::TyClosure: info.head = "/\\"; break;
    }
    return info;
}

// the only list shape demands know how to walk: one nullary constructor and
// one binary constructor whose second field is the recursive reference
bool listlike(const DataDecl& d, std::string* nil, std::string* cons) {
    if (d.ctors.size() != 2) return false;
    for (size_t i = 0; i < 2; ++i) {
        const auto& a = d.ctors[i];
        const auto& b = d.ctors[1 - i];
        if (a.fields.empty() && b.fields.size() == 2 &&
            b.fields[1].kind == FieldSpec::Kind::Rec) {
            if (nil) *nil = a.name;
            if (cons) *cons = b.name;
            return true;
        }
    }
    return false;
}

// forces through type-closure wrappers so spine demands reach the list
ValuePtr unwrap_tyclosures(Machine& mach, ValuePtr v) {
    while (v->kind == WhnfInfo::Kind::TyClosure) v = mach.eval(v->env, v->body);
    return v;
}

std::vector<CostCounter> demand_trace(Machine& mach, const ExprPtr& e, long long n,
                                      bool force_heads) {
    std::vector<CostCounter> out;
    ValuePtr v = mach.eval(nullptr, e);
    out.push_back(mach.counter);
    if (n == 0) return out;
    v = unwrap_tyclosures(mach, v);
    for (long long i = 0; i < n; ++i) {
        if (v->kind != WhnfInfo::Kind::Con)
            throw EvalError(EvalError::Kind::Shape, "spine demand on a non-constructor value");
        std::string nil, cons;
        const DataDecl* d = mach.m.find_ctor(v->ctor);
        if (!d || !listlike(*d, &nil, &cons))
            throw EvalError(EvalError::Kind::Shape,
                            "spine demand on non list-like datatype " + (d ? d->name : "?"));
        if (v->ctor == nil) {
            out.push_back(mach.counter); // list ended early; demand is satisfied
            continue;
        }
        if (force_heads) mach.force(v->fields[0]);
        v = mach.force(v->fields[1]);
        out.push_back(mach.counter);
    }
    return out;
}

} // namespace

std::pair<WhnfInfo, CostCounter> eval_whnf(const Module& m, const ExprPtr& e,
                                           const CostModel& cm, long long fuel) {
    Machine mach(m, cm, fuel);
    ValuePtr v = mach.eval(nullptr, e);
    return {info_of(v), mach.counter};
}

CostCounter eval_demand(const Module& m, const ExprPtr& e, const CostModel& cm, Demand d,
                        long long fuel) {
    Machine mach(m, cm, fuel);
    auto trace = demand_trace(mach, e, d.kind == Demand::Kind::Whnf ? 0 : d.n,
                              d.kind == Demand::Kind::SpineElems);
    return trace.back();
}

std::vector<CostCounter> eval_demand_trace(const Module& m, const ExprPtr& e,
                                           const CostModel& cm, long long n, bool force_heads,
                                           long long fuel) {
    Machine mach(m, cm, fuel);
    return demand_trace(mach, e, n, force_heads);
}

Rat aggregate_bound(const AnnPtr& solved, const Rat& p, Demand d) {
    if (d.kind == Demand::Kind::Whnf) return p;
    AnnPtr t = solved;
    while (t->kind == AnnType::Kind::Fun && t->is_artificial_arrow()) t = t->res;
    if (t->kind != AnnType::Kind::Mu || t->ctors.size() != 2)
        throw EvalError(EvalError::Kind::Shape,
                        "demand bound requires a list-like type: " + print_anntype(t));
    const AnnCtor* cons = nullptr;
    bool has_nil = false;
    for (const auto& c : t->ctors) {
        if (c.fields.empty())
            has_nil = true;
        else if (c.fields.size() == 2 && c.fields[1]->inner->kind == AnnType::Kind::TyVar)
            cons = &c;
    }
    if (!cons || !has_nil)
        throw EvalError(EvalError::Kind::Shape,
                        "demand bound requires a list-like type: " + print_anntype(t));
    const Annotation& head = cons->fields[0]->ann;
    const Annotation& tail = cons->fields[1]->ann;
    if (head.is_var() || tail.is_var())
        throw EvalError(EvalError::Kind::Shape, "demand bound requires a solved type");
    Rat bound = p + Rat(d.n) * tail.value;
    if (d.kind == Demand::Kind::SpineElems) bound += Rat(d.n) * head.value;
    return bound;
}

} // namespace lzc
