#include "lzc/annotations.hpp"

#include <algorithm>
#include <sstream>

namespace lzc {

AnnPtr mk_tyvar(std::string binder) {
    auto t = std::make_shared<AnnType>();
    t->kind = AnnType::Kind::TyVar;
    t->name = std::move(binder);
    return t;
}

AnnPtr mk_fun(AnnPtr arg, Annotation cost, AnnPtr res) {
    auto t = std::make_shared<AnnType>();
    t->kind = AnnType::Kind::Fun;
    t->arg = std::move(arg);
    t->ann = std::move(cost);
    t->res = std::move(res);
    return t;
}

AnnPtr mk_thunk(Annotation cost, AnnPtr inner) {
    auto t = std::make_shared<AnnType>();
    t->kind = AnnType::Kind::Thunk;
    t->ann = std::move(cost);
    t->inner = std::move(inner);
    return t;
}

AnnPtr mk_mu(std::string binder, std::vector<AnnCtor> ctors) {
    auto t = std::make_shared<AnnType>();
    t->kind = AnnType::Kind::Mu;
    t->name = std::move(binder);
    t->ctors = std::move(ctors);
    return t;
}

AnnPtr mk_prim() { return mk_mu("", {}); }

const AnnPtr* context_lookup(const Context& ctx, const std::string& name) {
    // newest entry wins: a case field binder may shadow an outer variable
    // that a sibling alternative still uses
    for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
        if (it->name == name) return &it->type;
    return nullptr;
}

LinExpr::LinExpr(const Annotation& a) {
    if (a.is_var())
        terms.emplace_back(a.var, Rat(1));
    else
        constant = a.value;
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    constant += o.constant;
    return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
    for (const auto& [v, c] : o.terms) terms.emplace_back(v, -c);
    constant -= o.constant;
    return *this;
}

void AnnState::emit(std::vector<std::pair<int, Rat>> terms, Rel rel, Rat rhs,
                    std::string origin) {
    LinConstraint c;
    c.terms = std::move(terms);
    c.rel = rel;
    c.rhs = std::move(rhs);
    c.origin = std::move(origin);
    lp.add(std::move(c));
}

void emit_rel(AnnState& st, const LinExpr& lhs, Rel rel, const LinExpr& rhs,
              const std::string& origin) {
    LinExpr d = lhs;
    d -= rhs;
    st.emit(std::move(d.terms), rel, -d.constant, origin);
}

AnnPtr instantiate_decl(const Module& m, const DataDecl& d, AnnState& st,
                        const std::string& origin) {
    std::vector<AnnCtor> ctors;
    ctors.reserve(d.ctors.size());
    for (const auto& c : d.ctors) {
        AnnCtor ac;
        ac.name = c.name;
        ac.potential = st.fresh(origin + ":pot:" + c.name);
        for (const auto& f : c.fields) {
            AnnPtr inner;
            switch (f.kind) {
            case FieldSpec::Kind::Prim: inner = mk_prim(); break;
            case FieldSpec::Kind::Rec: inner = mk_tyvar(d.name); break;
            case FieldSpec::Kind::Ref:
                inner = instantiate_decl(m, *m.find_decl(f.ref), st, origin);
                break;
            }
            ac.fields.push_back(mk_thunk(st.fresh(origin + ":field:" + c.name), inner));
        }
        ctors.push_back(std::move(ac));
    }
    if (ctors.empty()) return mk_prim();
    return mk_mu(d.name, std::move(ctors));
}

namespace {
Annotation freshen(const Annotation& a, AnnState& st, const std::string& origin) {
    return a.is_var() ? st.fresh(origin) : a;
}
} // namespace

AnnPtr clone_fresh(const AnnPtr& t, AnnState& st, const std::string& origin) {
    switch (t->kind) {
    case AnnType::Kind::TyVar:
        return t;
    case AnnType::Kind::Fun:
        return mk_fun(clone_fresh(t->arg, st, origin), freshen(t->ann, st, origin),
                      clone_fresh(t->res, st, origin));
    case AnnType::Kind::Thunk:
        return mk_thunk(freshen(t->ann, st, origin), clone_fresh(t->inner, st, origin));
    case AnnType::Kind::Mu: {
        std::vector<AnnCtor> ctors;
        ctors.reserve(t->ctors.size());
        for (const auto& c : t->ctors) {
            AnnCtor ac;
            ac.name = c.name;
            ac.potential = freshen(c.potential, st, origin);
            for (const auto& f : c.fields) ac.fields.push_back(clone_fresh(f, st, origin));
            ctors.push_back(std::move(ac));
        }
        return mk_mu(t->name, std::move(ctors));
    }
    }
    return t;
}

AnnPtr subst_tyvar(const AnnPtr& t, const std::string& binder, const AnnPtr& to) {
    switch (t->kind) {
    case AnnType::Kind::TyVar:
        return t->name == binder ? to : t;
    case AnnType::Kind::Fun:
        return mk_fun(subst_tyvar(t->arg, binder, to), t->ann,
                      subst_tyvar(t->res, binder, to));
    case AnnType::Kind::Thunk:
        return mk_thunk(t->ann, subst_tyvar(t->inner, binder, to));
    case AnnType::Kind::Mu: {
        if (t->name == binder) return t; // shadowed
        std::vector<AnnCtor> ctors;
        ctors.reserve(t->ctors.size());
        for (const auto& c : t->ctors) {
            AnnCtor ac;
            ac.name = c.name;
            ac.potential = c.potential;
            for (const auto& f : c.fields) ac.fields.push_back(subst_tyvar(f, binder, to));
            ctors.push_back(std::move(ac));
        }
        return mk_mu(t->name, std::move(ctors));
    }
    }
    return t;
}

namespace {

[[noreturn]] void mismatch(const char* what, const AnnPtr& a, const AnnPtr& b) {
    throw TypeError(std::string("type mismatch (") + what + "): " + print_anntype(a) +
                    " vs " + print_anntype(b));
}

void check_aligned(const AnnPtr& a, const AnnPtr& b) {
    if (a->kind != b->kind) mismatch("different shape", a, b);
    switch (a->kind) {
    case AnnType::Kind::TyVar:
        if (a->name != b->name) mismatch("recursive reference", a, b);
        break;
    case AnnType::Kind::Mu:
        if (a->name != b->name) mismatch("different datatype", a, b);
        if (a->ctors.size() != b->ctors.size()) mismatch("constructor count", a, b);
        for (size_t i = 0; i < a->ctors.size(); ++i)
            if (a->ctors[i].name != b->ctors[i].name) mismatch("constructor", a, b);
        break;
    default:
        break;
    }
}

void emit_eq(AnnState& st, const Annotation& x, const Annotation& y, const char* origin) {
    emit_rel(st, x, Rel::Eq, y, origin);
}

} // namespace

void unify(const AnnPtr& a, const AnnPtr& b, AnnState& st) {
    if (a == b) return; // physically shared subtree
    check_aligned(a, b);
    switch (a->kind) {
    case AnnType::Kind::TyVar:
        break;
    case AnnType::Kind::Fun:
        emit_eq(st, a->ann, b->ann, "unify:fun");
        unify(a->arg, b->arg, st);
        unify(a->res, b->res, st);
        break;
    case AnnType::Kind::Thunk:
        emit_eq(st, a->ann, b->ann, "unify:thunk");
        unify(a->inner, b->inner, st);
        break;
    case AnnType::Kind::Mu:
        for (size_t i = 0; i < a->ctors.size(); ++i) {
            emit_eq(st, a->ctors[i].potential, b->ctors[i].potential, "unify:pot");
            for (size_t j = 0; j < a->ctors[i].fields.size(); ++j)
                unify(a->ctors[i].fields[j], b->ctors[i].fields[j], st);
        }
        break;
    }
}

void share(const AnnPtr& t, const std::vector<AnnPtr>& parts, AnnState& st) {
    for (const auto& p : parts) check_aligned(t, p);
    switch (t->kind) {
    case AnnType::Kind::TyVar:
        break;
    case AnnType::Kind::Thunk: {
        // each copy owes at least the original debt
        for (const auto& p : parts)
            emit_rel(st, p->ann, Rel::Ge, t->ann, "share:thunk");
        std::vector<AnnPtr> inners;
        inners.reserve(parts.size());
        for (const auto& p : parts) inners.push_back(p->inner);
        share(t->inner, inners, st);
        break;
    }
    case AnnType::Kind::Fun: {
        for (const auto& p : parts)
            emit_rel(st, p->ann, Rel::Ge, t->ann, "share:fun");
        // contravariant: each part's argument is shared onto the original's
        for (const auto& p : parts) share(p->arg, {t->arg}, st);
        // argument potential is still potential: it splits among the parts,
        // so self-sharing zeroes it like every other potential
        std::vector<Annotation> t_pots;
        collect_potentials(t->arg, t_pots);
        if (!t_pots.empty()) {
            std::vector<std::vector<Annotation>> p_pots(parts.size());
            for (size_t i = 0; i < parts.size(); ++i)
                collect_potentials(parts[i]->arg, p_pots[i]);
            for (size_t k = 0; k < t_pots.size(); ++k) {
                LinExpr sum;
                for (size_t i = 0; i < parts.size(); ++i) sum += p_pots[i][k];
                emit_rel(st, t_pots[k], Rel::Ge, sum, "share:argpot");
            }
        }
        std::vector<AnnPtr> results;
        results.reserve(parts.size());
        for (const auto& p : parts) results.push_back(p->res);
        share(t->res, results, st);
        break;
    }
    case AnnType::Kind::Mu: {
        for (size_t i = 0; i < t->ctors.size(); ++i) {
            // the potential of t is split among the parts
            LinExpr sum;
            for (const auto& p : parts) sum += p->ctors[i].potential;
            emit_rel(st, t->ctors[i].potential, Rel::Ge, sum, "share:pot");
            for (size_t j = 0; j < t->ctors[i].fields.size(); ++j) {
                std::vector<AnnPtr> fields;
                fields.reserve(parts.size());
                for (const auto& p : parts) fields.push_back(p->ctors[i].fields[j]);
                share(t->ctors[i].fields[j], fields, st);
            }
        }
        break;
    }
    }
}

void subtype(const AnnPtr& t1, const AnnPtr& t2, AnnState& st) { share(t1, {t2}, st); }

void lower_rel(const AnnPtr& view, const AnnPtr& target, AnnState& st, bool legacy) {
    if (!legacy) {
        unify(view, target, st);
        return;
    }
    if (view == target) return;
    check_aligned(view, target);
    switch (view->kind) {
    case AnnType::Kind::TyVar:
        break;
    case AnnType::Kind::Fun:
        emit_eq(st, view->ann, target->ann, "lower:fun");
        lower_rel(view->arg, target->arg, st, legacy);
        lower_rel(view->res, target->res, st, legacy);
        break;
    case AnnType::Kind::Thunk:
        // recursive references may owe less in the view -- the relaxation
        // that lets the analysis treat letrec siblings as already evaluated
        if (view->inner->kind == AnnType::Kind::TyVar) {
            emit_rel(st, view->ann, Rel::Le, target->ann, "lower:recthunk");
            if (view->ann.is_var()) st.legacy_relaxed.push_back(view->ann.var);
        } else
            emit_eq(st, view->ann, target->ann, "lower:thunk");
        lower_rel(view->inner, target->inner, st, legacy);
        break;
    case AnnType::Kind::Mu:
        for (size_t i = 0; i < view->ctors.size(); ++i) {
            emit_eq(st, view->ctors[i].potential, target->ctors[i].potential, "lower:pot");
            for (size_t j = 0; j < view->ctors[i].fields.size(); ++j)
                lower_rel(view->ctors[i].fields[j], target->ctors[i].fields[j], st, legacy);
        }
        break;
    }
}

std::vector<Context> share_context(const Context& ctx, int n, AnnState& st) {
    if (n == 1) return {ctx};
    std::vector<Context> out(n);
    for (const auto& e : ctx) {
        std::vector<AnnPtr> copies;
        copies.reserve(n);
        for (int i = 0; i < n; ++i)
            copies.push_back(clone_fresh(e.type, st, "share-context:" + e.name));
        share(e.type, copies, st);
        for (int i = 0; i < n; ++i) out[i].push_back({e.name, copies[i]});
    }
    return out;
}

std::string print_annotation(const Annotation& a, const Solution* sol) {
    if (!a.is_var()) return rat_str(a.value);
    if (sol && sol->status == Solution::Status::Optimal)
        return rat_str(sol->assignment[a.var]);
    return "v" + std::to_string(a.var);
}

std::string print_anntype(const AnnPtr& t, const Solution* sol) {
    std::ostringstream out;
    switch (t->kind) {
    case AnnType::Kind::TyVar:
        out << t->name;
        break;
    case AnnType::Kind::Fun:
        out << print_anntype(t->arg, sol) << " -" << print_annotation(t->ann, sol) << "-> "
            << print_anntype(t->res, sol);
        break;
    case AnnType::Kind::Thunk:
        out << "T^" << print_annotation(t->ann, sol) << " ";
        if (t->inner->kind == AnnType::Kind::Fun)
            out << "(" << print_anntype(t->inner, sol) << ")";
        else
            out << print_anntype(t->inner, sol);
        break;
    case AnnType::Kind::Mu:
        if (t->ctors.empty()) {
            out << (t->name.empty() ? "mu X.{}" : "mu " + t->name + ".{}");
            break;
        }
        out << "mu " << t->name << ".{ ";
        for (size_t i = 0; i < t->ctors.size(); ++i) {
            if (i) out << " | ";
            const auto& c = t->ctors[i];
            out << c.name << " : (" << print_annotation(c.potential, sol) << ", [";
            for (size_t j = 0; j < c.fields.size(); ++j) {
                if (j) out << ", ";
                out << print_anntype(c.fields[j], sol);
            }
            out << "])";
        }
        out << " }";
        break;
    }
    return out.str();
}

AnnPtr substitute_solution(const AnnPtr& t, const Solution& sol) {
    auto subst = [&](const Annotation& a) {
        return a.is_var() ? Annotation::constant(sol.assignment[a.var]) : a;
    };
    switch (t->kind) {
    case AnnType::Kind::TyVar:
        return t;
    case AnnType::Kind::Fun:
        return mk_fun(substitute_solution(t->arg, sol), subst(t->ann),
                      substitute_solution(t->res, sol));
    case AnnType::Kind::Thunk:
        return mk_thunk(subst(t->ann), substitute_solution(t->inner, sol));
    case AnnType::Kind::Mu: {
        std::vector<AnnCtor> ctors;
        ctors.reserve(t->ctors.size());
        for (const auto& c : t->ctors) {
            AnnCtor ac;
            ac.name = c.name;
            ac.potential = subst(c.potential);
            for (const auto& f : c.fields) ac.fields.push_back(substitute_solution(f, sol));
            ctors.push_back(std::move(ac));
        }
        return mk_mu(t->name, std::move(ctors));
    }
    }
    return t;
}

namespace {
enum class Pick { All, Costs, Potentials };

void collect(const AnnPtr& t, std::vector<Annotation>& out, Pick pick) {
    switch (t->kind) {
    case AnnType::Kind::TyVar:
        break;
    case AnnType::Kind::Fun:
        if (pick != Pick::Potentials) out.push_back(t->ann);
        collect(t->arg, out, pick);
        collect(t->res, out, pick);
        break;
    case AnnType::Kind::Thunk:
        if (pick != Pick::Potentials) out.push_back(t->ann);
        collect(t->inner, out, pick);
        break;
    case AnnType::Kind::Mu:
        for (const auto& c : t->ctors) {
            if (pick != Pick::Costs) out.push_back(c.potential);
            for (const auto& f : c.fields) collect(f, out, pick);
        }
        break;
    }
}
} // namespace

void collect_annotations(const AnnPtr& t, std::vector<Annotation>& out) {
    collect(t, out, Pick::All);
}
void collect_cost_annotations(const AnnPtr& t, std::vector<Annotation>& out) {
    collect(t, out, Pick::Costs);
}
void collect_potentials(const AnnPtr& t, std::vector<Annotation>& out) {
    collect(t, out, Pick::Potentials);
}

} // namespace lzc
