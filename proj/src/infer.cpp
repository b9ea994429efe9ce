#include "lzc/infer.hpp"

#include "lzc/shape.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>
#include <sstream>

namespace lzc {

AnnPtr lookup_prim(const std::string& name, const CostModel& cm) {
    if (!is_primitive(name)) throw TypeError("unbound primitive " + name);
    // binary operator over the primitive type; only the last arrow charges
    AnnPtr prim = mk_prim();
    AnnPtr last = mk_fun(mk_thunk(Annotation::constant(0), mk_prim()),
                         Annotation::constant(cm.prim), prim);
    return mk_fun(mk_thunk(Annotation::constant(0), mk_prim()), Annotation::constant(0), last);
}

namespace {

struct Engine {
    const Module& m;
    const CostModel& cm;
    const InferOptions& opts;
    ShapeTable shapes;
    AnnState st;
    std::vector<std::string> stack;

    Engine(const Module& mod, const CostModel& model, const InferOptions& o)
        : m(mod), cm(model), opts(o) {}

    int rows() const { return static_cast<int>(st.lp.rows.size()); }

    // ---- context plumbing ------------------------------------------------

    static Context restrict_ctx(const Context& ctx, const std::set<std::string>& names) {
        Context out;
        for (const auto& e : ctx)
            if (names.count(e.name)) out.push_back(e);
        return out;
    }

    // Splits a context between premises: entries used by one premise pass
    // through, entries used by several are shared into fresh copies.
    std::vector<Context> split_by_use(const Context& ctx,
                                      const std::vector<std::set<std::string>>& uses) {
        std::vector<Context> parts(uses.size());
        for (const auto& e : ctx) {
            std::vector<size_t> where;
            for (size_t i = 0; i < uses.size(); ++i)
                if (uses[i].count(e.name)) where.push_back(i);
            if (where.empty()) continue; // implicit weakening
            if (where.size() == 1) {
                parts[where[0]].push_back(e);
                continue;
            }
            std::vector<AnnPtr> copies;
            copies.reserve(where.size());
            for (size_t k = 0; k < where.size(); ++k)
                copies.push_back(clone_fresh(e.type, st, "split:" + e.name));
            share(e.type, copies, st);
            for (size_t k = 0; k < where.size(); ++k)
                parts[where[k]].push_back({e.name, copies[k]});
        }
        return parts;
    }

    // Inserts a context entry, prepaying part of its thunk debt: the cost is
    // split q = pre + post, the entry keeps post and pre lands on the
    // inserting judgment's upper bound.
    void insert_entry(Context& ctx, const std::string& name, const Annotation& cost,
                      const AnnPtr& inner, LinExpr& upper_extra, const char* rule) {
        if (!opts.prepay || !cost.is_var()) {
            ctx.push_back({name, mk_thunk(cost, inner)});
            return;
        }
        Annotation pre = st.fresh(std::string(rule) + ":prepay:" + name);
        Annotation post = st.fresh(std::string(rule) + ":prepaid:" + name);
        emit_rel(st, cost, Rel::Eq, LinExpr(pre) + LinExpr(post),
                 std::string(rule) + ":prepay:" + name);
        ctx.push_back({name, mk_thunk(post, inner)});
        upper_extra += pre;
    }

    // ---- judgments ---------------------------------------------------------

    std::unique_ptr<DerivationNode> conclude(const char* rule, Context snapshot,
                                             const ExprPtr& e, AnnPtr ty,
                                             const std::vector<LinExpr>& uppers,
                                             const std::vector<LinExpr>& lowers,
                                             std::vector<std::unique_ptr<DerivationNode>> premises,
                                             int emit_begin) {
        Annotation p = st.fresh(std::string(rule) + ":p");
        Annotation q = st.fresh(std::string(rule) + ":p'");
        for (const auto& u : uppers)
            emit_rel(st, p, Rel::Ge, u, std::string(rule) + ":upper");
        for (const auto& l : lowers)
            emit_rel(st, q, Rel::Le, l, std::string(rule) + ":lower");
        auto node = std::make_unique<DerivationNode>();
        node->rule = rule;
        node->conclusion = Judgment{std::move(snapshot), e, std::move(ty), p, q};
        node->premises = std::move(premises);
        node->emit_begin = emit_begin;
        node->emit_end = rows();
        return node;
    }

    std::unique_ptr<DerivationNode> infer(const ExprPtr& e, const Context& incoming) {
        std::ostringstream frame;
        frame << expr_head(*e);
        if (e->pos.line) frame << " (" << e->pos.line << ":" << e->pos.col << ")";
        stack.push_back(frame.str());
        try {
            auto node = infer_impl(e, incoming);
            stack.pop_back();
            return node;
        } catch (TypeError& te) {
            if (te.trace.empty()) {
                std::ostringstream tr;
                for (size_t i = 0; i < stack.size(); ++i)
                    tr << std::string(2 * i, ' ') << "in " << stack[i] << "\n";
                te.trace = tr.str();
            }
            stack.pop_back();
            throw;
        }
    }

    std::unique_ptr<DerivationNode> infer_impl(const ExprPtr& e, const Context& incoming) {
        Context ctx = restrict_ctx(incoming, free_vars(*e));
        int begin = rows();
        switch (e->kind) {
        case Expr::Kind::Var: return rule_var(e, ctx, begin);
        case Expr::Kind::ConRef: return rule_cons(e, ctx, begin);
        case Expr::Kind::Lit:
            return conclude("GC-Lit", ctx, e, mk_prim(), {LinExpr(0)}, {LinExpr(0)}, {}, begin);
        case Expr::Kind::TypeTok:
            throw TypeError("type token outside an application");
        case Expr::Kind::Lam: return rule_abs(e, ctx, begin);
        case Expr::Kind::TyLam: return rule_tyabs(e, ctx, begin);
        case Expr::Kind::App:
            if (e->b->kind == Expr::Kind::TypeTok) return rule_tyapp(e, ctx, begin);
            if (e->b->kind == Expr::Kind::Var && !opts.force_general_app)
                return rule_appvar(e, ctx, begin);
            return rule_app(e, ctx, begin);
        case Expr::Kind::Let: return rule_let(e, ctx, begin);
        case Expr::Kind::LetRec: return rule_letrec(e, ctx, begin);
        case Expr::Kind::CaseAlg: return rule_case_alg(e, ctx, begin);
        case Expr::Kind::CaseLit: return rule_case_lit(e, ctx, begin);
        case Expr::Kind::TypeLet: {
            auto body = infer(e->a, ctx);
            LinExpr up(body->conclusion.upper);
            LinExpr low(body->conclusion.lower);
            AnnPtr ty = body->conclusion.type;
            std::vector<std::unique_ptr<DerivationNode>> prem;
            prem.push_back(std::move(body));
            return conclude("GC-TyLet", ctx, e, ty, {up}, {low}, std::move(prem), begin);
        }
        }
        throw TypeError("unsupported expression");
    }

    std::unique_ptr<DerivationNode> rule_var(const ExprPtr& e, Context& ctx, int begin) {
        if (const AnnPtr* entry = context_lookup(ctx, e->name)) {
            const AnnPtr& t = *entry;
            assert(t->kind == AnnType::Kind::Thunk);
            LinExpr up = LinExpr(t->ann) + LinExpr(cm.var);
            return conclude("GC-Var", ctx, e, t->inner, {up}, {LinExpr(0)}, {}, begin);
        }
        // primitive operators are pre-evaluated globals with a fixed schema
        AnnPtr schema = lookup_prim(e->name, cm);
        return conclude("GC-Var", ctx, e, schema, {LinExpr(cm.var)}, {LinExpr(0)}, {}, begin);
    }

    std::unique_ptr<DerivationNode> rule_cons(const ExprPtr& e, Context& ctx, int begin) {
        int idx = -1;
        const DataDecl* d = m.find_ctor(e->name, &idx);
        if (!d) throw TypeError("unknown constructor " + e->name);
        AnnPtr c_ty = instantiate_decl(m, *d, st, "GC-Cons:" + e->name);
        const AnnCtor& ctor = c_ty->ctors[idx];
        AnnPtr ty = c_ty;
        for (auto it = ctor.fields.rbegin(); it != ctor.fields.rend(); ++it)
            ty = mk_fun(subst_tyvar(*it, c_ty->name, c_ty), Annotation::constant(0), ty);
        LinExpr up = LinExpr(ctor.potential) + LinExpr(cm.cons);
        return conclude("GC-Cons", ctx, e, ty, {up}, {LinExpr(0)}, {}, begin);
    }

    std::unique_ptr<DerivationNode> rule_abs(const ExprPtr& e, Context& ctx, int begin) {
        // the captured context must be usable arbitrarily often
        for (const auto& entry : ctx) share(entry.type, {entry.type, entry.type}, st);
        const auto& shape = shapes.binders.at(e.get())[0];
        AnnPtr arg_inner = instantiate_shape(m, shape, st, "GC-Abs:" + e->name);
        Annotation arg_cost = st.fresh("GC-Abs:argcost:" + e->name);
        Context body_ctx = ctx;
        LinExpr body_extra(0);
        insert_entry(body_ctx, e->name, arg_cost, arg_inner, body_extra, "GC-Abs");
        auto body = infer(e->a, body_ctx);
        Annotation arrow = st.fresh("GC-Abs:arrow");
        emit_rel(st, arrow, Rel::Ge, LinExpr(body->conclusion.upper) + body_extra,
                 "GC-Abs:arrow");
        AnnPtr ty = mk_fun(mk_thunk(arg_cost, arg_inner), arrow, body->conclusion.type);
        std::vector<std::unique_ptr<DerivationNode>> prem;
        prem.push_back(std::move(body));
        return conclude("GC-Abs", ctx, e, ty, {LinExpr(0)}, {LinExpr(0)}, std::move(prem),
                        begin);
    }

    std::unique_ptr<DerivationNode> rule_tyabs(const ExprPtr& e, Context& ctx, int begin) {
        auto body = infer(e->a, ctx);
        emit_rel(st, body->conclusion.lower, Rel::Eq, LinExpr(0), "GC-TyAbs:lower");
        AnnPtr ty = mk_fun(mk_prim(), Annotation::constant(0), body->conclusion.type);
        LinExpr up(body->conclusion.upper);
        std::vector<std::unique_ptr<DerivationNode>> prem;
        prem.push_back(std::move(body));
        return conclude("GC-TyAbs", ctx, e, ty, {up}, {LinExpr(0)}, std::move(prem), begin);
    }

    std::unique_ptr<DerivationNode> rule_tyapp(const ExprPtr& e, Context& ctx, int begin) {
        auto fun = infer(e->a, ctx);
        const AnnPtr& fty = fun->conclusion.type;
        if (fty->kind != AnnType::Kind::Fun || !fty->is_artificial_arrow())
            throw TypeError("type application to a non type-abstraction: " +
                            print_anntype(fty));
        emit_rel(st, fty->ann, Rel::Eq, LinExpr(0), "GC-TyApp:cost");
        LinExpr up(fun->conclusion.upper);
        LinExpr low(fun->conclusion.lower);
        AnnPtr ty = fty->res;
        std::vector<std::unique_ptr<DerivationNode>> prem;
        prem.push_back(std::move(fun));
        return conclude("GC-TyApp", ctx, e, ty, {up}, {low}, std::move(prem), begin);
    }

    AnnPtr expect_real_fun(const AnnPtr& t) {
        if (t->kind != AnnType::Kind::Fun)
            throw TypeError("application of a non-function: " + print_anntype(t));
        if (t->is_artificial_arrow())
            throw TypeError("term application of a type abstraction: " + print_anntype(t));
        return t;
    }

    std::unique_ptr<DerivationNode> rule_appvar(const ExprPtr& e, Context& ctx, int begin) {
        const std::string& x = e->b->name;
        auto parts = split_by_use(ctx, {free_vars(*e->a), {x}});
        auto fun = infer(e->a, parts[0]);
        AnnPtr fty = expect_real_fun(fun->conclusion.type);
        AnnPtr arg_entry;
        if (const AnnPtr* entry = context_lookup(parts[1], x))
            arg_entry = *entry;
        else
            arg_entry = mk_thunk(Annotation::constant(0), lookup_prim(x, cm));
        unify(arg_entry, fty->arg, st);
        LinExpr up = LinExpr(fun->conclusion.upper) + LinExpr(fty->ann) + LinExpr(cm.app);
        LinExpr low(fun->conclusion.lower);
        AnnPtr ty = fty->res;
        std::vector<std::unique_ptr<DerivationNode>> prem;
        prem.push_back(std::move(fun));
        return conclude("GC-AppVar", ctx, e, ty, {up}, {low}, std::move(prem), begin);
    }

    std::unique_ptr<DerivationNode> rule_app(const ExprPtr& e, Context& ctx, int begin) {
        auto parts = split_by_use(ctx, {free_vars(*e->a), free_vars(*e->b)});
        auto fun = infer(e->a, parts[0]);
        AnnPtr fty = expect_real_fun(fun->conclusion.type);
        auto arg = infer(e->b, parts[1]);
        unify(arg->conclusion.type, fty->arg->inner, st);
        // the argument's cost is charged to the thunk annotation of the arrow
        emit_rel(st, fty->arg->ann, Rel::Ge, arg->conclusion.upper, "GC-App:argthunk");
        LinExpr up = LinExpr(fun->conclusion.upper) + LinExpr(fty->ann) + LinExpr(cm.app);
        LinExpr low(fun->conclusion.lower);
        AnnPtr ty = fty->res;
        std::vector<std::unique_ptr<DerivationNode>> prem;
        prem.push_back(std::move(fun));
        prem.push_back(std::move(arg));
        return conclude("GC-App", ctx, e, ty, {up}, {low}, std::move(prem), begin);
    }

    std::unique_ptr<DerivationNode> rule_let(const ExprPtr& e, Context& ctx, int begin) {
        std::set<std::string> body_use = free_vars(*e->b);
        body_use.erase(e->name);
        auto parts = split_by_use(ctx, {free_vars(*e->a), body_use});
        auto rhs = infer(e->a, parts[0]);
        Annotation q = st.fresh("GC-Let:thunk:" + e->name);
        emit_rel(st, q, Rel::Ge, rhs->conclusion.upper, "GC-Let:thunk");
        Context body_ctx = parts[1];
        LinExpr extra(0);
        insert_entry(body_ctx, e->name, q, rhs->conclusion.type, extra, "GC-Let");
        auto body = infer(e->b, body_ctx);
        LinExpr up = LinExpr(body->conclusion.upper) + extra + LinExpr(cm.let_);
        LinExpr low(body->conclusion.lower);
        AnnPtr ty = body->conclusion.type;
        std::vector<std::unique_ptr<DerivationNode>> prem;
        prem.push_back(std::move(rhs));
        prem.push_back(std::move(body));
        return conclude("GC-Let", ctx, e, ty, {up}, {low}, std::move(prem), begin);
    }

    std::unique_ptr<DerivationNode> rule_letrec(const ExprPtr& e, Context& ctx, int begin) {
        const size_t n = e->binds.size();
        const auto& binder_shapes = shapes.binders.at(e.get());

        std::vector<std::set<std::string>> uses;
        for (const auto& [_, rhs] : e->binds) {
            std::set<std::string> u = free_vars(*rhs);
            for (const auto& [bn, _2] : e->binds) u.erase(bn);
            uses.push_back(std::move(u));
        }
        {
            std::set<std::string> u = free_vars(*e->a);
            for (const auto& [bn, _2] : e->binds) u.erase(bn);
            uses.push_back(std::move(u));
        }
        auto parts = split_by_use(ctx, uses);

        // view types the bindings see each other at, and their thunk costs
        std::vector<AnnPtr> views(n);
        std::vector<Annotation> qprime(n);
        for (size_t i = 0; i < n; ++i) {
            views[i] = instantiate_shape(m, binder_shapes[i], st,
                                         "GC-LetRec:view:" + e->binds[i].first);
            qprime[i] = st.fresh("GC-LetRec:q':" + e->binds[i].first);
        }

        std::vector<std::unique_ptr<DerivationNode>> prem;
        std::vector<LinExpr> premise_upper(n, LinExpr(0));
        std::vector<AnnPtr> bind_types(n);
        for (size_t i = 0; i < n; ++i) {
            Context bctx = parts[i];
            LinExpr extra(0);
            for (size_t j = 0; j < n; ++j) {
                if (j == i)
                    bctx.push_back({e->binds[j].first,
                                    mk_thunk(Annotation::constant(0), views[j])});
                else
                    insert_entry(bctx, e->binds[j].first, qprime[j], views[j], extra,
                                 "GC-LetRec");
            }
            auto node = infer(e->binds[i].second, bctx);
            premise_upper[i] = LinExpr(node->conclusion.upper) + extra;
            bind_types[i] = node->conclusion.type;
            prem.push_back(std::move(node));
        }

        // the real type shares into itself plus the recursive view
        LinExpr paid_once(0);
        for (size_t i = 0; i < n; ++i) {
            AnnPtr shared_copy = clone_fresh(bind_types[i], st, "GC-LetRec:copy");
            share(bind_types[i], {bind_types[i], shared_copy}, st);
            lower_rel(views[i], shared_copy, st, opts.legacy_lower_thunks);
            Annotation q2 = st.fresh("GC-LetRec:q'':" + e->binds[i].first);
            emit_rel(st, premise_upper[i], Rel::Le, LinExpr(qprime[i]) + LinExpr(q2),
                     "GC-LetRec:split");
            paid_once += q2;
        }

        Context body_ctx = parts[n];
        LinExpr body_extra(0);
        for (size_t i = 0; i < n; ++i)
            insert_entry(body_ctx, e->binds[i].first, qprime[i], bind_types[i], body_extra,
                         "GC-LetRec");
        auto body = infer(e->a, body_ctx);

        LinExpr up = LinExpr(body->conclusion.upper) + body_extra + paid_once +
                     LinExpr(cm.letrec * Rat(n));
        LinExpr low(body->conclusion.lower);
        AnnPtr ty = body->conclusion.type;
        prem.push_back(std::move(body));
        return conclude("GC-LetRec", ctx, e, ty, {up}, {low}, std::move(prem), begin);
    }

    // wraps a scrutinee judgment with fresh slack on both bounds
    std::pair<LinExpr, LinExpr> relax_scrutinee(std::unique_ptr<DerivationNode>& scrut) {
        LinExpr up(scrut->conclusion.upper);
        LinExpr low(scrut->conclusion.lower);
        if (!opts.relax) return {up, low};
        int begin = scrut->emit_begin;
        Annotation r = st.fresh("Relax:slack");
        Annotation p = st.fresh("Relax:p");
        Annotation q = st.fresh("Relax:p'");
        emit_rel(st, p, Rel::Eq, up + LinExpr(r), "Relax:upper");
        emit_rel(st, q, Rel::Eq, low + LinExpr(r), "Relax:lower");
        auto node = std::make_unique<DerivationNode>();
        node->rule = "Relax";
        node->conclusion = Judgment{scrut->conclusion.ctx, scrut->conclusion.expr,
                                    scrut->conclusion.type, p, q};
        node->premises.push_back(std::move(scrut));
        node->emit_begin = begin;
        node->emit_end = rows();
        scrut = std::move(node);
        return {LinExpr(p), LinExpr(q)};
    }

    std::unique_ptr<DerivationNode> rule_case_alg(const ExprPtr& e, Context& ctx, int begin) {
        std::set<std::string> branch_use;
        for (const auto& alt : e->alts_con) {
            std::set<std::string> u = free_vars(*alt.body);
            u.erase(e->name);
            for (const auto& b : alt.binders) u.erase(b);
            branch_use.insert(u.begin(), u.end());
        }
        std::set<std::string> def_use;
        if (e->def) {
            def_use = free_vars(*e->def);
            def_use.erase(e->name);
            branch_use.insert(def_use.begin(), def_use.end());
        }
        auto parts = split_by_use(ctx, {free_vars(*e->a), branch_use});
        const Context& delta = parts[1];

        auto scrut = infer(e->a, parts[0]);
        AnnPtr b_ty = scrut->conclusion.type;
        int ctor_idx = -1;
        const DataDecl* decl = m.find_ctor(e->alts_con[0].ctor, &ctor_idx);
        if (b_ty->kind != AnnType::Kind::Mu || b_ty->name != decl->name)
            throw TypeError("case scrutinee has type " + print_anntype(b_ty) +
                            ", expected " + decl->name);
        auto [scrut_up, scrut_low] = relax_scrutinee(scrut);

        std::vector<std::unique_ptr<DerivationNode>> prem;
        prem.push_back(std::move(scrut));

        AnnPtr result;
        std::vector<LinExpr> lowers;
        std::set<std::string> present;
        for (const auto& alt : e->alts_con) {
            present.insert(alt.ctor);
            int ci = -1;
            m.find_ctor(alt.ctor, &ci);
            const AnnCtor& actor = b_ty->ctors[ci];
            Context actx = delta;
            LinExpr extra(0);
            for (size_t j = 0; j < alt.binders.size(); ++j) {
                AnnPtr field = actor.fields[j]; // thunk type
                AnnPtr inner = subst_tyvar(field->inner, b_ty->name, b_ty);
                insert_entry(actx, alt.binders[j], field->ann, inner, extra, "GC-CaseAlg");
            }
            actx.push_back({e->name, mk_thunk(Annotation::constant(0), b_ty)});
            auto node = infer(alt.body, actx);
            emit_rel(st, scrut_low + LinExpr(actor.potential), Rel::Ge,
                     LinExpr(node->conclusion.upper) + extra, "GC-CaseAlg:alt");
            if (!result)
                result = node->conclusion.type;
            else
                unify(result, node->conclusion.type, st);
            lowers.emplace_back(node->conclusion.lower);
            prem.push_back(std::move(node));
        }

        if (e->def) {
            std::vector<int> missing;
            for (size_t ci = 0; ci < decl->ctors.size(); ++ci)
                if (!present.count(decl->ctors[ci].name)) missing.push_back(static_cast<int>(ci));
            if (!missing.empty()) {
                Context dbase = restrict_ctx(delta, def_use);
                auto copies = share_context(dbase, static_cast<int>(missing.size()), st);
                for (size_t k = 0; k < missing.size(); ++k) {
                    Context dctx = copies[k];
                    dctx.push_back({e->name, mk_thunk(Annotation::constant(0), b_ty)});
                    auto node = infer(e->def, dctx);
                    emit_rel(st, scrut_low + LinExpr(b_ty->ctors[missing[k]].potential),
                             Rel::Ge, node->conclusion.upper, "GC-CaseAlg:default");
                    if (!result)
                        result = node->conclusion.type;
                    else
                        unify(result, node->conclusion.type, st);
                    lowers.emplace_back(node->conclusion.lower);
                    prem.push_back(std::move(node));
                }
            }
        }

        LinExpr up = scrut_up + LinExpr(cm.match);
        return conclude("GC-CaseAlg", ctx, e, result, {up}, lowers, std::move(prem), begin);
    }

    std::unique_ptr<DerivationNode> rule_case_lit(const ExprPtr& e, Context& ctx, int begin) {
        std::set<std::string> branch_use;
        for (const auto& alt : e->alts_lit) {
            std::set<std::string> u = free_vars(*alt.body);
            u.erase(e->name);
            branch_use.insert(u.begin(), u.end());
        }
        if (e->def) {
            std::set<std::string> u = free_vars(*e->def);
            u.erase(e->name);
            branch_use.insert(u.begin(), u.end());
        }
        auto parts = split_by_use(ctx, {free_vars(*e->a), branch_use});
        const Context& delta = parts[1];

        auto scrut = infer(e->a, parts[0]);
        AnnPtr b_ty = scrut->conclusion.type;
        if (!e->alts_lit.empty() && !b_ty->is_prim())
            throw TypeError("literal case scrutinee has type " + print_anntype(b_ty));
        auto [scrut_up, scrut_low] = relax_scrutinee(scrut);

        std::vector<std::unique_ptr<DerivationNode>> prem;
        prem.push_back(std::move(scrut));

        AnnPtr result;
        std::vector<LinExpr> lowers;
        auto run_branch = [&](const ExprPtr& body) {
            Context bctx = delta;
            bctx.push_back({e->name, mk_thunk(Annotation::constant(0), b_ty)});
            auto node = infer(body, bctx);
            emit_rel(st, scrut_low, Rel::Ge, node->conclusion.upper, "GC-CaseLit:alt");
            if (!result)
                result = node->conclusion.type;
            else
                unify(result, node->conclusion.type, st);
            lowers.emplace_back(node->conclusion.lower);
            prem.push_back(std::move(node));
        };
        for (const auto& alt : e->alts_lit) run_branch(alt.body);
        if (e->def) run_branch(e->def);

        LinExpr up = scrut_up + LinExpr(cm.match);
        return conclude("GC-CaseLit", ctx, e, result, {up}, lowers, std::move(prem), begin);
    }
};

} // namespace

std::map<int, Rat> default_objective(const Judgment& root, const AnnPtr& ty,
                                     const LinearProgram& lp) {
    Rat w = Rat(1 + lp.num_vars);
    std::map<int, Rat> obj;
    for (int v = 0; v < lp.num_vars; ++v) obj[v] = 1;
    std::vector<Annotation> anns;
    collect_cost_annotations(ty, anns);
    for (const auto& a : anns)
        if (a.is_var()) obj[a.var] = w;
    if (root.upper.is_var()) obj[root.upper.var] = w * w;
    return obj;
}

AnalysisResult analyze(const Module& m, const CostModel& cm, const InferOptions& opt) {
    ExprPtr expr = module_to_expr(m);
    Engine eng(m, cm, opt);
    eng.shapes = infer_shapes(m, expr);
    auto root = eng.infer(expr, Context{});

    AnalysisResult res;
    res.main_name = m.main;
    res.result_type = root->conclusion.type;
    res.upper = root->conclusion.upper;
    res.lower = root->conclusion.lower;
    eng.st.lp.objective = default_objective(root->conclusion, root->conclusion.type, eng.st.lp);
    if (!eng.st.legacy_relaxed.empty()) {
        // reproduce the historical solution choice: relaxed recursive thunks
        // are assumed already evaluated, so minimize them before anything else
        Rat w = Rat(1 + eng.st.lp.num_vars);
        for (int v : eng.st.legacy_relaxed) eng.st.lp.objective[v] = w * w * w;
    }
    res.derivation = std::move(root);
    res.lp = std::move(eng.st.lp);
    res.solution = solve(res.lp);
    res.status = res.solution.status;
    if (res.ok()) {
        res.solved_type = substitute_solution(res.result_type, res.solution);
        res.upper_value = res.upper.is_var() ? res.solution.assignment[res.upper.var]
                                             : res.upper.value;
        res.lower_value = res.lower.is_var() ? res.solution.assignment[res.lower.var]
                                             : res.lower.value;
    }
    return res;
}

std::string print_judgment(const Judgment& j, const Solution* sol) {
    std::ostringstream out;
    out << "{";
    for (size_t i = 0; i < j.ctx.size(); ++i) {
        if (i) out << ", ";
        out << j.ctx[i].name << " : " << print_anntype(j.ctx[i].type, sol);
    }
    out << "} |-" << print_annotation(j.upper, sol) << "/" << print_annotation(j.lower, sol)
        << " " << print_expr(*j.expr) << " : " << print_anntype(j.type, sol);
    return out.str();
}

namespace {
void dump_node(const DerivationNode& n, std::ostream& out, int depth, const Solution* sol) {
    out << std::string(2 * depth, ' ') << n.rule << ": " << print_judgment(n.conclusion, sol)
        << "\n";
    for (const auto& p : n.premises) dump_node(*p, out, depth + 1, sol);
}
} // namespace

void dump_derivation(const DerivationNode& n, std::ostream& out, const Solution* sol) {
    dump_node(n, out, 0, sol);
}

} // namespace lzc
