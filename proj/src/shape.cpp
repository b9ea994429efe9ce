#include "lzc/shape.hpp"

#include <sstream>

namespace lzc {

ShapePtr Shape::prim() {
    auto s = std::make_shared<Shape>();
    s->kind = Kind::Prim;
    return s;
}

ShapePtr Shape::data(std::string decl) {
    auto s = std::make_shared<Shape>();
    s->kind = Kind::Data;
    s->decl = std::move(decl);
    return s;
}

ShapePtr Shape::arrow(ShapePtr arg, ShapePtr res) {
    auto s = std::make_shared<Shape>();
    s->kind = Kind::Arrow;
    s->arg = std::move(arg);
    s->res = std::move(res);
    return s;
}

ShapePtr Shape::tyarrow(ShapePtr res) {
    auto s = std::make_shared<Shape>();
    s->kind = Kind::TyArrow;
    s->res = std::move(res);
    return s;
}

std::string print_shape(const ShapePtr& s) {
    std::ostringstream out;
    switch (s->kind) {
    case Shape::Kind::Prim: out << "Prim"; break;
    case Shape::Kind::Data: out << s->decl; break;
    case Shape::Kind::Arrow: {
        bool paren = s->arg->kind == Shape::Kind::Arrow || s->arg->kind == Shape::Kind::TyArrow;
        if (paren) out << "(";
        out << print_shape(s->arg);
        if (paren) out << ")";
        out << " -> " << print_shape(s->res);
        break;
    }
    case Shape::Kind::TyArrow: out << "forall -> " << print_shape(s->res); break;
    case Shape::Kind::Meta: out << "?" << s->meta; break;
    }
    return out.str();
}

namespace {

struct ShapeInfer {
    const Module& m;
    std::vector<ShapePtr> meta_bind; // meta id -> binding (null while free)
    ShapeTable table;
    std::map<const Expr*, std::vector<ShapePtr>> raw; // pre-zonk binder shapes

    explicit ShapeInfer(const Module& mod) : m(mod) {}

    ShapePtr fresh() {
        auto s = std::make_shared<Shape>();
        s->kind = Shape::Kind::Meta;
        s->meta = static_cast<int>(meta_bind.size());
        meta_bind.push_back(nullptr);
        return s;
    }

    ShapePtr resolve(ShapePtr s) {
        while (s->kind == Shape::Kind::Meta && meta_bind[s->meta]) s = meta_bind[s->meta];
        return s;
    }

    bool occurs(int meta, const ShapePtr& s0) {
        ShapePtr s = resolve(s0);
        switch (s->kind) {
        case Shape::Kind::Meta: return s->meta == meta;
        case Shape::Kind::Arrow: return occurs(meta, s->arg) || occurs(meta, s->res);
        case Shape::Kind::TyArrow: return occurs(meta, s->res);
        default: return false;
        }
    }

    void unify(ShapePtr a, ShapePtr b, Pos pos) {
        a = resolve(a);
        b = resolve(b);
        if (a == b) return;
        if (a->kind == Shape::Kind::Meta) {
            if (occurs(a->meta, b))
                throw TypeError(pos_str(pos) + "cannot construct an infinite type");
            meta_bind[a->meta] = b;
            return;
        }
        if (b->kind == Shape::Kind::Meta) {
            unify(b, a, pos);
            return;
        }
        if (a->kind != b->kind)
            throw TypeError(pos_str(pos) + "type mismatch: " + print_shape(a) + " vs " +
                            print_shape(b));
        switch (a->kind) {
        case Shape::Kind::Prim: return;
        case Shape::Kind::Data:
            if (a->decl != b->decl)
                throw TypeError(pos_str(pos) + "type mismatch: " + a->decl + " vs " + b->decl);
            return;
        case Shape::Kind::Arrow:
            unify(a->arg, b->arg, pos);
            unify(a->res, b->res, pos);
            return;
        case Shape::Kind::TyArrow:
            unify(a->res, b->res, pos);
            return;
        default: return;
        }
    }

    static std::string pos_str(Pos p) {
        if (p.line == 0) return "";
        return std::to_string(p.line) + ":" + std::to_string(p.col) + ": ";
    }

    ShapePtr field_shape(const DataDecl& d, const FieldSpec& f) {
        switch (f.kind) {
        case FieldSpec::Kind::Prim: return Shape::prim();
        case FieldSpec::Kind::Rec: return Shape::data(d.name);
        case FieldSpec::Kind::Ref: return Shape::data(f.ref);
        }
        return Shape::prim();
    }

    ShapePtr ctor_shape(const std::string& name, Pos pos) {
        int idx = -1;
        const DataDecl* d = m.find_ctor(name, &idx);
        if (!d) throw TypeError(pos_str(pos) + "unknown constructor " + name);
        ShapePtr t = Shape::data(d->name);
        const auto& fields = d->ctors[idx].fields;
        for (auto it = fields.rbegin(); it != fields.rend(); ++it)
            t = Shape::arrow(field_shape(*d, *it), t);
        return t;
    }

    using Env = std::vector<std::pair<std::string, ShapePtr>>;

    static const ShapePtr* lookup(const Env& env, const std::string& n) {
        for (auto it = env.rbegin(); it != env.rend(); ++it)
            if (it->first == n) return &it->second;
        return nullptr;
    }

    ShapePtr infer(const ExprPtr& e, Env& env) {
        switch (e->kind) {
        case Expr::Kind::Var: {
            if (const ShapePtr* s = lookup(env, e->name)) return *s;
            if (is_primitive(e->name))
                return Shape::arrow(Shape::prim(), Shape::arrow(Shape::prim(), Shape::prim()));
            throw TypeError(pos_str(e->pos) + "unbound identifier " + e->name);
        }
        case Expr::Kind::ConRef:
            return ctor_shape(e->name, e->pos);
        case Expr::Kind::Lit:
            return Shape::prim();
        case Expr::Kind::TypeTok:
            throw TypeError(pos_str(e->pos) + "type token outside an application");
        case Expr::Kind::Lam: {
            ShapePtr arg = fresh();
            raw[e.get()] = {arg};
            env.emplace_back(e->name, arg);
            ShapePtr res = infer(e->a, env);
            env.pop_back();
            return Shape::arrow(arg, res);
        }
        case Expr::Kind::TyLam:
            return Shape::tyarrow(infer(e->a, env));
        case Expr::Kind::App: {
            if (e->b->kind == Expr::Kind::TypeTok) {
                ShapePtr res = fresh();
                unify(infer(e->a, env), Shape::tyarrow(res), e->pos);
                return res;
            }
            ShapePtr fun = infer(e->a, env);
            ShapePtr arg = infer(e->b, env);
            ShapePtr res = fresh();
            unify(fun, Shape::arrow(arg, res), e->pos);
            return res;
        }
        case Expr::Kind::Let: {
            ShapePtr rhs = infer(e->a, env);
            env.emplace_back(e->name, rhs);
            ShapePtr res = infer(e->b, env);
            env.pop_back();
            return res;
        }
        case Expr::Kind::LetRec: {
            std::vector<ShapePtr> binders;
            for (const auto& [n, _] : e->binds) {
                binders.push_back(fresh());
                env.emplace_back(n, binders.back());
            }
            raw[e.get()] = binders;
            for (size_t i = 0; i < e->binds.size(); ++i)
                unify(binders[i], infer(e->binds[i].second, env), e->pos);
            ShapePtr res = infer(e->a, env);
            for (size_t i = 0; i < e->binds.size(); ++i) env.pop_back();
            return res;
        }
        case Expr::Kind::CaseAlg: {
            int idx = -1;
            const DataDecl* d = m.find_ctor(e->alts_con[0].ctor, &idx);
            ShapePtr scrut_ty = Shape::data(d->name);
            unify(infer(e->a, env), scrut_ty, e->a->pos);
            ShapePtr res = fresh();
            env.emplace_back(e->name, scrut_ty);
            for (const auto& alt : e->alts_con) {
                int ci = -1;
                const DataDecl* dd = m.find_ctor(alt.ctor, &ci);
                size_t depth = env.size();
                for (size_t j = 0; j < alt.binders.size(); ++j)
                    env.emplace_back(alt.binders[j], field_shape(*dd, dd->ctors[ci].fields[j]));
                unify(res, infer(alt.body, env), alt.body->pos);
                env.resize(depth);
            }
            if (e->def) unify(res, infer(e->def, env), e->def->pos);
            env.pop_back();
            return res;
        }
        case Expr::Kind::CaseLit: {
            ShapePtr scrut_ty = e->alts_lit.empty() ? infer(e->a, env) : Shape::prim();
            if (!e->alts_lit.empty()) unify(infer(e->a, env), scrut_ty, e->a->pos);
            ShapePtr res = fresh();
            env.emplace_back(e->name, scrut_ty);
            for (const auto& alt : e->alts_lit)
                unify(res, infer(alt.body, env), alt.body->pos);
            if (e->def) unify(res, infer(e->def, env), e->def->pos);
            env.pop_back();
            return res;
        }
        case Expr::Kind::TypeLet:
            return infer(e->a, env);
        }
        return Shape::prim();
    }

    // fully resolves a shape; leftover metas default to the primitive type
    ShapePtr zonk(ShapePtr s) {
        s = resolve(s);
        switch (s->kind) {
        case Shape::Kind::Meta: return Shape::prim();
        case Shape::Kind::Prim:
        case Shape::Kind::Data: return s;
        case Shape::Kind::Arrow: return Shape::arrow(zonk(s->arg), zonk(s->res));
        case Shape::Kind::TyArrow: return Shape::tyarrow(zonk(s->res));
        }
        return s;
    }
};

} // namespace

ShapeTable infer_shapes(const Module& m, const ExprPtr& root) {
    ShapeInfer si(m);
    ShapeInfer::Env env;
    si.infer(root, env);
    for (auto& [node, shapes] : si.raw) {
        std::vector<ShapePtr> zonked;
        zonked.reserve(shapes.size());
        for (auto& s : shapes) zonked.push_back(si.zonk(s));
        si.table.binders[node] = std::move(zonked);
    }
    return si.table;
}

AnnPtr instantiate_shape(const Module& m, const ShapePtr& s, AnnState& st,
                         const std::string& origin) {
    switch (s->kind) {
    case Shape::Kind::Prim:
        return mk_prim();
    case Shape::Kind::Data:
        return instantiate_decl(m, *m.find_decl(s->decl), st, origin);
    case Shape::Kind::Arrow:
        return mk_fun(mk_thunk(st.fresh(origin + ":arg"), instantiate_shape(m, s->arg, st, origin)),
                      st.fresh(origin + ":arrow"), instantiate_shape(m, s->res, st, origin));
    case Shape::Kind::TyArrow:
        return mk_fun(mk_prim(), Annotation::constant(0),
                      instantiate_shape(m, s->res, st, origin));
    case Shape::Kind::Meta:
        return mk_prim();
    }
    return mk_prim();
}

} // namespace lzc
