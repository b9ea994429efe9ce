#include "lzc/ast.hpp"

#include <algorithm>
#include <sstream>

namespace lzc {

bool Literal::same(const Literal& o) const {
    if (kind != o.kind) return false;
    if (kind == Kind::Int) return int_value == o.int_value;
    return text == o.text;
}

std::string Literal::show() const {
    if (kind == Kind::Char) return "'" + text + "'";
    return text;
}

namespace {
std::shared_ptr<Expr> node(Expr::Kind k, Pos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->pos = pos;
    return e;
}
} // namespace

ExprPtr mk_var(std::string name, Pos pos) {
    auto e = node(Expr::Kind::Var, pos);
    e->name = std::move(name);
    return e;
}

ExprPtr mk_conref(std::string name, Pos pos) {
    auto e = node(Expr::Kind::ConRef, pos);
    e->name = std::move(name);
    return e;
}

ExprPtr mk_lit(Literal lit, Pos pos) {
    auto e = node(Expr::Kind::Lit, pos);
    e->lit = std::move(lit);
    return e;
}

ExprPtr mk_typetok(std::string name, Pos pos) {
    auto e = node(Expr::Kind::TypeTok, pos);
    e->name = std::move(name);
    return e;
}

ExprPtr mk_lam(std::string binder, ExprPtr body, Pos pos) {
    auto e = node(Expr::Kind::Lam, pos);
    e->name = std::move(binder);
    e->a = std::move(body);
    return e;
}

ExprPtr mk_tylam(std::string binder, ExprPtr body, Pos pos) {
    auto e = node(Expr::Kind::TyLam, pos);
    e->name = std::move(binder);
    e->a = std::move(body);
    return e;
}

ExprPtr mk_app(ExprPtr fun, ExprPtr arg, Pos pos) {
    auto e = node(Expr::Kind::App, pos);
    e->a = std::move(fun);
    e->b = std::move(arg);
    return e;
}

ExprPtr mk_let(std::string binder, ExprPtr rhs, ExprPtr body, Pos pos) {
    auto e = node(Expr::Kind::Let, pos);
    e->name = std::move(binder);
    e->a = std::move(rhs);
    e->b = std::move(body);
    return e;
}

ExprPtr mk_letrec(std::vector<std::pair<std::string, ExprPtr>> binds, ExprPtr body, Pos pos) {
    auto e = node(Expr::Kind::LetRec, pos);
    e->binds = std::move(binds);
    e->a = std::move(body);
    return e;
}

ExprPtr mk_case_alg(std::string scrut_binder, ExprPtr scrut, std::vector<CaseAltCon> alts,
                    ExprPtr def, Pos pos) {
    auto e = node(Expr::Kind::CaseAlg, pos);
    e->name = std::move(scrut_binder);
    e->a = std::move(scrut);
    e->alts_con = std::move(alts);
    e->def = std::move(def);
    return e;
}

ExprPtr mk_case_lit(std::string scrut_binder, ExprPtr scrut, std::vector<CaseAltLit> alts,
                    ExprPtr def, Pos pos) {
    auto e = node(Expr::Kind::CaseLit, pos);
    e->name = std::move(scrut_binder);
    e->a = std::move(scrut);
    e->alts_lit = std::move(alts);
    e->def = std::move(def);
    return e;
}

ExprPtr mk_typelet(std::string binder, std::string tyname, ExprPtr body, Pos pos) {
    auto e = node(Expr::Kind::TypeLet, pos);
    e->name = std::move(binder);
    e->tyname = std::move(tyname);
    e->a = std::move(body);
    return e;
}

const DataDecl* Module::find_decl(const std::string& name) const {
    for (const auto& d : decls)
        if (d.name == name) return &d;
    return nullptr;
}

const DataDecl* Module::find_ctor(const std::string& ctor, int* index) const {
    for (const auto& d : decls)
        for (size_t i = 0; i < d.ctors.size(); ++i)
            if (d.ctors[i].name == ctor) {
                if (index) *index = static_cast<int>(i);
                return &d;
            }
    return nullptr;
}

const std::vector<std::string>& primitive_names() {
    static const std::vector<std::string> names = {"+#", "-#", "*#", "<#", "==#"};
    return names;
}

bool is_primitive(const std::string& name) {
    const auto& ns = primitive_names();
    return std::find(ns.begin(), ns.end(), name) != ns.end();
}

namespace {

void free_vars_into(const Expr& e, std::set<std::string>& bound, std::set<std::string>& out) {
    switch (e.kind) {
    case Expr::Kind::Var:
        if (!bound.count(e.name)) out.insert(e.name);
        break;
    case Expr::Kind::ConRef:
    case Expr::Kind::Lit:
    case Expr::Kind::TypeTok:
        break;
    case Expr::Kind::Lam: {
        bool was = bound.count(e.name) > 0;
        bound.insert(e.name);
        free_vars_into(*e.a, bound, out);
        if (!was) bound.erase(e.name);
        break;
    }
    case Expr::Kind::TyLam:
        free_vars_into(*e.a, bound, out);
        break;
    case Expr::Kind::App:
        free_vars_into(*e.a, bound, out);
        free_vars_into(*e.b, bound, out);
        break;
    case Expr::Kind::Let: {
        free_vars_into(*e.a, bound, out);
        bool was = bound.count(e.name) > 0;
        bound.insert(e.name);
        free_vars_into(*e.b, bound, out);
        if (!was) bound.erase(e.name);
        break;
    }
    case Expr::Kind::LetRec: {
        std::vector<std::string> added;
        for (const auto& [n, _] : e.binds)
            if (bound.insert(n).second) added.push_back(n);
        for (const auto& [_, rhs] : e.binds) free_vars_into(*rhs, bound, out);
        free_vars_into(*e.a, bound, out);
        for (const auto& n : added) bound.erase(n);
        break;
    }
    case Expr::Kind::CaseAlg:
    case Expr::Kind::CaseLit: {
        free_vars_into(*e.a, bound, out);
        bool was = bound.count(e.name) > 0;
        bound.insert(e.name);
        for (const auto& alt : e.alts_con) {
            std::vector<std::string> added;
            for (const auto& b : alt.binders)
                if (bound.insert(b).second) added.push_back(b);
            free_vars_into(*alt.body, bound, out);
            for (const auto& b : added) bound.erase(b);
        }
        for (const auto& alt : e.alts_lit) free_vars_into(*alt.body, bound, out);
        if (e.def) free_vars_into(*e.def, bound, out);
        if (!was) bound.erase(e.name);
        break;
    }
    case Expr::Kind::TypeLet:
        free_vars_into(*e.a, bound, out);
        break;
    }
}

} // namespace

std::set<std::string> free_vars(const Expr& e) {
    std::set<std::string> bound, out;
    free_vars_into(e, bound, out);
    return out;
}

ExprPtr module_to_expr(const Module& m) {
    ExprPtr body = mk_var(m.main);
    for (auto it = m.binds.rbegin(); it != m.binds.rend(); ++it) {
        if (it->recursive)
            body = mk_letrec(it->binds, body);
        else
            body = mk_let(it->binds[0].first, it->binds[0].second, body);
    }
    return body;
}

bool expr_equal(const Expr& x, const Expr& y) {
    if (x.kind != y.kind) return false;
    switch (x.kind) {
    case Expr::Kind::Var:
    case Expr::Kind::ConRef:
    case Expr::Kind::TypeTok:
        return x.name == y.name;
    case Expr::Kind::Lit:
        return x.lit.same(y.lit);
    case Expr::Kind::Lam:
    case Expr::Kind::TyLam:
        return x.name == y.name && expr_equal(*x.a, *y.a);
    case Expr::Kind::App:
        return expr_equal(*x.a, *y.a) && expr_equal(*x.b, *y.b);
    case Expr::Kind::Let:
        return x.name == y.name && expr_equal(*x.a, *y.a) && expr_equal(*x.b, *y.b);
    case Expr::Kind::LetRec: {
        if (x.binds.size() != y.binds.size()) return false;
        for (size_t i = 0; i < x.binds.size(); ++i) {
            if (x.binds[i].first != y.binds[i].first) return false;
            if (!expr_equal(*x.binds[i].second, *y.binds[i].second)) return false;
        }
        return expr_equal(*x.a, *y.a);
    }
    case Expr::Kind::CaseAlg: {
        if (x.name != y.name || !expr_equal(*x.a, *y.a)) return false;
        if (x.alts_con.size() != y.alts_con.size()) return false;
        for (size_t i = 0; i < x.alts_con.size(); ++i) {
            const auto& ax = x.alts_con[i];
            const auto& ay = y.alts_con[i];
            if (ax.ctor != ay.ctor || ax.binders != ay.binders) return false;
            if (!expr_equal(*ax.body, *ay.body)) return false;
        }
        if ((x.def == nullptr) != (y.def == nullptr)) return false;
        return !x.def || expr_equal(*x.def, *y.def);
    }
    case Expr::Kind::CaseLit: {
        if (x.name != y.name || !expr_equal(*x.a, *y.a)) return false;
        if (x.alts_lit.size() != y.alts_lit.size()) return false;
        for (size_t i = 0; i < x.alts_lit.size(); ++i) {
            if (!x.alts_lit[i].lit.same(y.alts_lit[i].lit)) return false;
            if (!expr_equal(*x.alts_lit[i].body, *y.alts_lit[i].body)) return false;
        }
        if ((x.def == nullptr) != (y.def == nullptr)) return false;
        return !x.def || expr_equal(*x.def, *y.def);
    }
    case Expr::Kind::TypeLet:
        return x.name == y.name && x.tyname == y.tyname && expr_equal(*x.a, *y.a);
    }
    return false;
}

bool module_equal(const Module& x, const Module& y) {
    if (x.main != y.main) return false;
    if (x.decls.size() != y.decls.size() || x.binds.size() != y.binds.size()) return false;
    for (size_t i = 0; i < x.decls.size(); ++i) {
        const auto& dx = x.decls[i];
        const auto& dy = y.decls[i];
        if (dx.name != dy.name || dx.ctors.size() != dy.ctors.size()) return false;
        for (size_t j = 0; j < dx.ctors.size(); ++j) {
            if (dx.ctors[j].name != dy.ctors[j].name) return false;
            if (dx.ctors[j].fields.size() != dy.ctors[j].fields.size()) return false;
            for (size_t k = 0; k < dx.ctors[j].fields.size(); ++k) {
                const auto& fx = dx.ctors[j].fields[k];
                const auto& fy = dy.ctors[j].fields[k];
                if (fx.kind != fy.kind || fx.ref != fy.ref) return false;
            }
        }
    }
    for (size_t i = 0; i < x.binds.size(); ++i) {
        const auto& gx = x.binds[i];
        const auto& gy = y.binds[i];
        if (gx.recursive != gy.recursive || gx.binds.size() != gy.binds.size()) return false;
        for (size_t j = 0; j < gx.binds.size(); ++j) {
            if (gx.binds[j].first != gy.binds[j].first) return false;
            if (!expr_equal(*gx.binds[j].second, *gy.binds[j].second)) return false;
        }
    }
    return true;
}

namespace {

bool is_atom(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Var:
    case Expr::Kind::ConRef:
    case Expr::Kind::Lit:
        return true;
    default:
        return false;
    }
}

void print_into(const Expr& e, std::ostringstream& out);

void print_atom(const Expr& e, std::ostringstream& out) {
    if (is_atom(e)) {
        print_into(e, out);
    } else {
        out << "(";
        print_into(e, out);
        out << ")";
    }
}

void print_into(const Expr& e, std::ostringstream& out) {
    switch (e.kind) {
    case Expr::Kind::Var:
    case Expr::Kind::ConRef:
        out << e.name;
        break;
    case Expr::Kind::Lit:
        out << e.lit.show();
        break;
    case Expr::Kind::TypeTok:
        out << "@" << e.name;
        break;
    case Expr::Kind::Lam:
        out << "\\" << e.name << " -> ";
        print_into(*e.a, out);
        break;
    case Expr::Kind::TyLam:
        out << "/\\" << e.name << " -> ";
        print_into(*e.a, out);
        break;
    case Expr::Kind::App:
        if (e.b->kind == Expr::Kind::TypeTok) {
            print_atom(*e.a, out);
            out << " @" << e.b->name;
        } else {
            // keep application chains flat: f a b prints without parens
            if (e.a->kind == Expr::Kind::App) {
                print_into(*e.a, out);
            } else {
                print_atom(*e.a, out);
            }
            out << " ";
            print_atom(*e.b, out);
        }
        break;
    case Expr::Kind::Let:
        out << "let " << e.name << " = ";
        print_into(*e.a, out);
        out << " in ";
        print_into(*e.b, out);
        break;
    case Expr::Kind::LetRec: {
        out << "letrec ";
        bool first = true;
        for (const auto& [n, rhs] : e.binds) {
            if (!first) out << "; ";
            first = false;
            out << n << " = ";
            print_into(*rhs, out);
        }
        out << " in ";
        print_into(*e.a, out);
        break;
    }
    case Expr::Kind::CaseAlg: {
        out << "case " << e.name << " = ";
        print_into(*e.a, out);
        out << " of { ";
        bool first = true;
        for (const auto& alt : e.alts_con) {
            if (!first) out << " | ";
            first = false;
            out << alt.ctor;
            if (!alt.binders.empty()) {
                out << "(";
                for (size_t i = 0; i < alt.binders.size(); ++i) {
                    if (i) out << ", ";
                    out << alt.binders[i];
                }
                out << ")";
            }
            out << " -> ";
            print_into(*alt.body, out);
        }
        if (e.def) {
            if (!first) out << " | ";
            out << "default -> ";
            print_into(*e.def, out);
        }
        out << " }";
        break;
    }
    case Expr::Kind::CaseLit: {
        out << "case " << e.name << " = ";
        print_into(*e.a, out);
        out << " of { ";
        bool first = true;
        for (const auto& alt : e.alts_lit) {
            if (!first) out << " | ";
            first = false;
            out << alt.lit.show() << " -> ";
            print_into(*alt.body, out);
        }
        if (e.def) {
            if (!first) out << " | ";
            out << "default -> ";
            print_into(*e.def, out);
        }
        out << " }";
        break;
    }
    case Expr::Kind::TypeLet:
        out << "tylet " << e.name << " = " << e.tyname << " in ";
        print_into(*e.a, out);
        break;
    }
}

} // namespace

std::string print_expr(const Expr& e) {
    std::ostringstream out;
    print_into(e, out);
    return out.str();
}

std::string print_module(const Module& m) {
    std::ostringstream out;
    for (const auto& d : m.decls) {
        out << "data " << d.name;
        bool first = true;
        for (const auto& c : d.ctors) {
            out << (first ? " = " : " | ");
            first = false;
            out << c.name;
            if (!c.fields.empty()) {
                out << "(";
                for (size_t i = 0; i < c.fields.size(); ++i) {
                    if (i) out << ", ";
                    switch (c.fields[i].kind) {
                    case FieldSpec::Kind::Prim: out << "Prim"; break;
                    case FieldSpec::Kind::Rec: out << d.name; break;
                    case FieldSpec::Kind::Ref: out << c.fields[i].ref; break;
                    }
                }
                out << ")";
            }
        }
        out << ";\n";
    }
    for (const auto& g : m.binds) {
        if (g.recursive) {
            out << "rec ";
            bool first = true;
            for (const auto& [n, rhs] : g.binds) {
                if (!first) out << "and ";
                first = false;
                if (n == m.main) out << "main ";
                out << n << " = " << print_expr(*rhs) << "\n";
            }
            out << ";\n";
        } else {
            const auto& [n, rhs] = g.binds[0];
            if (n == m.main) out << "main ";
            out << n << " = " << print_expr(*rhs) << ";\n";
        }
    }
    return out.str();
}

std::string expr_head(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Var: return "var " + e.name;
    case Expr::Kind::ConRef: return "constructor " + e.name;
    case Expr::Kind::Lit: return "literal " + e.lit.show();
    case Expr::Kind::TypeTok: return "type " + e.name;
    case Expr::Kind::Lam: return "\\" + e.name + " -> ...";
    case Expr::Kind::TyLam: return "/\\" + e.name + " -> ...";
    case Expr::Kind::App: return "application";
    case Expr::Kind::Let: return "let " + e.name + " = ...";
    case Expr::Kind::LetRec: {
        std::string s = "letrec";
        for (const auto& [n, _] : e.binds) s += " " + n;
        return s;
    }
    case Expr::Kind::CaseAlg:
    case Expr::Kind::CaseLit: return "case " + e.name + " = ...";
    case Expr::Kind::TypeLet: return "tylet " + e.name;
    }
    return "?";
}

} // namespace lzc
