#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace lzc {

struct Pos {
    int line = 0;
    int col = 0;
};

struct Literal {
    enum class Kind { Int, Float, Char };
    Kind kind = Kind::Int;
    std::string text;        // the literal token as written
    std::int64_t int_value = 0; // valid when kind == Int

    bool same(const Literal& o) const;
    std::string show() const; // source form, e.g. 42, 2.5, 'a'
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct CaseAltCon {
    std::string ctor;
    std::vector<std::string> binders;
    ExprPtr body;
};

struct CaseAltLit {
    Literal lit;
    ExprPtr body;
};

// One node type with a kind tag; the core language is small enough that
// this stays manageable and keeps pattern dispatch in plain switches.
struct Expr {
    enum class Kind {
        Var,     // name
        ConRef,  // name (constructor)
        Lit,     // lit
        TypeTok, // name (type argument of an application)
        Lam,     // name, a = body
        TyLam,   // name (type binder), a = body
        App,     // a = fun, b = arg
        Let,     // name, a = rhs, b = body
        LetRec,  // binds, a = body
        CaseAlg, // name (scrutinee binder), a = scrutinee, alts_con, def
        CaseLit, // name (scrutinee binder), a = scrutinee, alts_lit, def
        TypeLet, // name (type binder), tyname, a = body
    };

    Kind kind;
    Pos pos;
    std::string name;
    Literal lit;
    ExprPtr a, b;
    std::vector<std::pair<std::string, ExprPtr>> binds; // LetRec
    std::vector<CaseAltCon> alts_con;
    std::vector<CaseAltLit> alts_lit;
    ExprPtr def; // optional default body of a case
    std::string tyname; // TypeLet right-hand side
};

ExprPtr mk_var(std::string name, Pos pos = {});
ExprPtr mk_conref(std::string name, Pos pos = {});
ExprPtr mk_lit(Literal lit, Pos pos = {});
ExprPtr mk_typetok(std::string name, Pos pos = {});
ExprPtr mk_lam(std::string binder, ExprPtr body, Pos pos = {});
ExprPtr mk_tylam(std::string binder, ExprPtr body, Pos pos = {});
ExprPtr mk_app(ExprPtr fun, ExprPtr arg, Pos pos = {});
ExprPtr mk_let(std::string binder, ExprPtr rhs, ExprPtr body, Pos pos = {});
ExprPtr mk_letrec(std::vector<std::pair<std::string, ExprPtr>> binds, ExprPtr body, Pos pos = {});
ExprPtr mk_case_alg(std::string scrut_binder, ExprPtr scrut, std::vector<CaseAltCon> alts,
                    ExprPtr def, Pos pos = {});
ExprPtr mk_case_lit(std::string scrut_binder, ExprPtr scrut, std::vector<CaseAltLit> alts,
                    ExprPtr def, Pos pos = {});
ExprPtr mk_typelet(std::string binder, std::string tyname, ExprPtr body, Pos pos = {});

struct FieldSpec {
    enum class Kind { Prim, Rec, Ref };
    Kind kind = Kind::Prim;
    std::string ref; // Ref target
};

struct CtorDecl {
    std::string name;
    std::vector<FieldSpec> fields;
};

struct DataDecl {
    std::string name;
    std::vector<CtorDecl> ctors; // may be empty (behaves like the primitive type)
};

struct BindGroup {
    bool recursive = false;
    std::vector<std::pair<std::string, ExprPtr>> binds;
};

struct Module {
    std::vector<DataDecl> decls;
    std::vector<BindGroup> binds;
    std::string main; // name of the binding to analyze

    const DataDecl* find_decl(const std::string& name) const;
    // constructor name -> (decl, ctor index); null when unknown
    const DataDecl* find_ctor(const std::string& ctor, int* index = nullptr) const;
};

// Hard-coded primitive operators (int literals only).
bool is_primitive(const std::string& name);
const std::vector<std::string>& primitive_names();

std::set<std::string> free_vars(const Expr& e);

// Folds the binding groups outside-in around Var(main):
// NonRec -> Let, Rec -> LetRec.
ExprPtr module_to_expr(const Module& m);

// Structural equality; source positions are ignored.
bool expr_equal(const Expr& x, const Expr& y);
bool module_equal(const Module& x, const Module& y);

std::string print_expr(const Expr& e);
std::string print_module(const Module& m);

// One-line head description used in traces ("let x = ... in ...").
std::string expr_head(const Expr& e);

} // namespace lzc
