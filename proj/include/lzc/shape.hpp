#pragma once

#include "lzc/annotations.hpp"
#include "lzc/ast.hpp"

#include <map>
#include <memory>
#include <vector>

namespace lzc {

// Underlying (annotation-free) types. The analyzed language is monomorphic;
// a plain unification pass recovers every binder's type up front, which the
// annotated rules then refresh with annotation variables where needed.
struct Shape;
using ShapePtr = std::shared_ptr<Shape>;

struct Shape {
    enum class Kind { Prim, Data, Arrow, TyArrow, Meta };
    Kind kind = Kind::Prim;
    std::string decl;  // Data
    ShapePtr arg, res; // Arrow (arg), TyArrow (res only)
    int meta = -1;

    static ShapePtr prim();
    static ShapePtr data(std::string decl);
    static ShapePtr arrow(ShapePtr arg, ShapePtr res);
    static ShapePtr tyarrow(ShapePtr res);
};

std::string print_shape(const ShapePtr& s);

struct ShapeTable {
    // Lam -> [argument shape]; LetRec -> one shape per binder.
    std::map<const Expr*, std::vector<ShapePtr>> binders;
};

// Runs unification over the whole expression. Unconstrained residues default
// to the primitive type. Throws TypeError on genuinely ill-typed programs.
ShapeTable infer_shapes(const Module& m, const ExprPtr& root);

// Fresh annotated type over a shape: arrows get thunk-wrapped arguments with
// fresh cost variables, datatypes are instantiated from their declaration,
// type-abstraction arrows keep a bare primitive argument and cost 0.
AnnPtr instantiate_shape(const Module& m, const ShapePtr& s, AnnState& st,
                         const std::string& origin);

} // namespace lzc
