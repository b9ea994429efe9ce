#pragma once

#include "lzc/ast.hpp"

#include <stdexcept>
#include <string>

namespace lzc {

struct ParseError : std::runtime_error {
    Pos pos;
    ParseError(Pos p, const std::string& msg)
        : std::runtime_error(std::to_string(p.line) + ":" + std::to_string(p.col) + ": " + msg),
          pos(p) {}
};

// Parses and scope-checks one module. Throws ParseError with line/column.
//
// Grammar sketch (keyword based, layout insensitive):
//   module  := { "data" UName [ "=" ctor { "|" ctor } ] ";"
//             | ["main"] name { name } "=" expr ";"
//             | "rec" ["main"] name { name } "=" expr
//                 { "and" ["main"] name { name } "=" expr } ";" }
//   ctor    := UName [ "(" field { "," field } ")" ]
//   field   := "Prim" | UName
//   expr    := "\" name { name } "->" expr
//            | "/\" name "->" expr
//            | "let" name "=" expr "in" expr
//            | "letrec" name "=" expr { ";" name "=" expr } "in" expr
//            | "tylet" name "=" UName "in" expr
//            | "case" name "=" expr "of" "{" alt { "|" alt } "}"
//            | app
//   app     := atom { atom | "@" UName }
//   atom    := name | UName | literal | "(" expr ")"
//   alt     := UName [ "(" name { "," name } ")" ] "->" expr
//            | literal "->" expr | "default" "->" expr
//
// A top-level binding whose right-hand side mentions its own name becomes a
// singleton recursive group. A case with only a default alternative is a
// literal case (it just forces the scrutinee).
Module parse_module(const std::string& source);

} // namespace lzc
