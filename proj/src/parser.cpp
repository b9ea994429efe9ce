#include "lzc/parser.hpp"

#include <cctype>
#include <map>
#include <set>
#include <vector>

namespace lzc {

namespace {

enum class Tok {
    Ident,   // lowercase names and primitive operators
    UIdent,  // uppercase names (constructors, datatypes, type tokens)
    IntLit,
    FloatLit,
    CharLit,
    KwData, KwMain, KwRec, KwAnd, KwLet, KwLetrec, KwTylet, KwIn,
    KwCase, KwOf, KwDefault, KwPrim,
    Lambda, TyLambda, Arrow, At, Bar, Equals, Semi, Comma,
    LParen, RParen, LBrace, RBrace,
    Eof,
};

struct Token {
    Tok kind;
    std::string text;
    Pos pos;
};

const std::map<std::string, Tok>& keywords() {
    static const std::map<std::string, Tok> kws = {
        {"data", Tok::KwData}, {"main", Tok::KwMain}, {"rec", Tok::KwRec},
        {"and", Tok::KwAnd},   {"let", Tok::KwLet},   {"letrec", Tok::KwLetrec},
        {"tylet", Tok::KwTylet}, {"in", Tok::KwIn},   {"case", Tok::KwCase},
        {"of", Tok::KwOf},     {"default", Tok::KwDefault},
    };
    return kws;
}

struct Lexer {
    const std::string& src;
    size_t i = 0;
    Pos pos{1, 1};

    explicit Lexer(const std::string& s) : src(s) {}

    char peek(size_t off = 0) const { return i + off < src.size() ? src[i + off] : '\0'; }

    void advance() {
        if (i < src.size()) {
            if (src[i] == '\n') {
                pos.line++;
                pos.col = 1;
            } else {
                pos.col++;
            }
            i++;
        }
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos, msg); }

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            while (true) {
                char c = peek();
                if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                    advance();
                } else if (c == '-' && peek(1) == '-') {
                    while (peek() != '\n' && peek() != '\0') advance();
                } else {
                    break;
                }
            }
            Pos start = pos;
            char c = peek();
            if (c == '\0') {
                out.push_back({Tok::Eof, "", start});
                return out;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) ||
                (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
                out.push_back(lex_number(start));
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string word;
                while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                       peek() == '\'')
                    word += src[i], advance();
                auto it = keywords().find(word);
                if (it != keywords().end()) {
                    out.push_back({it->second, word, start});
                } else if (word == "Prim") {
                    out.push_back({Tok::KwPrim, word, start});
                } else if (std::isupper(static_cast<unsigned char>(word[0]))) {
                    out.push_back({Tok::UIdent, word, start});
                } else {
                    out.push_back({Tok::Ident, word, start});
                }
                continue;
            }
            switch (c) {
            case '\'': {
                advance();
                char v = peek();
                if (v == '\0' || v == '\'' || v == '\\' || v == '\n')
                    fail("bad character literal");
                advance();
                if (peek() != '\'') fail("unterminated character literal");
                advance();
                out.push_back({Tok::CharLit, std::string(1, v), start});
                continue;
            }
            case '+':
                if (peek(1) == '#') { advance(); advance(); out.push_back({Tok::Ident, "+#", start}); continue; }
                fail("stray '+' (primitive operators are written +#, -#, *#, <#, ==#)");
            case '*':
                if (peek(1) == '#') { advance(); advance(); out.push_back({Tok::Ident, "*#", start}); continue; }
                fail("stray '*'");
            case '<':
                if (peek(1) == '#') { advance(); advance(); out.push_back({Tok::Ident, "<#", start}); continue; }
                fail("stray '<'");
            case '-':
                if (peek(1) == '#') { advance(); advance(); out.push_back({Tok::Ident, "-#", start}); continue; }
                if (peek(1) == '>') { advance(); advance(); out.push_back({Tok::Arrow, "->", start}); continue; }
                fail("stray '-'");
            case '=':
                if (peek(1) == '=' && peek(2) == '#') {
                    advance(); advance(); advance();
                    out.push_back({Tok::Ident, "==#", start});
                    continue;
                }
                advance();
                out.push_back({Tok::Equals, "=", start});
                continue;
            case '/':
                if (peek(1) == '\\') { advance(); advance(); out.push_back({Tok::TyLambda, "/\\", start}); continue; }
                fail("stray '/'");
            case '\\': advance(); out.push_back({Tok::Lambda, "\\", start}); continue;
            case '@': advance(); out.push_back({Tok::At, "@", start}); continue;
            case '|': advance(); out.push_back({Tok::Bar, "|", start}); continue;
            case ';': advance(); out.push_back({Tok::Semi, ";", start}); continue;
            case ',': advance(); out.push_back({Tok::Comma, ",", start}); continue;
            case '(': advance(); out.push_back({Tok::LParen, "(", start}); continue;
            case ')': advance(); out.push_back({Tok::RParen, ")", start}); continue;
            case '{': advance(); out.push_back({Tok::LBrace, "{", start}); continue;
            case '}': advance(); out.push_back({Tok::RBrace, "}", start}); continue;
            default:
                fail(std::string("unsupported character '") + c + "'");
            }
        }
    }

    Token lex_number(Pos start) {
        std::string text;
        if (peek() == '-') text += src[i], advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) text += src[i], advance();
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            text += src[i], advance();
            while (std::isdigit(static_cast<unsigned char>(peek()))) text += src[i], advance();
            return {Tok::FloatLit, text, start};
        }
        return {Tok::IntLit, text, start};
    }
};

struct Parser {
    std::vector<Token> toks;
    size_t at = 0;

    const Token& cur() const { return toks[at]; }
    const Token& next() { return toks[at++]; }
    bool is(Tok k) const { return cur().kind == k; }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(cur().pos, msg); }

    Token expect(Tok k, const std::string& what) {
        if (!is(k)) fail("expected " + what);
        return next();
    }

    Literal make_literal(const Token& t) {
        Literal l;
        l.text = t.text;
        switch (t.kind) {
        case Tok::IntLit:
            l.kind = Literal::Kind::Int;
            try {
                l.int_value = std::stoll(t.text);
            } catch (...) {
                throw ParseError(t.pos, "integer literal out of range");
            }
            break;
        case Tok::FloatLit: l.kind = Literal::Kind::Float; break;
        case Tok::CharLit: l.kind = Literal::Kind::Char; break;
        default: throw ParseError(t.pos, "expected literal");
        }
        return l;
    }

    Module parse() {
        Module m;
        bool have_main = false;
        while (!is(Tok::Eof)) {
            if (is(Tok::KwData)) {
                m.decls.push_back(parse_data());
                continue;
            }
            parse_bind_group(m, have_main);
        }
        if (m.binds.empty()) throw ParseError(cur().pos, "module has no bindings");
        if (!have_main) {
            // default: a binding literally named "main", else the last binder
            m.main = m.binds.back().binds.back().first;
            for (const auto& g : m.binds)
                for (const auto& [n, _] : g.binds)
                    if (n == "main") m.main = n;
        }
        return m;
    }

    DataDecl parse_data() {
        expect(Tok::KwData, "'data'");
        DataDecl d;
        d.name = expect(Tok::UIdent, "datatype name").text;
        if (is(Tok::Semi)) { // empty declaration
            next();
            return d;
        }
        expect(Tok::Equals, "'='");
        for (;;) {
            CtorDecl c;
            c.name = expect(Tok::UIdent, "constructor name").text;
            if (is(Tok::LParen)) {
                next();
                for (;;) {
                    FieldSpec f;
                    if (is(Tok::KwPrim)) {
                        next();
                        f.kind = FieldSpec::Kind::Prim;
                    } else {
                        Token t = expect(Tok::UIdent, "field type (Prim or a datatype name)");
                        if (t.text == d.name) {
                            f.kind = FieldSpec::Kind::Rec;
                        } else {
                            f.kind = FieldSpec::Kind::Ref;
                            f.ref = t.text;
                        }
                    }
                    c.fields.push_back(f);
                    if (is(Tok::Comma)) { next(); continue; }
                    break;
                }
                expect(Tok::RParen, "')'");
            }
            d.ctors.push_back(std::move(c));
            if (is(Tok::Bar)) { next(); continue; }
            break;
        }
        expect(Tok::Semi, "';' after data declaration");
        return d;
    }

    // [main] name params = expr; a bare "main = expr" binds the name main
    std::pair<std::string, ExprPtr> parse_binding(std::string& main_name) {
        bool is_main = false;
        Token name{Tok::Ident, "main", cur().pos};
        if (is(Tok::KwMain)) {
            name.pos = next().pos;
            is_main = true;
        }
        if (!is_main || is(Tok::Ident)) name = expect(Tok::Ident, "binder name");
        std::vector<Token> params;
        while (is(Tok::Ident)) params.push_back(next());
        expect(Tok::Equals, "'='");
        ExprPtr rhs = parse_expr();
        for (auto it = params.rbegin(); it != params.rend(); ++it)
            rhs = mk_lam(it->text, rhs, it->pos);
        if (is_main) {
            if (!main_name.empty()) throw ParseError(name.pos, "duplicate 'main' marker");
            main_name = name.text;
        }
        return {name.text, rhs};
    }

    void parse_bind_group(Module& m, bool& have_main) {
        std::string main_name;
        BindGroup g;
        if (is(Tok::KwRec)) {
            next();
            g.recursive = true;
            g.binds.push_back(parse_binding(main_name));
            while (is(Tok::KwAnd)) {
                next();
                g.binds.push_back(parse_binding(main_name));
            }
        } else {
            g.binds.push_back(parse_binding(main_name));
            // a plain binding that mentions itself becomes a singleton rec group
            const auto& [n, rhs] = g.binds[0];
            if (free_vars(*rhs).count(n)) g.recursive = true;
        }
        if (!is(Tok::Eof)) expect(Tok::Semi, "';' after binding");
        if (!main_name.empty()) {
            if (have_main) fail("duplicate 'main' marker");
            have_main = true;
            m.main = main_name;
        }
        m.binds.push_back(std::move(g));
    }

    ExprPtr parse_expr() {
        Pos p = cur().pos;
        switch (cur().kind) {
        case Tok::Lambda: {
            next();
            std::vector<Token> params;
            params.push_back(expect(Tok::Ident, "parameter name"));
            while (is(Tok::Ident)) params.push_back(next());
            expect(Tok::Arrow, "'->'");
            ExprPtr body = parse_expr();
            for (auto it = params.rbegin(); it != params.rend(); ++it)
                body = mk_lam(it->text, body, it->pos);
            return body;
        }
        case Tok::TyLambda: {
            next();
            Token b = expect(Tok::Ident, "type parameter name");
            expect(Tok::Arrow, "'->'");
            return mk_tylam(b.text, parse_expr(), p);
        }
        case Tok::KwLet: {
            next();
            Token b = expect(Tok::Ident, "binder name");
            expect(Tok::Equals, "'='");
            ExprPtr rhs = parse_expr();
            expect(Tok::KwIn, "'in'");
            return mk_let(b.text, rhs, parse_expr(), p);
        }
        case Tok::KwLetrec: {
            next();
            std::vector<std::pair<std::string, ExprPtr>> binds;
            for (;;) {
                Token b = expect(Tok::Ident, "binder name");
                expect(Tok::Equals, "'='");
                binds.emplace_back(b.text, parse_expr());
                if (is(Tok::Semi)) { next(); continue; }
                break;
            }
            expect(Tok::KwIn, "'in'");
            return mk_letrec(std::move(binds), parse_expr(), p);
        }
        case Tok::KwTylet: {
            next();
            Token b = expect(Tok::Ident, "type binder name");
            expect(Tok::Equals, "'='");
            Token t = expect(Tok::UIdent, "type name");
            expect(Tok::KwIn, "'in'");
            return mk_typelet(b.text, t.text, parse_expr(), p);
        }
        case Tok::KwCase: return parse_case(p);
        default: return parse_app();
        }
    }

    ExprPtr parse_case(Pos p) {
        expect(Tok::KwCase, "'case'");
        Token binder = expect(Tok::Ident, "scrutinee binder");
        expect(Tok::Equals, "'='");
        ExprPtr scrut = parse_expr();
        expect(Tok::KwOf, "'of'");
        expect(Tok::LBrace, "'{'");
        std::vector<CaseAltCon> cons;
        std::vector<CaseAltLit> lits;
        ExprPtr def;
        for (;;) {
            if (is(Tok::KwDefault)) {
                Pos dp = next().pos;
                expect(Tok::Arrow, "'->'");
                if (def) throw ParseError(dp, "duplicate default alternative");
                def = parse_expr();
            } else if (is(Tok::UIdent)) {
                CaseAltCon alt;
                alt.ctor = next().text;
                if (is(Tok::LParen)) {
                    next();
                    for (;;) {
                        alt.binders.push_back(expect(Tok::Ident, "field binder").text);
                        if (is(Tok::Comma)) { next(); continue; }
                        break;
                    }
                    expect(Tok::RParen, "')'");
                }
                expect(Tok::Arrow, "'->'");
                alt.body = parse_expr();
                cons.push_back(std::move(alt));
            } else if (is(Tok::IntLit) || is(Tok::FloatLit) || is(Tok::CharLit)) {
                Token t = next();
                CaseAltLit alt;
                alt.lit = make_literal(t);
                expect(Tok::Arrow, "'->'");
                alt.body = parse_expr();
                lits.push_back(std::move(alt));
            } else {
                fail("expected case alternative");
            }
            if (is(Tok::Bar)) { next(); continue; }
            break;
        }
        expect(Tok::RBrace, "'}'");
        if (!cons.empty() && !lits.empty())
            throw ParseError(p, "case mixes constructor and literal alternatives");
        if (cons.empty() && !def)
            throw ParseError(p, "non-exhaustive literal case: a default alternative is required");
        if (!cons.empty())
            return mk_case_alg(binder.text, scrut, std::move(cons), def, p);
        return mk_case_lit(binder.text, scrut, std::move(lits), def, p);
    }

    ExprPtr parse_app() {
        ExprPtr e = parse_atom();
        for (;;) {
            if (is(Tok::At)) {
                Pos p = next().pos;
                Token t = cur();
                if (is(Tok::UIdent) || is(Tok::Ident) || is(Tok::KwPrim)) {
                    next();
                    e = mk_app(e, mk_typetok(t.text, p), p);
                } else {
                    fail("expected type name after '@'");
                }
                continue;
            }
            if (is(Tok::Ident) || is(Tok::UIdent) || is(Tok::IntLit) || is(Tok::FloatLit) ||
                is(Tok::CharLit) || is(Tok::LParen)) {
                Pos p = cur().pos;
                e = mk_app(e, parse_atom(), p);
                continue;
            }
            return e;
        }
    }

    ExprPtr parse_atom() {
        Token t = cur();
        switch (t.kind) {
        case Tok::Ident: next(); return mk_var(t.text, t.pos);
        case Tok::UIdent: next(); return mk_conref(t.text, t.pos);
        case Tok::IntLit:
        case Tok::FloatLit:
        case Tok::CharLit: next(); return mk_lit(make_literal(t), t.pos);
        case Tok::LParen: {
            next();
            ExprPtr e = parse_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        default: fail("expected expression");
        }
    }
};

// ---- scope and well-formedness checks ----------------------------------

struct Checker {
    const Module& m;

    [[noreturn]] void fail(Pos p, const std::string& msg) const { throw ParseError(p, msg); }

    void run() {
        check_decls();
        std::set<std::string> env;
        for (const auto& g : m.binds) {
            if (g.recursive) {
                for (const auto& [n, _] : g.binds)
                    if (!env.insert(n).second) fail({}, "duplicate top-level binder " + n);
                for (const auto& [_, rhs] : g.binds) check_expr(*rhs, env);
            } else {
                const auto& [n, rhs] = g.binds[0];
                check_expr(*rhs, env);
                if (!env.insert(n).second) fail({}, "duplicate top-level binder " + n);
            }
        }
        if (!env.count(m.main)) fail({}, "main binding '" + m.main + "' is not defined");
    }

    void check_decls() {
        std::set<std::string> decl_names, ctor_names;
        for (const auto& d : m.decls) {
            if (!decl_names.insert(d.name).second) fail({}, "duplicate datatype " + d.name);
            for (const auto& c : d.ctors)
                if (!ctor_names.insert(c.name).second)
                    fail({}, "duplicate constructor " + c.name);
        }
        for (const auto& d : m.decls)
            for (const auto& c : d.ctors)
                for (const auto& f : c.fields)
                    if (f.kind == FieldSpec::Kind::Ref && !m.find_decl(f.ref))
                        fail({}, "unknown datatype " + f.ref + " in constructor " + c.name);
        // references between distinct declarations must not form a cycle
        for (const auto& d : m.decls) {
            std::set<std::string> seen;
            check_ref_cycle(d, seen);
        }
    }

    void check_ref_cycle(const DataDecl& d, std::set<std::string>& seen) const {
        if (!seen.insert(d.name).second)
            fail({}, "mutually recursive datatype declarations around " + d.name);
        for (const auto& c : d.ctors)
            for (const auto& f : c.fields)
                if (f.kind == FieldSpec::Kind::Ref)
                    check_ref_cycle(*m.find_decl(f.ref), seen);
        seen.erase(d.name);
    }

    void check_expr(const Expr& e, std::set<std::string>& env) {
        switch (e.kind) {
        case Expr::Kind::Var:
            if (!env.count(e.name) && !is_primitive(e.name))
                fail(e.pos, "unbound identifier " + e.name);
            break;
        case Expr::Kind::ConRef:
            if (!m.find_ctor(e.name)) fail(e.pos, "unknown constructor " + e.name);
            break;
        case Expr::Kind::Lit:
        case Expr::Kind::TypeTok:
            break;
        case Expr::Kind::Lam: {
            WithName guard(env, e.name);
            check_expr(*e.a, env);
            break;
        }
        case Expr::Kind::TyLam:
        case Expr::Kind::TypeLet:
            check_expr(*e.a, env);
            break;
        case Expr::Kind::App:
            check_expr(*e.a, env);
            check_expr(*e.b, env);
            break;
        case Expr::Kind::Let: {
            check_expr(*e.a, env);
            WithName guard(env, e.name);
            check_expr(*e.b, env);
            break;
        }
        case Expr::Kind::LetRec: {
            if (e.binds.empty()) fail(e.pos, "letrec needs at least one binding");
            std::set<std::string> names;
            for (const auto& [n, _] : e.binds)
                if (!names.insert(n).second) fail(e.pos, "duplicate letrec binder " + n);
            std::vector<WithName> guards;
            guards.reserve(e.binds.size());
            for (const auto& [n, _] : e.binds) guards.emplace_back(env, n);
            for (const auto& [_, rhs] : e.binds) check_expr(*rhs, env);
            check_expr(*e.a, env);
            break;
        }
        case Expr::Kind::CaseAlg: {
            check_expr(*e.a, env);
            WithName guard(env, e.name);
            const DataDecl* decl = nullptr;
            std::set<std::string> used;
            for (const auto& alt : e.alts_con) {
                int idx = -1;
                const DataDecl* d = m.find_ctor(alt.ctor, &idx);
                if (!d) fail(e.pos, "unknown constructor " + alt.ctor);
                if (decl && decl != d)
                    fail(e.pos, "case alternatives mix constructors of " + decl->name +
                                    " and " + d->name);
                decl = d;
                if (!used.insert(alt.ctor).second)
                    fail(e.pos, "duplicate case alternative for " + alt.ctor);
                if (d->ctors[idx].fields.size() != alt.binders.size())
                    fail(e.pos, "constructor " + alt.ctor + " expects " +
                                    std::to_string(d->ctors[idx].fields.size()) + " fields");
                std::vector<WithName> guards;
                guards.reserve(alt.binders.size());
                for (const auto& b : alt.binders) guards.emplace_back(env, b);
                check_expr(*alt.body, env);
            }
            if (e.def) check_expr(*e.def, env);
            break;
        }
        case Expr::Kind::CaseLit: {
            check_expr(*e.a, env);
            WithName guard(env, e.name);
            for (size_t i = 0; i < e.alts_lit.size(); ++i)
                for (size_t j = i + 1; j < e.alts_lit.size(); ++j)
                    if (e.alts_lit[i].lit.same(e.alts_lit[j].lit))
                        fail(e.pos, "duplicate literal alternative " + e.alts_lit[i].lit.show());
            for (const auto& alt : e.alts_lit) check_expr(*alt.body, env);
            if (e.def) check_expr(*e.def, env);
            break;
        }
        }
    }

    // scoped insertion that restores shadowed names
    struct WithName {
        std::set<std::string>& env;
        std::string name;
        bool added;
        WithName(std::set<std::string>& e, const std::string& n)
            : env(e), name(n), added(e.insert(n).second) {}
        ~WithName() {
            if (added) env.erase(name);
        }
        WithName(WithName&& o) noexcept : env(o.env), name(std::move(o.name)), added(o.added) {
            o.added = false;
        }
        WithName(const WithName&) = delete;
    };
};

} // namespace

Module parse_module(const std::string& source) {
    Lexer lex(source);
    Parser p{lex.run()};
    Module m = p.parse();
    Checker{m}.run();
    return m;
}

} // namespace lzc
