#include "tpcs/expr_parser.hpp"

#include "tpcs/errors.hpp"

#include <cctype>

namespace tpcs {

const char* surface_type_name(SurfaceType t) {
    switch (t) {
    case SurfaceType::Bool: return "bool";
    case SurfaceType::Int: return "int";
    case SurfaceType::Rat: return "number";
    case SurfaceType::Str: return "string";
    }
    return "?";
}

namespace {

struct Token {
    enum class Kind { Number, Ident, Str, Op, End };
    Kind kind = Kind::End;
    std::string text;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }
    bool accept_op(std::string_view op) {
        if (tok_.kind == Token::Kind::Op && tok_.text == op) {
            advance();
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("expression error at offset " + std::to_string(tok_.pos) + ": " + msg +
                         " in '" + std::string(src_) + "'");
    }

private:
    void advance() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
        tok_ = Token{};
        tok_.pos = i_;
        if (i_ >= src_.size()) return;
        char c = src_[i_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = i_;
            while (i_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[i_])) || src_[i_] == '.'))
                ++i_;
            tok_ = {Token::Kind::Number, std::string(src_.substr(start, i_ - start)), start};
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i_;
            while (i_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
                ++i_;
            tok_ = {Token::Kind::Ident, std::string(src_.substr(start, i_ - start)), start};
            return;
        }
        if (c == '\'' || c == '"') {
            std::size_t start = ++i_;
            while (i_ < src_.size() && src_[i_] != c) ++i_;
            if (i_ >= src_.size())
                throw ParseError("unterminated string literal in '" + std::string(src_) + "'");
            tok_ = {Token::Kind::Str, std::string(src_.substr(start, i_ - start)), start - 1};
            ++i_;
            return;
        }
        static const std::string_view two_char[] = {"==", "!=", "<=", ">=", "&&", "||", "==="};
        for (auto op : two_char) {
            if (src_.substr(i_).starts_with(op)) {
                // normalize === to ==
                std::string text = op == "===" ? "==" : std::string(op);
                std::size_t len = op.size();
                tok_ = {Token::Kind::Op, text, i_};
                i_ += len;
                return;
            }
        }
        if (std::string_view("+-*()<>!.,").find(c) != std::string_view::npos) {
            tok_ = {Token::Kind::Op, std::string(1, c), i_};
            ++i_;
            return;
        }
        if (c == '/')
            throw ParseError("division is not supported in model expressions ('" + std::string(src_) + "')");
        throw ParseError("unexpected character '" + std::string(1, c) + "' in expression '" +
                         std::string(src_) + "'");
    }

    std::string_view src_;
    std::size_t i_ = 0;
    Token tok_;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) {}

    SurfaceExpr parse() {
        SurfaceExpr e = parse_or();
        if (lex_.peek().kind != Token::Kind::End) lex_.fail("trailing input");
        return e;
    }

private:
    SurfaceExpr parse_or() {
        SurfaceExpr e = parse_and();
        while (lex_.accept_op("||")) e = binary(SurfaceExpr::BinOp::Or, std::move(e), parse_and());
        return e;
    }
    SurfaceExpr parse_and() {
        SurfaceExpr e = parse_equality();
        while (lex_.accept_op("&&")) e = binary(SurfaceExpr::BinOp::And, std::move(e), parse_equality());
        return e;
    }
    SurfaceExpr parse_equality() {
        SurfaceExpr e = parse_relational();
        for (;;) {
            if (lex_.accept_op("==")) e = binary(SurfaceExpr::BinOp::Eq, std::move(e), parse_relational());
            else if (lex_.accept_op("!=")) e = binary(SurfaceExpr::BinOp::Ne, std::move(e), parse_relational());
            else return e;
        }
    }
    SurfaceExpr parse_relational() {
        SurfaceExpr e = parse_additive();
        for (;;) {
            if (lex_.accept_op("<=")) e = binary(SurfaceExpr::BinOp::Le, std::move(e), parse_additive());
            else if (lex_.accept_op(">=")) e = binary(SurfaceExpr::BinOp::Ge, std::move(e), parse_additive());
            else if (lex_.accept_op("<")) e = binary(SurfaceExpr::BinOp::Lt, std::move(e), parse_additive());
            else if (lex_.accept_op(">")) e = binary(SurfaceExpr::BinOp::Gt, std::move(e), parse_additive());
            else return e;
        }
    }
    SurfaceExpr parse_additive() {
        SurfaceExpr e = parse_multiplicative();
        for (;;) {
            if (lex_.accept_op("+")) e = binary(SurfaceExpr::BinOp::Add, std::move(e), parse_multiplicative());
            else if (lex_.accept_op("-")) e = binary(SurfaceExpr::BinOp::Sub, std::move(e), parse_multiplicative());
            else return e;
        }
    }
    SurfaceExpr parse_multiplicative() {
        SurfaceExpr e = parse_unary();
        while (lex_.accept_op("*")) e = binary(SurfaceExpr::BinOp::Mul, std::move(e), parse_unary());
        return e;
    }
    SurfaceExpr parse_unary() {
        if (lex_.accept_op("!")) {
            SurfaceExpr e;
            e.kind = SurfaceExpr::Kind::Not;
            e.kids.push_back(parse_unary());
            return e;
        }
        if (lex_.accept_op("-")) {
            SurfaceExpr e;
            e.kind = SurfaceExpr::Kind::Neg;
            e.kids.push_back(parse_unary());
            return e;
        }
        return parse_primary();
    }

    SurfaceExpr parse_primary() {
        const Token& t = lex_.peek();
        switch (t.kind) {
        case Token::Kind::Number: {
            Token tok = lex_.take();
            auto r = Rational::parse(tok.text);
            if (!r) lex_.fail("bad numeric literal '" + tok.text + "'");
            SurfaceExpr e;
            if (r->is_integer()) {
                e.kind = SurfaceExpr::Kind::IntLit;
                e.int_value = r->num();
            } else {
                e.kind = SurfaceExpr::Kind::RatLit;
                e.rat_value = *r;
            }
            return e;
        }
        case Token::Kind::Str: {
            Token tok = lex_.take();
            SurfaceExpr e;
            e.kind = SurfaceExpr::Kind::StrLit;
            e.text = tok.text;
            return e;
        }
        case Token::Kind::Ident: {
            Token tok = lex_.take();
            if (tok.text == "true" || tok.text == "false") {
                SurfaceExpr e;
                e.kind = SurfaceExpr::Kind::BoolLit;
                e.bool_value = tok.text == "true";
                return e;
            }
            std::vector<std::string> path{tok.text};
            while (lex_.accept_op(".")) {
                const Token& next = lex_.peek();
                if (next.kind != Token::Kind::Ident) lex_.fail("expected a name after '.'");
                path.push_back(lex_.take().text);
            }
            if (path.size() == 2 && path[0] == "Math" && path[1] == "random") {
                if (!lex_.accept_op("(")) lex_.fail("Math.random needs ()");
                if (!lex_.accept_op(")")) lex_.fail("Math.random takes no arguments");
                SurfaceExpr e;
                e.kind = SurfaceExpr::Kind::Random;
                return e;
            }
            if (lex_.peek().kind == Token::Kind::Op && lex_.peek().text == "(")
                lex_.fail("function calls other than Math.random() are not supported");
            SurfaceExpr e;
            if (path.size() == 1) {
                e.kind = SurfaceExpr::Kind::Ident;
                e.text = path[0];
            } else {
                e.kind = SurfaceExpr::Kind::Member;
                e.path = std::move(path);
            }
            return e;
        }
        case Token::Kind::Op:
            if (t.text == "(") {
                lex_.take();
                SurfaceExpr e = parse_or();
                if (!lex_.accept_op(")")) lex_.fail("missing ')'");
                return e;
            }
            break;
        case Token::Kind::End:
            break;
        }
        lex_.fail("expected an expression");
    }

    static SurfaceExpr binary(SurfaceExpr::BinOp op, SurfaceExpr a, SurfaceExpr b) {
        SurfaceExpr e;
        e.kind = SurfaceExpr::Kind::Binary;
        e.op = op;
        e.kids.push_back(std::move(a));
        e.kids.push_back(std::move(b));
        return e;
    }

    Lexer lex_;
};

bool is_comparison(SurfaceExpr::BinOp op) {
    switch (op) {
    case SurfaceExpr::BinOp::Eq:
    case SurfaceExpr::BinOp::Ne:
    case SurfaceExpr::BinOp::Lt:
    case SurfaceExpr::BinOp::Le:
    case SurfaceExpr::BinOp::Gt:
    case SurfaceExpr::BinOp::Ge:
        return true;
    default:
        return false;
    }
}

/// Numeric literal value of an (optionally negated) constant.
std::optional<Rational> const_numeric(const SurfaceExpr& e) {
    if (e.kind == SurfaceExpr::Kind::IntLit) return Rational(e.int_value);
    if (e.kind == SurfaceExpr::Kind::RatLit) return e.rat_value;
    if (e.kind == SurfaceExpr::Kind::Neg) {
        auto inner = const_numeric(e.kids[0]);
        if (inner) return -*inner;
    }
    return std::nullopt;
}

/// P(random CMP c) for a uniform draw in [0,1).
Rational random_comparison_probability(SurfaceExpr::BinOp op, const Rational& c, bool random_on_left) {
    SurfaceExpr::BinOp norm = op;
    if (!random_on_left) {
        switch (op) { // mirror the comparison
        case SurfaceExpr::BinOp::Lt: norm = SurfaceExpr::BinOp::Gt; break;
        case SurfaceExpr::BinOp::Le: norm = SurfaceExpr::BinOp::Ge; break;
        case SurfaceExpr::BinOp::Gt: norm = SurfaceExpr::BinOp::Lt; break;
        case SurfaceExpr::BinOp::Ge: norm = SurfaceExpr::BinOp::Le; break;
        default: break;
        }
    }
    Rational zero(0);
    Rational one(1);
    Rational clamped = c;
    if (clamped < zero) clamped = zero;
    if (clamped > one) clamped = one;
    switch (norm) {
    case SurfaceExpr::BinOp::Lt:
    case SurfaceExpr::BinOp::Le:
        // P(X < c) = P(X ≤ c) = c for a continuous draw
        return clamped;
    case SurfaceExpr::BinOp::Gt:
    case SurfaceExpr::BinOp::Ge:
        return one - clamped;
    default:
        throw ParseError("Math.random() supports only <, <=, > and >= comparisons");
    }
}

} // namespace

SurfaceExpr parse_surface_expr(std::string_view text) { return Parser(text).parse(); }

namespace {

TranslatedExpr translate_rec(const SurfaceExpr& e, const TranslateScope& scope); // fwd

TranslatedExpr translate_random_comparison(const SurfaceExpr& e, const TranslateScope& scope) {
    const SurfaceExpr& lhs = e.kids[0];
    const SurfaceExpr& rhs = e.kids[1];
    bool left_random = lhs.is_bare_random();
    const SurfaceExpr& other = left_random ? rhs : lhs;
    auto c = const_numeric(other);
    if (!c) throw ParseError("Math.random() may only be compared against a numeric constant");
    if (!scope.bernoulli) throw ParseError("Math.random() is not allowed in this position");
    Rational p = random_comparison_probability(e.op, *c, left_random);
    if (p == Rational(0)) return {Expr::bool_const(false), SurfaceType::Bool};
    if (p == Rational(1)) return {Expr::bool_const(true), SurfaceType::Bool};
    VarId var = scope.bernoulli(p);
    return {Expr::var(var), SurfaceType::Bool};
}

TranslatedExpr translate_rec(const SurfaceExpr& e, const TranslateScope& scope) {
    switch (e.kind) {
    case SurfaceExpr::Kind::IntLit:
        return {Expr::int_const(e.int_value), SurfaceType::Int};
    case SurfaceExpr::Kind::RatLit:
        return {Expr::rat_const(e.rat_value), SurfaceType::Rat};
    case SurfaceExpr::Kind::BoolLit:
        return {Expr::bool_const(e.bool_value), SurfaceType::Bool};
    case SurfaceExpr::Kind::StrLit: {
        if (!scope.intern) throw ParseError("string literals are not allowed in this position");
        auto id = scope.intern(e.text);
        if (!id) throw ParseError("unknown string literal '" + e.text + "'");
        return {Expr::int_const(*id), SurfaceType::Str};
    }
    case SurfaceExpr::Kind::Ident: {
        if (!scope.ident) throw ParseError("names are not allowed in this position");
        auto r = scope.ident(e.text);
        if (!r) throw ParseError("unknown name '" + e.text + "'");
        return {Expr::var(r->var), r->type};
    }
    case SurfaceExpr::Kind::Member: {
        if (!scope.member) throw ParseError("'" + e.path.front() + ".…' is not allowed in this position");
        auto r = scope.member(e.path);
        if (!r) {
            std::string full;
            for (const auto& part : e.path) full += (full.empty() ? "" : ".") + part;
            throw ParseError("unknown name '" + full + "'");
        }
        return {Expr::var(r->var), r->type};
    }
    case SurfaceExpr::Kind::Random:
        throw ParseError("Math.random() may only be compared against a constant "
                         "or assigned to a datamodel location");
    case SurfaceExpr::Kind::Not: {
        TranslatedExpr a = translate_rec(e.kids[0], scope);
        if (a.type != SurfaceType::Bool) throw ParseError("'!' applied to a non-boolean");
        return {Expr::lnot(std::move(a.expr)), SurfaceType::Bool};
    }
    case SurfaceExpr::Kind::Neg: {
        TranslatedExpr a = translate_rec(e.kids[0], scope);
        if (a.type != SurfaceType::Int && a.type != SurfaceType::Rat)
            throw ParseError("unary '-' applied to a non-number");
        return {Expr::neg(std::move(a.expr)), a.type};
    }
    case SurfaceExpr::Kind::Binary:
        break;
    }

    // Binary: rewrite Math.random() comparisons first.
    if (is_comparison(e.op) && (e.kids[0].is_bare_random() || e.kids[1].is_bare_random()))
        return translate_random_comparison(e, scope);

    TranslatedExpr a = translate_rec(e.kids[0], scope);
    TranslatedExpr b = translate_rec(e.kids[1], scope);
    auto numeric = [](const TranslatedExpr& t) {
        return t.type == SurfaceType::Int || t.type == SurfaceType::Rat;
    };
    switch (e.op) {
    case SurfaceExpr::BinOp::Add:
    case SurfaceExpr::BinOp::Sub:
    case SurfaceExpr::BinOp::Mul: {
        if (!numeric(a) || !numeric(b)) throw ParseError("arithmetic on non-numeric operands");
        SurfaceType t = (a.type == SurfaceType::Rat || b.type == SurfaceType::Rat) ? SurfaceType::Rat
                                                                                   : SurfaceType::Int;
        Expr out = e.op == SurfaceExpr::BinOp::Add ? Expr::add(std::move(a.expr), std::move(b.expr))
                   : e.op == SurfaceExpr::BinOp::Sub ? Expr::sub(std::move(a.expr), std::move(b.expr))
                                                     : Expr::mul(std::move(a.expr), std::move(b.expr));
        return {std::move(out), t};
    }
    case SurfaceExpr::BinOp::Eq:
    case SurfaceExpr::BinOp::Ne: {
        bool ok = (numeric(a) && numeric(b)) || a.type == b.type;
        if (!ok)
            throw ParseError(std::string("cannot compare ") + surface_type_name(a.type) + " with " +
                             surface_type_name(b.type));
        Expr out = e.op == SurfaceExpr::BinOp::Eq ? Expr::eq(std::move(a.expr), std::move(b.expr))
                                                  : Expr::ne(std::move(a.expr), std::move(b.expr));
        return {std::move(out), SurfaceType::Bool};
    }
    case SurfaceExpr::BinOp::Lt:
    case SurfaceExpr::BinOp::Le:
    case SurfaceExpr::BinOp::Gt:
    case SurfaceExpr::BinOp::Ge: {
        if (!numeric(a) || !numeric(b))
            throw ParseError("ordering comparison on non-numeric operands");
        Expr out = e.op == SurfaceExpr::BinOp::Lt ? Expr::lt(std::move(a.expr), std::move(b.expr))
                   : e.op == SurfaceExpr::BinOp::Le ? Expr::le(std::move(a.expr), std::move(b.expr))
                   : e.op == SurfaceExpr::BinOp::Gt ? Expr::gt(std::move(a.expr), std::move(b.expr))
                                                    : Expr::ge(std::move(a.expr), std::move(b.expr));
        return {std::move(out), SurfaceType::Bool};
    }
    case SurfaceExpr::BinOp::And:
    case SurfaceExpr::BinOp::Or: {
        if (a.type != SurfaceType::Bool || b.type != SurfaceType::Bool)
            throw ParseError("'&&'/'||' applied to non-booleans");
        Expr out = e.op == SurfaceExpr::BinOp::And ? Expr::land(std::move(a.expr), std::move(b.expr))
                                                   : Expr::lor(std::move(a.expr), std::move(b.expr));
        return {std::move(out), SurfaceType::Bool};
    }
    }
    throw ParseError("unhandled surface operator");
}

} // namespace

TranslatedExpr translate_surface(const SurfaceExpr& e, const TranslateScope& scope) {
    return translate_rec(e, scope);
}

SurfaceType surface_type_of(const SurfaceExpr& e,
                            const std::function<std::optional<SurfaceType>(const std::string&)>& ident_type) {
    switch (e.kind) {
    case SurfaceExpr::Kind::IntLit: return SurfaceType::Int;
    case SurfaceExpr::Kind::RatLit: return SurfaceType::Rat;
    case SurfaceExpr::Kind::BoolLit: return SurfaceType::Bool;
    case SurfaceExpr::Kind::StrLit: return SurfaceType::Str;
    case SurfaceExpr::Kind::Ident: {
        if (auto t = ident_type(e.text)) return *t;
        throw ParseError("unknown name '" + e.text + "'");
    }
    case SurfaceExpr::Kind::Member:
        throw ParseError("'_event' values cannot be used in this position");
    case SurfaceExpr::Kind::Random:
        return SurfaceType::Rat;
    case SurfaceExpr::Kind::Not:
        return SurfaceType::Bool;
    case SurfaceExpr::Kind::Neg:
        return surface_type_of(e.kids[0], ident_type);
    case SurfaceExpr::Kind::Binary:
        switch (e.op) {
        case SurfaceExpr::BinOp::Add:
        case SurfaceExpr::BinOp::Sub:
        case SurfaceExpr::BinOp::Mul: {
            SurfaceType a = surface_type_of(e.kids[0], ident_type);
            SurfaceType b = surface_type_of(e.kids[1], ident_type);
            return (a == SurfaceType::Rat || b == SurfaceType::Rat) ? SurfaceType::Rat : SurfaceType::Int;
        }
        default:
            return SurfaceType::Bool;
        }
    }
    throw ParseError("unhandled surface expression");
}

} // namespace tpcs
