#pragma once

#include "tpcs/expr.hpp"
#include "tpcs/rational.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tpcs {

/// Static type of a surface (datamodel) expression. Strings are interned to
/// integers during translation and support equality tests only.
enum class SurfaceType { Bool, Int, Rat, Str };

const char* surface_type_name(SurfaceType t);

/// Parsed surface expression: the ECMAScript-flavoured fragment used in
/// conds, assignments and send parameters. Kept as a small tree so the
/// compiler can rewrite Math.random() uses and intern string literals.
struct SurfaceExpr {
    enum class Kind { IntLit, RatLit, BoolLit, StrLit, Ident, Member, Random, Not, Neg, Binary };
    enum class BinOp { Add, Sub, Mul, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

    Kind kind = Kind::BoolLit;
    std::int64_t int_value = 0;
    Rational rat_value;
    bool bool_value = false;
    std::string text;              // Ident name or StrLit value
    std::vector<std::string> path; // Member: e.g. {"_event", "data", "n"}
    BinOp op = BinOp::Add;
    std::vector<SurfaceExpr> kids;

    bool is_bare_random() const { return kind == Kind::Random; }
};

/// Parses the supported fragment:
///   literals        1, 0.25, true, false, 'str', "str"
///   names           datamodel locations, _event.origin, _event.data.<p>
///   operators       + - * ! && || == != < <= > >=, parentheses
///   Math.random()   uniform draw in [0,1), restricted uses
/// Raises ParseError with a position on anything else (notably division).
SurfaceExpr parse_surface_expr(std::string_view text);

/// Name resolution and rewriting hooks used while translating a surface
/// expression into a typed Expr over a program graph's variables.
struct TranslateScope {
    struct Resolved {
        VarId var = 0;
        SurfaceType type = SurfaceType::Int;
    };

    /// Datamodel location (or compiler temporary) by name.
    std::function<std::optional<Resolved>(const std::string&)> ident;
    /// `_event.origin` / `_event.data.<p>`; null when `_event` is not in
    /// scope at this syntactic position.
    std::function<std::optional<Resolved>(std::span<const std::string>)> member;
    /// Intern id of a string literal.
    std::function<std::optional<std::int64_t>(const std::string&)> intern;
    /// Fresh boolean variable pre-sampled with P(true) = p, 0 < p < 1.
    /// Unset when Math.random() is not allowed in this position.
    std::function<VarId(const Rational& p)> bernoulli;
};

struct TranslatedExpr {
    Expr expr;
    SurfaceType type = SurfaceType::Bool;
};

/// Translates a parsed surface expression. Math.random() may appear only in
/// comparisons against numeric constants; each such comparison becomes a
/// reference to a fresh Bernoulli-sampled boolean obtained from the scope.
TranslatedExpr translate_surface(const SurfaceExpr& e, const TranslateScope& scope);

/// Type of the expression without building it (no rewriting hooks needed);
/// used while building the event catalog.
SurfaceType surface_type_of(const SurfaceExpr& e,
                            const std::function<std::optional<SurfaceType>(const std::string&)>& ident_type);

} // namespace tpcs
