#pragma once

#include "tpcs/value.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tpcs {

/// Index into the variable table the expression is evaluated against.
using VarId = std::uint32_t;

/// Static type of an expression; bounded integers type as Int.
struct ExprType {
    enum class Kind { Bool, Int, Rat, Tuple };
    Kind kind = Kind::Bool;
    std::vector<ExprType> parts;

    static ExprType boolean() { return {Kind::Bool, {}}; }
    static ExprType integer() { return {Kind::Int, {}}; }
    static ExprType rational() { return {Kind::Rat, {}}; }
    static ExprType tuple(std::vector<ExprType> parts) { return {Kind::Tuple, std::move(parts)}; }
    static ExprType of_domain(const VarDomain& d);

    bool is_numeric() const { return kind == Kind::Int || kind == Kind::Rat; }
    friend bool operator==(const ExprType& a, const ExprType& b) {
        return a.kind == b.kind && a.parts == b.parts;
    }
    std::string str() const;
};

/// Side-effect-free expression over typed variables: exact integer/rational
/// arithmetic (+, −, ×), comparisons, boolean connectives, tuple projection
/// and construction. Type-checks once at load time; evaluation is total on
/// type-correct valuations.
class Expr {
public:
    enum class Op {
        BoolConst, IntConst, RatConst, VarRef, TupleProj, MakeTuple,
        Add, Sub, Mul, Neg,
        Eq, Ne, Lt, Le,
        And, Or, Not,
    };

    Expr() : op_(Op::BoolConst), literal_(true) {}

    static Expr bool_const(bool b);
    static Expr int_const(std::int64_t v);
    static Expr rat_const(Rational r);
    static Expr var(VarId id);
    static Expr proj(Expr tuple, std::uint32_t index);
    static Expr make_tuple(std::vector<Expr> elems);

    static Expr add(Expr a, Expr b) { return binary(Op::Add, std::move(a), std::move(b)); }
    static Expr sub(Expr a, Expr b) { return binary(Op::Sub, std::move(a), std::move(b)); }
    static Expr mul(Expr a, Expr b) { return binary(Op::Mul, std::move(a), std::move(b)); }
    static Expr neg(Expr a) { return unary(Op::Neg, std::move(a)); }

    static Expr eq(Expr a, Expr b) { return binary(Op::Eq, std::move(a), std::move(b)); }
    static Expr ne(Expr a, Expr b) { return binary(Op::Ne, std::move(a), std::move(b)); }
    static Expr lt(Expr a, Expr b) { return binary(Op::Lt, std::move(a), std::move(b)); }
    static Expr le(Expr a, Expr b) { return binary(Op::Le, std::move(a), std::move(b)); }
    static Expr gt(Expr a, Expr b) { return lt(std::move(b), std::move(a)); }
    static Expr ge(Expr a, Expr b) { return le(std::move(b), std::move(a)); }

    static Expr land(Expr a, Expr b) { return binary(Op::And, std::move(a), std::move(b)); }
    static Expr lor(Expr a, Expr b) { return binary(Op::Or, std::move(a), std::move(b)); }
    static Expr lnot(Expr a) { return unary(Op::Not, std::move(a)); }

    Op op() const { return op_; }
    const Value& literal() const { return literal_; }
    VarId var_id() const { return var_; }
    std::uint32_t proj_index() const { return index_; }
    const std::vector<Expr>& children() const { return kids_; }

    /// Evaluates against the given valuation slice. Assumes the expression
    /// was type-checked against matching domains.
    Value eval(std::span<const Value> vars) const;

    /// Infers the type against the declared domains or raises ModelError.
    ExprType check(std::span<const VarDomain> domains) const;

    /// Structural rewrite of variable indices (used when composing graphs).
    Expr with_var_offset(VarId offset) const;

    std::string str(std::span<const std::string> var_names = {}) const;

private:
    explicit Expr(Op op) : op_(op) {}
    static Expr unary(Op op, Expr a);
    static Expr binary(Op op, Expr a, Expr b);

    Op op_;
    Value literal_;
    VarId var_ = 0;
    std::uint32_t index_ = 0;
    std::vector<Expr> kids_;
};

/// Truth of a boolean expression under the valuation η.
inline bool eval_guard(const Expr& guard, std::span<const Value> vars) {
    return guard.eval(vars).as_bool();
}

} // namespace tpcs
