#include "tpcs/expr.hpp"

#include "tpcs/errors.hpp"

namespace tpcs {

ExprType ExprType::of_domain(const VarDomain& d) {
    switch (d.kind()) {
    case VarDomain::Kind::Boolean:
        return boolean();
    case VarDomain::Kind::BoundedInt:
        return integer();
    case VarDomain::Kind::Rational:
        return rational();
    case VarDomain::Kind::Tuple: {
        std::vector<ExprType> parts;
        parts.reserve(d.parts().size());
        for (const auto& p : d.parts()) parts.push_back(of_domain(p));
        return tuple(std::move(parts));
    }
    }
    return boolean();
}

std::string ExprType::str() const {
    switch (kind) {
    case Kind::Bool:
        return "bool";
    case Kind::Int:
        return "int";
    case Kind::Rat:
        return "rational";
    case Kind::Tuple: {
        std::string out = "tuple(";
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i > 0) out += ", ";
            out += parts[i].str();
        }
        return out + ")";
    }
    }
    return {};
}

Expr Expr::bool_const(bool b) {
    Expr e(Op::BoolConst);
    e.literal_ = Value(b);
    return e;
}

Expr Expr::int_const(std::int64_t v) {
    Expr e(Op::IntConst);
    e.literal_ = Value(v);
    return e;
}

Expr Expr::rat_const(Rational r) {
    Expr e(Op::RatConst);
    e.literal_ = Value(std::move(r));
    return e;
}

Expr Expr::var(VarId id) {
    Expr e(Op::VarRef);
    e.var_ = id;
    return e;
}

Expr Expr::proj(Expr tuple, std::uint32_t index) {
    Expr e(Op::TupleProj);
    e.index_ = index;
    e.kids_.push_back(std::move(tuple));
    return e;
}

Expr Expr::make_tuple(std::vector<Expr> elems) {
    Expr e(Op::MakeTuple);
    e.kids_ = std::move(elems);
    return e;
}

Expr Expr::unary(Op op, Expr a) {
    Expr e(op);
    e.kids_.push_back(std::move(a));
    return e;
}

Expr Expr::binary(Op op, Expr a, Expr b) {
    Expr e(op);
    e.kids_.push_back(std::move(a));
    e.kids_.push_back(std::move(b));
    return e;
}

namespace {

std::int64_t checked(__int128 v, const char* what) {
    if (v > INT64_MAX || v < INT64_MIN) throw ModelError(std::string("integer overflow in ") + what);
    return static_cast<std::int64_t>(v);
}

Value arith(Expr::Op op, const Value& a, const Value& b) {
    if (a.is_int() && b.is_int()) {
        __int128 x = a.as_int();
        __int128 y = b.as_int();
        switch (op) {
        case Expr::Op::Add: return Value(checked(x + y, "+"));
        case Expr::Op::Sub: return Value(checked(x - y, "-"));
        case Expr::Op::Mul: return Value(checked(x * y, "*"));
        default: break;
        }
    }
    Rational x = a.as_numeric();
    Rational y = b.as_numeric();
    switch (op) {
    case Expr::Op::Add: return Value(x + y);
    case Expr::Op::Sub: return Value(x - y);
    case Expr::Op::Mul: return Value(x * y);
    default: break;
    }
    throw ModelError("not an arithmetic operator");
}

} // namespace

Value Expr::eval(std::span<const Value> vars) const {
    switch (op_) {
    case Op::BoolConst:
    case Op::IntConst:
    case Op::RatConst:
        return literal_;
    case Op::VarRef:
        if (var_ >= vars.size()) throw ModelError("reference to unknown variable index " + std::to_string(var_));
        return vars[var_];
    case Op::TupleProj: {
        Value t = kids_[0].eval(vars);
        return t.as_tuple()[index_];
    }
    case Op::MakeTuple: {
        std::vector<Value> elems;
        elems.reserve(kids_.size());
        for (const auto& k : kids_) elems.push_back(k.eval(vars));
        return Value::tuple(std::move(elems));
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
        return arith(op_, kids_[0].eval(vars), kids_[1].eval(vars));
    case Op::Neg: {
        Value v = kids_[0].eval(vars);
        if (v.is_int()) return Value(checked(-static_cast<__int128>(v.as_int()), "negation"));
        return Value(-v.as_rational());
    }
    case Op::Eq:
        return Value(kids_[0].eval(vars) == kids_[1].eval(vars));
    case Op::Ne:
        return Value(kids_[0].eval(vars) != kids_[1].eval(vars));
    case Op::Lt:
        return Value(kids_[0].eval(vars).as_numeric() < kids_[1].eval(vars).as_numeric());
    case Op::Le:
        return Value(kids_[0].eval(vars).as_numeric() <= kids_[1].eval(vars).as_numeric());
    case Op::And:
        return Value(kids_[0].eval(vars).as_bool() && kids_[1].eval(vars).as_bool());
    case Op::Or:
        return Value(kids_[0].eval(vars).as_bool() || kids_[1].eval(vars).as_bool());
    case Op::Not:
        return Value(!kids_[0].eval(vars).as_bool());
    }
    throw ModelError("unhandled expression node");
}

ExprType Expr::check(std::span<const VarDomain> domains) const {
    auto require = [](bool cond, const std::string& msg) {
        if (!cond) throw ModelError("expression type error: " + msg);
    };
    switch (op_) {
    case Op::BoolConst:
        return ExprType::boolean();
    case Op::IntConst:
        return ExprType::integer();
    case Op::RatConst:
        return ExprType::rational();
    case Op::VarRef:
        require(var_ < domains.size(), "reference to undeclared variable index " + std::to_string(var_));
        return ExprType::of_domain(domains[var_]);
    case Op::TupleProj: {
        ExprType t = kids_[0].check(domains);
        require(t.kind == ExprType::Kind::Tuple, "projection applied to a non-tuple");
        require(index_ < t.parts.size(), "tuple projection index out of range");
        return t.parts[index_];
    }
    case Op::MakeTuple: {
        std::vector<ExprType> parts;
        parts.reserve(kids_.size());
        for (const auto& k : kids_) parts.push_back(k.check(domains));
        return ExprType::tuple(std::move(parts));
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul: {
        ExprType a = kids_[0].check(domains);
        ExprType b = kids_[1].check(domains);
        require(a.is_numeric() && b.is_numeric(), "arithmetic on non-numeric operands");
        if (a.kind == ExprType::Kind::Rat || b.kind == ExprType::Kind::Rat) return ExprType::rational();
        return ExprType::integer();
    }
    case Op::Neg: {
        ExprType a = kids_[0].check(domains);
        require(a.is_numeric(), "negation of a non-numeric operand");
        return a;
    }
    case Op::Eq:
    case Op::Ne: {
        ExprType a = kids_[0].check(domains);
        ExprType b = kids_[1].check(domains);
        bool ok = (a == b) || (a.is_numeric() && b.is_numeric());
        require(ok, "equality between incompatible types " + a.str() + " and " + b.str());
        return ExprType::boolean();
    }
    case Op::Lt:
    case Op::Le: {
        ExprType a = kids_[0].check(domains);
        ExprType b = kids_[1].check(domains);
        require(a.is_numeric() && b.is_numeric(), "ordering on non-numeric operands");
        return ExprType::boolean();
    }
    case Op::And:
    case Op::Or: {
        require(kids_[0].check(domains).kind == ExprType::Kind::Bool, "left operand of a connective is not boolean");
        require(kids_[1].check(domains).kind == ExprType::Kind::Bool, "right operand of a connective is not boolean");
        return ExprType::boolean();
    }
    case Op::Not:
        require(kids_[0].check(domains).kind == ExprType::Kind::Bool, "negation of a non-boolean");
        return ExprType::boolean();
    }
    throw ModelError("unhandled expression node");
}

Expr Expr::with_var_offset(VarId offset) const {
    Expr out = *this;
    if (out.op_ == Op::VarRef) out.var_ += offset;
    for (auto& k : out.kids_) k = k.with_var_offset(offset);
    return out;
}

std::string Expr::str(std::span<const std::string> var_names) const {
    auto name = [&](VarId id) {
        if (id < var_names.size()) return var_names[id];
        return "v" + std::to_string(id);
    };
    switch (op_) {
    case Op::BoolConst:
    case Op::IntConst:
    case Op::RatConst:
        return literal_.str();
    case Op::VarRef:
        return name(var_);
    case Op::TupleProj:
        return kids_[0].str(var_names) + "[" + std::to_string(index_) + "]";
    case Op::MakeTuple: {
        std::string out = "(";
        for (std::size_t i = 0; i < kids_.size(); ++i) {
            if (i > 0) out += ", ";
            out += kids_[i].str(var_names);
        }
        return out + ")";
    }
    case Op::Add: return "(" + kids_[0].str(var_names) + " + " + kids_[1].str(var_names) + ")";
    case Op::Sub: return "(" + kids_[0].str(var_names) + " - " + kids_[1].str(var_names) + ")";
    case Op::Mul: return "(" + kids_[0].str(var_names) + " * " + kids_[1].str(var_names) + ")";
    case Op::Neg: return "(-" + kids_[0].str(var_names) + ")";
    case Op::Eq: return "(" + kids_[0].str(var_names) + " = " + kids_[1].str(var_names) + ")";
    case Op::Ne: return "(" + kids_[0].str(var_names) + " != " + kids_[1].str(var_names) + ")";
    case Op::Lt: return "(" + kids_[0].str(var_names) + " < " + kids_[1].str(var_names) + ")";
    case Op::Le: return "(" + kids_[0].str(var_names) + " <= " + kids_[1].str(var_names) + ")";
    case Op::And: return "(" + kids_[0].str(var_names) + " and " + kids_[1].str(var_names) + ")";
    case Op::Or: return "(" + kids_[0].str(var_names) + " or " + kids_[1].str(var_names) + ")";
    case Op::Not: return "(not " + kids_[0].str(var_names) + ")";
    }
    return {};
}

} // namespace tpcs
