#pragma once

#include "tpcs/rational.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace tpcs {

/// Run-time value of a model variable: boolean, integer, exact rational or a
/// finite tuple of values. There is deliberately no floating-point kind.
class Value {
public:
    enum class Kind { Boolean, Integer, Rational, Tuple };

    Value() : v_(false) {}
    Value(bool b) : v_(b) {}                       // NOLINT: implicit by design
    Value(std::int64_t i) : v_(i) {}               // NOLINT
    Value(int i) : v_(static_cast<std::int64_t>(i)) {} // NOLINT
    Value(Rational r) : v_(std::move(r)) {}        // NOLINT
    static Value tuple(std::vector<Value> elems) {
        Value v;
        v.v_ = std::move(elems);
        return v;
    }

    Kind kind() const { return static_cast<Kind>(v_.index()); }
    bool is_bool() const { return kind() == Kind::Boolean; }
    bool is_int() const { return kind() == Kind::Integer; }
    bool is_rational() const { return kind() == Kind::Rational; }
    bool is_tuple() const { return kind() == Kind::Tuple; }
    bool is_numeric() const { return is_int() || is_rational(); }

    bool as_bool() const { return std::get<bool>(v_); }
    std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
    const Rational& as_rational() const { return std::get<Rational>(v_); }
    const std::vector<Value>& as_tuple() const { return std::get<std::vector<Value>>(v_); }

    /// Numeric view: an integer promotes to the equal rational.
    Rational as_numeric() const {
        return is_int() ? Rational(as_int()) : as_rational();
    }

    friend bool operator==(const Value& a, const Value& b) {
        if (a.v_.index() != b.v_.index()) {
            // Integers and rationals compare by numeric value.
            if (a.is_numeric() && b.is_numeric()) return a.as_numeric() == b.as_numeric();
            return false;
        }
        return a.v_ == b.v_;
    }
    friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

    std::string str() const;

private:
    std::variant<bool, std::int64_t, Rational, std::vector<Value>> v_;
};

/// Declared domain of a variable or channel message.
class VarDomain {
public:
    enum class Kind { Boolean, BoundedInt, Rational, Tuple };

    static VarDomain boolean() { return VarDomain(Kind::Boolean); }
    static VarDomain bounded_int(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) throw ModelError("bounded-integer domain with lo > hi");
        VarDomain d(Kind::BoundedInt);
        d.lo_ = lo;
        d.hi_ = hi;
        return d;
    }
    static VarDomain rational() { return VarDomain(Kind::Rational); }
    static VarDomain tuple(std::vector<VarDomain> parts) {
        VarDomain d(Kind::Tuple);
        d.parts_ = std::move(parts);
        return d;
    }

    Kind kind() const { return kind_; }
    std::int64_t lo() const { return lo_; }
    std::int64_t hi() const { return hi_; }
    const std::vector<VarDomain>& parts() const { return parts_; }

    /// Membership test; recursive for tuples. Integers are members of the
    /// rational domain, but proper rationals are not members of integer ones.
    bool contains(const Value& v) const;

    /// True when every member can be listed (no rational component).
    bool is_finite() const;

    /// Number of members of a finite domain; throws on infinite domains or
    /// when the count does not fit in 64 bits.
    std::uint64_t cardinality() const;

    /// Calls fn with every member of a finite domain, in a fixed order
    /// (false before true, integers ascending, tuples lexicographic).
    void enumerate(const std::function<void(const Value&)>& fn) const;

    friend bool operator==(const VarDomain& a, const VarDomain& b) {
        return a.kind_ == b.kind_ && a.lo_ == b.lo_ && a.hi_ == b.hi_ && a.parts_ == b.parts_;
    }

    std::string str() const;

private:
    explicit VarDomain(Kind k) : kind_(k) {}

    Kind kind_;
    std::int64_t lo_ = 0;
    std::int64_t hi_ = 0;
    std::vector<VarDomain> parts_;
};

/// Spec-level alias for VarDomain::contains.
inline bool value_in_domain(const Value& v, const VarDomain& d) { return d.contains(v); }

} // namespace tpcs
