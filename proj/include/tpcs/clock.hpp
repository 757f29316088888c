#pragma once

#include "tpcs/rational.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace tpcs {

/// Index into the declared clock set of a model.
using ClockId = std::uint32_t;

/// Assignment of a non-negative time value to every declared clock.
/// All clocks advance at the same rate; individual clocks reset to zero.
class ClockValuation {
public:
    ClockValuation() = default;
    explicit ClockValuation(std::size_t clock_count) : values_(clock_count, Rational(0)) {}
    static ClockValuation of(std::vector<Rational> values) {
        for (const auto& v : values) {
            if (v.is_negative()) throw ModelError("clock value must be non-negative");
        }
        ClockValuation cv;
        cv.values_ = std::move(values);
        return cv;
    }

    std::size_t size() const { return values_.size(); }

    const Rational& at(ClockId id) const {
        if (id >= values_.size()) throw ModelError("unknown clock id " + std::to_string(id));
        return values_[id];
    }

    /// Pointwise ν + t. t must be non-negative.
    ClockValuation advanced(const Rational& t) const {
        if (t.is_negative()) throw ArgumentError("cannot advance clocks by a negative amount");
        ClockValuation out = *this;
        for (auto& v : out.values_) v += t;
        return out;
    }

    /// [Y ↦ 0]ν: zeroes the clocks in Y, leaves the rest unchanged.
    ClockValuation reset(std::span<const ClockId> clocks) const {
        ClockValuation out = *this;
        for (ClockId id : clocks) {
            if (id >= out.values_.size()) throw ModelError("reset of unknown clock id " + std::to_string(id));
            out.values_[id] = Rational(0);
        }
        return out;
    }

    friend bool operator==(const ClockValuation& a, const ClockValuation& b) {
        return a.values_ == b.values_;
    }
    friend bool operator!=(const ClockValuation& a, const ClockValuation& b) { return !(a == b); }

private:
    std::vector<Rational> values_;
};

/// Clock guard over the grammar  x ≤ c | c ≤ x | ¬φ | φ₁ ∧ φ₂  with
/// non-negative rational constants. Derived forms (∨, true, false, x = c)
/// are desugared to the primitive constructors when built; conjunction is
/// stored n-ary and the empty conjunction is the constant true.
class ClockConstraint {
public:
    enum class Kind { AtMost, AtLeast, Not, And };

    /// x ≤ c
    static ClockConstraint at_most(ClockId clock, Rational bound) {
        return leaf(Kind::AtMost, clock, std::move(bound));
    }
    /// c ≤ x
    static ClockConstraint at_least(ClockId clock, Rational bound) {
        return leaf(Kind::AtLeast, clock, std::move(bound));
    }
    static ClockConstraint negation(ClockConstraint inner) {
        ClockConstraint c(Kind::Not);
        c.kids_.push_back(std::move(inner));
        return c;
    }
    static ClockConstraint conjunction(std::vector<ClockConstraint> parts) {
        ClockConstraint c(Kind::And);
        c.kids_ = std::move(parts);
        return c;
    }

    // Derived forms, normalized per the abbreviation rules.
    static ClockConstraint disjunction(ClockConstraint a, ClockConstraint b) {
        return negation(conjunction({negation(std::move(a)), negation(std::move(b))}));
    }
    static ClockConstraint always_true() { return conjunction({}); }
    static ClockConstraint always_false() { return negation(always_true()); }
    /// x = c  desugars to  x ≤ c ∧ c ≤ x.
    static ClockConstraint equals(ClockId clock, const Rational& bound) {
        return conjunction({at_most(clock, bound), at_least(clock, bound)});
    }

    Kind kind() const { return kind_; }
    ClockId clock() const { return clock_; }
    const Rational& bound() const { return bound_; }
    const std::vector<ClockConstraint>& children() const { return kids_; }
    bool is_trivially_true() const { return kind_ == Kind::And && kids_.empty(); }

    /// ν ⊨ φ by structural recursion with exact comparison.
    bool eval(const ClockValuation& nu) const {
        switch (kind_) {
        case Kind::AtMost:
            return nu.at(clock_) <= bound_;
        case Kind::AtLeast:
            return bound_ <= nu.at(clock_);
        case Kind::Not:
            return !kids_.front().eval(nu);
        case Kind::And:
            for (const auto& k : kids_) {
                if (!k.eval(nu)) return false;
            }
            return true;
        }
        return false;
    }

private:
    explicit ClockConstraint(Kind k) : kind_(k) {}

    static ClockConstraint leaf(Kind k, ClockId clock, Rational bound) {
        if (bound.is_negative()) throw ModelError("clock constraint constant must be non-negative");
        ClockConstraint c(k);
        c.clock_ = clock;
        c.bound_ = std::move(bound);
        return c;
    }

    Kind kind_;
    ClockId clock_ = 0;
    Rational bound_;
    std::vector<ClockConstraint> kids_;
};

/// ν ⊨ φ. Raises ModelError if φ mentions a clock outside ν's domain.
inline bool eval_constraint(const ClockConstraint& phi, const ClockValuation& nu) {
    return phi.eval(nu);
}

/// Pointwise ν + t.
inline ClockValuation advance(const ClockValuation& nu, const Rational& t) {
    return nu.advanced(t);
}

/// [Y ↦ 0]ν.
inline ClockValuation reset(const ClockValuation& nu, std::span<const ClockId> clocks) {
    return nu.reset(clocks);
}

} // namespace tpcs
