#pragma once

#include "tpcs/rational.hpp"
#include "tpcs/trace.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace tpcs {

/// Three-valued verdict of a property over a finite trace. Unknown means
/// the trace seen so far is too short to conclude; True/False verdicts are
/// monotone: they never change when the trace grows.
enum class Verdict : unsigned char { False = 0, True = 1, Unknown = 2 };

inline Verdict not3(Verdict v) {
    if (v == Verdict::Unknown) return Verdict::Unknown;
    return v == Verdict::True ? Verdict::False : Verdict::True;
}
inline Verdict and3(Verdict a, Verdict b) {
    if (a == Verdict::False || b == Verdict::False) return Verdict::False;
    if (a == Verdict::True && b == Verdict::True) return Verdict::True;
    return Verdict::Unknown;
}
inline Verdict or3(Verdict a, Verdict b) {
    if (a == Verdict::True || b == Verdict::True) return Verdict::True;
    if (a == Verdict::False && b == Verdict::False) return Verdict::False;
    return Verdict::Unknown;
}

const char* verdict_name(Verdict v);

/// Interval [lo, hi] with rational endpoints; hi may be infinite.
struct Interval {
    Rational lo;
    std::optional<Rational> hi; // nullopt = unbounded

    static Interval bounded(Rational lo, Rational hi);
    static Interval unbounded(Rational lo = Rational(0));

    bool contains(const Rational& d) const { return lo <= d && (!hi || d <= *hi); }
    bool above(const Rational& d) const { return hi && d > *hi; }
    std::string str() const;
};

/// Metric temporal logic formula over atom ids, with bounded-interval
/// future (Until) and past (Since) operators. Eventually/Globally and
/// Once/Historically are normalized at construction:
///   F[I]φ = true U[I] φ      G[I]φ = ¬(true U[I] ¬φ)
///   O[I]φ = true S[I] φ      H[I]φ = ¬(true S[I] ¬φ)
class Formula {
public:
    enum class Op { True, False, Atom, Not, And, Or, Implies, Until, Since };

    Formula() : Formula(truth(true)) {}

    static Formula truth(bool b);
    static Formula atom(std::uint32_t atom_id);
    static Formula negation(Formula f);
    static Formula conjunction(Formula a, Formula b);
    static Formula disjunction(Formula a, Formula b);
    static Formula implication(Formula a, Formula b);
    static Formula until(Interval I, Formula a, Formula b);
    static Formula since(Interval I, Formula a, Formula b);
    static Formula eventually(Interval I, Formula f);
    static Formula globally(Interval I, Formula f);
    static Formula once(Interval I, Formula f);
    static Formula historically(Interval I, Formula f);

    Op op() const { return node_->op; }
    std::uint32_t atom_id() const { return node_->atom; }
    const Interval& interval() const { return node_->interval; }
    const Formula& left() const { return *node_->left; }
    const Formula& right() const { return *node_->right; }
    bool has_left() const { return node_->left != nullptr; }
    bool has_right() const { return node_->right != nullptr; }

    /// Largest atom id + 1 referenced by the formula (0 if none).
    std::uint32_t atom_count() const;

    std::string str(std::span<const std::string> atom_names = {}) const;

private:
    struct Node {
        Op op;
        std::uint32_t atom = 0;
        Interval interval = Interval::unbounded();
        std::shared_ptr<const Formula> left;
        std::shared_ptr<const Formula> right;
    };
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Formula make(Node n);

    std::shared_ptr<const Node> node_;
};

/// Incremental three-valued evaluation of one formula against a growing
/// timed trace. Observations arrive in timestamp order; after each one the
/// verdict of the formula at position 0 is available, and it becomes
/// conclusive as early as the semantics permits. finish() applies the
/// completed-trace semantics, under which every verdict is definite:
/// an unresolved universal obligation counts as satisfied, an unresolved
/// existential one as violated.
class OnlineMonitor {
public:
    explicit OnlineMonitor(Formula f);
    OnlineMonitor(const OnlineMonitor&);
    OnlineMonitor(OnlineMonitor&&) noexcept;
    OnlineMonitor& operator=(OnlineMonitor) noexcept;
    ~OnlineMonitor();

    /// Appends one observation and returns the root verdict so far.
    Verdict update(const Observation& obs);

    /// Declares the trace complete and returns the definite verdict.
    Verdict finish();

    Verdict current() const { return current_; }
    std::size_t observations() const;

    /// Verdict of the formula at an arbitrary position of the trace seen so
    /// far (open-trace semantics).
    Verdict at(std::size_t position);

    struct Engine; // implementation detail, defined in mtl.cpp

private:
    std::unique_ptr<Engine> engine_;
    Verdict current_ = Verdict::Unknown;
};

/// Three-valued verdict of φ at position i of a finite trace that may still
/// be extended.
Verdict evaluate(const Formula& f, const TimedTrace& trace, std::size_t position);

/// Definite verdict of φ at position i of a completed trace.
Verdict evaluate_complete(const Formula& f, const TimedTrace& trace, std::size_t position);

} // namespace tpcs
