#pragma once

#include "tpcs/clock.hpp"
#include "tpcs/comm.hpp"
#include "tpcs/expr.hpp"
#include "tpcs/rng.hpp"
#include "tpcs/trace.hpp"

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace tpcs {

using LocationId = std::uint32_t;
using ActionId = std::uint32_t;

struct VarDecl {
    std::string name;
    VarDomain domain;
};

struct ClockDecl {
    std::string name;
};

struct LocationInfo {
    std::string name;
};

struct Assignment {
    VarId var = 0;
    Expr value;
};

/// One probabilistic alternative of an effect.
struct EffectBranch {
    Rational probability;
    std::vector<Assignment> updates;
};

/// Effect of a transition: a distribution over update lists. Branch
/// probabilities are exact rationals in (0,1] summing to exactly 1; the
/// deterministic case is the single branch with probability 1. Assignments
/// within a branch are simultaneous: every right-hand side is evaluated in
/// the pre-state.
class Effect {
public:
    Effect() : branches_{EffectBranch{Rational(1), {}}} {}

    static Effect deterministic(std::vector<Assignment> updates = {}) {
        Effect e;
        e.branches_ = {EffectBranch{Rational(1), std::move(updates)}};
        return e;
    }

    static Effect probabilistic(std::vector<EffectBranch> branches) {
        if (branches.empty()) throw ModelError("effect needs at least one branch");
        Rational total(0);
        for (const auto& b : branches) {
            if (!(Rational(0) < b.probability) || b.probability > Rational(1))
                throw ModelError("branch probability must lie in (0,1]");
            total += b.probability;
        }
        if (total != Rational(1)) throw ModelError("branch probabilities must sum to 1, got " + total.str());
        Effect e;
        e.branches_ = std::move(branches);
        return e;
    }

    const std::vector<EffectBranch>& branches() const { return branches_; }
    bool is_deterministic() const { return branches_.size() == 1; }

    /// Samples a branch index with the declared probabilities, exactly:
    /// the draw is uniform over the common denominator of the branch
    /// probabilities, so no floating point is involved.
    std::size_t sample_branch(Rng& rng) const;

private:
    std::vector<EffectBranch> branches_;
};

/// Guarded conditional transition, optionally labelled with a communication
/// action (only meaningful inside a channel system).
struct PgTransition {
    LocationId source = 0;
    ActionId action = 0;
    Expr guard = Expr::bool_const(true);
    ClockConstraint clock_guard = ClockConstraint::always_true();
    std::vector<ClockId> resets;
    Effect effect;
    LocationId target = 0;
    std::optional<CommAction> comm;
};

/// ⟨l, η, ν⟩: current location, variable valuation and clock valuation.
struct PgState {
    LocationId location = 0;
    std::vector<Value> valuation;
    ClockValuation clocks;

    friend bool operator==(const PgState& a, const PgState& b) {
        return a.location == b.location && a.valuation == b.valuation && a.clocks == b.clocks;
    }
};

/// Program graph with typed variables, clocks and probabilistic effects.
/// The plain, probabilistic, timed and probabilistic-timed variants are all
/// degenerate cases of this one structure (no clocks, single-branch
/// effects, ...). Immutable after validate(); shareable across threads.
struct ProgramGraph {
    std::string name;
    std::vector<LocationInfo> locations;
    std::vector<LocationId> initial_locations;
    std::vector<VarDecl> variables;
    std::vector<ClockDecl> clocks;
    Expr initial_condition = Expr::bool_const(true);
    /// Concrete start valuation supplied by a frontend; required when the
    /// variable domains are not finitely enumerable.
    std::optional<std::vector<Value>> initial_valuation;
    std::vector<PgTransition> transitions;
    std::vector<std::string> actions;

    /// Time grid: the simulator advances time in multiples of this quantum,
    /// up to `time_horizon` quanta, when no transition is enabled "now".
    Rational time_quantum = Rational(1);
    std::uint32_t time_horizon = 10000;

    /// Checks referential integrity, type-correctness of guards and
    /// updates, and the effect/probability invariants. Fills the
    /// by-source transition index. Must be called before simulation.
    void validate();

    const std::vector<std::size_t>& outgoing(LocationId loc) const { return by_source_.at(loc); }

    void check_clock_refs(const ClockConstraint& c) const;

    std::vector<VarDomain> domains() const {
        std::vector<VarDomain> out;
        out.reserve(variables.size());
        for (const auto& v : variables) out.push_back(v.domain);
        return out;
    }

private:
    std::vector<std::vector<std::size_t>> by_source_;
};

/// Chooses one alternative among `count`; the default draws uniformly.
using Resolver = std::function<std::size_t(std::size_t count, Rng& rng)>;

Resolver uniform_resolver();

/// Transitions from s's location whose guard and clock guard hold, in model
/// declaration order. Communication-labelled transitions are excluded: they
/// only fire inside a channel system.
std::vector<std::size_t> enabled_transitions(const ProgramGraph& pg, const PgState& s);

/// Samples one branch of t's effect and returns the successor state: target
/// location, simultaneously applied updates, clocks reset per t.resets.
/// Raises ModelError if an updated value leaves its declared domain.
PgState apply_effect(const ProgramGraph& pg, const PgTransition& t, const PgState& s, Rng& rng);

/// p(s, α, s′): total probability that firing α in s yields s′, summed over
/// matching transitions and branches; 0 when no guarded transition matches.
Rational transition_probability(const ProgramGraph& pg, const PgState& s, ActionId action,
                                const PgState& target);

/// All initial states ⟨l, η, 0⟩ with l ∈ Loc₀ and η ⊨ g₀. Uses the
/// frontend-supplied valuation when domains are not finite.
std::vector<PgState> pg_initial_states(const ProgramGraph& pg);

/// P^π(ρ): probability of the execution fragment ρ under policy π, with the
/// initial distribution uniform over the initial states.
Rational trace_probability(const ProgramGraph& pg, const std::unordered_map<LocationId, ActionId>& policy,
                           std::span<const PgState> rho);

struct PgStep {
    enum class Status { Stepped, Terminal, TimeLocked };
    Status status = Status::Terminal;
    PgState state;
    EventRecord event;
    Rational now;
};

/// One simulation step at global time `now`: fires an enabled transition at
/// the earliest grid time ≥ now, chosen by the resolver. Terminal when no
/// transition can ever become enabled; time-locked when none becomes
/// enabled within the horizon.
PgStep pg_step(const ProgramGraph& pg, const PgState& s, const Rational& now, Rng& rng,
               const Resolver& resolver);

/// Enumerates all total valuations over the given domains (finite only).
void enumerate_valuations(std::span<const VarDecl> vars,
                          const std::function<void(const std::vector<Value>&)>& fn);

} // namespace tpcs
