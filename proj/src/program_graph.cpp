#include "tpcs/program_graph.hpp"

#include "tpcs/errors.hpp"

#include <algorithm>
#include <numeric>

namespace tpcs {

std::size_t Effect::sample_branch(Rng& rng) const {
    if (branches_.size() == 1) return 0;
    // Common denominator of all branch probabilities; the numerators then
    // partition [0, D).
    std::int64_t denom = 1;
    for (const auto& b : branches_) {
        std::int64_t d = b.probability.den();
        std::int64_t g = std::gcd(denom, d);
        __int128 l = static_cast<__int128>(denom / g) * d;
        if (l > INT64_MAX) throw ModelError("branch probability denominators overflow");
        denom = static_cast<std::int64_t>(l);
    }
    std::uint64_t draw = rng.next_below(static_cast<std::uint64_t>(denom));
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        const auto& p = branches_[i].probability;
        acc += static_cast<std::uint64_t>(p.num()) * static_cast<std::uint64_t>(denom / p.den());
        if (draw < acc) return i;
    }
    return branches_.size() - 1;
}

void ProgramGraph::validate() {
    if (locations.empty()) throw ModelError("program graph '" + name + "' has no locations");
    if (initial_locations.empty()) throw ModelError("program graph '" + name + "' has no initial location");
    for (LocationId l : initial_locations) {
        if (l >= locations.size()) throw ModelError("initial location out of range in '" + name + "'");
    }
    auto doms = domains();
    if (initial_condition.check(doms).kind != ExprType::Kind::Bool)
        throw ModelError("initial condition of '" + name + "' is not boolean");
    if (initial_valuation) {
        if (initial_valuation->size() != variables.size())
            throw ModelError("initial valuation arity mismatch in '" + name + "'");
        for (std::size_t i = 0; i < variables.size(); ++i) {
            if (!variables[i].domain.contains((*initial_valuation)[i]))
                throw ModelError("initial value of " + variables[i].name + " outside its domain");
        }
        if (!eval_guard(initial_condition, *initial_valuation))
            throw ModelError("initial valuation of '" + name + "' violates the initial condition");
    }
    for (const auto& t : transitions) {
        if (t.source >= locations.size() || t.target >= locations.size())
            throw ModelError("transition endpoint out of range in '" + name + "'");
        if (t.action >= actions.size())
            throw ModelError("transition action out of range in '" + name + "'");
        if (t.guard.check(doms).kind != ExprType::Kind::Bool)
            throw ModelError("transition guard is not boolean in '" + name + "'");
        for (ClockId c : t.resets) {
            if (c >= clocks.size()) throw ModelError("reset of undeclared clock in '" + name + "'");
        }
        check_clock_refs(t.clock_guard);
        for (const auto& branch : t.effect.branches()) {
            for (const auto& upd : branch.updates) {
                if (upd.var >= variables.size())
                    throw ModelError("update of undeclared variable in '" + name + "'");
                ExprType rhs = upd.value.check(doms);
                ExprType lhs = ExprType::of_domain(variables[upd.var].domain);
                bool ok = (rhs == lhs) || (lhs.kind == ExprType::Kind::Rat && rhs.is_numeric()) ||
                          (lhs.kind == ExprType::Kind::Int && rhs.kind == ExprType::Kind::Int);
                if (!ok)
                    throw ModelError("update of " + variables[upd.var].name + " has type " + rhs.str() +
                                     ", expected " + lhs.str());
            }
        }
    }
    if (!(Rational(0) < time_quantum)) throw ModelError("time quantum must be positive");
    if (time_horizon == 0) throw ModelError("time horizon must be positive");

    by_source_.assign(locations.size(), {});
    for (std::size_t i = 0; i < transitions.size(); ++i) by_source_[transitions[i].source].push_back(i);
}

void ProgramGraph::check_clock_refs(const ClockConstraint& c) const {
    switch (c.kind()) {
    case ClockConstraint::Kind::AtMost:
    case ClockConstraint::Kind::AtLeast:
        if (c.clock() >= clocks.size())
            throw ModelError("clock guard mentions undeclared clock in '" + name + "'");
        return;
    case ClockConstraint::Kind::Not:
    case ClockConstraint::Kind::And:
        for (const auto& k : c.children()) check_clock_refs(k);
        return;
    }
}

Resolver uniform_resolver() {
    return [](std::size_t count, Rng& rng) { return static_cast<std::size_t>(rng.next_below(count)); };
}

std::vector<std::size_t> enabled_transitions(const ProgramGraph& pg, const PgState& s) {
    std::vector<std::size_t> out;
    for (std::size_t i : pg.outgoing(s.location)) {
        const PgTransition& t = pg.transitions[i];
        if (t.comm) continue;
        if (!eval_guard(t.guard, s.valuation)) continue;
        if (!t.clock_guard.eval(s.clocks)) continue;
        out.push_back(i);
    }
    return out;
}

namespace {

std::vector<Value> apply_updates(const ProgramGraph& pg, const std::vector<Assignment>& updates,
                                 const std::vector<Value>& pre, const std::string& where) {
    std::vector<Value> post = pre;
    for (const auto& upd : updates) {
        Value v = upd.value.eval(pre); // simultaneous: RHS reads the pre-state
        if (!pg.variables[upd.var].domain.contains(v))
            throw ModelError("update leaves domain of " + pg.variables[upd.var].name + " (" + v.str() +
                             ") in " + where);
        post[upd.var] = std::move(v);
    }
    return post;
}

} // namespace

PgState apply_effect(const ProgramGraph& pg, const PgTransition& t, const PgState& s, Rng& rng) {
    std::size_t branch = t.effect.sample_branch(rng);
    PgState out;
    out.location = t.target;
    out.valuation = apply_updates(pg, t.effect.branches()[branch].updates, s.valuation,
                                  "transition to " + pg.locations[t.target].name);
    out.clocks = s.clocks.reset(t.resets);
    return out;
}

Rational transition_probability(const ProgramGraph& pg, const PgState& s, ActionId action,
                                const PgState& target) {
    Rational total(0);
    for (std::size_t i : pg.outgoing(s.location)) {
        const PgTransition& t = pg.transitions[i];
        if (t.comm || t.action != action || t.target != target.location) continue;
        if (!eval_guard(t.guard, s.valuation)) continue;
        if (!t.clock_guard.eval(s.clocks)) continue;
        if (s.clocks.reset(t.resets) != target.clocks) continue;
        for (const auto& branch : t.effect.branches()) {
            std::vector<Value> post = apply_updates(pg, branch.updates, s.valuation, "probability query");
            if (post == target.valuation) total += branch.probability;
        }
    }
    return total;
}

std::vector<PgState> pg_initial_states(const ProgramGraph& pg) {
    std::vector<std::vector<Value>> valuations;
    if (pg.initial_valuation) {
        valuations.push_back(*pg.initial_valuation);
    } else {
        bool finite = true;
        for (const auto& v : pg.variables) {
            if (!v.domain.is_finite()) { finite = false; break; }
        }
        if (!finite)
            throw ModelError("program graph '" + pg.name +
                             "' has non-enumerable domains and no concrete initial valuation");
        enumerate_valuations(pg.variables, [&](const std::vector<Value>& eta) {
            if (eval_guard(pg.initial_condition, eta)) valuations.push_back(eta);
        });
    }
    std::vector<PgState> out;
    for (LocationId l : pg.initial_locations) {
        for (const auto& eta : valuations) {
            PgState s;
            s.location = l;
            s.valuation = eta;
            s.clocks = ClockValuation(pg.clocks.size());
            out.push_back(std::move(s));
        }
    }
    if (out.empty()) throw ModelError("initial condition of '" + pg.name + "' is unsatisfiable");
    return out;
}

Rational trace_probability(const ProgramGraph& pg, const std::unordered_map<LocationId, ActionId>& policy,
                           std::span<const PgState> rho) {
    if (rho.empty()) throw ArgumentError("trace_probability needs a non-empty fragment");
    std::vector<PgState> initial = pg_initial_states(pg);
    bool is_initial = std::find(initial.begin(), initial.end(), rho.front()) != initial.end();
    if (!is_initial) return Rational(0);
    Rational p = Rational(1, static_cast<std::int64_t>(initial.size()));
    for (std::size_t i = 0; i + 1 < rho.size(); ++i) {
        auto it = policy.find(rho[i].location);
        if (it == policy.end())
            throw ArgumentError("policy undefined at location " + pg.locations[rho[i].location].name);
        p *= transition_probability(pg, rho[i], it->second, rho[i + 1]);
        if (p.is_zero()) return p;
    }
    return p;
}

PgStep pg_step(const ProgramGraph& pg, const PgState& s, const Rational& now, Rng& rng,
               const Resolver& resolver) {
    if (now.is_negative()) throw ArgumentError("simulation time must be non-negative");
    // Variable guards do not change while waiting, so transitions failing
    // them can never become enabled from this state.
    std::vector<std::size_t> candidates;
    for (std::size_t i : pg.outgoing(s.location)) {
        const PgTransition& t = pg.transitions[i];
        if (t.comm) continue;
        if (eval_guard(t.guard, s.valuation)) candidates.push_back(i);
    }
    PgStep step;
    if (candidates.empty()) {
        step.status = PgStep::Status::Terminal;
        step.now = now;
        return step;
    }
    Rational delta(0);
    for (std::uint32_t k = 0; k <= pg.time_horizon; ++k) {
        ClockValuation advanced = s.clocks.advanced(delta);
        std::vector<std::size_t> enabled;
        for (std::size_t i : candidates) {
            if (pg.transitions[i].clock_guard.eval(advanced)) enabled.push_back(i);
        }
        if (!enabled.empty()) {
            const PgTransition& t = pg.transitions[enabled[resolver(enabled.size(), rng)]];
            PgState pre = s;
            pre.clocks = std::move(advanced);
            step.status = PgStep::Status::Stepped;
            step.state = apply_effect(pg, t, pre, rng);
            step.event = EventRecord::internal(t.action);
            step.now = now + delta;
            return step;
        }
        delta += pg.time_quantum;
    }
    step.status = PgStep::Status::TimeLocked;
    step.now = now;
    return step;
}

void enumerate_valuations(std::span<const VarDecl> vars,
                          const std::function<void(const std::vector<Value>&)>& fn) {
    std::vector<Value> current(vars.size());
    std::function<void(std::size_t)> rec = [&](std::size_t idx) {
        if (idx == vars.size()) {
            fn(current);
            return;
        }
        vars[idx].domain.enumerate([&](const Value& v) {
            current[idx] = v;
            rec(idx + 1);
        });
    };
    rec(0);
}

} // namespace tpcs
