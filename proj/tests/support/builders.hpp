#pragma once

// Small fixture builders shared by the test suites.

#include "tpcs/channel_system.hpp"
#include "tpcs/program_graph.hpp"

#include <string>
#include <utility>

namespace tpcs::testing {

struct PgBuilder {
    ProgramGraph pg;

    explicit PgBuilder(std::string name) { pg.name = std::move(name); }

    LocationId loc(const std::string& name) {
        pg.locations.push_back({name});
        return static_cast<LocationId>(pg.locations.size() - 1);
    }
    VarId var(const std::string& name, VarDomain domain) {
        pg.variables.push_back({name, std::move(domain)});
        return static_cast<VarId>(pg.variables.size() - 1);
    }
    ClockId clock(const std::string& name) {
        pg.clocks.push_back({name});
        return static_cast<ClockId>(pg.clocks.size() - 1);
    }
    ActionId action(const std::string& name) {
        pg.actions.push_back(name);
        return static_cast<ActionId>(pg.actions.size() - 1);
    }
    PgTransition& trans(LocationId src, ActionId act, LocationId dst) {
        PgTransition t;
        t.source = src;
        t.action = act;
        t.target = dst;
        pg.transitions.push_back(std::move(t));
        return pg.transitions.back();
    }

    ProgramGraph build(std::vector<LocationId> initial = {0}) {
        pg.initial_locations = std::move(initial);
        pg.validate();
        return std::move(pg);
    }
};

inline PgState make_state(LocationId loc, std::vector<Value> vals, std::size_t clocks = 0) {
    PgState s;
    s.location = loc;
    s.valuation = std::move(vals);
    s.clocks = ClockValuation(clocks);
    return s;
}

/// p(s·)=1 chain over one location and x ∈ {0,1,2}:
///   from x=0: 1/2 → 0, 1/2 → 1
///   from x=1: 3/4 → 0, 1/4 → 2
///   from x=2: 1/2 → 0, 1/2 → 2
inline ProgramGraph three_state_pts() {
    PgBuilder b("pts3");
    auto l = b.loc("l");
    auto x = b.var("x", VarDomain::bounded_int(0, 2));
    auto a = b.action("a");
    auto guard_is = [&](std::int64_t v) { return Expr::eq(Expr::var(x), Expr::int_const(v)); };
    auto set_to = [&](std::int64_t v) {
        return std::vector<Assignment>{{x, Expr::int_const(v)}};
    };
    {
        auto& t = b.trans(l, a, l);
        t.guard = guard_is(0);
        t.effect = Effect::probabilistic({{Rational(1, 2), set_to(0)}, {Rational(1, 2), set_to(1)}});
    }
    {
        auto& t = b.trans(l, a, l);
        t.guard = guard_is(1);
        t.effect = Effect::probabilistic({{Rational(3, 4), set_to(0)}, {Rational(1, 4), set_to(2)}});
    }
    {
        auto& t = b.trans(l, a, l);
        t.guard = guard_is(2);
        t.effect = Effect::probabilistic({{Rational(1, 2), set_to(0)}, {Rational(1, 2), set_to(2)}});
    }
    // start anywhere: the initial distribution is uniform over x ∈ {0,1,2}
    return b.build();
}

} // namespace tpcs::testing
