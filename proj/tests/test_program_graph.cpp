#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "builders.hpp"
#include "tpcs/program_graph.hpp"

#include <cmath>
#include <map>

using namespace tpcs;
using tpcs::testing::make_state;
using tpcs::testing::PgBuilder;

TEST_CASE("guard evaluation") {
    std::vector<VarDomain> doms{VarDomain::bounded_int(0, 10), VarDomain::boolean()};
    std::vector<Value> eta{Value(2), Value(false)};

    Expr g1 = Expr::lt(Expr::var(0), Expr::int_const(3));
    CHECK(g1.check(doms).kind == ExprType::Kind::Bool);
    CHECK(eval_guard(g1, eta));

    Expr g2 = Expr::land(Expr::eq(Expr::var(0), Expr::int_const(2)), Expr::lnot(Expr::var(1)));
    CHECK(eval_guard(g2, eta));

    CHECK(eval_guard(Expr::bool_const(true), {}));
}

TEST_CASE("guard type errors are load-time model errors") {
    std::vector<VarDomain> doms{VarDomain::bounded_int(0, 10)};
    CHECK_THROWS_AS(Expr::land(Expr::var(0), Expr::bool_const(true)).check(doms), ModelError);
    CHECK_THROWS_AS(Expr::add(Expr::bool_const(true), Expr::int_const(1)).check(doms), ModelError);
    CHECK_THROWS_AS(Expr::var(3).check(doms), ModelError);
}

TEST_CASE("exact arithmetic in expressions") {
    std::vector<Value> eta{Value(Rational(1, 3))};
    Expr e = Expr::add(Expr::mul(Expr::var(0), Expr::int_const(3)), Expr::rat_const(Rational(1, 2)));
    CHECK(e.eval(eta) == Value(Rational(3, 2)));
}

TEST_CASE("enabled transitions respect guards, clock guards and order") {
    PgBuilder b("enabled");
    auto l = b.loc("l");
    auto l2 = b.loc("l2");
    b.clock("x");
    auto a = b.action("a");
    b.trans(l, a, l2).clock_guard = ClockConstraint::at_most(0, Rational(2));
    ProgramGraph pg = b.build();

    PgState s = make_state(l, {}, 1);
    s.clocks = ClockValuation::of({Rational(1)});
    CHECK(enabled_transitions(pg, s) == std::vector<std::size_t>{0});

    s.clocks = ClockValuation::of({Rational(3)});
    CHECK(enabled_transitions(pg, s).empty());
}

TEST_CASE("two enabled transitions appear in declaration order") {
    // hand enumeration: both guards hold in the fixture state, so the
    // enabled list must be exactly {0, 1} in declaration order
    PgBuilder b("order");
    auto l = b.loc("l");
    auto l2 = b.loc("l2");
    auto x = b.var("x", VarDomain::bounded_int(0, 5));
    auto a = b.action("a");
    b.trans(l, a, l2).guard = Expr::le(Expr::var(x), Expr::int_const(3));
    b.trans(l, a, l).guard = Expr::lt(Expr::var(x), Expr::int_const(5));
    b.trans(l, a, l2).guard = Expr::eq(Expr::var(x), Expr::int_const(5)); // disabled at x=1
    ProgramGraph pg = b.build();

    auto enabled = enabled_transitions(pg, make_state(l, {Value(1)}));
    CHECK(enabled == std::vector<std::size_t>{0, 1});
}

TEST_CASE("apply_effect: deterministic branch, resets, domain check") {
    PgBuilder b("apply");
    auto l = b.loc("l");
    auto x = b.var("x", VarDomain::bounded_int(0, 10));
    auto c = b.clock("c");
    auto a = b.action("inc");
    auto& t = b.trans(l, a, l);
    t.effect = Effect::deterministic({{x, Expr::add(Expr::var(x), Expr::int_const(1))}});
    t.resets = {c};
    ProgramGraph pg = b.build();

    Rng rng(0);
    PgState s = make_state(l, {Value(0)}, 1);
    s.clocks = ClockValuation::of({Rational(5)});

    PgState next = apply_effect(pg, pg.transitions[0], s, rng);
    CHECK(next.valuation[0] == Value(1));
    CHECK(next.clocks.at(c) == Rational(0)); // reset semantics

    PgState at_top = make_state(l, {Value(10)}, 1);
    CHECK_THROWS_AS(apply_effect(pg, pg.transitions[0], at_top, rng), ModelError);
}

TEST_CASE("simultaneous assignment reads the pre-state") {
    PgBuilder b("swap");
    auto l = b.loc("l");
    auto x = b.var("x", VarDomain::bounded_int(0, 9));
    auto y = b.var("y", VarDomain::bounded_int(0, 9));
    auto a = b.action("swap");
    b.trans(l, a, l).effect = Effect::deterministic({{x, Expr::var(y)}, {y, Expr::var(x)}});
    ProgramGraph pg = b.build();

    Rng rng(0);
    PgState s = make_state(l, {Value(3), Value(7)});
    PgState next = apply_effect(pg, pg.transitions[0], s, rng);
    CHECK(next.valuation[0] == Value(7));
    CHECK(next.valuation[1] == Value(3));
}

TEST_CASE("sampled branch frequencies match declared probabilities") {
    // binomial 3-sigma band for n = 10^4, p = 1/2: [0.485, 0.515]
    PgBuilder b("coin");
    auto l = b.loc("l");
    auto x = b.var("x", VarDomain::bounded_int(0, 1));
    auto a = b.action("flip");
    b.trans(l, a, l).effect = Effect::probabilistic({
        {Rational(1, 2), {{x, Expr::int_const(0)}}},
        {Rational(1, 2), {{x, Expr::int_const(1)}}},
    });
    ProgramGraph pg = b.build();

    Rng rng(20240229);
    PgState s = make_state(l, {Value(0)});
    int ones = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        if (apply_effect(pg, pg.transitions[0], s, rng).valuation[0] == Value(1)) ++ones;
    }
    double freq = static_cast<double>(ones) / n;
    CHECK(freq >= 0.485);
    CHECK(freq <= 0.515);
}

TEST_CASE("effect branch probabilities must sum to exactly 1") {
    CHECK_THROWS_AS(Effect::probabilistic({{Rational(1, 2), {}}, {Rational(1, 3), {}}}), ModelError);
    CHECK_THROWS_AS(Effect::probabilistic({{Rational(0), {}}, {Rational(1), {}}}), ModelError);
    CHECK_THROWS_AS(Effect::probabilistic({}), ModelError);
    CHECK(Effect::probabilistic({{Rational(1, 3), {}}, {Rational(2, 3), {}}}).branches().size() == 2);
}

TEST_CASE("transition probability") {
    ProgramGraph pg = [&] {
        PgBuilder b("tp");
        auto l = b.loc("l");
        auto x = b.var("x", VarDomain::bounded_int(0, 1));
        auto a = b.action("a");
        auto& t = b.trans(l, a, l);
        t.guard = Expr::eq(Expr::var(x), Expr::int_const(0));
        t.effect = Effect::probabilistic({
            {Rational(3, 10), {{x, Expr::int_const(0)}}},
            {Rational(7, 10), {{x, Expr::int_const(1)}}},
        });
        return b.build();
    }();

    PgState s0 = make_state(0, {Value(0)});
    PgState s1 = make_state(0, {Value(1)});

    CHECK(transition_probability(pg, s1, 0, s0) == Rational(0)); // guard fails in s1
    CHECK(transition_probability(pg, s0, 0, s1) == Rational(7, 10));
    CHECK(transition_probability(pg, s0, 0, s0) == Rational(3, 10));

    // single probability-1 branch
    PgBuilder b2("det");
    auto l = b2.loc("l");
    auto x2 = b2.var("x", VarDomain::bounded_int(0, 1));
    auto a2 = b2.action("a");
    b2.trans(l, a2, l).effect = Effect::deterministic({{x2, Expr::int_const(1)}});
    ProgramGraph det = b2.build();
    CHECK(transition_probability(det, s0, 0, s1) == Rational(1));
    CHECK(transition_probability(det, s0, 0, s0) == Rational(0));
}

TEST_CASE("outgoing probabilities sum to 1 for every state and action") {
    ProgramGraph pg = tpcs::testing::three_state_pts();
    for (std::int64_t v = 0; v <= 2; ++v) {
        PgState s = make_state(0, {Value(v)});
        Rational total(0);
        for (std::int64_t w = 0; w <= 2; ++w)
            total += transition_probability(pg, s, 0, make_state(0, {Value(w)}));
        CHECK(total == Rational(1));
    }
}

TEST_CASE("deterministic graphs have 0/1 transition probabilities") {
    PgBuilder b("det01");
    auto l = b.loc("l");
    auto x = b.var("x", VarDomain::bounded_int(0, 2));
    auto a = b.action("a");
    auto& t = b.trans(l, a, l);
    t.effect = Effect::deterministic({{x, Expr::add(Expr::var(x), Expr::int_const(1))}});
    t.guard = Expr::lt(Expr::var(x), Expr::int_const(2));
    ProgramGraph pg = b.build();

    for (std::int64_t v = 0; v <= 2; ++v) {
        for (std::int64_t w = 0; w <= 2; ++w) {
            Rational p = transition_probability(pg, make_state(0, {Value(v)}), 0, make_state(0, {Value(w)}));
            CHECK((p == Rational(0) || p == Rational(1)));
        }
    }
}

TEST_CASE("trace probability") {
    // single location, x in {0,1}, branches 3/10 stay, 7/10 move
    PgBuilder b("chain");
    auto l = b.loc("l");
    auto x = b.var("x", VarDomain::bounded_int(0, 1));
    auto a = b.action("a");
    b.trans(l, a, l).effect = Effect::probabilistic({
        {Rational(3, 10), {{x, Expr::int_const(0)}}},
        {Rational(7, 10), {{x, Expr::int_const(1)}}},
    });
    b.pg.initial_condition = Expr::eq(Expr::var(x), Expr::int_const(0));
    ProgramGraph pg = b.build();

    PgState s1 = make_state(l, {Value(0)});
    PgState s2 = make_state(l, {Value(1)});
    std::unordered_map<LocationId, ActionId> policy{{l, 0}};

    // single-state fragment: just the initial distribution (P1(s1) = 1 here)
    std::vector<PgState> rho1{s1};
    CHECK(trace_probability(pg, policy, rho1) == Rational(1));

    std::vector<PgState> rho{s1, s1, s2};
    CHECK(trace_probability(pg, policy, rho) == Rational(21, 100));

    std::vector<PgState> not_initial{s2};
    CHECK(trace_probability(pg, policy, not_initial) == Rational(0));

    std::unordered_map<LocationId, ActionId> empty_policy;
    CHECK_THROWS_AS(trace_probability(pg, empty_policy, rho), ArgumentError);
}

TEST_CASE("length-3 fragments of the 3-state fixture sum to probability 1") {
    // exhaustive enumeration oracle: sum of P(rho) over all 27 state triples
    ProgramGraph pg = tpcs::testing::three_state_pts();
    std::unordered_map<LocationId, ActionId> policy{{0, 0}};
    Rational total(0);
    for (std::int64_t v1 = 0; v1 <= 2; ++v1) {
        for (std::int64_t v2 = 0; v2 <= 2; ++v2) {
            for (std::int64_t v3 = 0; v3 <= 2; ++v3) {
                std::vector<PgState> rho{make_state(0, {Value(v1)}), make_state(0, {Value(v2)}),
                                         make_state(0, {Value(v3)})};
                total += trace_probability(pg, policy, rho);
            }
        }
    }
    CHECK(total == Rational(1));
}

TEST_CASE("pg_step fires immediately when a transition is enabled now") {
    PgBuilder b("now");
    auto l = b.loc("l");
    auto l2 = b.loc("l2");
    auto a = b.action("go");
    b.trans(l, a, l2);
    ProgramGraph pg = b.build();

    Rng rng(1);
    PgStep step = pg_step(pg, make_state(l, {}), Rational(0), rng, uniform_resolver());
    REQUIRE(step.status == PgStep::Status::Stepped);
    CHECK(step.state.location == l2);
    CHECK(step.now == Rational(0)); // zero-delay step
}

TEST_CASE("pg_step waits for the minimal enabling delay on the grid") {
    PgBuilder b("wait");
    auto l = b.loc("l");
    auto l2 = b.loc("l2");
    auto c = b.clock("x");
    auto a = b.action("go");
    b.trans(l, a, l2).clock_guard = ClockConstraint::equals(c, Rational(5));
    ProgramGraph pg = b.build();

    // independent oracle: scan multiples of the quantum for the first
    // delay satisfying the guard
    Rational expected(-1);
    for (int k = 0; k <= 100; ++k) {
        ClockValuation nu = ClockValuation(1).advanced(Rational(k) * pg.time_quantum);
        if (eval_constraint(pg.transitions[0].clock_guard, nu)) {
            expected = Rational(k) * pg.time_quantum;
            break;
        }
    }
    REQUIRE(expected == Rational(5));

    Rng rng(1);
    PgStep step = pg_step(pg, make_state(l, {}, 1), Rational(0), rng, uniform_resolver());
    REQUIRE(step.status == PgStep::Status::Stepped);
    CHECK(step.now == expected);
    CHECK(step.state.clocks.at(c) == Rational(5)); // no reset declared
}

TEST_CASE("pg_step is terminal without outgoing transitions") {
    PgBuilder b("dead");
    b.loc("l");
    ProgramGraph pg = b.build();
    Rng rng(1);
    CHECK(pg_step(pg, make_state(0, {}), Rational(0), rng, uniform_resolver()).status ==
          PgStep::Status::Terminal);
}

TEST_CASE("pg_step reports a time-lock when the horizon runs out") {
    PgBuilder b("locked");
    auto l = b.loc("l");
    auto c = b.clock("x");
    auto a = b.action("go");
    // x <= 3 becomes unsatisfiable once the clock passes 3
    b.trans(l, a, l).clock_guard = ClockConstraint::at_most(c, Rational(3));
    b.pg.time_horizon = 50;
    ProgramGraph pg = b.build();

    Rng rng(1);
    PgState s = make_state(l, {}, 1);
    s.clocks = ClockValuation::of({Rational(10)}); // already past the guard
    CHECK(pg_step(pg, s, Rational(10), rng, uniform_resolver()).status == PgStep::Status::TimeLocked);
}

TEST_CASE("simulated timestamps never decrease") {
    ProgramGraph pg = [&] {
        PgBuilder b("run");
        auto l = b.loc("l");
        auto c = b.clock("t");
        auto a = b.action("tick");
        auto& t = b.trans(l, a, l);
        t.clock_guard = ClockConstraint::equals(c, Rational(2));
        t.resets = {c};
        (void)a;
        return b.build();
    }();

    Rng rng(3);
    PgState s = make_state(0, {}, 1);
    Rational now(0);
    for (int i = 0; i < 50; ++i) {
        PgStep step = pg_step(pg, s, now, rng, uniform_resolver());
        REQUIRE(step.status == PgStep::Status::Stepped);
        CHECK(step.now >= now);
        now = step.now;
        s = step.state;
    }
    CHECK(now == Rational(100)); // 50 ticks, 2 time-units apart
}

TEST_CASE("initial states enumerate finite domains under the initial condition") {
    PgBuilder b("init");
    auto l = b.loc("l");
    b.loc("l2");
    auto x = b.var("x", VarDomain::bounded_int(0, 3));
    b.pg.initial_condition = Expr::le(Expr::var(x), Expr::int_const(1));
    ProgramGraph pg = b.build({l});

    auto initials = pg_initial_states(pg);
    CHECK(initials.size() == 2);
    for (const auto& s : initials) {
        CHECK(s.location == l);
        CHECK(eval_guard(pg.initial_condition, s.valuation));
    }
}

TEST_CASE("unsatisfiable initial condition is a model error") {
    PgBuilder b("unsat");
    b.loc("l");
    auto x = b.var("x", VarDomain::bounded_int(0, 3));
    b.pg.initial_condition = Expr::lt(Expr::var(x), Expr::int_const(0));
    ProgramGraph pg = b.build();
    (void)x;
    CHECK_THROWS_AS(pg_initial_states(pg), ModelError);
}
