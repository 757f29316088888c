#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tpcs/clock.hpp"
#include "tpcs/rational.hpp"
#include "tpcs/rng.hpp"
#include "tpcs/value.hpp"

#include <limits>

using namespace tpcs;

TEST_CASE("rational normalization and arithmetic") {
    CHECK(Rational(6, 4) == Rational(3, 2));
    CHECK(Rational(-6, -4) == Rational(3, 2));
    CHECK(Rational(6, -4) == Rational(-3, 2));
    CHECK(Rational(3, 2).str() == "3/2");
    CHECK(Rational(4).str() == "4");
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(7, 3) - Rational(1, 3) == Rational(2));
    CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(-1, 2) < Rational(0));
}

TEST_CASE("rational overflow is reported, not wrapped") {
    Rational big(std::numeric_limits<std::int64_t>::max());
    CHECK_THROWS_AS(big + Rational(1), ModelError);
    CHECK_THROWS_AS(big * Rational(2), ModelError);
}

TEST_CASE("rational parsing") {
    CHECK(*Rational::parse("3") == Rational(3));
    CHECK(*Rational::parse("-3") == Rational(-3));
    CHECK(*Rational::parse("3/4") == Rational(3, 4));
    CHECK(*Rational::parse("0.25") == Rational(1, 4));
    CHECK(*Rational::parse("0.3") == Rational(3, 10));
    CHECK(*Rational::parse("-1.5") == Rational(-3, 2));
    CHECK(!Rational::parse(""));
    CHECK(!Rational::parse("x"));
    CHECK(!Rational::parse("1/0"));
}

TEST_CASE("clock constraint satisfaction") {
    ClockValuation nu = ClockValuation::of({Rational(2)});
    CHECK(eval_constraint(ClockConstraint::at_most(0, Rational(3)), nu));          // x <= 3 at x=2
    ClockValuation nu3 = ClockValuation::of({Rational(3)});
    CHECK(eval_constraint(ClockConstraint::equals(0, Rational(3)), nu3));          // x = 3 at x=3
    // not(1 <= x) and (x <= 3) at x=1: 1 <= 1 holds, so the negation fails
    auto phi = ClockConstraint::conjunction({ClockConstraint::negation(ClockConstraint::at_least(0, Rational(1))),
                                             ClockConstraint::at_most(0, Rational(3))});
    CHECK(!eval_constraint(phi, ClockValuation::of({Rational(1)})));
}

TEST_CASE("derived constraint forms") {
    ClockValuation nu = ClockValuation::of({Rational(5, 2)});
    CHECK(eval_constraint(ClockConstraint::always_true(), nu));
    CHECK(!eval_constraint(ClockConstraint::always_false(), nu));
    CHECK(eval_constraint(ClockConstraint::always_true(), ClockValuation(0)));
    CHECK(!eval_constraint(ClockConstraint::always_false(), ClockValuation(0)));
    // x = c expands to x <= c and c <= x
    for (auto x : {Rational(2), Rational(5, 2), Rational(3)}) {
        ClockValuation v = ClockValuation::of({x});
        bool both = eval_constraint(ClockConstraint::at_most(0, Rational(5, 2)), v) &&
                    eval_constraint(ClockConstraint::at_least(0, Rational(5, 2)), v);
        CHECK(eval_constraint(ClockConstraint::equals(0, Rational(5, 2)), v) == both);
    }
    // disjunction desugars through negation and conjunction
    auto either = ClockConstraint::disjunction(ClockConstraint::at_most(0, Rational(1)),
                                               ClockConstraint::at_least(0, Rational(2)));
    CHECK(either.kind() == ClockConstraint::Kind::Not);
    CHECK(eval_constraint(either, ClockValuation::of({Rational(1, 2)})));
    CHECK(!eval_constraint(either, ClockValuation::of({Rational(3, 2)})));
    CHECK(eval_constraint(either, ClockValuation::of({Rational(2)})));
}

TEST_CASE("constraint on unknown clock is a model error") {
    CHECK_THROWS_AS(eval_constraint(ClockConstraint::at_most(1, Rational(1)),
                                    ClockValuation::of({Rational(0)})),
                    ModelError);
}

TEST_CASE("advance is pointwise addition") {
    ClockValuation nu = ClockValuation::of({Rational(1), Rational(0)});
    ClockValuation out = advance(nu, Rational(1, 2));
    CHECK(out.at(0) == Rational(3, 2));
    CHECK(out.at(1) == Rational(1, 2));
    CHECK(nu.at(0) == Rational(1)); // unchanged

    CHECK(advance(ClockValuation::of({Rational(7, 3)}), Rational(0)).at(0) == Rational(7, 3));
    CHECK(advance(ClockValuation(0), Rational(5)) == ClockValuation(0));
    CHECK_THROWS_AS(advance(nu, Rational(-1)), ArgumentError);
}

TEST_CASE("advance composes additively") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        ClockValuation nu = ClockValuation::of({Rational(static_cast<std::int64_t>(rng.next_below(20)), 3),
                                                Rational(static_cast<std::int64_t>(rng.next_below(20)), 7)});
        Rational t1(static_cast<std::int64_t>(rng.next_below(30)), 5);
        Rational t2(static_cast<std::int64_t>(rng.next_below(30)), 4);
        CHECK(advance(advance(nu, t1), t2) == advance(nu, t1 + t2));
    }
}

TEST_CASE("reset zeroes exactly the chosen clocks and is idempotent") {
    ClockValuation nu = ClockValuation::of({Rational(3), Rational(4)});
    ClockId just_x[] = {0};
    ClockValuation out = reset(nu, just_x);
    CHECK(out.at(0) == Rational(0));
    CHECK(out.at(1) == Rational(4));

    CHECK(reset(nu, std::span<const ClockId>{}) == nu);

    ClockId both[] = {0, 1};
    ClockValuation zeroed = reset(nu, both);
    CHECK(zeroed.at(0) == Rational(0));
    CHECK(zeroed.at(1) == Rational(0));
    CHECK(reset(reset(nu, both), both) == reset(nu, both));

    ClockId bad[] = {5};
    CHECK_THROWS_AS(reset(nu, bad), ModelError);
}

TEST_CASE("value domain membership") {
    CHECK(value_in_domain(Value(5), VarDomain::bounded_int(0, 10)));
    CHECK(!value_in_domain(Value(11), VarDomain::bounded_int(0, 10)));
    auto pair = VarDomain::tuple({VarDomain::boolean(), VarDomain::bounded_int(0, 3)});
    CHECK(value_in_domain(Value::tuple({Value(true), Value(2)}), pair));
    CHECK(!value_in_domain(Value::tuple({Value(true), Value(7)}), pair));
    CHECK(!value_in_domain(Value::tuple({Value(true)}), pair));
    CHECK(value_in_domain(Value(Rational(1, 3)), VarDomain::rational()));
    CHECK(value_in_domain(Value(4), VarDomain::rational()));        // ints are rationals
    CHECK(!value_in_domain(Value(Rational(1, 2)), VarDomain::bounded_int(0, 5)));
    CHECK(!value_in_domain(Value(true), VarDomain::bounded_int(0, 1)));
}

TEST_CASE("finite domain enumeration") {
    auto d = VarDomain::tuple({VarDomain::boolean(), VarDomain::bounded_int(1, 3)});
    CHECK(d.is_finite());
    CHECK(d.cardinality() == 6);
    std::size_t count = 0;
    d.enumerate([&](const Value& v) {
        CHECK(d.contains(v));
        ++count;
    });
    CHECK(count == 6);
    CHECK(!VarDomain::rational().is_finite());
    CHECK_THROWS_AS(VarDomain::rational().cardinality(), ModelError);
}

TEST_CASE("rng reproducibility: same seed, same stream") {
    Rng a(123456789);
    Rng b(123456789);
    for (int i = 0; i < 10000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("rng child streams are reproducible and distinct") {
    Rng a = Rng::child(42, 7);
    Rng b = Rng::child(42, 7);
    Rng c = Rng::child(42, 8);
    bool all_equal = true;
    for (int i = 0; i < 1000; ++i) {
        std::uint64_t x = a.next_u64();
        REQUIRE(x == b.next_u64());
        if (x != c.next_u64()) all_equal = false;
    }
    CHECK(!all_equal);
}

TEST_CASE("next_below stays in range and covers small ranges") {
    Rng rng(9);
    bool seen[5] = {};
    for (int i = 0; i < 1000; ++i) {
        std::uint64_t v = rng.next_below(5);
        REQUIRE(v < 5);
        seen[v] = true;
    }
    for (bool s : seen) CHECK(s);
}
