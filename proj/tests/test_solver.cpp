#include <catch2/catch_amalgamated.hpp>

#include "opfine/solver.hpp"
#include "oracle_helpers.hpp"

using namespace opfine;

TEST_CASE("one-equation feasible system") {
    ConstraintSystem sys;
    int w1 = sys.unknown("w1"), w2 = sys.unknown("w2");
    sys.add_equality({{w1, Rat(1)}, {w2, Rat(1)}}, Rat(1));
    auto v = solver::solve(sys);
    REQUIRE(v.feasible);
    CHECK(v.witness.values[static_cast<std::size_t>(w1)] +
              v.witness.values[static_cast<std::size_t>(w2)] ==
          1);
    CHECK(solver::verify(sys, v));
}

TEST_CASE("contradictory equations give a checkable certificate") {
    ConstraintSystem sys;
    int w1 = sys.unknown("w1");
    sys.add_equality({{w1, Rat(1)}}, Rat(1));
    sys.add_equality({{w1, Rat(1)}}, Rat(0));
    auto v = solver::solve(sys);
    REQUIRE_FALSE(v.feasible);
    CHECK(solver::verify(sys, v));
    // recombination by hand: mu . A <= 0 per unknown, mu . b > 0
    Rat comb = v.certificate.multipliers[0] + v.certificate.multipliers[1];
    CHECK(comb <= 0);
    CHECK(v.certificate.multipliers[0] * 1 + v.certificate.multipliers[1] * 0 > 0);
}

TEST_CASE("inequalities are honored") {
    ConstraintSystem sys;
    int x = sys.unknown("x"), y = sys.unknown("y");
    sys.add_geq({{x, Rat(1)}, {y, Rat(1)}}, Rat(2));
    sys.add_equality({{x, Rat(1)}}, Rat(1, 2));
    auto v = solver::solve(sys);
    REQUIRE(v.feasible);
    CHECK(v.witness.values[static_cast<std::size_t>(x)] == Rat(1, 2));
    CHECK(v.witness.values[static_cast<std::size_t>(y)] >= Rat(3, 2));

    sys.add_geq({{y, Rat(-1)}}, Rat(-1));  // y <= 1
    auto v2 = solver::solve(sys);
    REQUIRE_FALSE(v2.feasible);
    CHECK(solver::verify(sys, v2));
}

TEST_CASE("negative right hand sides") {
    ConstraintSystem sys;
    int x = sys.unknown("x");
    sys.add_geq({{x, Rat(-1)}}, Rat(-3));  // x <= 3
    sys.add_equality({{x, Rat(2)}}, Rat(5));
    auto v = solver::solve(sys);
    REQUIRE(v.feasible);
    CHECK(v.witness.values[0] == Rat(5, 2));
    CHECK(solver::verify(sys, v));
}

TEST_CASE("solver is deterministic") {
    auto build = [] {
        ConstraintSystem sys;
        int a = sys.unknown("a"), b = sys.unknown("b"), c = sys.unknown("c");
        sys.add_equality({{a, Rat(1)}, {b, Rat(2)}, {c, Rat(3)}}, Rat(6));
        sys.add_geq({{a, Rat(1)}, {c, Rat(-1)}}, Rat(0));
        sys.add_equality({{b, Rat(1)}}, Rat(1, 3));
        return sys;
    };
    ConstraintSystem s1 = build(), s2 = build();
    auto v1 = solver::solve(s1), v2 = solver::solve(s2);
    CHECK(solver::serialize_verdict(s1, v1) == solver::serialize_verdict(s2, v2));
}

TEST_CASE("random systems agree with vertex-enumeration oracle") {
    std::mt19937 rng(20260823u);
    for (int trial = 0; trial < 120; ++trial) {
        ConstraintSystem sys = oracle::random_system(rng, 4);
        auto v = solver::solve(sys);
        INFO("trial " << trial << "\n" << sys.canonical_text());
        CHECK(v.feasible == oracle::feasible_bruteforce(sys));
        CHECK(solver::verify(sys, v));
    }
}

TEST_CASE("tampered verdicts are rejected") {
    ConstraintSystem sys;
    int x = sys.unknown("x"), y = sys.unknown("y");
    sys.add_equality({{x, Rat(1)}, {y, Rat(1)}}, Rat(1));
    sys.add_geq({{x, Rat(1)}}, Rat(1, 4));
    auto v = solver::solve(sys);
    REQUIRE(v.feasible);
    auto bad = v;
    bad.witness.values[0] += Rat(1, 7);
    CHECK_FALSE(solver::verify(sys, bad));
    bad = v;
    bad.witness.values[1] = Rat(-1);
    CHECK_FALSE(solver::verify(sys, bad));

    ConstraintSystem inf;
    int z = inf.unknown("z");
    inf.add_equality({{z, Rat(1)}}, Rat(1));
    inf.add_geq({{z, Rat(-1)}}, Rat(0));  // z <= 0
    auto vc = solver::solve(inf);
    REQUIRE_FALSE(vc.feasible);
    auto badc = vc;
    badc.certificate.multipliers[1] = Rat(-1);  // negative on an inequality
    CHECK_FALSE(solver::verify(inf, badc));
    badc = vc;
    badc.certificate.multipliers[0] = Rat(0);
    CHECK_FALSE(solver::verify(inf, badc));
}

TEST_CASE("verdict serialization round trip") {
    ConstraintSystem sys;
    int x = sys.unknown("x");
    sys.add_equality({{x, Rat(2)}}, Rat(3));
    auto v = solver::solve(sys);
    std::string text = solver::serialize_verdict(sys, v);
    auto back = solver::parse_verdict(sys, text);
    CHECK(back.feasible == v.feasible);
    CHECK(back.witness.values == v.witness.values);
    CHECK(solver::verify(sys, back));

    ConstraintSystem other;
    other.unknown("x");
    other.add_equality({{0, Rat(2)}}, Rat(4));
    CHECK_THROWS_AS(solver::parse_verdict(other, text), HashMismatch);
    CHECK_THROWS_AS(solver::parse_verdict(sys, "garbage\n"), InvalidCertificate);
    std::string truncated = text.substr(0, text.size() - 4);
    CHECK_THROWS_AS(solver::parse_verdict(sys, truncated), InvalidCertificate);
}

TEST_CASE("canonical text identifies equal systems across build order") {
    ConstraintSystem a;
    int x = a.unknown("x"), y = a.unknown("y");
    a.add_equality({{x, Rat(1, 2)}, {y, Rat(1, 2)}}, Rat(1, 2));
    a.add_geq({{x, Rat(2)}}, Rat(1));
    ConstraintSystem b;
    int by = b.unknown("y"), bx = b.unknown("x");
    b.add_geq({{bx, Rat(4)}}, Rat(2));
    b.add_equality({{by, Rat(-3)}, {bx, Rat(-3)}}, Rat(-3));
    CHECK(canonical_equal(a, b));
    CHECK(a.hash() == b.hash());
    b.add_geq({{by, Rat(1)}}, Rat(1));
    CHECK_FALSE(canonical_equal(a, b));
}
