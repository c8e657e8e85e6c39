#include <catch2/catch_amalgamated.hpp>

#include "opfine/scenario.hpp"

using namespace opfine;

TEST_CASE("trine statistics follow the overlap rule") {
    PrepMeasureScenario scn = trine_prep_scenario();
    CHECK(scn.preparations() == 6);
    CHECK(scn.measurements() == 3);
    CHECK(scn.outcomes() == 2);
    // overlap rule (1 + cos theta)/2 at 0 and +-120 degrees: 1 and 1/4;
    // antipodes give the complements 0 and 3/4
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            Rat expect = (j == k) ? Rat(1) : Rat(1, 4);
            CHECK(scn.stats.at(0, static_cast<std::size_t>(j * 3 + k)) == expect);
            CHECK(scn.stats.at(0, static_cast<std::size_t>((j + 3) * 3 + k)) == 1 - expect);
        }
    // columns normalize and equivalences hold operationally
    REQUIRE(scn.equivalences.size() == 3);
    for (const auto& eq : scn.equivalences) {
        CondDist lhs = mixture_dist(scn, eq.lhs);
        CHECK(dist_equal(lhs, mixture_dist(scn, eq.rhs)));
        for (std::size_t r2 = 0; r2 < 3; ++r2) CHECK(lhs.at(0, r2) == Rat(1, 2));
    }
}

TEST_CASE("prep-measure validation") {
    PrepMeasureScenario base = trine_prep_scenario();
    CHECK_THROWS_AS(
        PrepMeasureScenario::make(base.stats, {{{{Rat(1, 2), 0}}, {{Rat(1), 1}}}}),
        NotNormalized);
    CHECK_THROWS_AS(
        PrepMeasureScenario::make(base.stats, {{{{Rat(1), 9}}, {{Rat(1), 1}}}}),
        ValueOutOfRange);
    CHECK_THROWS_AS(
        PrepMeasureScenario::make(base.stats, {{{{Rat(3, 2), 0}, {Rat(-1, 2), 1}}, {{Rat(1), 1}}}}),
        NegativeEntry);
    CHECK_THROWS_AS(PrepMeasureScenario::make(noisy_pr_box(Rat(0)), {}), ShapeMismatch);
}

TEST_CASE("noisy PR box: marginals, normalization, CHSH") {
    for (const Rat& v : {Rat(0), Rat(1, 2), Rat(3, 4), Rat(1)}) {
        CondDist box = noisy_pr_box(v);
        CHECK(chsh_value(box) == 4 * v);
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                for (int a = 0; a < 2; ++a) {
                    Rat ma = 0, mb = 0;
                    for (int b = 0; b < 2; ++b) {
                        ma += box.at(static_cast<std::size_t>(a * 2 + b),
                                     static_cast<std::size_t>(x * 2 + y));
                        mb += box.at(static_cast<std::size_t>(b * 2 + a),
                                     static_cast<std::size_t>(x * 2 + y));
                    }
                    CHECK(ma == Rat(1, 2));
                    CHECK(mb == Rat(1, 2));
                }
    }
    CHECK_THROWS_AS(noisy_pr_box(Rat(9, 8)), SigmaOutOfRange);
    CHECK_THROWS_AS(chsh_value(trine_prep_scenario().stats), ShapeMismatch);
}

TEST_CASE("classical control statistics come from the four-state model") {
    PrepMeasureScenario scn = classical_control_scenario();
    ClassicalControlModel m = classical_control_model();
    for (std::size_t j = 0; j < 6; ++j) {
        Rat total = 0;
        for (std::size_t l = 0; l < 4; ++l) total += m.prep[j][l];
        CHECK(total == 1);
        for (std::size_t k = 0; k < 3; ++k) {
            Rat p0 = 0;
            for (std::size_t l = 0; l < 4; ++l)
                if (m.response[k][l] == 0) p0 += m.prep[j][l];
            CHECK(scn.stats.at(0, j * 3 + k) == p0);
            CHECK((p0 == 0 || p0 == Rat(1, 2) || p0 == 1));
        }
    }
    for (const auto& eq : scn.equivalences)
        CHECK(dist_equal(mixture_dist(scn, eq.lhs), mixture_dist(scn, eq.rhs)));
}

TEST_CASE("time-symmetric pair construction") {
    CondDist box = noisy_pr_box(Rat(1, 2));
    auto [E, Ep] = time_symmetric_pair(box);
    CHECK(dist_equal(E, Ep));
    CondDist skew = CondDist::deterministic(bell_input_space(), bell_output_space(),
                                            [](std::size_t i) { return (i % 2) * 2; });
    CHECK_THROWS_AS(time_symmetric_pair(skew), AsymmetricParams);
    FiniteSpace uneven_in({{"r1", 2}, {"r2", 3}});
    CHECK_THROWS_AS(time_symmetric_pair(CondDist::uniform(uneven_in, bell_output_space())),
                    AsymmetricParams);
}

TEST_CASE("time-symmetry scenario validates planted extensions") {
    CondDist E = noisy_pr_box(Rat(1, 2));
    FiniteSpace lam = FiniteSpace::single("l", 2);
    CondDist good = trivial_extension(E, lam, {Rat(1, 2), Rat(1, 2)}).joint();
    CHECK_NOTHROW(TimeSymScenario::make(E, E, 2, good));
    CondDist bad = trivial_extension(noisy_pr_box(Rat(1)), lam, {Rat(1, 2), Rat(1, 2)}).joint();
    CHECK_THROWS_AS(TimeSymScenario::make(E, E, 2, bad), ShapeMismatch);
    CHECK_THROWS_AS(TimeSymScenario::make(E, E, 0), ShapeMismatch);
}
