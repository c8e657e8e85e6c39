#include <catch2/catch_amalgamated.hpp>

#include "opfine/comb.hpp"
#include "opfine/scenario.hpp"

using namespace opfine;

namespace {
FiniteSpace bits2() { return FiniteSpace({{"v1", 2}, {"v2", 2}}); }
}  // namespace

TEST_CASE("identity comb acts as identity") {
    FiniteSpace S = bits2(), T = FiniteSpace::single("t", 3);
    Comb id = identity_comb(S, T);
    for_each_deterministic(S, T, [&](const CondDist& d) { CHECK(dist_equal(apply(id, d), d)); });
    CHECK(id.expr().tag == CombExpr::Tag::Identity);
}

TEST_CASE("permutation comb swaps inputs and outputs") {
    FiniteSpace S = bits2(), T = bits2();
    Comb pi = permutation_comb(S, T, {1, 0}, {1, 0});
    CondDist box = noisy_pr_box(Rat(1, 3));
    CondDist swapped = apply(pi, box);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y)
                    CHECK(swapped.at(static_cast<std::size_t>(a * 2 + b),
                                     static_cast<std::size_t>(x * 2 + y)) ==
                          box.at(static_cast<std::size_t>(b * 2 + a),
                                 static_cast<std::size_t>(y * 2 + x)));
    CHECK(is_involution(pi));
    CHECK_THROWS_AS(permutation_comb(S, T, {0, 0}, {0, 1}), CardinalityMismatch);
    CHECK_THROWS_AS(permutation_comb(S, T, {0}, {0, 1}), CardinalityMismatch);
    FiniteSpace uneven({{"v1", 2}, {"v2", 3}});
    CHECK_THROWS_AS(permutation_comb(uneven, T, {1, 0}, {0, 1}), CardinalityMismatch);
}

TEST_CASE("set-input comb pins a variable") {
    FiniteSpace S = bits2(), T = FiniteSpace::single("u", 2);
    Comb set1 = set_input_comb(S, T, "v2", 1);
    REQUIRE(set1.R().arity() == 1);
    CondDist d = CondDist::from_fn(S, T, [](std::size_t o, std::size_t i) {
        return o == i % 2 ? Rat(1) : Rat(0);  // u = v2
    });
    CondDist got = apply(set1, d);
    CHECK(got.at(1, 0) == 1);
    CHECK(got.at(1, 1) == 1);
    CHECK_THROWS_AS(set_input_comb(S, T, "nope", 0), UnknownVariable);
    CHECK_THROWS_AS(set_input_comb(S, T, "v2", 2), ValueOutOfRange);
}

TEST_CASE("discard-output comb marginalizes") {
    FiniteSpace S = FiniteSpace::single("s", 2), T = bits2();
    Comb disc = discard_output_comb(S, T, {"v1"});
    REQUIRE(disc.U().arity() == 1);
    CHECK(disc.U().vars()[0].name == "v2");
    CondDist d = CondDist::from_fn(S, T, [](std::size_t o, std::size_t i) {
        (void)i;
        return o == 0 || o == 3 ? Rat(1, 2) : Rat(0);
    });
    CondDist got = apply(disc, d);
    CHECK(got.at(0, 0) == Rat(1, 2));
    CHECK(got.at(1, 0) == Rat(1, 2));
    CHECK(dist_equal(got, marginalize(d, {"v2"})));
    CHECK_THROWS_AS(discard_output_comb(S, T, {"zz"}), UnknownVariable);
}

TEST_CASE("composition acts as sequential application") {
    FiniteSpace S = bits2(), T = bits2();
    Comb f = set_input_comb(S, T, "v1", 0);              // slot (S,T) -> (v2, T)
    Comb g = discard_output_comb(f.R(), T, {"v1"});      // slot (v2,T) -> (v2, v2)
    Comb h = compose_combs(g, f);
    for_each_deterministic(S, T, [&](const CondDist& d) {
        CHECK(dist_equal(apply(h, d), apply(g, apply(f, d))));
    });
    CHECK_THROWS_AS(compose_combs(f, g), SpaceMismatch);
}

TEST_CASE("mixture acts as convex mixture of actions") {
    FiniteSpace S = bits2(), T = bits2();
    Comb id = identity_comb(S, T);
    Comb pi = permutation_comb(S, T, {1, 0}, {1, 0});
    Rat sigma(2, 5);
    Comb m = mix_combs(sigma, id, pi);
    for_each_deterministic(S, T, [&](const CondDist& d) {
        CHECK(dist_equal(apply(m, d), convex_mix(sigma, apply(id, d), apply(pi, d))));
    });
    CHECK_THROWS_AS(mix_combs(Rat(7, 5), id, pi), SigmaOutOfRange);
}

TEST_CASE("extensional equality ignores representation") {
    FiniteSpace S = bits2(), T = bits2();
    Comb id = identity_comb(S, T);
    Comb pi = permutation_comb(S, T, {1, 0}, {1, 0});
    Comb pipi = compose_combs(pi, pi);
    CHECK(combs_action_equal(pipi, id));
    CHECK_FALSE(combs_action_equal(pi, id));
    // raw-table comb with the identity action but a fat correlation variable
    FiniteSpace C = FiniteSpace::single("c", 2);
    CondDist pre = CondDist::from_fn(S, C.product(S), [&](std::size_t o, std::size_t i) {
        return (o % S.size()) == i ? Rat(1, 2) : Rat(0);
    });
    CondDist post = CondDist::deterministic(C.product(T), T,
                                            [&](std::size_t i) { return i % T.size(); });
    Comb raw = Comb::from_tables(S, S, T, T, C, pre, post);
    CHECK(raw.expr().tag == CombExpr::Tag::Raw);
    CHECK(combs_action_equal(raw, id));
}

TEST_CASE("mix of a comb with itself is extensionally itself") {
    FiniteSpace S = bits2(), T = bits2();
    Comb pi = permutation_comb(S, T, {1, 0}, {1, 0});
    CHECK(combs_action_equal(mix_combs(Rat(1, 3), pi, pi), pi));
}
