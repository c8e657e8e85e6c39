#include <catch2/catch_amalgamated.hpp>

#include "opfine/cond_dist.hpp"

using namespace opfine;

TEST_CASE("rational parsing and printing") {
    CHECK(rat_to_string(Rat(1, 2)) == "1/2");
    CHECK(rat_to_string(Rat(3)) == "3/1");
    CHECK(rat_to_string(Rat(0)) == "0/1");
    CHECK(rat_to_string(Rat(-5, 10)) == "-1/2");
    CHECK(parse_rat("7/4") == Rat(7, 4));
    CHECK(parse_rat("3") == Rat(3));
    CHECK(parse_rat("-2/6") == Rat(-1, 3));
    CHECK_THROWS_AS(parse_rat(""), ParseError);
    CHECK_THROWS_AS(parse_rat("1/0"), ParseError);
    CHECK_THROWS_AS(parse_rat("x/2"), ParseError);
    CHECK_THROWS_AS(parse_rat("1/2/3"), ParseError);
    CHECK(in_unit_interval(Rat(0)));
    CHECK(in_unit_interval(Rat(1)));
    CHECK_FALSE(in_unit_interval(Rat(9, 8)));
    CHECK_FALSE(in_unit_interval(Rat(-1, 8)));
}

TEST_CASE("finite space indexing is row-major, first variable most significant") {
    FiniteSpace s({{"a", 2}, {"b", 3}});
    REQUIRE(s.size() == 6);
    REQUIRE(s.arity() == 2);
    CHECK(s.index_of({0, 0}) == 0);
    CHECK(s.index_of({0, 2}) == 2);
    CHECK(s.index_of({1, 0}) == 3);
    CHECK(s.index_of({1, 2}) == 5);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.index_of(s.assignment_of(i)) == i);
    CHECK_THROWS_AS(s.index_of({0}), ShapeMismatch);
    CHECK_THROWS_AS(s.index_of({0, 3}), ValueOutOfRange);
}

TEST_CASE("space validation") {
    CHECK_THROWS_AS(FiniteSpace({{"a", 2}, {"a", 3}}), ShapeMismatch);
    CHECK_THROWS_AS(FiniteSpace({{"a", 0}}), ShapeMismatch);
    FiniteSpace empty;
    CHECK(empty.arity() == 0);
    CHECK(empty.size() == 1);
    CHECK(empty.index_of({}) == 0);
}

TEST_CASE("space product and subspace") {
    FiniteSpace a({{"x", 2}}), b({{"x", 3}, {"y", 2}});
    FiniteSpace p = a.product(b);
    REQUIRE(p.arity() == 3);
    CHECK(p.size() == 12);
    CHECK(p.vars()[0].name == "x");
    CHECK(p.vars()[1].name != "x");  // collision renamed
    CHECK(p.vars()[2].name == "y");
    FiniteSpace sub = b.subspace({1});
    CHECK(sub.arity() == 1);
    CHECK(sub.vars()[0].name == "y");
    CHECK_THROWS_AS(b.subspace({2}), UnknownVariable);
    CHECK(a.same_shape(FiniteSpace({{"q", 2}})));
    CHECK_FALSE(a.same_shape(b));
}

TEST_CASE("cond dist validation") {
    FiniteSpace in = FiniteSpace::single("i", 2), out = FiniteSpace::single("o", 2);
    CHECK_THROWS_AS(CondDist::make(in, out, {Rat(1), Rat(1), Rat(0), Rat(1)}), NotNormalized);
    CHECK_THROWS_AS(CondDist::make(in, out, {Rat(2), Rat(1), Rat(-1), Rat(0)}), NegativeEntry);
    CHECK_THROWS_AS(CondDist::make(in, out, {Rat(1), Rat(0)}), ShapeMismatch);
    CondDist d = CondDist::make(in, out, {Rat(1, 3), Rat(1), Rat(2, 3), Rat(0)});
    CHECK(d.at(0, 0) == Rat(1, 3));
    CHECK(d.at(1, 0) == Rat(2, 3));
}

TEST_CASE("chain matches law of total probability") {
    FiniteSpace r = FiniteSpace::single("r", 2), s = FiniteSpace::single("s", 2),
                t = FiniteSpace::single("t", 2);
    CondDist first = CondDist::make(r, s, {Rat(1, 4), Rat(1, 2), Rat(3, 4), Rat(1, 2)});
    CondDist second = CondDist::make(s, t, {Rat(1), Rat(1, 3), Rat(0), Rat(2, 3)});
    CondDist c = chain(second, first);
    // p(t=0|r=0) = 1*1/4 + 1/3*3/4 = 1/2
    CHECK(c.at(0, 0) == Rat(1, 2));
    CHECK(c.at(1, 0) == Rat(1, 2));
    CHECK(c.at(0, 1) == Rat(1, 2) * 1 + Rat(1, 2) * Rat(1, 3));
    CondDist wide = CondDist::uniform(FiniteSpace::single("w", 3), t);
    CHECK_THROWS_AS(chain(wide, second), SpaceMismatch);
    CondDist id = CondDist::identity(s);
    CHECK(dist_equal(chain(id, first), first));
}

TEST_CASE("marginalize keeps variables in original order") {
    FiniteSpace in = FiniteSpace::single("r", 2);
    FiniteSpace out({{"a", 2}, {"b", 2}});
    CondDist d = CondDist::from_fn(in, out, [](std::size_t o, std::size_t i) {
        (void)i;
        return o == 0 ? Rat(1, 2) : (o == 3 ? Rat(1, 2) : Rat(0));
    });
    CondDist ma = marginalize(d, {"a"});
    CHECK(ma.at(0, 0) == Rat(1, 2));
    CHECK(ma.at(1, 0) == Rat(1, 2));
    CondDist mba = marginalize(d, {"b", "a"});  // order-insensitive request
    CHECK(dist_equal(mba, d));
    CHECK_THROWS_AS(marginalize(d, {"c"}), UnknownVariable);
}

TEST_CASE("convex mix") {
    FiniteSpace s = FiniteSpace::single("s", 2);
    CondDist d0 = CondDist::deterministic(s, s, [](std::size_t i) { return i; });
    CondDist d1 = CondDist::deterministic(s, s, [](std::size_t i) { return 1 - i; });
    CondDist m = convex_mix(Rat(1, 3), d0, d1);
    CHECK(m.at(0, 0) == Rat(1, 3));
    CHECK(m.at(1, 0) == Rat(2, 3));
    CHECK_THROWS_AS(convex_mix(Rat(3, 2), d0, d1), SigmaOutOfRange);
}

TEST_CASE("deterministic enumeration is complete and duplicate-free") {
    FiniteSpace in = FiniteSpace::single("i", 2), out = FiniteSpace::single("o", 3);
    std::vector<std::vector<Rat>> seen;
    for_each_deterministic(in, out, [&](const CondDist& d) { seen.push_back(d.table()); });
    CHECK(seen.size() == 9);  // 3^2
    for (std::size_t i = 0; i < seen.size(); ++i)
        for (std::size_t j = i + 1; j < seen.size(); ++j) CHECK(seen[i] != seen[j]);
}

TEST_CASE("affine basis spans: basis agreement implies agreement everywhere") {
    FiniteSpace in = FiniteSpace::single("i", 2), out = FiniteSpace::single("o", 2);
    std::size_t count = 0;
    for_each_affine_basis(in, out, [&](const CondDist&) { ++count; });
    CHECK(count == 1 + 2 * (2 - 1));
    // two linear maps (left-chaining by fixed kernels) agreeing on the affine
    // basis must agree on every deterministic channel
    CondDist k1 = CondDist::make(out, out, {Rat(1, 2), Rat(1, 4), Rat(1, 2), Rat(3, 4)});
    CondDist k2 = CondDist::make(out, out, {Rat(1, 2), Rat(1, 4), Rat(1, 2), Rat(3, 4)});
    bool basis_equal = true;
    for_each_affine_basis(in, out, [&](const CondDist& d) {
        basis_equal = basis_equal && dist_equal(chain(k1, d), chain(k2, d));
    });
    REQUIRE(basis_equal);
    for_each_deterministic(in, out,
                           [&](const CondDist& d) { CHECK(dist_equal(chain(k1, d), chain(k2, d))); });
}
