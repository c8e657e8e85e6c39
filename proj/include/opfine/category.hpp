#pragma once

#include <functional>
#include <string>
#include <vector>

#include "opfine/ontology.hpp"

namespace opfine {

/// Objects are shape classes: distributions with the same number of
/// controlled and observable variables, of the same cardinalities, belong to
/// the same object regardless of origin.
struct ObjectShape {
    std::vector<int> in_cards, out_cards;

    bool operator==(const ObjectShape& o) const {
        return in_cards == o.in_cards && out_cards == o.out_cards;
    }
};

inline ObjectShape shape_of(const FiniteSpace& in, const FiniteSpace& out) {
    ObjectShape s;
    for (const auto& v : in.vars()) s.in_cards.push_back(v.card);
    for (const auto& v : out.vars()) s.out_cards.push_back(v.card);
    return s;
}

/// Morphism domain: the slot a comb plugs into, (S, T).
inline ObjectShape domain_of(const Comb& f) { return shape_of(f.S(), f.T()); }
/// Morphism codomain: the processed experiment shape, (R, U).
inline ObjectShape codomain_of(const Comb& f) { return shape_of(f.R(), f.U()); }

/// A finite set of combs closed under composition, with identities, where
/// morphism equality is extensional (equal action on the deterministic
/// basis).
struct Subcategory {
    std::vector<Comb> morphisms;
    std::vector<ObjectShape> objects;
};

inline bool composable(const Comb& g, const Comb& f) { return domain_of(g) == codomain_of(f); }

/// Closes the generators under composition, adds an identity for every
/// object that appears, and deduplicates extensionally. Throws
/// ClosureExplosion when more than `bound` distinct morphisms appear.
inline Subcategory build_subcategory(const std::vector<Comb>& generators, std::size_t bound) {
    if (bound < 1) throw ClosureExplosion("closure bound must be >= 1");
    Subcategory cat;
    auto add_object = [&](const FiniteSpace& in, const FiniteSpace& out) {
        ObjectShape s = shape_of(in, out);
        for (const auto& o : cat.objects)
            if (o == s) return;
        cat.objects.push_back(std::move(s));
        cat.morphisms.push_back(identity_comb(in, out));
        if (cat.morphisms.size() > bound) throw ClosureExplosion("subcategory exceeds bound");
    };
    auto add_morphism = [&](const Comb& f) {
        for (const auto& m : cat.morphisms)
            if (combs_action_equal(m, f)) return false;
        cat.morphisms.push_back(f);
        if (cat.morphisms.size() > bound) throw ClosureExplosion("subcategory exceeds bound");
        return true;
    };
    for (const Comb& g : generators) {
        add_object(g.S(), g.T());
        add_object(g.R(), g.U());
        add_morphism(g);
    }
    bool grew = true;
    while (grew) {
        grew = false;
        const std::size_t n = cat.morphisms.size();
        for (std::size_t i = 0; i < n && !grew; ++i)
            for (std::size_t j = 0; j < n && !grew; ++j) {
                if (!composable(cat.morphisms[i], cat.morphisms[j])) continue;
                if (add_morphism(compose_combs(cat.morphisms[i], cat.morphisms[j]))) grew = true;
            }
    }
    return cat;
}

/// One line per law; `counterexample` names the offending morphisms when a
/// law fails.
struct FunctorLawReport {
    bool identity_ok = true;
    bool composition_ok = true;
    bool convexity_ok = true;
    std::string counterexample;

    bool all_ok() const { return identity_ok && composition_ok && convexity_ok; }
};

using LiftMap = std::function<OntComb(const Comb&)>;

/// Checks the functor laws of a lift mapping over a finite subcategory:
/// identities go to ontological identities, composition commutes with
/// lifting, and convex mixtures commute with lifting.
inline FunctorLawReport check_functor_laws(const Subcategory& cat, const LiftMap& lift,
                                           const FiniteSpace& Lam) {
    FunctorLawReport rep;
    auto note = [&](const std::string& s) {
        if (rep.counterexample.empty()) rep.counterexample = s;
    };
    for (std::size_t i = 0; i < cat.morphisms.size(); ++i) {
        const Comb& f = cat.morphisms[i];
        if (f.expr().tag == CombExpr::Tag::Identity &&
            !ont_action_equal(lift(f), identity_ont(f.S(), f.T(), Lam))) {
            rep.identity_ok = false;
            note("identity law at morphism #" + std::to_string(i));
        }
    }
    for (std::size_t i = 0; i < cat.morphisms.size(); ++i)
        for (std::size_t j = 0; j < cat.morphisms.size(); ++j) {
            const Comb& g = cat.morphisms[i];
            const Comb& f = cat.morphisms[j];
            if (!composable(g, f)) continue;
            if (!ont_action_equal(lift(compose_combs(g, f)), compose_ont(lift(g), lift(f)))) {
                rep.composition_ok = false;
                note("composition law at pair (#" + std::to_string(i) + ", #" + std::to_string(j) +
                     ")");
            }
        }
    const Rat half(1, 2);
    for (std::size_t i = 0; i < cat.morphisms.size(); ++i)
        for (std::size_t j = i; j < cat.morphisms.size(); ++j) {
            const Comb& f = cat.morphisms[i];
            const Comb& g = cat.morphisms[j];
            if (!(domain_of(f) == domain_of(g)) || !(codomain_of(f) == codomain_of(g))) continue;
            if (!ont_action_equal(lift(mix_combs(half, f, g)),
                                  mix_ont(half, lift(f), lift(g)))) {
                rep.convexity_ok = false;
                note("convexity law at pair (#" + std::to_string(i) + ", #" + std::to_string(j) +
                     ")");
            }
        }
    return rep;
}

/// A distribution viewed as a morphism from the trivial object (empty slot):
/// applying the result to the unique trivial distribution returns d.
inline Comb state_comb(const CondDist& d) {
    FiniteSpace empty;
    CondDist pre = CondDist::from_fn(d.input(), d.input().product(empty),
                                     [&](std::size_t o, std::size_t i) {
                                         return o == i ? Rat(1) : Rat(0);
                                     });
    CondDist post = CondDist::from_fn(d.input().product(empty), d.output(),
                                      [&](std::size_t u, std::size_t c) { return d.at(u, c); });
    return Comb::from_tables(d.input(), empty, empty, d.output(), d.input(), std::move(pre),
                             std::move(post));
}

/// Inverse of state_comb up to extensional equality.
inline CondDist dist_of_state(const Comb& f) {
    FiniteSpace empty;
    if (!f.S().same_shape(empty) || !f.T().same_shape(empty))
        throw ShapeMismatch("not a state morphism: slot is not trivial");
    return apply(f, CondDist::uniform(empty, empty));
}

}  // namespace opfine
