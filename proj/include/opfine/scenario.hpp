#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opfine/comb.hpp"
#include "opfine/ontology.hpp"

namespace opfine {

// ---------------------------------------------------------------------------
// scenario shapes

struct MixtureTerm {
    Rat weight;
    int preparation = 0;
};

/// Declared operational equivalence between two convex mixtures of
/// preparations: sum lhs = sum rhs as distributions over (u | r2).
struct PrepEquivalence {
    std::vector<MixtureTerm> lhs, rhs;
};

/// Prepare-and-measure experiment: stats p(u | r1, r2) with r1 the
/// preparation choice, r2 the measurement choice, u the outcome.
struct PrepMeasureScenario {
    CondDist stats;
    std::vector<PrepEquivalence> equivalences;

    int preparations() const { return stats.input().vars()[0].card; }
    int measurements() const { return stats.input().vars()[1].card; }
    int outcomes() const { return stats.output().vars()[0].card; }

    static PrepMeasureScenario make(CondDist stats, std::vector<PrepEquivalence> equivalences) {
        if (stats.input().arity() != 2 || stats.output().arity() != 1)
            throw ShapeMismatch("prepare-measure scenario needs inputs (r1,r2) and output (u)");
        PrepMeasureScenario s{std::move(stats), std::move(equivalences)};
        for (const auto& eq : s.equivalences)
            for (const auto* side : {&eq.lhs, &eq.rhs}) {
                Rat total = 0;
                for (const auto& t : *side) {
                    if (t.preparation < 0 || t.preparation >= s.preparations())
                        throw ValueOutOfRange("equivalence refers to a nonexistent preparation");
                    if (t.weight < 0) throw NegativeEntry("negative mixture weight");
                    total += t.weight;
                }
                if (total != 1) throw NotNormalized("mixture weights sum to " + rat_to_string(total));
            }
        return s;
    }
};

/// p(u | r2) for a convex mixture of preparations.
inline CondDist mixture_dist(const PrepMeasureScenario& s, const std::vector<MixtureTerm>& mix) {
    const int M = s.measurements(), K = s.outcomes();
    return CondDist::from_fn(FiniteSpace::single("r2", M), FiniteSpace::single("u", K),
                             [&](std::size_t u, std::size_t r2) {
                                 Rat p = 0;
                                 for (const auto& t : mix)
                                     p += t.weight *
                                          s.stats.at(u, static_cast<std::size_t>(t.preparation) * M + r2);
                                 return p;
                             });
}

/// Two-party box p(a,b | x,y) with inputs (x,y) and outputs (a,b).
struct BellScenario {
    CondDist box;

    static BellScenario make(CondDist box) {
        if (box.input().arity() != 2 || box.output().arity() != 2)
            throw ShapeMismatch("Bell scenario needs inputs (x,y) and outputs (a,b)");
        return BellScenario{std::move(box)};
    }
};

/// A pair of experiments related by swapping the roles of preparation and
/// measurement, plus (optionally) pinned ontic extensions for either side.
struct TimeSymScenario {
    CondDist E, Eprime;
    int lambda_size = 2;
    std::optional<CondDist> plantedE;       // p(u1,u2,lambda|r1,r2), output-tail lambda
    std::optional<CondDist> plantedEprime;  // same shape for E'

    static TimeSymScenario make(CondDist E, CondDist Eprime, int lambda_size,
                                std::optional<CondDist> plantedE = std::nullopt,
                                std::optional<CondDist> plantedEprime = std::nullopt) {
        if (E.input().arity() != 2 || E.output().arity() != 2)
            throw ShapeMismatch("time-symmetry scenario needs inputs (r1,r2) and outputs (u1,u2)");
        if (!E.input().same_shape(Eprime.input()) || !E.output().same_shape(Eprime.output()))
            throw SpaceMismatch("paired experiments must share their variable shapes");
        if (lambda_size < 1) throw ShapeMismatch("lambda size must be >= 1");
        TimeSymScenario s{std::move(E), std::move(Eprime), lambda_size, std::move(plantedE),
                          std::move(plantedEprime)};
        FiniteSpace lam = FiniteSpace::single("l", lambda_size);
        auto check_planted = [&](const std::optional<CondDist>& planted, const CondDist& base) {
            if (!planted) return;
            // must be a valid ontic extension of the operational table
            OnticExtensionDist::make(base, lam, *planted);
        };
        check_planted(s.plantedE, s.E);
        check_planted(s.plantedEprime, s.Eprime);
        return s;
    }
};

// ---------------------------------------------------------------------------
// built-in generators

inline FiniteSpace bell_input_space() {
    return FiniteSpace({{"x", 2}, {"y", 2}});
}
inline FiniteSpace bell_output_space() {
    return FiniteSpace({{"a", 2}, {"b", 2}});
}

/// v * PR + (1-v) * uniform: p(a,b|x,y) = v * [a xor b = x and y]/2 + (1-v)/4.
inline CondDist noisy_pr_box(const Rat& v) {
    if (!in_unit_interval(v)) throw SigmaOutOfRange("visibility v = " + rat_to_string(v));
    return CondDist::from_fn(bell_input_space(), bell_output_space(),
                             [&](std::size_t o, std::size_t i) {
                                 int a = static_cast<int>(o) / 2, b = static_cast<int>(o) % 2;
                                 int x = static_cast<int>(i) / 2, y = static_cast<int>(i) % 2;
                                 Rat p = (1 - v) / 4;
                                 if (((a + b) % 2) == (x & y)) p += v / 2;
                                 return p;
                             });
}

/// sum_{x,y} (-1)^{xy} E(x,y) with E(x,y) = sum_{a,b} (-1)^{a+b} p(a,b|x,y).
inline Rat chsh_value(const CondDist& box) {
    if (!box.input().same_shape(bell_input_space()) || !box.output().same_shape(bell_output_space()))
        throw ShapeMismatch("chsh_value expects a binary two-party box");
    Rat total = 0;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            Rat corr = 0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    Rat p = box.at(static_cast<std::size_t>(a * 2 + b),
                                   static_cast<std::size_t>(x * 2 + y));
                    corr += ((a + b) % 2 == 0) ? p : -p;
                }
            total += (x == 1 && y == 1) ? -corr : corr;
        }
    return total;
}

/// Six preparations (three directions at mutual angle 120 degrees plus their
/// antipodes), three binary measurements along those directions, statistics
/// from the two-outcome overlap rule (1 + cos theta)/2, all rational by the
/// choice of angles. The three half-half antipodal mixtures are pairwise
/// operationally equal (every outcome probability 1/2).
inline PrepMeasureScenario trine_prep_scenario() {
    CondDist stats = CondDist::from_fn(
        FiniteSpace({{"r1", 6}, {"r2", 3}}), FiniteSpace::single("u", 2),
        [](std::size_t u, std::size_t i) {
            int j = static_cast<int>(i) / 3, k = static_cast<int>(i) % 3;
            Rat p0 = (j < 3) ? (j == k ? Rat(1) : Rat(1, 4)) : (j - 3 == k ? Rat(0) : Rat(3, 4));
            return u == 0 ? p0 : 1 - p0;
        });
    Rat half(1, 2);
    std::vector<PrepEquivalence> eqs;
    for (int j = 0; j < 3; ++j) {
        int j2 = (j + 1) % 3;
        eqs.push_back({{{half, j}, {half, j + 3}}, {{half, j2}, {half, j2 + 3}}});
    }
    return PrepMeasureScenario::make(std::move(stats), std::move(eqs));
}

/// The explicit four-state model behind classical_control_scenario: each
/// preparation is uniform over a pair of ontic states, each measurement is a
/// deterministic two-two split of the ontic square.
struct ClassicalControlModel {
    std::vector<std::vector<Rat>> prep;          // prep[j][lambda], 6 x 4
    std::vector<std::vector<int>> response;      // response[k][lambda] in {0,1}, 3 x 4
};

inline ClassicalControlModel classical_control_model() {
    ClassicalControlModel m;
    const int pairs[6][2] = {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 0}, {1, 3}};
    m.prep.assign(6, std::vector<Rat>(4, Rat(0)));
    for (int j = 0; j < 6; ++j) {
        m.prep[static_cast<std::size_t>(j)][static_cast<std::size_t>(pairs[j][0])] = Rat(1, 2);
        m.prep[static_cast<std::size_t>(j)][static_cast<std::size_t>(pairs[j][1])] = Rat(1, 2);
    }
    m.response = {{0, 0, 1, 1}, {1, 0, 0, 1}, {0, 1, 0, 1}};
    return m;
}

/// Feasible control: statistics generated from classical_control_model, so a
/// preparation-noncontextual model exists by construction. Entries are all
/// in {0, 1/2, 1}; the three antipodal mixtures are uniform over the ontic
/// square and hence pairwise operationally equal.
inline PrepMeasureScenario classical_control_scenario() {
    ClassicalControlModel m = classical_control_model();
    CondDist stats = CondDist::from_fn(
        FiniteSpace({{"r1", 6}, {"r2", 3}}), FiniteSpace::single("u", 2),
        [&](std::size_t u, std::size_t i) {
            std::size_t j = i / 3, k = i % 3;
            Rat p = 0;
            for (std::size_t l = 0; l < 4; ++l)
                if (static_cast<std::size_t>(m.response[k][l]) == u) p += m.prep[j][l];
            return p;
        });
    Rat half(1, 2);
    std::vector<PrepEquivalence> eqs;
    for (int j = 0; j < 3; ++j) {
        int j2 = (j + 1) % 3;
        eqs.push_back({{{half, j}, {half, j + 3}}, {{half, j2}, {half, j2 + 3}}});
    }
    return PrepMeasureScenario::make(std::move(stats), std::move(eqs));
}

/// Builds (E, Pi(E)) from a table that is invariant under swapping the
/// preparation and measurement roles, (r1,u1) <-> (r2,u2). Equation premise
/// for the time-symmetry check holds by construction.
inline std::pair<CondDist, CondDist> time_symmetric_pair(const CondDist& E) {
    if (E.input().arity() != 2 || E.output().arity() != 2)
        throw ShapeMismatch("time_symmetric_pair needs inputs (r1,r2) and outputs (u1,u2)");
    if (E.input().vars()[0].card != E.input().vars()[1].card ||
        E.output().vars()[0].card != E.output().vars()[1].card)
        throw AsymmetricParams("swapped variables must have matching cardinalities");
    Comb swap = permutation_comb(E.input(), E.output(), {1, 0}, {1, 0});
    CondDist swapped = apply(swap, E);
    if (!dist_equal(E, swapped))
        throw AsymmetricParams("table is not invariant under the preparation/measurement swap");
    return {E, swapped};
}

}  // namespace opfine
