#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opfine/constraint_system.hpp"
#include "opfine/ontology.hpp"
#include "opfine/scenario.hpp"

namespace opfine {

enum class Assumption {
    LambdaMediation,
    MeasurementIndependence,
    ParameterIndependence,
    OutcomeIndependence,
};

inline const char* assumption_name(Assumption a) {
    switch (a) {
        case Assumption::LambdaMediation: return "lambda-mediation";
        case Assumption::MeasurementIndependence: return "measurement-independence";
        case Assumption::ParameterIndependence: return "parameter-independence";
        case Assumption::OutcomeIndependence: return "outcome-independence";
    }
    return "?";
}

inline std::optional<Assumption> assumption_from_name(const std::string& s) {
    for (Assumption a : {Assumption::LambdaMediation, Assumption::MeasurementIndependence,
                         Assumption::ParameterIndependence, Assumption::OutcomeIndependence})
        if (s == assumption_name(a)) return a;
    return std::nullopt;
}

/// Ontic-space policy for compilation. DeterministicStrategies identifies
/// lambda with deterministic response functions, which keeps the
/// lambda-conditional assumptions linear; Stochastic uses a free joint table
/// over a fixed number of ontic states and supports only the assumption
/// fragments that are linear in that parametrization.
struct LambdaConfig {
    enum class Mode { DeterministicStrategies, Stochastic };
    Mode mode = Mode::DeterministicStrategies;
    int size = 1;  // number of ontic states (Stochastic mode only)

    static LambdaConfig deterministic() { return {Mode::DeterministicStrategies, 0}; }
    static LambdaConfig stochastic(int n) {
        if (n < 1) throw ShapeMismatch("stochastic lambda needs at least one state");
        return {Mode::Stochastic, n};
    }
};

// ---------------------------------------------------------------------------
// deterministic strategy spaces

/// Complete duplicate-free enumeration of response functions from settings
/// to outcomes; lambda is identified with an index into `responses`.
struct DeterministicStrategySpace {
    std::vector<std::vector<int>> responses;  // responses[l][setting] = outcome
    std::size_t size() const { return responses.size(); }
};

/// All g : {0..settings-1} -> {0..outcomes-1}; size = outcomes^settings.
inline DeterministicStrategySpace response_function_space(int settings, int outcomes) {
    DeterministicStrategySpace sp;
    std::vector<int> g(static_cast<std::size_t>(settings), 0);
    for (;;) {
        sp.responses.push_back(g);
        int pos = settings - 1;
        while (pos >= 0 && ++g[static_cast<std::size_t>(pos)] == outcomes) {
            g[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return sp;
}

inline std::string w_prep_name(int r1, const std::vector<int>& g) {
    std::string s = "w[r1=" + std::to_string(r1) + "][g=";
    for (std::size_t i = 0; i < g.size(); ++i) s += (i ? "," : "") + std::to_string(g[i]);
    return s + "]";
}

inline std::string w_bell_name(const std::vector<int>& fA, const std::vector<int>& fB) {
    std::string s = "w[fA=";
    for (std::size_t i = 0; i < fA.size(); ++i) s += (i ? "," : "") + std::to_string(fA[i]);
    s += "][fB=";
    for (std::size_t i = 0; i < fB.size(); ++i) s += (i ? "," : "") + std::to_string(fB[i]);
    return s + "]";
}

// ---------------------------------------------------------------------------
// prepare-and-measure, deterministic strategies
//
// Unknowns w[r1][g] = p(lambda = g | r1). The naming already enforces
// measurement independence (no r2 index) and lambda-mediation makes the
// response depend on (lambda, r2) only, so the outcome is g(r2).

/// Reproduction under lambda-mediation:
/// sum_{g : g(r2)=u} w[r1][g] = p(u|r1,r2) for every r1, r2, u.
inline void add_lambda_mediation(ConstraintSystem& sys, const PrepMeasureScenario& scn) {
    const int P = scn.preparations(), M = scn.measurements(), K = scn.outcomes();
    DeterministicStrategySpace sp = response_function_space(M, K);
    for (int r1 = 0; r1 < P; ++r1)
        for (int r2 = 0; r2 < M; ++r2)
            for (int u = 0; u < K; ++u) {
                LinComb lhs;
                for (const auto& g : sp.responses)
                    if (g[static_cast<std::size_t>(r2)] == u) lhs[sys.unknown(w_prep_name(r1, g))] = 1;
                sys.add_equality(std::move(lhs),
                                 scn.stats.at(static_cast<std::size_t>(u),
                                              static_cast<std::size_t>(r1 * M + r2)));
            }
}

/// Normalization of the (structurally r2-free) ontic weights per preparation.
inline void add_measurement_independence(ConstraintSystem& sys, const PrepMeasureScenario& scn) {
    const int P = scn.preparations(), M = scn.measurements(), K = scn.outcomes();
    DeterministicStrategySpace sp = response_function_space(M, K);
    for (int r1 = 0; r1 < P; ++r1) {
        LinComb lhs;
        for (const auto& g : sp.responses) lhs[sys.unknown(w_prep_name(r1, g))] = 1;
        sys.add_equality(std::move(lhs), Rat(1));
    }
}

/// For each declared equivalence, the lambda-resolved mixtures agree for
/// every strategy. The operational premise is checked first.
inline void add_preparation_noncontextuality(ConstraintSystem& sys, const PrepMeasureScenario& scn) {
    const int M = scn.measurements(), K = scn.outcomes();
    for (std::size_t e = 0; e < scn.equivalences.size(); ++e) {
        const auto& eq = scn.equivalences[e];
        if (!dist_equal(mixture_dist(scn, eq.lhs), mixture_dist(scn, eq.rhs)))
            throw NotOperationallyEquivalent("declared equivalence " + std::to_string(e) +
                                             " does not hold operationally");
    }
    DeterministicStrategySpace sp = response_function_space(M, K);
    for (const auto& eq : scn.equivalences)
        for (const auto& g : sp.responses) {
            LinComb lhs;
            for (const auto& t : eq.lhs) lhs[sys.unknown(w_prep_name(t.preparation, g))] += t.weight;
            for (const auto& t : eq.rhs) lhs[sys.unknown(w_prep_name(t.preparation, g))] -= t.weight;
            sys.add_equality(std::move(lhs), Rat(0));
        }
}

/// Full preparation-noncontextuality system: lambda-mediation reproduction,
/// measurement independence, and the equivalence constraints.
inline ConstraintSystem compile_prep_noncontextual(const PrepMeasureScenario& scn) {
    ConstraintSystem sys;
    add_lambda_mediation(sys, scn);
    add_measurement_independence(sys, scn);
    add_preparation_noncontextuality(sys, scn);
    return sys;
}

// ---------------------------------------------------------------------------
// Bell, deterministic strategies
//
// Parameter independence restricts lambda to pairs of single-party response
// functions (Alice's carries no y, Bob's no x); outcome independence is
// automatic for deterministic responses; measurement independence makes the
// weights setting-free. Local causality = all three.

inline std::size_t bell_strategy_count(const BellScenario& b) {
    const auto& in = b.box.input().vars();
    const auto& out = b.box.output().vars();
    std::size_t n = 1;
    for (int x = 0; x < in[0].card; ++x) n *= static_cast<std::size_t>(out[0].card);
    for (int y = 0; y < in[1].card; ++y) n *= static_cast<std::size_t>(out[1].card);
    return n;
}

inline ConstraintSystem compile_bell_local(const BellScenario& b) {
    const int nx = b.box.input().vars()[0].card, ny = b.box.input().vars()[1].card;
    const int na = b.box.output().vars()[0].card, nb = b.box.output().vars()[1].card;
    DeterministicStrategySpace A = response_function_space(nx, na);
    DeterministicStrategySpace B = response_function_space(ny, nb);
    ConstraintSystem sys;
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
            for (int a = 0; a < na; ++a)
                for (int b2 = 0; b2 < nb; ++b2) {
                    LinComb lhs;
                    for (const auto& fA : A.responses) {
                        if (fA[static_cast<std::size_t>(x)] != a) continue;
                        for (const auto& fB : B.responses)
                            if (fB[static_cast<std::size_t>(y)] == b2)
                                lhs[sys.unknown(w_bell_name(fA, fB))] = 1;
                    }
                    sys.add_equality(std::move(lhs),
                                     b.box.at(static_cast<std::size_t>(a * nb + b2),
                                              static_cast<std::size_t>(x * ny + y)));
                }
    LinComb norm;
    for (const auto& fA : A.responses)
        for (const auto& fB : B.responses) norm[sys.unknown(w_bell_name(fA, fB))] = 1;
    sys.add_equality(std::move(norm), Rat(1));
    return sys;
}

// ---------------------------------------------------------------------------
// stochastic-lambda fragments
//
// Unknowns q[label][o=..][l=..][i=..] = p(out, lambda | in) for the labelled
// experiment; flat row-major indices throughout. Only fragments that stay
// linear in this parametrization are available; the others raise
// UnsupportedCombination from the dispatcher in the fine-tuning checker.

inline std::string q_name(const std::string& label, std::size_t out, std::size_t lambda,
                          std::size_t in) {
    return "q[" + label + "][o=" + std::to_string(out) + "][l=" + std::to_string(lambda) +
           "][i=" + std::to_string(in) + "]";
}

/// sum_l q(o,l|i) = p(o|i): the joint is an ontic extension of the table.
inline void add_reproduction_stochastic(ConstraintSystem& sys, const std::string& label,
                                        const CondDist& table, int nlambda) {
    const std::size_t no = table.output().size(), ni = table.input().size(),
                      nl = static_cast<std::size_t>(nlambda);
    for (std::size_t o = 0; o < no; ++o)
        for (std::size_t i = 0; i < ni; ++i) {
            LinComb lhs;
            for (std::size_t l = 0; l < nl; ++l) lhs[sys.unknown(q_name(label, o, l, i))] = 1;
            sys.add_equality(std::move(lhs), table.at(o, i));
        }
}

/// Measurement independence for a prepare-and-measure table: the
/// lambda-marginal may depend on r1 but not on r2.
inline void add_mi_prep_stochastic(ConstraintSystem& sys, const std::string& label,
                                   const PrepMeasureScenario& scn, int nlambda) {
    const int P = scn.preparations(), M = scn.measurements(), K = scn.outcomes();
    for (int r1 = 0; r1 < P; ++r1)
        for (int r2 = 1; r2 < M; ++r2)
            for (int l = 0; l < nlambda; ++l) {
                LinComb lhs;
                for (int u = 0; u < K; ++u) {
                    lhs[sys.unknown(q_name(label, static_cast<std::size_t>(u),
                                           static_cast<std::size_t>(l),
                                           static_cast<std::size_t>(r1 * M + r2)))] += 1;
                    lhs[sys.unknown(q_name(label, static_cast<std::size_t>(u),
                                           static_cast<std::size_t>(l),
                                           static_cast<std::size_t>(r1 * M)))] -= 1;
                }
                sys.add_equality(std::move(lhs), Rat(0));
            }
}

/// Full measurement independence: the lambda-marginal is the same for every
/// input of the experiment.
inline void add_mi_full_stochastic(ConstraintSystem& sys, const std::string& label,
                                   const CondDist& table, int nlambda) {
    const std::size_t ni = table.input().size(), no = table.output().size();
    for (std::size_t i = 1; i < ni; ++i)
        for (int l = 0; l < nlambda; ++l) {
            LinComb lhs;
            for (std::size_t o = 0; o < no; ++o) {
                lhs[sys.unknown(q_name(label, o, static_cast<std::size_t>(l), i))] += 1;
                lhs[sys.unknown(q_name(label, o, static_cast<std::size_t>(l), 0))] -= 1;
            }
            sys.add_equality(std::move(lhs), Rat(0));
        }
}

/// Measurement independence for a Bell box: no setting pair influences the
/// lambda-marginal.
inline void add_mi_bell_stochastic(ConstraintSystem& sys, const std::string& label,
                                   const BellScenario& b, int nlambda) {
    add_mi_full_stochastic(sys, label, b.box, nlambda);
}

/// Parameter independence: lambda-resolved one-party marginals do not depend
/// on the other party's setting.
inline void add_pi_stochastic(ConstraintSystem& sys, const std::string& label,
                              const BellScenario& bell, int nlambda) {
    const int nx = bell.box.input().vars()[0].card, ny = bell.box.input().vars()[1].card;
    const int na = bell.box.output().vars()[0].card, nb = bell.box.output().vars()[1].card;
    auto q = [&](int a, int b, int l, int x, int y) {
        return sys.unknown(q_name(label, static_cast<std::size_t>(a * nb + b),
                                  static_cast<std::size_t>(l),
                                  static_cast<std::size_t>(x * ny + y)));
    };
    for (int l = 0; l < nlambda; ++l) {
        for (int x = 0; x < nx; ++x)
            for (int a = 0; a < na; ++a)
                for (int y = 1; y < ny; ++y) {
                    LinComb lhs;
                    for (int b = 0; b < nb; ++b) {
                        lhs[q(a, b, l, x, y)] += 1;
                        lhs[q(a, b, l, x, 0)] -= 1;
                    }
                    sys.add_equality(std::move(lhs), Rat(0));
                }
        for (int y = 0; y < ny; ++y)
            for (int b = 0; b < nb; ++b)
                for (int x = 1; x < nx; ++x) {
                    LinComb lhs;
                    for (int a = 0; a < na; ++a) {
                        lhs[q(a, b, l, x, y)] += 1;
                        lhs[q(a, b, l, 0, y)] -= 1;
                    }
                    sys.add_equality(std::move(lhs), Rat(0));
                }
    }
}

// ---------------------------------------------------------------------------
// generic ontological-equation rows

/// Adds, for every (processed output, processed input) cell, the equality of
/// the lambda-resolved processed tables of two labelled experiments:
/// sum coefficients * q[labelF](t,l|s) - sum coefficients * q[labelG](t,l|s) = 0,
/// where the coefficients come from the ontological combs' pre and post
/// tables. Linear because the combs are fixed and the joints are unknown.
inline void add_ont_equation_rows(ConstraintSystem& sys, const OntComb& hf,
                                  const std::string& labelF, const OntComb& hg,
                                  const std::string& labelG) {
    if (!hf.R().same_shape(hg.R()) || !hf.U().same_shape(hg.U()) ||
        !hf.Om().same_shape(hg.Om()))
        throw SpaceMismatch("ontological equation requires matching processed slots");
    auto accumulate = [&](const OntComb& h, const std::string& label, const Rat& sign,
                          std::size_t uo, std::size_t r, LinComb& lhs) {
        const std::size_t ns = h.S().size(), nt = h.T().size(), nc = h.C().size(),
                          nl = h.Lam().size();
        for (std::size_t l = 0; l < nl; ++l)
            for (std::size_t c = 0; c < nc; ++c)
                for (std::size_t t = 0; t < nt; ++t) {
                    const Rat& pp = h.post().at(uo, (l * nc + c) * nt + t);
                    if (pp == 0) continue;
                    for (std::size_t s = 0; s < ns; ++s) {
                        const Rat& pr = h.pre().at(c * ns + s, r);
                        if (pr == 0) continue;
                        lhs[sys.unknown(q_name(label, t, l, s))] += sign * pp * pr;
                    }
                }
    };
    const std::size_t nuo = hf.U().size() * hf.Om().size(), nr = hf.R().size();
    for (std::size_t uo = 0; uo < nuo; ++uo)
        for (std::size_t r = 0; r < nr; ++r) {
            LinComb lhs;
            accumulate(hf, labelF, Rat(1), uo, r, lhs);
            accumulate(hg, labelG, Rat(-1), uo, r, lhs);
            sys.add_equality(std::move(lhs), Rat(0));
        }
}

/// Pins a labelled joint to explicit values: q(o,l|i) = joint(o*nl+l | i).
inline void add_planted_joint(ConstraintSystem& sys, const std::string& label,
                              const CondDist& joint, int nlambda) {
    const std::size_t nl = static_cast<std::size_t>(nlambda), ni = joint.input().size();
    const std::size_t no = joint.output().size() / nl;
    for (std::size_t o = 0; o < no; ++o)
        for (std::size_t l = 0; l < nl; ++l)
            for (std::size_t i = 0; i < ni; ++i) {
                LinComb lhs;
                lhs[sys.unknown(q_name(label, o, l, i))] = 1;
                sys.add_equality(std::move(lhs), joint.at(o * nl + l, i));
            }
}

/// Time-symmetry system for one candidate bijection k over the ontic
/// states: reproduction for both experiments plus the lambda-resolved swap
/// equalities q_E(u1,u2,l | r1,r2) = q_E'(u2,u1,k(l) | r2,r1). Planted
/// joints, when present, are pinned. The operational premise is the
/// caller's responsibility.
inline ConstraintSystem time_symmetry_system(const TimeSymScenario& ts,
                                             const std::vector<int>& k) {
    const int L = ts.lambda_size;
    if (k.size() != static_cast<std::size_t>(L)) throw ShapeMismatch("bijection k has wrong size");
    const int nr1 = ts.E.input().vars()[0].card, nr2 = ts.E.input().vars()[1].card;
    const int nu1 = ts.E.output().vars()[0].card, nu2 = ts.E.output().vars()[1].card;
    ConstraintSystem sys;
    add_reproduction_stochastic(sys, "E", ts.E, L);
    add_reproduction_stochastic(sys, "Ep", ts.Eprime, L);
    for (int u1 = 0; u1 < nu1; ++u1)
        for (int u2 = 0; u2 < nu2; ++u2)
            for (int l = 0; l < L; ++l)
                for (int r1 = 0; r1 < nr1; ++r1)
                    for (int r2 = 0; r2 < nr2; ++r2) {
                        LinComb lhs;
                        lhs[sys.unknown(q_name("E", static_cast<std::size_t>(u1 * nu2 + u2),
                                               static_cast<std::size_t>(l),
                                               static_cast<std::size_t>(r1 * nr2 + r2)))] += 1;
                        lhs[sys.unknown(q_name("Ep", static_cast<std::size_t>(u2 * nu1 + u1),
                                               static_cast<std::size_t>(k[static_cast<std::size_t>(l)]),
                                               static_cast<std::size_t>(r2 * nr1 + r1)))] -= 1;
                        sys.add_equality(std::move(lhs), Rat(0));
                    }
    if (ts.plantedE) add_planted_joint(sys, "E", *ts.plantedE, L);
    if (ts.plantedEprime) add_planted_joint(sys, "Ep", *ts.plantedEprime, L);
    return sys;
}

}  // namespace opfine
