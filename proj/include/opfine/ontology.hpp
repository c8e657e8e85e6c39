#pragma once

#include <memory>
#include <vector>

#include "opfine/comb.hpp"

namespace opfine {

/// Sums the trailing factor of a product output space; `head` is the leading
/// factor that survives. Output indices must be head-major (the convention
/// used by every product space in this library).
inline CondDist sum_output_tail(const CondDist& d, const FiniteSpace& head) {
    const std::size_t nh = head.size(), ntotal = d.output().size();
    if (nh == 0 || ntotal % nh != 0) throw ShapeMismatch("sum_output_tail: head does not divide output");
    const std::size_t ntail = ntotal / nh, ni = d.input().size();
    std::vector<Rat> t(nh * ni, Rat(0));
    for (std::size_t h = 0; h < nh; ++h)
        for (std::size_t k = 0; k < ntail; ++k)
            for (std::size_t i = 0; i < ni; ++i) t[h * ni + i] += d.at(h * ntail + k, i);
    return CondDist::make(d.input(), head, std::move(t));
}

/// A joint table p(u,lambda|r) whose lambda-marginal reproduces a base
/// distribution exactly. The joint's output space is base.output (x) Lambda.
class OnticExtensionDist {
  public:
    static OnticExtensionDist make(CondDist base, FiniteSpace ontic, CondDist joint) {
        if (!joint.input().same_shape(base.input()) ||
            !joint.output().same_shape(base.output().product(ontic)))
            throw SpaceMismatch("ontic extension has wrong shape");
        CondDist marg = sum_output_tail(joint, base.output());
        if (!dist_equal(marg, base))
            throw ShapeMismatch("joint table does not marginalize to the base distribution");
        return OnticExtensionDist(std::move(base), std::move(ontic), std::move(joint));
    }

    const CondDist& base() const { return base_; }
    const FiniteSpace& ontic() const { return ontic_; }
    const CondDist& joint() const { return joint_; }

  private:
    OnticExtensionDist(CondDist base, FiniteSpace ontic, CondDist joint)
        : base_(std::move(base)), ontic_(std::move(ontic)), joint_(std::move(joint)) {}

    CondDist base_;
    FiniteSpace ontic_;
    CondDist joint_;
};

/// Product extension p(u,lambda|r) = p(u|r) * prior(lambda): the ontic and
/// operational variables are uncorrelated.
inline OnticExtensionDist trivial_extension(const CondDist& d, const FiniteSpace& ontic,
                                            const std::vector<Rat>& prior) {
    if (prior.size() != ontic.size()) throw ShapeMismatch("prior size does not match ontic space");
    Rat sum = 0;
    for (const Rat& p : prior) {
        if (p < 0) throw NegativeEntry("negative prior entry");
        sum += p;
    }
    if (sum != 1) throw NotNormalized("prior sums to " + rat_to_string(sum));
    const std::size_t nl = ontic.size(), nu = d.output().size(), ni = d.input().size();
    std::vector<Rat> t(nu * nl * ni);
    for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t l = 0; l < nl; ++l)
            for (std::size_t i = 0; i < ni; ++i) t[(u * nl + l) * ni + i] = d.at(u, i) * prior[l];
    CondDist joint = CondDist::make(d.input(), d.output().product(ontic), std::move(t));
    return OnticExtensionDist::make(d, ontic, std::move(joint));
}

/// A classical processing at the ontological level,
/// {p(t,lambda|s)} -> {p(u,omega|r)}: pre p(c,s|r) as in the operational
/// case, post p(u,omega|lambda,c,t).
class OntComb {
  public:
    static OntComb make(FiniteSpace R, FiniteSpace S, FiniteSpace T, FiniteSpace U, FiniteSpace C,
                        FiniteSpace Lam, FiniteSpace Om, CondDist pre, CondDist post) {
        if (!pre.input().same_shape(R) || !pre.output().same_shape(C.product(S)))
            throw SpaceMismatch("ontological comb pre table has wrong shape");
        if (!post.input().same_shape(Lam.product(C).product(T)) || !post.output().same_shape(U.product(Om)))
            throw SpaceMismatch("ontological comb post table has wrong shape");
        return OntComb(std::move(R), std::move(S), std::move(T), std::move(U), std::move(C),
                       std::move(Lam), std::move(Om), std::move(pre), std::move(post));
    }

    const FiniteSpace& R() const { return R_; }
    const FiniteSpace& S() const { return S_; }
    const FiniteSpace& T() const { return T_; }
    const FiniteSpace& U() const { return U_; }
    const FiniteSpace& C() const { return C_; }
    const FiniteSpace& Lam() const { return Lam_; }
    const FiniteSpace& Om() const { return Om_; }
    const CondDist& pre() const { return pre_; }
    /// input index (lambda * |C| + c) * |T| + t, output index u * |Omega| + omega
    const CondDist& post() const { return post_; }

  private:
    OntComb(FiniteSpace R, FiniteSpace S, FiniteSpace T, FiniteSpace U, FiniteSpace C,
            FiniteSpace Lam, FiniteSpace Om, CondDist pre, CondDist post)
        : R_(std::move(R)), S_(std::move(S)), T_(std::move(T)), U_(std::move(U)), C_(std::move(C)),
          Lam_(std::move(Lam)), Om_(std::move(Om)), pre_(std::move(pre)), post_(std::move(post)) {}

    FiniteSpace R_, S_, T_, U_, C_, Lam_, Om_;
    CondDist pre_, post_;
};

/// p(u,omega,lambda|r) = sum_{s,t,c} post(u,omega|lambda,c,t) d(t,lambda|s) pre(c,s|r).
/// The joint input d has output space T (x) Lambda; lambda is kept in the
/// result so conditionals on it remain available.
inline CondDist apply_ont_keep_lambda(const OntComb& h, const CondDist& d) {
    if (!d.input().same_shape(h.S()) || !d.output().same_shape(h.T().product(h.Lam())))
        throw SpaceMismatch("apply_ont: joint does not match ontological comb slot");
    const std::size_t nr = h.R().size(), ns = h.S().size(), nt = h.T().size(), nu = h.U().size(),
                      nc = h.C().size(), nl = h.Lam().size(), nw = h.Om().size();
    FiniteSpace outSpace = h.U().product(h.Om()).product(h.Lam());
    std::vector<Rat> out(nu * nw * nl * nr, Rat(0));
    for (std::size_t l = 0; l < nl; ++l)
        for (std::size_t c = 0; c < nc; ++c)
            for (std::size_t t = 0; t < nt; ++t) {
                const std::size_t postIn = (l * nc + c) * nt + t;
                for (std::size_t uo = 0; uo < nu * nw; ++uo) {
                    const Rat& pp = h.post().at(uo, postIn);
                    if (pp == 0) continue;
                    for (std::size_t s = 0; s < ns; ++s) {
                        const Rat& pd = d.at(t * nl + l, s);
                        if (pd == 0) continue;
                        const Rat prod = pp * pd;
                        for (std::size_t r = 0; r < nr; ++r) {
                            const Rat& pr = h.pre().at(c * ns + s, r);
                            if (pr != 0) out[(uo * nl + l) * nr + r] += prod * pr;
                        }
                    }
                }
            }
    return CondDist::make(h.R(), std::move(outSpace), std::move(out));
}

/// p(u,omega|r): as above with lambda summed out.
inline CondDist apply_ont(const OntComb& h, const CondDist& d) {
    return sum_output_tail(apply_ont_keep_lambda(h, d), h.U().product(h.Om()));
}

inline OntComb identity_ont(const FiniteSpace& S, const FiniteSpace& T, const FiniteSpace& Lam) {
    FiniteSpace C = FiniteSpace::trivial("c");
    CondDist pre = CondDist::deterministic(S, C.product(S), [](std::size_t r) { return r; });
    const std::size_t nt = T.size(), nl = Lam.size();
    CondDist post = CondDist::deterministic(Lam.product(C).product(T), T.product(Lam),
                                            [&](std::size_t i) {
                                                std::size_t t = i % nt, l = i / nt;
                                                return t * nl + l;
                                            });
    return OntComb::make(S, S, T, T, C, Lam, Lam, std::move(pre), std::move(post));
}

/// hg after hf at the ontological level; hf's omega feeds hg's lambda.
inline OntComb compose_ont(const OntComb& hg, const OntComb& hf) {
    if (!hg.S().same_shape(hf.R()) || !hg.T().same_shape(hf.U()) || !hg.Lam().same_shape(hf.Om()))
        throw SpaceMismatch("compose_ont: slots do not chain");
    FiniteSpace C = hg.C().product(hf.C());
    const std::size_t ncg = hg.C().size(), ncf = hf.C().size();
    const std::size_t ns = hf.S().size(), nt = hf.T().size(), nr = hf.R().size(),
                      nu = hf.U().size();
    const std::size_t nq = hg.R().size(), nwidth = hg.U().size();
    const std::size_t nl = hf.Lam().size(), nm = hf.Om().size(), nom = hg.Om().size();

    FiniteSpace preOut = C.product(hf.S());
    std::vector<Rat> pre(preOut.size() * nq, Rat(0));
    for (std::size_t cg = 0; cg < ncg; ++cg)
        for (std::size_t cf = 0; cf < ncf; ++cf)
            for (std::size_t s = 0; s < ns; ++s) {
                std::size_t o = (cg * ncf + cf) * ns + s;
                for (std::size_t r = 0; r < nr; ++r) {
                    const Rat& pf = hf.pre().at(cf * ns + s, r);
                    if (pf == 0) continue;
                    for (std::size_t q = 0; q < nq; ++q) {
                        const Rat& pg = hg.pre().at(cg * nr + r, q);
                        if (pg != 0) pre[o * nq + q] += pf * pg;
                    }
                }
            }

    FiniteSpace postIn = hf.Lam().product(C).product(hf.T());
    FiniteSpace postOut = hg.U().product(hg.Om());
    std::vector<Rat> post(postOut.size() * postIn.size(), Rat(0));
    for (std::size_t l = 0; l < nl; ++l)
        for (std::size_t cg = 0; cg < ncg; ++cg)
            for (std::size_t cf = 0; cf < ncf; ++cf)
                for (std::size_t t = 0; t < nt; ++t) {
                    std::size_t i = (l * (ncg * ncf) + cg * ncf + cf) * nt + t;
                    for (std::size_t u = 0; u < nu; ++u)
                        for (std::size_t mu = 0; mu < nm; ++mu) {
                            const Rat& qf = hf.post().at(u * nm + mu, (l * ncf + cf) * nt + t);
                            if (qf == 0) continue;
                            for (std::size_t w = 0; w < nwidth; ++w)
                                for (std::size_t om = 0; om < nom; ++om) {
                                    const Rat& qg =
                                        hg.post().at(w * nom + om, (mu * ncg + cg) * nu + u);
                                    if (qg != 0) post[(w * nom + om) * postIn.size() + i] += qf * qg;
                                }
                        }
                }

    return OntComb::make(hg.R(), hf.S(), hf.T(), hg.U(), C, hf.Lam(), hg.Om(),
                         CondDist::make(hg.R(), std::move(preOut), std::move(pre)),
                         CondDist::make(std::move(postIn), std::move(postOut), std::move(post)));
}

inline OntComb mix_ont(const Rat& sigma, const OntComb& hf, const OntComb& hg) {
    if (!in_unit_interval(sigma)) throw SigmaOutOfRange("sigma = " + rat_to_string(sigma));
    if (!hf.R().same_shape(hg.R()) || !hf.S().same_shape(hg.S()) || !hf.T().same_shape(hg.T()) ||
        !hf.U().same_shape(hg.U()) || !hf.Lam().same_shape(hg.Lam()) || !hf.Om().same_shape(hg.Om()))
        throw SpaceMismatch("mix_ont: spaces differ");
    FiniteSpace C = FiniteSpace::single("m", 2).product(hf.C()).product(hg.C());
    const std::size_t ncf = hf.C().size(), ncg = hg.C().size(), nc = 2 * ncf * ncg;
    const std::size_t nr = hf.R().size(), ns = hf.S().size(), nt = hf.T().size(),
                      nu = hf.U().size(), nl = hf.Lam().size(), nom = hf.Om().size();

    FiniteSpace preOut = C.product(hf.S());
    std::vector<Rat> pre(preOut.size() * nr, Rat(0));
    const Rat wf = sigma / Rat(static_cast<long long>(ncg));
    const Rat wg = (1 - sigma) / Rat(static_cast<long long>(ncf));
    for (std::size_t cf = 0; cf < ncf; ++cf)
        for (std::size_t cg = 0; cg < ncg; ++cg)
            for (std::size_t s = 0; s < ns; ++s)
                for (std::size_t r = 0; r < nr; ++r) {
                    std::size_t o0 = ((0 * ncf + cf) * ncg + cg) * ns + s;
                    std::size_t o1 = ((1 * ncf + cf) * ncg + cg) * ns + s;
                    pre[o0 * nr + r] = wf * hf.pre().at(cf * ns + s, r);
                    pre[o1 * nr + r] = wg * hg.pre().at(cg * ns + s, r);
                }

    FiniteSpace postIn = hf.Lam().product(C).product(hf.T());
    FiniteSpace postOut = hf.U().product(hf.Om());
    std::vector<Rat> post(postOut.size() * postIn.size(), Rat(0));
    for (std::size_t l = 0; l < nl; ++l)
        for (std::size_t cf = 0; cf < ncf; ++cf)
            for (std::size_t cg = 0; cg < ncg; ++cg)
                for (std::size_t t = 0; t < nt; ++t)
                    for (std::size_t uo = 0; uo < nu * nom; ++uo) {
                        std::size_t i0 = (l * nc + (0 * ncf + cf) * ncg + cg) * nt + t;
                        std::size_t i1 = (l * nc + (1 * ncf + cf) * ncg + cg) * nt + t;
                        post[uo * postIn.size() + i0] = hf.post().at(uo, (l * ncf + cf) * nt + t);
                        post[uo * postIn.size() + i1] = hg.post().at(uo, (l * ncg + cg) * nt + t);
                    }

    return OntComb::make(hf.R(), hf.S(), hf.T(), hf.U(), C, hf.Lam(), hf.Om(),
                         CondDist::make(hf.R(), std::move(preOut), std::move(pre)),
                         CondDist::make(std::move(postIn), std::move(postOut), std::move(post)));
}

/// The structurally forced ontological counterpart of a constructor-algebra
/// comb: identity, set-input and discard carry lambda through unchanged
/// (omega == lambda); a permutation relabels it by the bijection k (identity
/// by default); compose and mix lift recursively. Raw-table combs have no
/// forced lift and raise UnliftableComb.
inline OntComb canonical_lift(const Comb& f, const FiniteSpace& Lam, std::vector<int> k = {}) {
    const std::size_t nl = Lam.size();
    if (k.empty()) {
        k.resize(nl);
        for (std::size_t i = 0; i < nl; ++i) k[i] = static_cast<int>(i);
    }
    if (k.size() != nl) throw ShapeMismatch("bijection k has wrong size");

    auto lift_pointwise = [&](const Comb& c, bool relabel) {
        // post(u,omega|lambda,c,t) = post_op(u|c,t) * delta_{omega, k(lambda)}
        const std::size_t nc = c.C().size(), nt = c.T().size(), nu = c.U().size();
        FiniteSpace postIn = Lam.product(c.C()).product(c.T());
        FiniteSpace postOut = c.U().product(Lam);
        std::vector<Rat> post(postOut.size() * postIn.size(), Rat(0));
        for (std::size_t l = 0; l < nl; ++l) {
            std::size_t om = relabel ? static_cast<std::size_t>(k[l]) : l;
            for (std::size_t cc = 0; cc < nc; ++cc)
                for (std::size_t t = 0; t < nt; ++t)
                    for (std::size_t u = 0; u < nu; ++u)
                        post[(u * nl + om) * postIn.size() + (l * nc + cc) * nt + t] =
                            c.post().at(u, cc * nt + t);
        }
        return OntComb::make(c.R(), c.S(), c.T(), c.U(), c.C(), Lam, Lam, c.pre(),
                             CondDist::make(std::move(postIn), std::move(postOut), std::move(post)));
    };

    switch (f.expr().tag) {
        case CombExpr::Tag::Identity:
        case CombExpr::Tag::SetInput:
        case CombExpr::Tag::DiscardOutput:
            return lift_pointwise(f, false);
        case CombExpr::Tag::Permutation:
            return lift_pointwise(f, true);
        case CombExpr::Tag::Compose:
            return compose_ont(canonical_lift(*f.expr().a, Lam, k),
                               canonical_lift(*f.expr().b, Lam, k));
        case CombExpr::Tag::Mix:
            return mix_ont(f.expr().sigma, canonical_lift(*f.expr().a, Lam, k),
                           canonical_lift(*f.expr().b, Lam, k));
        case CombExpr::Tag::Raw:
            break;
    }
    throw UnliftableComb("comb was not built from the constructor algebra; supply a lift explicitly");
}

/// Condition: for every lambda and every deterministic base channel, the
/// omega-marginal of the ontological action equals the operational action.
inline bool check_ontic_extension_condition(const OntComb& h, const Comb& f) {
    if (!h.R().same_shape(f.R()) || !h.S().same_shape(f.S()) || !h.T().same_shape(f.T()) ||
        !h.U().same_shape(f.U()))
        throw SpaceMismatch("ontological and operational comb slots differ");
    const std::size_t nl = h.Lam().size(), nt = h.T().size();
    bool ok = true;
    for_each_affine_basis(f.S(), f.T(), [&](const CondDist& d0) {
        if (!ok) return;
        CondDist expected = apply(f, d0);
        for (std::size_t l0 = 0; l0 < nl && ok; ++l0) {
            CondDist joint = CondDist::from_fn(h.S(), h.T().product(h.Lam()),
                                               [&](std::size_t o, std::size_t s) {
                                                   std::size_t t = o / nl, l = o % nl;
                                                   return l == l0 ? d0.at(t, s) : Rat(0);
                                               });
            (void)nt;
            CondDist got = sum_output_tail(apply_ont(h, joint), h.U());
            if (!dist_equal(got, expected)) ok = false;
        }
    });
    return ok;
}

/// Sufficient statistics: on every joint in the context, conditioning the
/// processed outcome on omega gives the same distribution as conditioning on
/// lambda, for every (omega, lambda) pair of nonzero joint probability.
/// Zero-probability conditioning events are vacuously satisfied.
inline bool check_sufficient_statistics(const OntComb& h, const std::vector<CondDist>& context) {
    const std::size_t nl = h.Lam().size(), nw = h.Om().size(), nu = h.U().size();
    for (const CondDist& d : context) {
        CondDist J = apply_ont_keep_lambda(h, d);  // p(u, omega, lambda | r)
        const std::size_t nr = J.input().size();
        for (std::size_t r = 0; r < nr; ++r) {
            std::vector<Rat> massPair(nw * nl, Rat(0)), massW(nw, Rat(0)), massL(nl, Rat(0));
            for (std::size_t u = 0; u < nu; ++u)
                for (std::size_t w = 0; w < nw; ++w)
                    for (std::size_t l = 0; l < nl; ++l) {
                        const Rat& p = J.at((u * nw + w) * nl + l, r);
                        massPair[w * nl + l] += p;
                        massW[w] += p;
                        massL[l] += p;
                    }
            for (std::size_t w = 0; w < nw; ++w)
                for (std::size_t l = 0; l < nl; ++l) {
                    if (massPair[w * nl + l] == 0) continue;
                    for (std::size_t u = 0; u < nu; ++u) {
                        Rat pw = 0, pl = 0;
                        for (std::size_t l2 = 0; l2 < nl; ++l2) pw += J.at((u * nw + w) * nl + l2, r);
                        for (std::size_t w2 = 0; w2 < nw; ++w2) pl += J.at((u * nw + w2) * nl + l, r);
                        // p(u|omega,r) != p(u|lambda,r), cross-multiplied
                        if (pw * massL[l] != pl * massW[w]) return false;
                    }
                }
        }
    }
    return true;
}

/// Extensional equality of ontological processings: equal action on every
/// deterministic joint in the input slot.
inline bool ont_action_equal(const OntComb& h1, const OntComb& h2) {
    if (!h1.R().same_shape(h2.R()) || !h1.S().same_shape(h2.S()) || !h1.T().same_shape(h2.T()) ||
        !h1.U().same_shape(h2.U()) || !h1.Lam().same_shape(h2.Lam()) ||
        !h1.Om().same_shape(h2.Om()))
        return false;
    bool equal = true;
    for_each_affine_basis(h1.S(), h1.T().product(h1.Lam()), [&](const CondDist& d) {
        if (equal && !dist_equal(apply_ont(h1, d), apply_ont(h2, d))) equal = false;
    });
    return equal;
}

}  // namespace opfine
