#pragma once

#include <memory>
#include <string>
#include <vector>

#include "opfine/cond_dist.hpp"

namespace opfine {

class Comb;

/// Construction record of a Comb. Canonical lifting to the ontological level
/// is defined by recursion over this structure; combs built from raw tables
/// carry Tag::Raw and cannot be lifted canonically.
struct CombExpr {
    enum class Tag { Identity, Permutation, SetInput, DiscardOutput, Compose, Mix, Raw };
    Tag tag = Tag::Raw;
    std::vector<int> perm_in, perm_out;    // Permutation
    Rat sigma;                             // Mix
    std::shared_ptr<const Comb> a, b;      // Compose: a after b; Mix: a, b
};

/// A classical processing {p(t|s)} -> {p(u|r)}: a pre-processing p(c,s|r)
/// and a post-processing p(u|c,t) sharing the correlation variable c.
class Comb {
  public:
    const FiniteSpace& R() const { return R_; }
    const FiniteSpace& S() const { return S_; }
    const FiniteSpace& T() const { return T_; }
    const FiniteSpace& U() const { return U_; }
    const FiniteSpace& C() const { return C_; }
    const CondDist& pre() const { return pre_; }    // input R, output C (x) S
    const CondDist& post() const { return post_; }  // input C (x) T, output U
    const CombExpr& expr() const { return *expr_; }

    /// General comb from explicit tables. Not canonically liftable.
    static Comb from_tables(FiniteSpace R, FiniteSpace S, FiniteSpace T, FiniteSpace U,
                            FiniteSpace C, CondDist pre, CondDist post) {
        if (!pre.input().same_shape(R) || !pre.output().same_shape(C.product(S)))
            throw SpaceMismatch("comb pre table has wrong shape");
        if (!post.input().same_shape(C.product(T)) || !post.output().same_shape(U))
            throw SpaceMismatch("comb post table has wrong shape");
        auto e = std::make_shared<CombExpr>();
        e->tag = CombExpr::Tag::Raw;
        return Comb(std::move(R), std::move(S), std::move(T), std::move(U), std::move(C),
                    std::move(pre), std::move(post), std::move(e));
    }

    friend Comb identity_comb(const FiniteSpace&, const FiniteSpace&);
    friend Comb permutation_comb(const FiniteSpace&, const FiniteSpace&, const std::vector<int>&,
                                 const std::vector<int>&);
    friend Comb set_input_comb(const FiniteSpace&, const FiniteSpace&, const std::string&, int);
    friend Comb discard_output_comb(const FiniteSpace&, const FiniteSpace&,
                                    const std::vector<std::string>&);
    friend Comb compose_combs(const Comb&, const Comb&);
    friend Comb mix_combs(const Rat&, const Comb&, const Comb&);

  private:
    Comb(FiniteSpace R, FiniteSpace S, FiniteSpace T, FiniteSpace U, FiniteSpace C, CondDist pre,
         CondDist post, std::shared_ptr<const CombExpr> expr)
        : R_(std::move(R)), S_(std::move(S)), T_(std::move(T)), U_(std::move(U)), C_(std::move(C)),
          pre_(std::move(pre)), post_(std::move(post)), expr_(std::move(expr)) {}

    FiniteSpace R_, S_, T_, U_, C_;
    CondDist pre_, post_;
    std::shared_ptr<const CombExpr> expr_;
};

/// p(u|r) = sum_{s,t,c} post(u|c,t) d(t|s) pre(c,s|r).
inline CondDist apply(const Comb& f, const CondDist& d) {
    if (!d.input().same_shape(f.S()) || !d.output().same_shape(f.T()))
        throw SpaceMismatch("apply: distribution does not match comb slot");
    const std::size_t nr = f.R().size(), ns = f.S().size(), nt = f.T().size(),
                      nu = f.U().size(), nc = f.C().size();
    std::vector<Rat> out(nu * nr, Rat(0));
    // mid[(u*nc + c)*ns + s] = sum_t post(u|c,t) d(t|s)
    std::vector<Rat> mid(nu * nc * ns, Rat(0));
    for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t c = 0; c < nc; ++c)
            for (std::size_t t = 0; t < nt; ++t) {
                const Rat& p = f.post().at(u, c * nt + t);
                if (p == 0) continue;
                for (std::size_t s = 0; s < ns; ++s) {
                    const Rat& q = d.at(t, s);
                    if (q != 0) mid[(u * nc + c) * ns + s] += p * q;
                }
            }
    for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t c = 0; c < nc; ++c)
            for (std::size_t s = 0; s < ns; ++s) {
                const Rat& m = mid[(u * nc + c) * ns + s];
                if (m == 0) continue;
                for (std::size_t r = 0; r < nr; ++r) {
                    const Rat& p = f.pre().at(c * ns + s, r);
                    if (p != 0) out[u * nr + r] += m * p;
                }
            }
    return CondDist::make(f.R(), f.U(), std::move(out));
}

/// Trivial pre and post processing: apply(identity_comb(S,T), d) == d.
inline Comb identity_comb(const FiniteSpace& S, const FiniteSpace& T) {
    FiniteSpace C = FiniteSpace::trivial("c");
    CondDist pre = CondDist::deterministic(S, C.product(S), [](std::size_t r) { return r; });
    CondDist post = CondDist::deterministic(C.product(T), T, [](std::size_t i) { return i; });
    auto e = std::make_shared<CombExpr>();
    e->tag = CombExpr::Tag::Identity;
    return Comb(S, S, T, T, C, std::move(pre), std::move(post), std::move(e));
}

/// Pre sets s_i = r_{perm_in[i]}, post sets u_i = t_{perm_out[i]}.
inline Comb permutation_comb(const FiniteSpace& S, const FiniteSpace& T,
                             const std::vector<int>& perm_in, const std::vector<int>& perm_out) {
    auto validate = [](const FiniteSpace& sp, const std::vector<int>& perm) {
        if (perm.size() != sp.arity()) throw CardinalityMismatch("permutation arity mismatch");
        std::vector<bool> seen(perm.size(), false);
        for (std::size_t i = 0; i < perm.size(); ++i) {
            int j = perm[i];
            if (j < 0 || static_cast<std::size_t>(j) >= perm.size() || seen[static_cast<std::size_t>(j)])
                throw CardinalityMismatch("not a permutation");
            seen[static_cast<std::size_t>(j)] = true;
            if (sp.vars()[i].card != sp.vars()[static_cast<std::size_t>(j)].card)
                throw CardinalityMismatch("permuted variables have different cardinalities");
        }
    };
    validate(S, perm_in);
    validate(T, perm_out);
    FiniteSpace C = FiniteSpace::trivial("c");
    CondDist pre = CondDist::deterministic(S, C.product(S), [&](std::size_t r) {
        Assignment ra = S.assignment_of(r), sa(S.arity());
        for (std::size_t i = 0; i < sa.size(); ++i) sa[i] = ra[static_cast<std::size_t>(perm_in[i])];
        return S.index_of(sa);
    });
    CondDist post = CondDist::deterministic(C.product(T), T, [&](std::size_t i) {
        Assignment ta = T.assignment_of(i), ua(T.arity());
        for (std::size_t j = 0; j < ua.size(); ++j) ua[j] = ta[static_cast<std::size_t>(perm_out[j])];
        return T.index_of(ua);
    });
    auto e = std::make_shared<CombExpr>();
    e->tag = CombExpr::Tag::Permutation;
    e->perm_in = perm_in;
    e->perm_out = perm_out;
    return Comb(S, S, T, T, C, std::move(pre), std::move(post), std::move(e));
}

/// Pre fixes the named input variable to `value`; remaining inputs become
/// the controlled variables of the processed experiment.
inline Comb set_input_comb(const FiniteSpace& S, const FiniteSpace& T, const std::string& var,
                           int value) {
    int pos = S.find(var);
    if (pos < 0) throw UnknownVariable("set_input_comb: unknown variable '" + var + "'");
    if (value < 0 || value >= S.vars()[static_cast<std::size_t>(pos)].card)
        throw ValueOutOfRange("set_input_comb: value out of range for '" + var + "'");
    std::vector<int> rest;
    for (std::size_t i = 0; i < S.arity(); ++i)
        if (static_cast<int>(i) != pos) rest.push_back(static_cast<int>(i));
    FiniteSpace R = S.subspace(rest);
    FiniteSpace C = FiniteSpace::trivial("c");
    CondDist pre = CondDist::deterministic(R, C.product(S), [&](std::size_t r) {
        Assignment ra = R.assignment_of(r), sa(S.arity());
        std::size_t j = 0;
        for (std::size_t i = 0; i < S.arity(); ++i)
            sa[i] = (static_cast<int>(i) == pos) ? value : ra[j++];
        return S.index_of(sa);
    });
    CondDist post = CondDist::deterministic(C.product(T), T, [](std::size_t i) { return i; });
    auto e = std::make_shared<CombExpr>();
    e->tag = CombExpr::Tag::SetInput;
    return Comb(std::move(R), S, T, T, C, std::move(pre), std::move(post), std::move(e));
}

/// Post marginalizes out the listed output variables.
inline Comb discard_output_comb(const FiniteSpace& S, const FiniteSpace& T,
                                const std::vector<std::string>& discard) {
    std::vector<bool> drop(T.arity(), false);
    for (const auto& name : discard) {
        int p = T.find(name);
        if (p < 0) throw UnknownVariable("discard_output_comb: unknown variable '" + name + "'");
        drop[static_cast<std::size_t>(p)] = true;
    }
    std::vector<int> keep;
    for (std::size_t i = 0; i < T.arity(); ++i)
        if (!drop[i]) keep.push_back(static_cast<int>(i));
    FiniteSpace U = T.subspace(keep);
    FiniteSpace C = FiniteSpace::trivial("c");
    CondDist pre = CondDist::deterministic(S, C.product(S), [](std::size_t r) { return r; });
    CondDist post = CondDist::deterministic(C.product(T), U, [&](std::size_t i) {
        Assignment ta = T.assignment_of(i);
        Assignment ua;
        ua.reserve(keep.size());
        for (int p : keep) ua.push_back(ta[static_cast<std::size_t>(p)]);
        return U.index_of(ua);
    });
    auto e = std::make_shared<CombExpr>();
    e->tag = CombExpr::Tag::DiscardOutput;
    return Comb(S, S, T, std::move(U), C, std::move(pre), std::move(post), std::move(e));
}

/// g after f. The result's correlation variable is C_g (x) C_f; the middle
/// operational variables are summed into the pre and post tables.
inline Comb compose_combs(const Comb& g, const Comb& f) {
    if (!g.S().same_shape(f.R()) || !g.T().same_shape(f.U()))
        throw SpaceMismatch("compose_combs: slots do not chain");
    FiniteSpace C = g.C().product(f.C());
    const std::size_t ncg = g.C().size(), ncf = f.C().size();
    const std::size_t ns = f.S().size(), nt = f.T().size();
    const std::size_t nq = g.R().size(), nw = g.U().size();
    const std::size_t nr = f.R().size(), nu = f.U().size();

    FiniteSpace preOut = C.product(f.S());
    std::vector<Rat> pre(preOut.size() * nq, Rat(0));
    for (std::size_t cg = 0; cg < ncg; ++cg)
        for (std::size_t cf = 0; cf < ncf; ++cf)
            for (std::size_t s = 0; s < ns; ++s) {
                std::size_t o = (cg * ncf + cf) * ns + s;
                for (std::size_t r = 0; r < nr; ++r) {
                    const Rat& pf = f.pre().at(cf * ns + s, r);
                    if (pf == 0) continue;
                    for (std::size_t q = 0; q < nq; ++q) {
                        const Rat& pg = g.pre().at(cg * nr + r, q);
                        if (pg != 0) pre[o * nq + q] += pf * pg;
                    }
                }
            }

    FiniteSpace postIn = C.product(f.T());
    std::vector<Rat> post(nw * postIn.size(), Rat(0));
    for (std::size_t cg = 0; cg < ncg; ++cg)
        for (std::size_t cf = 0; cf < ncf; ++cf)
            for (std::size_t t = 0; t < nt; ++t) {
                std::size_t i = (cg * ncf + cf) * nt + t;
                for (std::size_t u = 0; u < nu; ++u) {
                    const Rat& qf = f.post().at(u, cf * nt + t);
                    if (qf == 0) continue;
                    for (std::size_t w = 0; w < nw; ++w) {
                        const Rat& qg = g.post().at(w, cg * nu + u);
                        if (qg != 0) post[w * postIn.size() + i] += qf * qg;
                    }
                }
            }

    auto e = std::make_shared<CombExpr>();
    e->tag = CombExpr::Tag::Compose;
    e->a = std::make_shared<Comb>(g);
    e->b = std::make_shared<Comb>(f);
    return Comb(g.R(), f.S(), f.T(), g.U(), C,
                CondDist::make(g.R(), std::move(preOut), std::move(pre)),
                CondDist::make(std::move(postIn), g.U(), std::move(post)), std::move(e));
}

/// Convex mixture at the action level: apply(mix_combs(sigma,f,g), d) ==
/// convex_mix(sigma, apply(f,d), apply(g,d)). The branch choice is carried
/// by an extra bit in the correlation variable.
inline Comb mix_combs(const Rat& sigma, const Comb& f, const Comb& g) {
    if (!in_unit_interval(sigma)) throw SigmaOutOfRange("sigma = " + rat_to_string(sigma));
    if (!f.R().same_shape(g.R()) || !f.S().same_shape(g.S()) || !f.T().same_shape(g.T()) ||
        !f.U().same_shape(g.U()))
        throw SpaceMismatch("mix_combs: spaces differ");
    FiniteSpace C = FiniteSpace::single("m", 2).product(f.C()).product(g.C());
    const std::size_t ncf = f.C().size(), ncg = g.C().size();
    const std::size_t nr = f.R().size(), ns = f.S().size(), nt = f.T().size(), nu = f.U().size();

    FiniteSpace preOut = C.product(f.S());
    std::vector<Rat> pre(preOut.size() * nr, Rat(0));
    const Rat wf = sigma / Rat(static_cast<long long>(ncg));
    const Rat wg = (1 - sigma) / Rat(static_cast<long long>(ncf));
    for (std::size_t cf = 0; cf < ncf; ++cf)
        for (std::size_t cg = 0; cg < ncg; ++cg)
            for (std::size_t s = 0; s < ns; ++s)
                for (std::size_t r = 0; r < nr; ++r) {
                    std::size_t o0 = ((0 * ncf + cf) * ncg + cg) * ns + s;
                    std::size_t o1 = ((1 * ncf + cf) * ncg + cg) * ns + s;
                    pre[o0 * nr + r] = wf * f.pre().at(cf * ns + s, r);
                    pre[o1 * nr + r] = wg * g.pre().at(cg * ns + s, r);
                }

    FiniteSpace postIn = C.product(f.T());
    std::vector<Rat> post(nu * postIn.size(), Rat(0));
    for (std::size_t cf = 0; cf < ncf; ++cf)
        for (std::size_t cg = 0; cg < ncg; ++cg)
            for (std::size_t t = 0; t < nt; ++t)
                for (std::size_t u = 0; u < nu; ++u) {
                    std::size_t i0 = ((0 * ncf + cf) * ncg + cg) * nt + t;
                    std::size_t i1 = ((1 * ncf + cf) * ncg + cg) * nt + t;
                    post[u * postIn.size() + i0] = f.post().at(u, cf * nt + t);
                    post[u * postIn.size() + i1] = g.post().at(u, cg * nt + t);
                }

    auto e = std::make_shared<CombExpr>();
    e->tag = CombExpr::Tag::Mix;
    e->sigma = sigma;
    e->a = std::make_shared<Comb>(f);
    e->b = std::make_shared<Comb>(g);
    return Comb(f.R(), f.S(), f.T(), f.U(), C,
                CondDist::make(f.R(), std::move(preOut), std::move(pre)),
                CondDist::make(std::move(postIn), f.U(), std::move(post)), std::move(e));
}

/// Extensional equality: equal action on every deterministic distribution in
/// the comb's input slot. Pre/post tables are non-unique representations, so
/// this is the morphism identity used throughout.
inline bool combs_action_equal(const Comb& f, const Comb& g) {
    if (!f.R().same_shape(g.R()) || !f.S().same_shape(g.S()) || !f.T().same_shape(g.T()) ||
        !f.U().same_shape(g.U()))
        return false;
    bool equal = true;
    for_each_affine_basis(f.S(), f.T(), [&](const CondDist& d) {
        if (equal && !dist_equal(apply(f, d), apply(g, d))) equal = false;
    });
    return equal;
}

/// True iff f acts as an involution: applying it twice is the identity on
/// every deterministic basis input.
inline bool is_involution(const Comb& f) {
    if (!f.R().same_shape(f.S()) || !f.U().same_shape(f.T())) return false;
    bool ok = true;
    for_each_affine_basis(f.S(), f.T(), [&](const CondDist& d) {
        if (ok && !dist_equal(apply(f, apply(f, d)), d)) ok = false;
    });
    return ok;
}

}  // namespace opfine
