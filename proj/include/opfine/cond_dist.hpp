#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "opfine/rational.hpp"
#include "opfine/space.hpp"

namespace opfine {

/// A finite stochastic map p(out|in) stored as an exact rational table.
/// Every column (fixed input assignment) sums to exactly 1. Immutable after
/// construction; all operations below are pure.
class CondDist {
  public:
    /// table[o * in.size() + i] = p(out = o | in = i). Validates shape,
    /// nonnegativity and exact column normalization.
    static CondDist make(FiniteSpace in, FiniteSpace out, std::vector<Rat> table) {
        const std::size_t ni = in.size(), no = out.size();
        if (table.size() != ni * no)
            throw ShapeMismatch("table has " + std::to_string(table.size()) + " entries, expected " +
                                std::to_string(ni * no));
        for (std::size_t i = 0; i < ni; ++i) {
            Rat sum = 0;
            for (std::size_t o = 0; o < no; ++o) {
                const Rat& p = table[o * ni + i];
                if (p < 0) throw NegativeEntry("negative entry at out=" + std::to_string(o) +
                                               " in=" + std::to_string(i));
                sum += p;
            }
            if (sum != 1)
                throw NotNormalized("column in=" + std::to_string(i) + " sums to " + rat_to_string(sum));
        }
        return CondDist(std::move(in), std::move(out), std::move(table));
    }

    static CondDist from_fn(FiniteSpace in, FiniteSpace out,
                            const std::function<Rat(std::size_t, std::size_t)>& fn) {
        const std::size_t ni = in.size(), no = out.size();
        std::vector<Rat> t(ni * no);
        for (std::size_t o = 0; o < no; ++o)
            for (std::size_t i = 0; i < ni; ++i) t[o * ni + i] = fn(o, i);
        return make(std::move(in), std::move(out), std::move(t));
    }

    /// Deterministic channel out = f(in), f given on indices.
    static CondDist deterministic(FiniteSpace in, FiniteSpace out,
                                  const std::function<std::size_t(std::size_t)>& f) {
        const std::size_t ni = in.size(), no = out.size();
        std::vector<Rat> t(ni * no, Rat(0));
        for (std::size_t i = 0; i < ni; ++i) {
            std::size_t o = f(i);
            if (o >= no) throw ValueOutOfRange("deterministic image out of range");
            t[o * ni + i] = 1;
        }
        return CondDist(std::move(in), std::move(out), std::move(t));
    }

    static CondDist identity(const FiniteSpace& space) {
        return deterministic(space, space, [](std::size_t i) { return i; });
    }

    static CondDist uniform(FiniteSpace in, FiniteSpace out) {
        Rat p(1, static_cast<long long>(out.size()));
        std::vector<Rat> t(in.size() * out.size(), p);
        return CondDist(std::move(in), std::move(out), std::move(t));
    }

    const FiniteSpace& input() const { return in_; }
    const FiniteSpace& output() const { return out_; }
    const Rat& at(std::size_t out_idx, std::size_t in_idx) const {
        return table_[out_idx * in_.size() + in_idx];
    }
    const std::vector<Rat>& table() const { return table_; }

  private:
    CondDist(FiniteSpace in, FiniteSpace out, std::vector<Rat> table)
        : in_(std::move(in)), out_(std::move(out)), table_(std::move(table)) {}

    FiniteSpace in_, out_;
    std::vector<Rat> table_;
};

/// Law of total probability: entry(t|r) = sum_s second(t|s) * first(s|r).
inline CondDist chain(const CondDist& second, const CondDist& first) {
    if (!first.output().same_shape(second.input()))
        throw SpaceMismatch("chain: first.output does not match second.input");
    const std::size_t nr = first.input().size(), ns = first.output().size(),
                      nt = second.output().size();
    std::vector<Rat> t(nr * nt, Rat(0));
    for (std::size_t o = 0; o < nt; ++o)
        for (std::size_t s = 0; s < ns; ++s) {
            const Rat& a = second.at(o, s);
            if (a == 0) continue;
            for (std::size_t r = 0; r < nr; ++r) t[o * nr + r] += a * first.at(s, r);
        }
    return CondDist::make(first.input(), second.output(), std::move(t));
}

/// Sums out the output variables not listed in `keep`; the kept variables
/// stay in their original order.
inline CondDist marginalize(const CondDist& d, const std::vector<std::string>& keep) {
    std::vector<int> positions;
    for (const auto& name : keep) {
        int p = d.output().find(name);
        if (p < 0) throw UnknownVariable("marginalize: unknown output variable '" + name + "'");
        positions.push_back(p);
    }
    std::sort(positions.begin(), positions.end());
    FiniteSpace out = d.output().subspace(positions);
    const std::size_t ni = d.input().size();
    std::vector<Rat> t(ni * out.size(), Rat(0));
    for (std::size_t o = 0; o < d.output().size(); ++o) {
        Assignment full = d.output().assignment_of(o);
        Assignment kept;
        kept.reserve(positions.size());
        for (int p : positions) kept.push_back(full[static_cast<std::size_t>(p)]);
        std::size_t ko = out.index_of(kept);
        for (std::size_t i = 0; i < ni; ++i) t[ko * ni + i] += d.at(o, i);
    }
    return CondDist::make(d.input(), std::move(out), std::move(t));
}

/// Entrywise sigma * d1 + (1 - sigma) * d2.
inline CondDist convex_mix(const Rat& sigma, const CondDist& d1, const CondDist& d2) {
    if (!in_unit_interval(sigma)) throw SigmaOutOfRange("sigma = " + rat_to_string(sigma));
    if (!d1.input().same_shape(d2.input()) || !d1.output().same_shape(d2.output()))
        throw SpaceMismatch("convex_mix: spaces differ");
    std::vector<Rat> t(d1.table().size());
    for (std::size_t i = 0; i < t.size(); ++i)
        t[i] = sigma * d1.table()[i] + (1 - sigma) * d2.table()[i];
    return CondDist::make(d1.input(), d1.output(), std::move(t));
}

/// Exact table equality over matching shapes; a shape mismatch is plain false.
inline bool dist_equal(const CondDist& d1, const CondDist& d2) {
    if (!d1.input().same_shape(d2.input()) || !d1.output().same_shape(d2.output())) return false;
    return d1.table() == d2.table();
}

/// Calls fn once per deterministic channel in -> out. There are
/// |out|^|in| of them; they are the vertices of the polytope of stochastic
/// maps, so linear identities checked on all of them hold everywhere.
inline void for_each_deterministic(const FiniteSpace& in, const FiniteSpace& out,
                                   const std::function<void(const CondDist&)>& fn) {
    const std::size_t ni = in.size(), no = out.size();
    std::vector<std::size_t> image(ni, 0);
    for (;;) {
        fn(CondDist::deterministic(in, out, [&](std::size_t i) { return image[i]; }));
        std::size_t pos = 0;
        while (pos < ni) {
            if (++image[pos] < no) break;
            image[pos] = 0;
            ++pos;
        }
        if (pos == ni) break;
    }
}

/// Calls fn on an affine basis of the polytope of stochastic maps in -> out:
/// the all-zero channel plus, for each input s and output t > 0, the channel
/// sending s to t and everything else to 0. Maps that are linear in the
/// table agree everywhere iff they agree on these 1 + |in|(|out|-1)
/// channels, so this replaces full deterministic enumeration in equality
/// checks.
inline void for_each_affine_basis(const FiniteSpace& in, const FiniteSpace& out,
                                  const std::function<void(const CondDist&)>& fn) {
    const std::size_t ni = in.size(), no = out.size();
    fn(CondDist::deterministic(in, out, [](std::size_t) { return std::size_t{0}; }));
    for (std::size_t s = 0; s < ni; ++s)
        for (std::size_t t = 1; t < no; ++t)
            fn(CondDist::deterministic(in, out, [&](std::size_t i) { return i == s ? t : 0; }));
}

}  // namespace opfine
