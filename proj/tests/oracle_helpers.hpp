#pragma once

// Independent oracles used by the unit and acceptance tests. Everything here
// deliberately avoids the library's solver and compilation paths.

#include <random>
#include <vector>

#include "opfine/constraint_system.hpp"
#include "opfine/scenario.hpp"

namespace oracle {

using opfine::ConstraintSystem;
using opfine::Rat;

struct Row {
    std::vector<Rat> coef;
    Rat rhs;
    bool is_equality = false;
};

/// Solves M x = r exactly; returns false when M is singular.
inline bool gauss_solve(std::vector<std::vector<Rat>> M, std::vector<Rat> r,
                        std::vector<Rat>& out) {
    const std::size_t n = M.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && M[piv][col] == 0) ++piv;
        if (piv == n) return false;
        std::swap(M[piv], M[col]);
        std::swap(r[piv], r[col]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col || M[i][col] == 0) continue;
            Rat f = M[i][col] / M[col][col];
            for (std::size_t j = col; j < n; ++j) M[i][j] -= f * M[col][j];
            r[i] -= f * r[col];
        }
    }
    out.assign(n, Rat(0));
    for (std::size_t i = 0; i < n; ++i) out[i] = r[i] / M[i][i];
    return true;
}

/// Exact feasibility of {x >= 0, rows} by vertex enumeration: a nonempty
/// polyhedron inside the nonnegative orthant is pointed, so it is nonempty
/// iff some choice of n tight constraints (from the rows plus the
/// nonnegativity facets) solves to a point satisfying everything.
inline bool feasible_bruteforce(const ConstraintSystem& sys) {
    const std::size_t n = sys.num_unknowns();
    std::vector<Row> rows;
    for (const auto& c : sys.constraints()) {
        Row r;
        r.coef.assign(n, Rat(0));
        for (const auto& [id, coef] : c.terms) r.coef[static_cast<std::size_t>(id)] = coef;
        r.rhs = c.rhs;
        r.is_equality = c.is_equality;
        rows.push_back(std::move(r));
    }
    auto satisfied = [&](const std::vector<Rat>& x) {
        for (const Rat& v : x)
            if (v < 0) return false;
        for (const auto& r : rows) {
            Rat lhs = 0;
            for (std::size_t j = 0; j < n; ++j) lhs += r.coef[j] * x[j];
            if (r.is_equality ? lhs != r.rhs : lhs < r.rhs) return false;
        }
        return true;
    };
    if (n == 0) return satisfied({});
    // candidate tight sets: n-subsets of rows + nonnegativity facets
    std::vector<Row> all = rows;
    for (std::size_t j = 0; j < n; ++j) {
        Row r;
        r.coef.assign(n, Rat(0));
        r.coef[j] = 1;
        r.rhs = 0;
        all.push_back(std::move(r));
    }
    const std::size_t m = all.size();
    if (m < n) return false;  // cannot happen: nonneg facets alone give n
    std::vector<std::size_t> pick(n);
    for (std::size_t i = 0; i < n; ++i) pick[i] = i;
    for (;;) {
        std::vector<std::vector<Rat>> M;
        std::vector<Rat> r;
        for (std::size_t i : pick) {
            M.push_back(all[i].coef);
            r.push_back(all[i].rhs);
        }
        std::vector<Rat> x;
        if (gauss_solve(std::move(M), std::move(r), x) && satisfied(x)) return true;
        std::size_t i = n;
        while (i-- > 0) {
            if (pick[i] != i + m - n) {
                ++pick[i];
                for (std::size_t j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
                break;
            }
            if (i == 0) return false;
        }
    }
}

/// Random small system; always contains at least one inequality so a
/// guaranteed-invalid certificate tamper target exists.
inline ConstraintSystem random_system(std::mt19937& rng, int max_unknowns = 5) {
    std::uniform_int_distribution<int> nu(1, max_unknowns);
    std::uniform_int_distribution<int> coefd(-2, 2), rhsd(-2, 2), kind(0, 1);
    const int n = nu(rng);
    std::uniform_int_distribution<int> nc(1, n + 2);
    const int m = nc(rng);
    ConstraintSystem sys;
    for (int j = 0; j < n; ++j) sys.unknown("x" + std::to_string(j));
    for (int i = 0; i < m; ++i) {
        opfine::LinComb terms;
        for (int j = 0; j < n; ++j) {
            int c = coefd(rng);
            if (c != 0) terms[j] = Rat(c);
        }
        Rat rhs(rhsd(rng));
        bool ineq = (i == 0) || kind(rng) == 1;
        if (ineq)
            sys.add_geq(std::move(terms), std::move(rhs));
        else
            sys.add_equality(std::move(terms), std::move(rhs));
    }
    return sys;
}

/// Bell locality oracle via the no-signaling + all-CHSH-variants criterion:
/// a two-setting two-outcome box is a mixture of the 16 deterministic local
/// strategies iff it is no-signaling and all eight signed CHSH expressions
/// are bounded by 2.
inline bool local_bruteforce(const opfine::CondDist& box) {
    using opfine::Rat;
    auto p = [&](int a, int b, int x, int y) {
        return box.at(static_cast<std::size_t>(a * 2 + b), static_cast<std::size_t>(x * 2 + y));
    };
    for (int x = 0; x < 2; ++x)
        for (int a = 0; a < 2; ++a)
            if (p(a, 0, x, 0) + p(a, 1, x, 0) != p(a, 0, x, 1) + p(a, 1, x, 1)) return false;
    for (int y = 0; y < 2; ++y)
        for (int b = 0; b < 2; ++b)
            if (p(0, b, 0, y) + p(1, b, 0, y) != p(0, b, 1, y) + p(1, b, 1, y)) return false;
    Rat E[2][2];
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            E[x][y] = 0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    E[x][y] += ((a + b) % 2 == 0 ? Rat(1) : Rat(-1)) * p(a, b, x, y);
        }
    for (int sx = 0; sx < 2; ++sx)
        for (int sy = 0; sy < 2; ++sy)
            for (int flip = 0; flip < 2; ++flip) {
                Rat s = 0;
                for (int x = 0; x < 2; ++x)
                    for (int y = 0; y < 2; ++y) {
                        int sign = ((x & sx) ^ (y & sy) ^ (x & y) ^ flip) ? -1 : 1;
                        s += Rat(sign) * E[x][y];
                    }
                if (s > 2 || s < -2) return false;
            }
    return true;
}

}  // namespace oracle
