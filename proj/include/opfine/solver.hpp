#pragma once

#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "opfine/constraint_system.hpp"
#include "opfine/errors.hpp"

namespace opfine::solver {

/// Feasible point: one exact value per unknown, in system order.
struct Witness {
    std::vector<Rat> values;
};

/// Farkas-style infeasibility proof: one multiplier per constraint, in
/// declaration order. Multipliers on inequalities are nonnegative; the
/// combined row has nonpositive coefficients on every unknown and a strictly
/// positive right hand side, which no nonnegative point can satisfy.
struct Certificate {
    std::vector<Rat> multipliers;
};

struct Verdict {
    bool feasible = false;
    Witness witness;          // meaningful iff feasible
    Certificate certificate;  // meaningful iff !feasible
};

/// Decides feasibility of {terms = rhs, terms >= rhs, unknowns >= 0} by an
/// exact rational phase-I simplex with Bland's least-index anti-cycling rule.
/// Deterministic: identical systems yield identical verdicts.
inline Verdict solve(const ConstraintSystem& sys) {
    const std::size_t n = sys.num_unknowns();
    const std::size_t m = sys.constraints().size();

    // standard form: columns [x | slacks | artificials], rows with rhs >= 0
    std::vector<std::size_t> slack_col(m, SIZE_MAX);
    std::size_t ncols = n;
    for (std::size_t i = 0; i < m; ++i)
        if (!sys.constraints()[i].is_equality) slack_col[i] = ncols++;
    const std::size_t art0 = ncols;
    ncols += m;

    std::vector<std::vector<Rat>> T(m, std::vector<Rat>(ncols + 1, Rat(0)));
    std::vector<int> row_sign(m, 1);
    for (std::size_t i = 0; i < m; ++i) {
        const auto& c = sys.constraints()[i];
        for (const auto& [id, coef] : c.terms) T[i][static_cast<std::size_t>(id)] = coef;
        if (slack_col[i] != SIZE_MAX) T[i][slack_col[i]] = -1;
        T[i][ncols] = c.rhs;
        if (T[i][ncols] < 0) {
            row_sign[i] = -1;
            for (auto& v : T[i]) v = -v;
        }
        T[i][art0 + i] = 1;
    }

    // phase-I objective: minimize sum of artificials. obj[j] = c_j - sum_i T[i][j]
    std::vector<Rat> obj(ncols + 1, Rat(0));
    for (std::size_t j = 0; j <= ncols; ++j) {
        Rat s = 0;
        for (std::size_t i = 0; i < m; ++i) s += T[i][j];
        obj[j] = (j >= art0 && j < ncols ? Rat(1) : Rat(0)) - s;
    }

    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = art0 + i;

    auto pivot = [&](std::size_t prow, std::size_t pcol) {
        Rat pv = T[prow][pcol];
        for (auto& v : T[prow]) v /= pv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == prow || T[i][pcol] == 0) continue;
            Rat f = T[i][pcol];
            for (std::size_t j = 0; j <= ncols; ++j) T[i][j] -= f * T[prow][j];
        }
        if (obj[pcol] != 0) {
            Rat f = obj[pcol];
            for (std::size_t j = 0; j <= ncols; ++j) obj[j] -= f * T[prow][j];
        }
        basis[prow] = pcol;
    };

    for (;;) {
        std::size_t enter = SIZE_MAX;
        for (std::size_t j = 0; j < ncols; ++j)
            if (obj[j] < 0) {
                enter = j;
                break;
            }
        if (enter == SIZE_MAX) break;
        std::size_t leave = SIZE_MAX;
        for (std::size_t i = 0; i < m; ++i) {
            if (T[i][enter] <= 0) continue;
            if (leave == SIZE_MAX) {
                leave = i;
                continue;
            }
            Rat cur = T[leave][ncols] / T[leave][enter];
            Rat cand = T[i][ncols] / T[i][enter];
            if (cand < cur || (cand == cur && basis[i] < basis[leave])) leave = i;
        }
        if (leave == SIZE_MAX) break;  // unbounded below cannot happen in phase I
        pivot(leave, enter);
    }

    Rat cost = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] >= art0) cost += T[i][ncols];

    Verdict v;
    if (cost > 0) {
        // dual from the artificial columns: y_i = 1 - reduced_cost(a_i);
        // multiplier on the original (unnegated) constraint is row_sign * y.
        v.feasible = false;
        v.certificate.multipliers.resize(m);
        for (std::size_t i = 0; i < m; ++i)
            v.certificate.multipliers[i] = Rat(row_sign[i]) * (Rat(1) - obj[art0 + i]);
        return v;
    }

    v.feasible = true;
    v.witness.values.assign(n, Rat(0));
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) v.witness.values[basis[i]] = T[i][ncols];
    return v;
}

/// Re-checks a verdict by exact substitution or by recombining the
/// certificate; independent of the solver internals above.
inline bool verify(const ConstraintSystem& sys, const Verdict& v) {
    const std::size_t n = sys.num_unknowns();
    const auto& cons = sys.constraints();
    if (v.feasible) {
        if (v.witness.values.size() != n) return false;
        for (const Rat& x : v.witness.values)
            if (x < 0) return false;
        for (const auto& c : cons) {
            Rat lhs = 0;
            for (const auto& [id, coef] : c.terms)
                lhs += coef * v.witness.values[static_cast<std::size_t>(id)];
            if (c.is_equality ? (lhs != c.rhs) : (lhs < c.rhs)) return false;
        }
        return true;
    }
    if (v.certificate.multipliers.size() != cons.size()) return false;
    std::vector<Rat> combined(n, Rat(0));
    Rat rhs = 0;
    for (std::size_t i = 0; i < cons.size(); ++i) {
        const Rat& mu = v.certificate.multipliers[i];
        if (!cons[i].is_equality && mu < 0) return false;
        for (const auto& [id, coef] : cons[i].terms)
            combined[static_cast<std::size_t>(id)] += mu * coef;
        rhs += mu * cons[i].rhs;
    }
    for (const Rat& c : combined)
        if (c > 0) return false;
    return rhs > 0;
}

/// Canonical text form, bound to the system by its hash so a stored verdict
/// cannot be replayed against an edited system.
inline std::string serialize_verdict(const ConstraintSystem& sys, const Verdict& v) {
    std::ostringstream os;
    os << "opfine-verdict 1\n";
    os << "system-hash " << std::hex << std::setw(16) << std::setfill('0') << sys.hash() << std::dec
       << "\n";
    if (v.feasible) {
        os << "feasible\n";
        for (std::size_t i = 0; i < v.witness.values.size(); ++i)
            os << "value " << sys.name_of(static_cast<int>(i)) << " "
               << rat_to_string(v.witness.values[i]) << "\n";
    } else {
        os << "infeasible\n";
        for (std::size_t i = 0; i < v.certificate.multipliers.size(); ++i)
            os << "mult " << i << " " << rat_to_string(v.certificate.multipliers[i]) << "\n";
    }
    os << "end\n";
    return os.str();
}

/// Parses a serialized verdict and binds it to `sys`: a hash mismatch
/// raises HashMismatch, malformed text raises InvalidCertificate.
inline Verdict parse_verdict(const ConstraintSystem& sys, const std::string& text) {
    std::istringstream is(text);
    std::string line;
    auto next = [&](const char* what) {
        if (!std::getline(is, line)) throw InvalidCertificate(std::string("missing ") + what);
        return line;
    };
    if (next("header") != "opfine-verdict 1") throw InvalidCertificate("bad header");
    std::istringstream hs(next("system hash"));
    std::string tag, hexhash;
    hs >> tag >> hexhash;
    if (tag != "system-hash") throw InvalidCertificate("missing system hash");
    std::ostringstream expect;
    expect << std::hex << std::setw(16) << std::setfill('0') << sys.hash();
    if (hexhash != expect.str())
        throw HashMismatch("verdict refers to system " + hexhash + ", file compiles to " + expect.str());
    std::string kind = next("verdict kind");
    Verdict v;
    if (kind == "feasible") {
        v.feasible = true;
        v.witness.values.assign(sys.num_unknowns(), Rat(0));
        while (next("value or end") != "end") {
            std::istringstream ls(line);
            std::string key, name, val;
            ls >> key >> name >> val;
            if (key != "value") throw InvalidCertificate("unexpected line: " + line);
            int id = sys.find_unknown(name);
            if (id < 0) throw InvalidCertificate("unknown variable in witness: " + name);
            v.witness.values[static_cast<std::size_t>(id)] = parse_rat(val);
        }
    } else if (kind == "infeasible") {
        v.feasible = false;
        v.certificate.multipliers.assign(sys.constraints().size(), Rat(0));
        while (next("mult or end") != "end") {
            std::istringstream ls(line);
            std::string key, val;
            std::size_t idx;
            ls >> key >> idx >> val;
            if (key != "mult" || idx >= v.certificate.multipliers.size())
                throw InvalidCertificate("unexpected line: " + line);
            v.certificate.multipliers[idx] = parse_rat(val);
        }
    } else {
        throw InvalidCertificate("unknown verdict kind: " + kind);
    }
    return v;
}

}  // namespace opfine::solver
