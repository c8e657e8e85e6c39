#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "opfine/rational.hpp"

namespace opfine {

/// Sparse rational linear combination over unknowns, keyed by unknown id.
using LinComb = std::map<int, Rat>;

struct Constraint {
    LinComb terms;
    Rat rhs;
    bool is_equality = true;  // false: terms >= rhs
};

/// Linear equalities and >= inequalities over named nonnegative rational
/// unknowns. Unknown ids follow creation order, so identical compilation
/// paths produce byte-identical systems. Canonical equality and hashing go
/// through canonical_text(), which is independent of creation order.
class ConstraintSystem {
  public:
    int unknown(const std::string& name) {
        auto it = index_.find(name);
        if (it != index_.end()) return it->second;
        int id = static_cast<int>(names_.size());
        names_.push_back(name);
        index_.emplace(name, id);
        return id;
    }

    int find_unknown(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? -1 : it->second;
    }

    const std::string& name_of(int id) const { return names_[static_cast<std::size_t>(id)]; }
    std::size_t num_unknowns() const { return names_.size(); }
    const std::vector<std::string>& unknown_names() const { return names_; }

    void add_equality(LinComb terms, Rat rhs) {
        constraints_.push_back({std::move(terms), std::move(rhs), true});
    }
    void add_geq(LinComb terms, Rat rhs) {
        constraints_.push_back({std::move(terms), std::move(rhs), false});
    }

    const std::vector<Constraint>& constraints() const { return constraints_; }

    /// Per constraint: zero coefficients dropped, terms sorted by unknown
    /// name, coefficients scaled to coprime integers (sign fixed by the
    /// leading term for equalities, positive scaling only for inequalities),
    /// then lines deduplicated and sorted. Two systems describe the same
    /// object iff their canonical texts are equal.
    std::string canonical_text() const {
        std::vector<std::string> lines;
        lines.reserve(constraints_.size());
        for (const auto& c : constraints_) {
            std::vector<std::pair<std::string, Rat>> terms;
            for (const auto& [id, coef] : c.terms)
                if (coef != 0) terms.emplace_back(names_[static_cast<std::size_t>(id)], coef);
            std::sort(terms.begin(), terms.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (terms.empty()) {
                if (c.is_equality && c.rhs == 0) continue;         // vacuous
                if (!c.is_equality && c.rhs <= 0) continue;        // vacuous
                lines.push_back(std::string(c.is_equality ? "eq:" : "ge:") + " 0 " +
                                (c.is_equality ? "=" : ">=") + " 1");  // normalized contradiction
                continue;
            }
            // scale: clear denominators, divide by gcd of numerators
            Int lcm = 1;
            for (const auto& [_, coef] : terms) {
                Int d = denominator(coef);
                lcm = lcm / gcd(lcm, d) * d;
            }
            Int den = denominator(c.rhs);
            lcm = lcm / gcd(lcm, den) * den;
            Int g = 0;
            for (const auto& [_, coef] : terms) g = gcd(g, numerator(coef * Rat(lcm)));
            if (c.rhs != 0) g = gcd(g, numerator(c.rhs * Rat(lcm)));
            if (g < 0) g = -g;
            Rat scale = Rat(lcm) / Rat(g);
            if (c.is_equality && terms.front().second < 0) scale = -scale;
            std::string line = c.is_equality ? "eq:" : "ge:";
            for (const auto& [name, coef] : terms) {
                Rat v = coef * scale;
                line += " " + numerator(v).str() + "*" + name;
            }
            Rat rhs = c.rhs * scale;
            line += std::string(" ") + (c.is_equality ? "=" : ">=") + " " + numerator(rhs).str();
            lines.push_back(std::move(line));
        }
        std::sort(lines.begin(), lines.end());
        lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
        std::string out;
        for (const auto& l : lines) {
            out += l;
            out += '\n';
        }
        return out;
    }

    /// FNV-1a over the canonical text; stable across platforms and runs.
    std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char ch : canonical_text()) {
            h ^= ch;
            h *= 1099511628211ull;
        }
        return h;
    }

  private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
    std::vector<Constraint> constraints_;
};

inline bool canonical_equal(const ConstraintSystem& a, const ConstraintSystem& b) {
    return a.canonical_text() == b.canonical_text();
}

}  // namespace opfine
