#pragma once

#include <cstddef>
#include <string>
#include <unordered_set>
#include <vector>

#include "opfine/errors.hpp"

namespace opfine {

struct Variable {
    std::string name;
    int card = 1;
    bool operator==(const Variable& o) const { return name == o.name && card == o.card; }
};

/// One concrete value per variable of a FiniteSpace, in declaration order.
using Assignment = std::vector<int>;

/// An ordered list of named finite-cardinality variables. Assignments are
/// indexed row-major over the declaration order (first variable most
/// significant). The empty space is the trivial object: size one, arity zero.
class FiniteSpace {
  public:
    FiniteSpace() = default;

    explicit FiniteSpace(std::vector<Variable> vars) : vars_(std::move(vars)) {
        std::unordered_set<std::string> seen;
        for (const auto& v : vars_) {
            if (v.card < 1) throw ShapeMismatch("variable '" + v.name + "' has cardinality < 1");
            if (!seen.insert(v.name).second)
                throw ShapeMismatch("duplicate variable name '" + v.name + "'");
        }
    }

    static FiniteSpace single(const std::string& name, int card) {
        return FiniteSpace({{name, card}});
    }

    /// Cardinality-one space with one variable (a categorical "trivial object").
    static FiniteSpace trivial(const std::string& name = "z") { return single(name, 1); }

    std::size_t arity() const { return vars_.size(); }

    std::size_t size() const {
        std::size_t n = 1;
        for (const auto& v : vars_) n *= static_cast<std::size_t>(v.card);
        return n;
    }

    const std::vector<Variable>& vars() const { return vars_; }

    int find(const std::string& name) const {
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i].name == name) return static_cast<int>(i);
        return -1;
    }

    std::size_t index_of(const Assignment& a) const {
        if (a.size() != vars_.size()) throw ShapeMismatch("assignment arity mismatch");
        std::size_t idx = 0;
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (a[i] < 0 || a[i] >= vars_[i].card)
                throw ValueOutOfRange("value out of range for variable '" + vars_[i].name + "'");
            idx = idx * static_cast<std::size_t>(vars_[i].card) + static_cast<std::size_t>(a[i]);
        }
        return idx;
    }

    Assignment assignment_of(std::size_t index) const {
        Assignment a(vars_.size());
        for (std::size_t i = vars_.size(); i-- > 0;) {
            a[i] = static_cast<int>(index % static_cast<std::size_t>(vars_[i].card));
            index /= static_cast<std::size_t>(vars_[i].card);
        }
        return a;
    }

    /// Shape equality ignores names: same arity and same cardinalities in order.
    bool same_shape(const FiniteSpace& o) const {
        if (vars_.size() != o.vars_.size()) return false;
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i].card != o.vars_[i].card) return false;
        return true;
    }

    std::vector<int> cards() const {
        std::vector<int> c;
        c.reserve(vars_.size());
        for (const auto& v : vars_) c.push_back(v.card);
        return c;
    }

    /// Concatenation; colliding names from the right operand get a tick
    /// appended until unique (names of internal product spaces never surface
    /// in serialized output).
    FiniteSpace product(const FiniteSpace& o) const {
        std::vector<Variable> vars = vars_;
        std::unordered_set<std::string> seen;
        for (const auto& v : vars) seen.insert(v.name);
        for (auto v : o.vars_) {
            while (seen.count(v.name)) v.name += "'";
            seen.insert(v.name);
            vars.push_back(std::move(v));
        }
        return FiniteSpace(std::move(vars));
    }

    FiniteSpace subspace(const std::vector<int>& positions) const {
        std::vector<Variable> vars;
        vars.reserve(positions.size());
        for (int p : positions) {
            if (p < 0 || static_cast<std::size_t>(p) >= vars_.size())
                throw UnknownVariable("no variable at position " + std::to_string(p));
            vars.push_back(vars_[static_cast<std::size_t>(p)]);
        }
        return FiniteSpace(std::move(vars));
    }

    bool operator==(const FiniteSpace& o) const { return vars_ == o.vars_; }

  private:
    std::vector<Variable> vars_;
};

}  // namespace opfine
