#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "opfine/assumptions.hpp"
#include "opfine/scenario.hpp"

namespace opfine {

using ojson = nlohmann::ordered_json;

/// On-disk scenario: versioned, shape-tagged, rationals as "p/q" strings.
/// Serialization is canonical (fixed key order, fixed table-entry order), so
/// parse followed by serialize is byte-identical.
struct ScenarioFile {
    enum class Shape { PrepMeasure, Bell, TimeSymPair };

    int version = 1;
    Shape shape = Shape::PrepMeasure;
    std::optional<PrepMeasureScenario> prep;
    std::optional<BellScenario> bell;
    std::optional<TimeSymScenario> pair;
    std::vector<std::string> assumptions;
    LambdaConfig lambda = LambdaConfig::deterministic();
};

inline const std::vector<std::string>& valid_assumption_names() {
    static const std::vector<std::string> names = {
        "lambda-mediation",   "measurement-independence",     "parameter-independence",
        "outcome-independence", "preparation-noncontextuality", "time-symmetry"};
    return names;
}

namespace io_detail {

inline std::string join_assignment(const Assignment& a) {
    std::string s;
    for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + std::to_string(a[i]);
    return s.empty() ? "-" : s;
}

inline std::string table_key(const FiniteSpace& in, const FiniteSpace& out, std::size_t o,
                             std::size_t i) {
    return join_assignment(out.assignment_of(o)) + "|" + join_assignment(in.assignment_of(i));
}

inline ojson table_to_json(const CondDist& d) {
    ojson t = ojson::object();
    for (std::size_t o = 0; o < d.output().size(); ++o)
        for (std::size_t i = 0; i < d.input().size(); ++i)
            t[table_key(d.input(), d.output(), o, i)] = rat_to_string(d.at(o, i));
    return t;
}

inline CondDist table_from_json(const ojson& t, const FiniteSpace& in, const FiniteSpace& out,
                                const std::string& what) {
    if (!t.is_object()) throw ParseError(what + ": expected an object of table entries");
    const std::size_t expected = in.size() * out.size();
    if (t.size() != expected)
        throw ParseError(what + ": has " + std::to_string(t.size()) + " entries, expected " +
                         std::to_string(expected));
    std::vector<Rat> table(expected);
    for (std::size_t o = 0; o < out.size(); ++o)
        for (std::size_t i = 0; i < in.size(); ++i) {
            std::string key = table_key(in, out, o, i);
            auto it = t.find(key);
            if (it == t.end()) throw ParseError(what + ": missing entry '" + key + "'");
            if (!it->is_string()) throw ParseError(what + ": entry '" + key + "' is not a \"p/q\" string");
            table[o * in.size() + i] = parse_rat(it->get<std::string>());
        }
    return CondDist::make(in, out, std::move(table));
}

inline void check_keys(const ojson& o, const std::set<std::string>& allowed,
                       const std::string& where) {
    for (auto it = o.begin(); it != o.end(); ++it)
        if (!allowed.count(it.key()))
            throw ParseError(where + ": unknown field '" + it.key() + "'");
}

inline ojson variables_json(const FiniteSpace& in, const FiniteSpace& out) {
    ojson arr = ojson::array();
    for (const auto& v : in.vars())
        arr.push_back({{"name", v.name}, {"cardinality", v.card}, {"role", "controlled"}});
    for (const auto& v : out.vars())
        arr.push_back({{"name", v.name}, {"cardinality", v.card}, {"role", "observed"}});
    return arr;
}

/// Reads the variables array against the fixed name/role layout of a shape
/// and returns the declared cardinalities in layout order.
inline std::vector<int> parse_variables(const ojson& j,
                                        const std::vector<std::pair<std::string, std::string>>& layout) {
    if (!j.is_array() || j.size() != layout.size())
        throw ParseError("variables: expected exactly " + std::to_string(layout.size()) +
                         " declarations");
    std::vector<int> cards;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        const ojson& v = j[i];
        check_keys(v, {"name", "cardinality", "role"}, "variables[" + std::to_string(i) + "]");
        for (const char* k : {"name", "cardinality", "role"})
            if (!v.contains(k))
                throw ParseError("variables[" + std::to_string(i) + "]: missing '" + std::string(k) + "'");
        if (v["name"] != layout[i].first || v["role"] != layout[i].second)
            throw ParseError("variables[" + std::to_string(i) + "]: expected name '" +
                             layout[i].first + "' with role '" + layout[i].second + "'");
        if (!v["cardinality"].is_number_integer() || v["cardinality"].get<int>() < 1)
            throw ParseError("variables[" + std::to_string(i) + "]: bad cardinality");
        cards.push_back(v["cardinality"].get<int>());
    }
    return cards;
}

inline ojson lambda_json(const LambdaConfig& cfg) {
    if (cfg.mode == LambdaConfig::Mode::DeterministicStrategies)
        return ojson{{"mode", "deterministic"}};
    return ojson{{"mode", "stochastic"}, {"size", cfg.size}};
}

inline LambdaConfig parse_lambda(const ojson& j) {
    if (!j.is_object() || !j.contains("mode")) throw ParseError("lambda: expected {\"mode\": ...}");
    std::string mode = j["mode"].get<std::string>();
    if (mode == "deterministic") {
        check_keys(j, {"mode"}, "lambda");
        return LambdaConfig::deterministic();
    }
    if (mode == "stochastic") {
        check_keys(j, {"mode", "size"}, "lambda");
        if (!j.contains("size") || !j["size"].is_number_integer())
            throw ParseError("lambda: stochastic mode needs an integer 'size'");
        return LambdaConfig::stochastic(j["size"].get<int>());
    }
    throw ParseError("lambda: unknown mode '" + mode + "'");
}

}  // namespace io_detail

inline std::string serialize_scenario(const ScenarioFile& f) {
    using namespace io_detail;
    ojson j = ojson::object();
    j["version"] = f.version;
    switch (f.shape) {
        case ScenarioFile::Shape::PrepMeasure: {
            const auto& s = *f.prep;
            j["shape"] = "prepare-measure";
            j["variables"] = variables_json(s.stats.input(), s.stats.output());
            j["stats"] = table_to_json(s.stats);
            ojson eqs = ojson::array();
            for (const auto& eq : s.equivalences) {
                auto side = [](const std::vector<MixtureTerm>& ts) {
                    ojson arr = ojson::array();
                    for (const auto& t : ts)
                        arr.push_back(
                            {{"weight", rat_to_string(t.weight)}, {"preparation", t.preparation}});
                    return arr;
                };
                eqs.push_back({{"lhs", side(eq.lhs)}, {"rhs", side(eq.rhs)}});
            }
            j["equivalences"] = std::move(eqs);
            break;
        }
        case ScenarioFile::Shape::Bell:
            j["shape"] = "bell";
            j["variables"] = variables_json(f.bell->box.input(), f.bell->box.output());
            j["box"] = table_to_json(f.bell->box);
            break;
        case ScenarioFile::Shape::TimeSymPair: {
            const auto& p = *f.pair;
            j["shape"] = "time-symmetric-pair";
            j["variables"] = variables_json(p.E.input(), p.E.output());
            j["experiment"] = table_to_json(p.E);
            j["experiment_reversed"] = table_to_json(p.Eprime);
            if (p.plantedE) j["planted"] = table_to_json(*p.plantedE);
            if (p.plantedEprime) j["planted_reversed"] = table_to_json(*p.plantedEprime);
            break;
        }
    }
    j["assumptions"] = f.assumptions;
    j["lambda"] = io_detail::lambda_json(f.lambda);
    return j.dump(2) + "\n";
}

inline ScenarioFile parse_scenario(const std::string& text) {
    using namespace io_detail;
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("top level must be an object");
    if (!j.contains("version") || j["version"] != 1)
        throw ParseError("missing or unsupported version (expected 1)");
    if (!j.contains("shape") || !j["shape"].is_string()) throw ParseError("missing shape");
    std::string shape = j["shape"].get<std::string>();

    ScenarioFile f;
    std::set<std::string> allowed = {"version", "shape", "variables", "assumptions", "lambda"};

    if (shape == "prepare-measure") {
        f.shape = ScenarioFile::Shape::PrepMeasure;
        allowed.insert({"stats", "equivalences"});
        check_keys(j, allowed, "scenario");
        for (const char* k : {"variables", "stats", "equivalences"})
            if (!j.contains(k)) throw ParseError(std::string("missing '") + k + "'");
        std::vector<int> cards = parse_variables(
            j["variables"], {{"r1", "controlled"}, {"r2", "controlled"}, {"u", "observed"}});
        FiniteSpace in({{"r1", cards[0]}, {"r2", cards[1]}});
        FiniteSpace out = FiniteSpace::single("u", cards[2]);
        CondDist stats = table_from_json(j["stats"], in, out, "stats");
        std::vector<PrepEquivalence> eqs;
        if (!j["equivalences"].is_array()) throw ParseError("equivalences: expected an array");
        for (const auto& je : j["equivalences"]) {
            check_keys(je, {"lhs", "rhs"}, "equivalence");
            auto side = [&](const char* key) {
                if (!je.contains(key) || !je[key].is_array())
                    throw ParseError(std::string("equivalence: missing '") + key + "' array");
                std::vector<MixtureTerm> ts;
                for (const auto& jt : je[key]) {
                    check_keys(jt, {"weight", "preparation"}, "mixture term");
                    if (!jt.contains("weight") || !jt.contains("preparation"))
                        throw ParseError("mixture term needs 'weight' and 'preparation'");
                    ts.push_back({parse_rat(jt["weight"].get<std::string>()),
                                  jt["preparation"].get<int>()});
                }
                return ts;
            };
            eqs.push_back({side("lhs"), side("rhs")});
        }
        f.prep = PrepMeasureScenario::make(std::move(stats), std::move(eqs));
    } else if (shape == "bell") {
        f.shape = ScenarioFile::Shape::Bell;
        allowed.insert("box");
        check_keys(j, allowed, "scenario");
        for (const char* k : {"variables", "box"})
            if (!j.contains(k)) throw ParseError(std::string("missing '") + k + "'");
        std::vector<int> cards =
            parse_variables(j["variables"], {{"x", "controlled"},
                                             {"y", "controlled"},
                                             {"a", "observed"},
                                             {"b", "observed"}});
        FiniteSpace in({{"x", cards[0]}, {"y", cards[1]}});
        FiniteSpace out({{"a", cards[2]}, {"b", cards[3]}});
        f.bell = BellScenario::make(table_from_json(j["box"], in, out, "box"));
    } else if (shape == "time-symmetric-pair") {
        f.shape = ScenarioFile::Shape::TimeSymPair;
        allowed.insert({"experiment", "experiment_reversed", "planted", "planted_reversed"});
        check_keys(j, allowed, "scenario");
        for (const char* k : {"variables", "experiment", "experiment_reversed", "lambda"})
            if (!j.contains(k)) throw ParseError(std::string("missing '") + k + "'");
        std::vector<int> cards =
            parse_variables(j["variables"], {{"r1", "controlled"},
                                             {"r2", "controlled"},
                                             {"u1", "observed"},
                                             {"u2", "observed"}});
        FiniteSpace in({{"r1", cards[0]}, {"r2", cards[1]}});
        FiniteSpace out({{"u1", cards[2]}, {"u2", cards[3]}});
        CondDist E = table_from_json(j["experiment"], in, out, "experiment");
        CondDist Ep = table_from_json(j["experiment_reversed"], in, out, "experiment_reversed");
        LambdaConfig cfg = parse_lambda(j["lambda"]);
        if (cfg.mode != LambdaConfig::Mode::Stochastic)
            throw ParseError("time-symmetric-pair needs a stochastic lambda with explicit size");
        FiniteSpace outLam = out.product(FiniteSpace::single("l", cfg.size));
        std::optional<CondDist> planted, plantedRev;
        if (j.contains("planted")) planted = table_from_json(j["planted"], in, outLam, "planted");
        if (j.contains("planted_reversed"))
            plantedRev = table_from_json(j["planted_reversed"], in, outLam, "planted_reversed");
        f.pair = TimeSymScenario::make(std::move(E), std::move(Ep), cfg.size, std::move(planted),
                                       std::move(plantedRev));
        f.lambda = cfg;
    } else {
        throw ParseError("unknown shape '" + shape + "'");
    }

    if (j.contains("assumptions")) {
        if (!j["assumptions"].is_array()) throw ParseError("assumptions: expected an array");
        for (const auto& a : j["assumptions"]) {
            std::string name = a.get<std::string>();
            const auto& valid = valid_assumption_names();
            bool ok = false;
            for (const auto& v : valid) ok = ok || v == name;
            if (!ok) {
                std::string list;
                for (const auto& v : valid) list += (list.empty() ? "" : ", ") + v;
                throw ParseError("unknown assumption '" + name + "'; valid names: " + list);
            }
            f.assumptions.push_back(name);
        }
    } else {
        throw ParseError("missing 'assumptions'");
    }
    if (f.shape != ScenarioFile::Shape::TimeSymPair) {
        if (!j.contains("lambda")) throw ParseError("missing 'lambda'");
        f.lambda = parse_lambda(j["lambda"]);
    }
    return f;
}

}  // namespace opfine
