#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "opfine/opfine.hpp"

namespace {

using namespace opfine;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPremise = 2;
constexpr int kExitFineTuned = 10;

int env_int(const char* name, int fallback) {
    const char* v = std::getenv(name);
    if (!v || !*v) return fallback;
    try {
        return std::stoi(v);
    } catch (...) {
        return fallback;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << content;
}

// ---------------------------------------------------------------------------
// built-in scenarios

ScenarioFile builtin_prep(PrepMeasureScenario s) {
    ScenarioFile f;
    f.shape = ScenarioFile::Shape::PrepMeasure;
    f.prep = std::move(s);
    f.assumptions = {"lambda-mediation", "measurement-independence",
                     "preparation-noncontextuality"};
    f.lambda = LambdaConfig::deterministic();
    return f;
}

ScenarioFile builtin_bell(const Rat& v) {
    ScenarioFile f;
    f.shape = ScenarioFile::Shape::Bell;
    f.bell = BellScenario::make(noisy_pr_box(v));
    f.assumptions = {"measurement-independence", "parameter-independence", "outcome-independence"};
    f.lambda = LambdaConfig::deterministic();
    return f;
}

CondDist swap_channel() {
    return CondDist::from_fn(FiniteSpace({{"r1", 2}, {"r2", 2}}),
                             FiniteSpace({{"u1", 2}, {"u2", 2}}),
                             [](std::size_t o, std::size_t i) {
                                 int u1 = static_cast<int>(o) / 2, u2 = static_cast<int>(o) % 2;
                                 int r1 = static_cast<int>(i) / 2, r2 = static_cast<int>(i) % 2;
                                 return (u1 == r2 && u2 == r1) ? Rat(1) : Rat(0);
                             });
}

CondDist product_extension(const CondDist& base, const std::vector<Rat>& prior) {
    return trivial_extension(base, FiniteSpace::single("l", static_cast<int>(prior.size())), prior)
        .joint();
}

ScenarioFile builtin_time_sym(bool planted_mismatch) {
    ScenarioFile f;
    f.shape = ScenarioFile::Shape::TimeSymPair;
    CondDist E = swap_channel();
    auto [Ea, Eb] = time_symmetric_pair(E);
    std::optional<CondDist> pE, pEp;
    if (planted_mismatch) {
        pE = product_extension(Ea, {Rat(1, 2), Rat(1, 2)});
        pEp = product_extension(Eb, {Rat(1, 3), Rat(2, 3)});
    }
    f.pair = TimeSymScenario::make(Ea, Eb, 2, std::move(pE), std::move(pEp));
    f.assumptions = {"time-symmetry"};
    f.lambda = LambdaConfig::stochastic(2);
    return f;
}

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {
        "trine",      "classical-control",          "uniform-box",
        "noisy-pr-half", "noisy-pr-5-8",            "pr-box",
        "pr-box-pi-only", "time-symmetric-swap",    "time-symmetric-planted-mismatch"};
    return names;
}

ScenarioFile builtin_scenario(const std::string& name) {
    if (name == "trine") return builtin_prep(trine_prep_scenario());
    if (name == "classical-control") return builtin_prep(classical_control_scenario());
    if (name == "uniform-box") return builtin_bell(Rat(0));
    if (name == "noisy-pr-half") return builtin_bell(Rat(1, 2));
    if (name == "noisy-pr-5-8") return builtin_bell(Rat(5, 8));
    if (name == "pr-box") return builtin_bell(Rat(1));
    if (name == "pr-box-pi-only") {
        ScenarioFile f = builtin_bell(Rat(1));
        f.assumptions = {"parameter-independence"};
        f.lambda = LambdaConfig::stochastic(1);
        return f;
    }
    if (name == "time-symmetric-swap") return builtin_time_sym(false);
    if (name == "time-symmetric-planted-mismatch") return builtin_time_sym(true);
    throw ParseError("no built-in scenario named '" + name + "'");
}

// ---------------------------------------------------------------------------
// check dispatch

FineTuneResult trivial_check(const CondDist& table) {
    Comb id = identity_comb(table.input(), table.output());
    return check_no_fine_tuning(table, table, id, id, {}, LambdaConfig::stochastic(1));
}

FineTuneResult dispatch_check(const ScenarioFile& f, const std::vector<std::string>& assumptions) {
    std::set<std::string> s(assumptions.begin(), assumptions.end());
    switch (f.shape) {
        case ScenarioFile::Shape::TimeSymPair:
            return check_time_symmetry(*f.pair, env_int("OPFINE_MAX_LAMBDA", 8));
        case ScenarioFile::Shape::PrepMeasure: {
            if (s.empty()) return trivial_check(f.prep->stats);
            std::set<std::string> supported = {"lambda-mediation", "measurement-independence",
                                               "preparation-noncontextuality"};
            for (const auto& a : s)
                if (!supported.count(a))
                    throw UnsupportedCombination(
                        "assumption '" + a + "' is not available for prepare-measure scenarios");
            FineTuneResult res;
            res.assumption_names.assign(s.begin(), s.end());
            res.lambda_desc = "deterministic response functions";
            if (s.count("lambda-mediation")) add_lambda_mediation(res.system, *f.prep);
            if (s.count("measurement-independence"))
                add_measurement_independence(res.system, *f.prep);
            if (s.count("preparation-noncontextuality"))
                add_preparation_noncontextuality(res.system, *f.prep);
            res.verdict = solver::solve(res.system);
            res.fine_tuned = !res.verdict.feasible;
            return res;
        }
        case ScenarioFile::Shape::Bell: {
            if (s.empty()) return trivial_check(f.bell->box);
            std::set<std::string> local = {"measurement-independence", "parameter-independence",
                                           "outcome-independence"};
            if (s == local) return check_bell_local_causality(*f.bell);
            if (s == std::set<std::string>{"parameter-independence"}) {
                int L = f.lambda.mode == LambdaConfig::Mode::Stochastic ? f.lambda.size : 1;
                return check_parameter_independence_only(*f.bell, L);
            }
            throw UnsupportedCombination(
                "Bell scenarios support either {measurement-independence, parameter-independence, "
                "outcome-independence} or {parameter-independence} alone");
        }
    }
    throw ParseError("unreachable");
}

void print_result(const FineTuneResult& res) {
    std::cout << (res.fine_tuned ? "FINE-TUNED" : "NO-FINE-TUNING") << "\n";
    std::cout << "assumptions:";
    if (res.assumption_names.empty()) std::cout << " (none)";
    for (const auto& a : res.assumption_names) std::cout << " " << a;
    std::cout << "\n";
    std::cout << "lambda: " << res.lambda_desc << "\n";
    if (res.bijection) {
        std::cout << "bijection:";
        for (int k : *res.bijection) std::cout << " " << k;
        std::cout << "\n";
    }
    std::cout << "system: " << res.system.constraints().size() << " constraints, "
              << res.system.num_unknowns() << " unknowns, hash " << std::hex << res.system.hash()
              << std::dec << "\n";
}

// standard subcategory used by functor-check: the output swap, an input
// pin, an output discard and a mixture, over a two-bit slot
Subcategory standard_subcategory() {
    FiniteSpace S({{"s1", 2}, {"s2", 2}}), T({{"t1", 2}, {"t2", 2}});
    Comb Pi = permutation_comb(S, T, {1, 0}, {1, 0});
    Comb mixed = mix_combs(Rat(1, 2), identity_comb(S, T), Pi);
    Comb setter = set_input_comb(S, T, "s1", 0);
    Comb discard = discard_output_comb(setter.R(), T, {"t1"});
    return build_subcategory({Pi, mixed, setter, discard}, 64);
}

int run_functor_check(int lambda_size, bool broken) {
    FiniteSpace Lam = FiniteSpace::single("l", lambda_size);
    Subcategory cat = standard_subcategory();
    FiniteSpace S({{"s1", 2}, {"s2", 2}}), T({{"t1", 2}, {"t2", 2}});
    Comb Pi = permutation_comb(S, T, {1, 0}, {1, 0});
    std::vector<int> cycle(static_cast<std::size_t>(lambda_size));
    for (std::size_t i = 0; i < cycle.size(); ++i)
        cycle[i] = static_cast<int>((i + 1) % cycle.size());
    LiftMap lift = [&](const Comb& c) {
        if (broken && combs_action_equal(c, Pi)) return canonical_lift(Pi, Lam, cycle);
        return canonical_lift(c, Lam);
    };
    FunctorLawReport rep = check_functor_laws(cat, lift, Lam);
    std::cout << "subcategory: " << cat.morphisms.size() << " morphisms over "
              << cat.objects.size() << " objects\n";
    std::cout << "identity law: " << (rep.identity_ok ? "pass" : "FAIL") << "\n";
    std::cout << "composition law: " << (rep.composition_ok ? "pass" : "FAIL") << "\n";
    std::cout << "convexity law: " << (rep.convexity_ok ? "pass" : "FAIL") << "\n";
    if (!rep.all_ok()) std::cout << "counterexample: " << rep.counterexample << "\n";
    return rep.all_ok() ? kExitOk : kExitFineTuned;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact checker for ontological fine tunings of operational equivalences"};
    app.require_subcommand(1);

    std::string path, cert_path, out_path, name, assumptions_arg;
    int lambda_size = 2;
    bool broken = false;

    auto* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
    validate->add_option("path", path)->required();

    auto* check = app.add_subcommand("check", "Decide fine tuning for a scenario file");
    check->add_option("path", path)->required();
    check->add_option("--assumptions", assumptions_arg,
                      "Comma-separated override of the file's assumption list");
    check->add_option("--emit-certificate", cert_path, "Write the witness/certificate here");

    auto* scen = app.add_subcommand("scenarios", "List or export built-in scenarios");
    auto* scen_list = scen->add_subcommand("list", "List built-in scenario names");
    auto* scen_export = scen->add_subcommand("export", "Write a built-in scenario to a file");
    scen_export->add_option("name", name)->required();
    scen_export->add_option("path", out_path)->required();
    scen->require_subcommand(1);

    auto* verify = app.add_subcommand("verify-certificate",
                                      "Re-check a stored verdict against a scenario file");
    verify->add_option("path", path)->required();
    verify->add_option("certificate", cert_path)->required();
    verify->add_option("--assumptions", assumptions_arg,
                       "Comma-separated override of the file's assumption list");

    auto* functor = app.add_subcommand("functor-check",
                                       "Check functor laws of the canonical lift");
    functor->add_option("--lambda-size", lambda_size)->check(CLI::Range(1, 6));
    functor->add_flag("--broken", broken, "Use a deliberately law-breaking lift");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*validate) {
            ScenarioFile f = parse_scenario(read_file(path));
            std::cout << "valid\n";
            std::cout << "shape: "
                      << (f.shape == ScenarioFile::Shape::PrepMeasure  ? "prepare-measure"
                          : f.shape == ScenarioFile::Shape::Bell       ? "bell"
                                                                       : "time-symmetric-pair")
                      << "\n";
            return kExitOk;
        }
        if (*check || *verify) {
            ScenarioFile f = parse_scenario(read_file(path));
            std::vector<std::string> assumptions = f.assumptions;
            if (!assumptions_arg.empty()) {
                assumptions.clear();
                std::stringstream ss(assumptions_arg);
                std::string item;
                while (std::getline(ss, item, ','))
                    if (!item.empty()) assumptions.push_back(item);
                for (const auto& a : assumptions) {
                    bool ok = false;
                    for (const auto& v : valid_assumption_names()) ok = ok || v == a;
                    if (!ok) throw ParseError("unknown assumption '" + a + "'");
                }
            }
            FineTuneResult res = dispatch_check(f, assumptions);
            if (*check) {
                print_result(res);
                if (!cert_path.empty())
                    write_file(cert_path, solver::serialize_verdict(res.system, res.verdict));
                return res.fine_tuned ? kExitFineTuned : kExitOk;
            }
            solver::Verdict v = solver::parse_verdict(res.system, read_file(cert_path));
            if (!solver::verify(res.system, v)) {
                std::cout << "certificate does not re-check\n";
                return kExitUsage;
            }
            std::cout << "certificate ok: " << (v.feasible ? "witness" : "infeasibility proof")
                      << "\n";
            return kExitOk;
        }
        if (*scen_list) {
            for (const auto& n : builtin_names()) std::cout << n << "\n";
            return kExitOk;
        }
        if (*scen_export) {
            write_file(out_path, serialize_scenario(builtin_scenario(name)));
            std::cout << "wrote " << out_path << "\n";
            return kExitOk;
        }
        if (*functor) return run_functor_check(lambda_size, broken);
    } catch (const PremiseFailed& e) {
        std::cout << "PREMISE-FAILED\n" << e.what() << "\n";
        return kExitPremise;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
