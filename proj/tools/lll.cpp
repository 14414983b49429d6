#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "lll/experiments.hpp"

namespace {

enum Exit { kOk = 0, kOther = 1, kParse = 2, kCriterion = 3, kCap = 4, kAcceptance = 5 };

int exit_code(lll::ErrorKind k) {
    switch (k) {
        case lll::ErrorKind::ParseError:
        case lll::ErrorKind::InvalidArgument:
        case lll::ErrorKind::InvariantViolation: return kParse;
        case lll::ErrorKind::CriterionViolated: return kCriterion;
        case lll::ErrorKind::CapExceeded: return kCap;
        default: return kOther;
    }
}

// Options each experiment accepts beyond the common ones.
const std::map<std::string, std::set<std::string>>& allowed() {
    static const std::map<std::string, std::set<std::string>> a{
        {"latin", {"instance", "n", "delta", "cap", "audit"}},
        {"partial-latin", {"instance", "n", "beta", "cap", "audit"}},
        {"stein", {"instance", "n", "beta"}},
        {"nonrep", {"instance", "n", "delta", "C", "cap", "audit", "no-shortcut", "no-verify"}},
        {"kthue", {"instance", "n", "delta", "k", "eps", "C", "cap", "audit", "no-shortcut", "no-verify"}},
        {"rho-similar", {"instance", "n", "delta", "rho", "C", "cap", "audit", "no-shortcut", "no-verify"}},
        {"hyp2col", {"instance", "n", "m", "k", "max-deg", "cap", "audit", "no-shortcut"}},
        {"ramsey", {"n", "k", "cap"}},
        {"ksat-partial", {"instance", "n", "m", "k", "alpha", "cap", "best-of"}},
        {"parallel-truncated", {"m", "width", "alpha"}},
        {"entropy-bound", {"rho"}},
        {"criterion-check", {"p", "d", "builtin", "alpha"}},
        {"wtl-verify", {"cutoff"}},
    };
    return a;
}

const char* describe(const std::string& name) {
    static const std::map<std::string, const char*> d{
        {"latin", "full Latin transversal by swapping resampling"},
        {"partial-latin", "partial Latin transversal by truncated swapping resampling"},
        {"stein", "uniform permutation baseline for partial transversals"},
        {"nonrep", "non-repetitive vertex coloring"},
        {"kthue", "coloring without k-repetitions up to the searched length"},
        {"rho-similar", "coloring without rho-similar paths"},
        {"hyp2col", "two-coloring of a k-uniform hypergraph"},
        {"ramsey", "edge 2-coloring of K_n without monochromatic K_k"},
        {"ksat-partial", "partial k-SAT with biased assignment and truncated resampling"},
        {"parallel-truncated", "round-based truncated resampling on a symmetric ring"},
        {"entropy-bound", "distortion bounds and output min-entropy"},
        {"criterion-check", "local lemma criterion on a symmetric or built-in instance"},
        {"wtl-verify", "witness-tree, output-distribution and internal-state checks"},
    };
    return d.at(name);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Local lemma resampling workbench"};
    app.require_subcommand(1);
    lll::ExperimentConfig cfg;
    std::string out_path;
    std::map<std::string, CLI::App*> subs;

    for (const auto& name : lll::experiment_names()) {
        auto* sub = app.add_subcommand(name, describe(name));
        subs[name] = sub;
        const auto& ok = allowed().at(name);
        auto has = [&](const char* o) { return ok.count(o) > 0; };
        sub->add_option("--seed", cfg.seed, "base seed (LLL_SEED overrides)");
        if (name != "criterion-check") {
            sub->add_option("--trials", cfg.trials, "number of trials")->check(CLI::PositiveNumber);
            sub->add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::Range(1u, 256u));
        }
        sub->add_option("--out", out_path, "write the JSON report here instead of stdout");
        if (has("instance")) sub->add_option("--instance", cfg.instance, "input file")->check(CLI::ExistingFile);
        if (has("n")) sub->add_option_function<std::size_t>("--n", [&](std::size_t v) { cfg.n = v; }, "size")->check(CLI::Range(std::size_t{1}, std::size_t{1} << 24));
        if (has("m")) sub->add_option_function<std::size_t>("--m", [&](std::size_t v) { cfg.m = v; }, "edges/clauses/events")->check(CLI::Range(std::size_t{1}, std::size_t{1} << 24));
        if (has("k")) sub->add_option_function<std::size_t>("--k", [&](std::size_t v) { cfg.k = v; }, "width / clique size / repetition order")->check(CLI::Range(std::size_t{2}, std::size_t{62}));
        if (has("delta")) sub->add_option_function<std::size_t>("--delta", [&](std::size_t v) { cfg.delta = v; }, "max degree or color multiplicity")->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20));
        if (has("max-deg")) sub->add_option_function<std::size_t>("--max-deg", [&](std::size_t v) { cfg.max_deg = v; }, "max vertex degree")->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20));
        if (has("width")) sub->add_option_function<std::size_t>("--width", [&](std::size_t v) { cfg.width = v; }, "ring event width")->check(CLI::Range(std::size_t{1}, std::size_t{64}));
        if (has("alpha")) sub->add_option_function<double>("--alpha", [&](double v) { cfg.alpha = v; }, "alpha")->check(CLI::Range(0.0, std::numbers::e));
        if (has("rho")) sub->add_option_function<double>("--rho", [&](double v) { cfg.rho = v; }, "rho")->check(CLI::Range(0.0, 1e300));
        if (has("eps")) sub->add_option_function<double>("--eps", [&](double v) { cfg.eps = v; }, "epsilon")->check(CLI::Range(1e-9, 1.0));
        if (has("beta")) sub->add_option_function<double>("--beta", [&](double v) { cfg.beta = v; }, "delta / n")->check(CLI::Range(1e-9, 1e9));
        if (has("p")) sub->add_option_function<double>("--p", [&](double v) { cfg.p = v; }, "event probability")->check(CLI::Range(0.0, 1.0));
        if (has("d")) sub->add_option_function<double>("--d", [&](double v) { cfg.d = v; }, "inclusive neighbourhood size")->check(CLI::Range(1.0, 1e12));
        if (has("cutoff")) sub->add_option_function<double>("--cutoff", [&](double v) { cfg.cutoff = v; }, "smallest tree weight")->check(CLI::Range(1e-9, 1.0));
        if (has("C")) sub->add_option_function<int>("--C", [&](int v) { cfg.C = v; }, "palette size override")->check(CLI::Range(2, 1 << 20));
        if (has("cap")) sub->add_option("--cap", cfg.cap, "resampling cap")->check(CLI::PositiveNumber);
        if (has("best-of")) sub->add_option("--best-of", cfg.best_of, "keep the best of r runs per trial")->check(CLI::Range(std::size_t{1}, std::size_t{1000}));
        if (has("builtin")) sub->add_option("--builtin", cfg.builtin, "built-in instance")->check(CLI::IsMember({"reference", "six-binary"}));
        if (has("audit")) sub->add_flag("--audit", cfg.audit, "audit the search structures after every resampling");
        if (has("no-shortcut")) sub->add_flag("--no-shortcut{false}", cfg.shortcut, "disable the small-instance shortcut");
        if (has("no-verify")) sub->add_flag("--no-verify{false}", cfg.verify, "skip the exhaustive oracle");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kParse;
    }

    if (const char* env = std::getenv("LLL_SEED")) {
        try {
            std::size_t used = 0;
            cfg.seed = std::stoull(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument(env);
        } catch (const std::exception&) {
            std::cerr << "LLL_SEED is not an unsigned integer: " << env << "\n";
            return kParse;
        }
    }

    std::string name;
    for (auto& [n, sub] : subs)
        if (sub->parsed()) name = n;

    try {
        const auto rep = lll::run_experiment(name, cfg);
        const std::string text = rep.to_json().dump(2) + "\n";
        if (out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream f(out_path);
            if (!f) {
                std::cerr << "cannot write " << out_path << "\n";
                return kOther;
            }
            f << text;
        }
        for (const auto& c : rep.checks)
            if (!c.pass) std::cerr << "check failed: " << c.name << " observed " << c.observed << " bound " << c.bound << "\n";
        return rep.passed() ? kOk : kAcceptance;
    } catch (const lll::Error& e) {
        std::cerr << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kOther;
    }
}
