#include "hdtorus/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hdtorus/errors.hpp"
#include "hdtorus/report_io.hpp"

namespace hdtorus {

namespace {

using nlohmann::json;

const std::vector<std::string> kSpecKeys = {"family", "r", "n", "L"};
const std::vector<std::string> kParamKeys = {"p",      "lambda",  "mu",  "samples", "seed",
                                             "budget", "workers", "eps", "out",     "tau"};

struct SpecFile {
    TorusSpec spec;
    json spec_json;
    json defaults; // parameter defaults from the file
};

SpecFile load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spec file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("malformed spec file '" + path + "': " + e.what());
    }
    json spec_part = json::object(), defaults = json::object();
    for (const auto& [key, value] : j.items()) {
        if (std::find(kSpecKeys.begin(), kSpecKeys.end(), key) != kSpecKeys.end())
            spec_part[key] = value;
        else if (std::find(kParamKeys.begin(), kParamKeys.end(), key) != kParamKeys.end())
            defaults[key] = value;
        else
            throw ConfigError("unknown key '" + key + "' in spec file '" + path + "'");
    }
    SpecFile out;
    out.spec = spec_from_json(spec_part);
    out.spec_json = spec_part;
    out.defaults = defaults;
    return out;
}

// flags > file > defaults
template <typename T>
T pick(const CLI::Option* opt, const T& flag_value, const json& file, const char* key, T fallback) {
    if (opt != nullptr && opt->count() > 0) return flag_value;
    if (file.contains(key)) {
        try {
            return file.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(std::string("spec file key '") + key + "' has the wrong type");
        }
    }
    return fallback;
}

void emit(const json& payload, const std::string& out_path) {
    const std::string text = payload.dump(2) + "\n";
    std::fputs(text.c_str(), stdout);
    if (!out_path.empty()) write_text_file(out_path, text);
}

std::string csv_companion_path(const std::string& csv_path) {
    auto dot = csv_path.find_last_of('.');
    auto slash = csv_path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return csv_path + ".json";
    return csv_path.substr(0, dot) + ".json";
}

std::vector<double> tau_input(const TorusSpec& spec, const std::string& tau_path, double p,
                              long long samples, std::uint64_t seed, int workers) {
    if (!tau_path.empty()) return read_tau_csv(tau_path, spec.volume).tau;
    McOptions opts;
    opts.samples = samples;
    opts.seed = seed;
    opts.workers = workers;
    opts.double_connectivity = false;
    opts.keep_cmax_samples = false;
    return estimate_observables(spec, p, opts).two_point.tau;
}

struct GlobalFlags {
    std::uint64_t seed = 1;
    int workers = 0;
    std::string out;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* workers_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};


} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"numerical laboratory for bond percolation on high-dimensional tori"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags global;
    global.seed_opt = app.add_option("--seed", global.seed, "RNG seed");
    global.workers_opt = app.add_option("--workers", global.workers, "worker threads (0 = auto)")
                             ->envname("HDTORUS_WORKERS");
    global.out_opt = app.add_option("--out", global.out, "output file path");

    struct Cmd {
        CLI::App* sub = nullptr;
        std::string spec_path, tau_path;
        double p = 0.5, lambda = 0.25, mu = -1.0;
        long long samples = 10000, budget = 10000;
        double pc = -1.0;
        std::vector<double> eps;
        CLI::Option *p_opt = nullptr, *lambda_opt = nullptr, *mu_opt = nullptr,
                    *samples_opt = nullptr, *budget_opt = nullptr, *eps_opt = nullptr,
                    *tau_opt = nullptr, *pc_opt = nullptr;
    };

    std::map<std::string, Cmd> cmds;
    for (const char* name : {"rw", "mc", "oracle", "triangle", "bootstrap", "pc", "window"}) {
        Cmd& c = cmds[name]; // map nodes are stable; options bind to these fields
        c.sub = app.add_subcommand(name, "");
        c.sub->add_option("--spec", c.spec_path, "torus spec JSON file")->required();
    }
    cmds["rw"].sub->description("random-walk triangle sums and infrared margin");
    cmds["rw"].mu_opt = cmds["rw"].sub->add_option("--mu", cmds["rw"].mu, "walk mass (default 1/Omega)");
    cmds["mc"].sub->description("Monte Carlo two-point, double-connection and cluster statistics");
    cmds["mc"].p_opt = cmds["mc"].sub->add_option("--p", cmds["mc"].p, "bond probability");
    cmds["mc"].samples_opt = cmds["mc"].sub->add_option("--samples", cmds["mc"].samples, "sample count");
    cmds["oracle"].sub->description("exact observables by configuration enumeration");
    cmds["oracle"].p_opt = cmds["oracle"].sub->add_option("--p", cmds["oracle"].p, "bond probability");
    cmds["triangle"].sub->description("triangle-diagram quantities from a two-point field");
    cmds["triangle"].p_opt = cmds["triangle"].sub->add_option("--p", cmds["triangle"].p, "bond probability");
    cmds["triangle"].tau_opt = cmds["triangle"].sub->add_option("--tau", cmds["triangle"].tau_path, "two-point CSV (else internal MC)");
    cmds["triangle"].lambda_opt = cmds["triangle"].sub->add_option("--lambda", cmds["triangle"].lambda, "threshold parameter");
    cmds["triangle"].samples_opt = cmds["triangle"].sub->add_option("--samples", cmds["triangle"].samples, "MC samples when --tau absent");
    cmds["bootstrap"].sub->description("bootstrap functions f1, f2, f3");
    cmds["bootstrap"].p_opt = cmds["bootstrap"].sub->add_option("--p", cmds["bootstrap"].p, "bond probability");
    cmds["bootstrap"].lambda_opt = cmds["bootstrap"].sub->add_option("--lambda", cmds["bootstrap"].lambda, "threshold parameter");
    cmds["bootstrap"].tau_opt = cmds["bootstrap"].sub->add_option("--tau", cmds["bootstrap"].tau_path, "two-point CSV (else internal MC)");
    cmds["bootstrap"].samples_opt = cmds["bootstrap"].sub->add_option("--samples", cmds["bootstrap"].samples, "MC samples when --tau absent");
    cmds["pc"].sub->description("critical threshold chi(p_c) = lambda V^{1/3}");
    cmds["pc"].lambda_opt = cmds["pc"].sub->add_option("--lambda", cmds["pc"].lambda, "threshold parameter");
    cmds["pc"].budget_opt = cmds["pc"].sub->add_option("--budget", cmds["pc"].budget, "MC samples per evaluation");
    cmds["window"].sub->description("scaling-window sweep around p_c");
    cmds["window"].lambda_opt = cmds["window"].sub->add_option("--lambda", cmds["window"].lambda, "threshold parameter");
    cmds["window"].eps_opt = cmds["window"].sub->add_option("--eps", cmds["window"].eps, "epsilon grid");
    cmds["window"].budget_opt = cmds["window"].sub->add_option("--budget", cmds["window"].budget, "MC samples per point");
    cmds["window"].pc_opt = cmds["window"].sub->add_option("--pc", cmds["window"].pc, "p_c (else solved first)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        for (auto& [name, c] : cmds) {
            if (!c.sub->parsed()) continue;
            SpecFile file = load_spec_file(c.spec_path);
            const TorusSpec& spec = file.spec;
            const std::uint64_t seed =
                pick<std::uint64_t>(global.seed_opt, global.seed, file.defaults, "seed", 1);
            const int workers = pick<int>(global.workers_opt, global.workers, file.defaults, "workers", 0);
            const std::string out_path =
                pick<std::string>(global.out_opt, global.out, file.defaults, "out", "");

            json config{{"command", name}, {"spec", file.spec_json}};

            if (name == "rw") {
                const double mu = pick(c.mu_opt, c.mu, file.defaults, "mu",
                                       1.0 / static_cast<double>(spec.degree));
                config["mu"] = mu;
                auto sums = rw_triangle_sums(spec, mu);
                auto infrared = infrared_margin(spec);
                json j{{"meta", make_meta(config, seed)}, {"spec", file.spec_json},
                       {"mu", mu},  {"mu_omega", mu * static_cast<double>(spec.degree)}};
                j.update(to_json(sums));
                j["infrared"] = to_json(infrared);
                emit(j, out_path);
            } else if (name == "mc") {
                const double p = pick(c.p_opt, c.p, file.defaults, "p", 0.5);
                const long long samples = pick(c.samples_opt, c.samples, file.defaults, "samples", 10000LL);
                config["p"] = p;
                config["samples"] = samples;
                config["seed"] = seed;
                McOptions opts;
                opts.samples = samples;
                opts.seed = seed;
                opts.workers = workers;
                auto mc = estimate_observables(spec, p, opts);
                const json meta = make_meta(config, seed);
                const std::string csv_path = out_path.empty() ? "mc.csv" : out_path;
                write_text_file(csv_path, mc_csv(mc, meta));
                json companion{{"meta", meta}, {"spec", file.spec_json}, {"p", p},
                               {"samples", samples}};
                companion.update(to_json(mc.clusters));
                write_text_file(csv_companion_path(csv_path), companion.dump(2) + "\n");
                std::fprintf(stderr, "wrote %s and %s\n", csv_path.c_str(),
                             csv_companion_path(csv_path).c_str());
            } else if (name == "oracle") {
                const double p = pick(c.p_opt, c.p, file.defaults, "p", 0.5);
                config["p"] = p;
                auto report = exact_observables(spec, p);
                json j{{"meta", make_meta(config, seed)}, {"spec", file.spec_json}};
                j.update(to_json(report));
                emit(j, out_path);
            } else if (name == "triangle" || name == "bootstrap") {
                const double p = pick(c.p_opt, c.p, file.defaults, "p", 0.5);
                const double lambda = pick(c.lambda_opt, c.lambda, file.defaults, "lambda", 0.25);
                const long long samples = pick(c.samples_opt, c.samples, file.defaults, "samples", 10000LL);
                const std::string tau_path = pick(c.tau_opt, c.tau_path, file.defaults, "tau", std::string());
                config["p"] = p;
                config["lambda"] = lambda;
                if (tau_path.empty()) {
                    config["samples"] = samples;
                    config["seed"] = seed;
                } else {
                    config["tau"] = tau_path;
                }
                auto tau = tau_input(spec, tau_path, p, samples, seed, workers);
                json j{{"meta", make_meta(config, seed)}, {"spec", file.spec_json}};
                if (name == "triangle") {
                    j.update(to_json(diagram_report(spec, tau, p, lambda)));
                } else {
                    auto prep = prepare_spectrum(spec, std::move(tau));
                    j.update(to_json(bootstrap_f(spec, prep.tau_hat, p, lambda)));
                    j["tau_hat_negative_count"] = prep.negative_count;
                    j["tau_hat_min"] = prep.min_value;
                }
                emit(j, out_path);
            } else if (name == "pc") {
                double lambda;
                if (c.lambda_opt->count() > 0) {
                    lambda = c.lambda;
                } else if (file.defaults.contains("lambda")) {
                    lambda = file.defaults.at("lambda").get<double>();
                } else {
                    lambda = 0.25;
                    std::fprintf(stderr, "notice: lambda not given, using default 0.25\n");
                }
                const long long budget = pick(c.budget_opt, c.budget, file.defaults, "budget", 10000LL);
                config["lambda"] = lambda;
                config["budget"] = budget;
                config["seed"] = seed;
                auto result = find_pc(spec, lambda, budget, seed, workers);
                json j{{"meta", make_meta(config, seed)}, {"spec", file.spec_json}};
                j.update(to_json(result));
                auto asy = pc_asymptotics_check(result, spec);
                j["p_omega"] = asy.p_omega;
                j["p_omega_dev"] = asy.dev;
                emit(j, out_path);
            } else if (name == "window") {
                const double lambda = pick(c.lambda_opt, c.lambda, file.defaults, "lambda", 0.25);
                const long long budget = pick(c.budget_opt, c.budget, file.defaults, "budget", 10000LL);
                std::vector<double> eps =
                    pick(c.eps_opt, c.eps, file.defaults, "eps", std::vector<double>{});
                if (eps.empty()) eps = default_epsilon_grid(spec, lambda);
                double pc = c.pc_opt->count() > 0 ? c.pc : -1.0;
                if (pc < 0.0) pc = find_pc(spec, lambda, budget, seed, workers).pc;
                config["lambda"] = lambda;
                config["budget"] = budget;
                config["seed"] = seed;
                config["pc"] = pc;
                config["eps"] = eps;
                auto rows = window_scan(spec, lambda, pc, eps, budget, seed, workers);
                const std::string csv = window_csv(rows, make_meta(config, seed));
                if (out_path.empty())
                    std::fputs(csv.c_str(), stdout);
                else
                    write_text_file(out_path, csv);
            }
        }
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return 3;
    } catch (const SizeError& e) {
        std::fprintf(stderr, "size error: %s\n", e.what());
        return 4;
    } catch (const SingularityError& e) {
        std::fprintf(stderr, "singularity error: %s\n", e.what());
        return 5;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace hdtorus
