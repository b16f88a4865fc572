#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "imd/checks.hpp"
#include "imd/datagen.hpp"
#include "imd/experiments.hpp"
#include "imd/io.hpp"
#include "imd/transport.hpp"

namespace fs = std::filesystem;
using imd::io::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct ConfigFlags {
    std::optional<int> k;
    std::optional<double> eta, theta, sigma;
    std::optional<std::size_t> n, n_source, n_target;
    std::optional<std::uint64_t> seed;

    void attach(CLI::App* app) {
        app->add_option("--k", k, "Number of classes");
        app->add_option("--eta", eta, "Imbalance intensity");
        app->add_option("--theta", theta, "Target rotation in degrees");
        app->add_option("--sigma", sigma, "Per-class standard deviation");
        app->add_option("--n", n, "Source and target sample size");
        app->add_option("--n-source", n_source, "Source sample size");
        app->add_option("--n-target", n_target, "Target sample size");
        app->add_option("--seed", seed, "RNG seed");
    }

    imd::ToyConfig apply(imd::ToyConfig c) const {
        if (k) c.num_classes = *k;
        if (eta) c.eta = *eta;
        if (theta) c.theta_deg = *theta;
        if (sigma) c.sigma = *sigma;
        if (n) c.n_source = c.n_target = *n;
        if (n_source) c.n_source = *n_source;
        if (n_target) c.n_target = *n_target;
        if (seed) c.seed = *seed;
        return c;
    }
};

struct Common {
    std::string out = "out";
    unsigned jobs = 0;
    std::string config_file;
    bool timings = false;
};

imd::ToyConfig load_config(const Common& common, const ConfigFlags& flags) {
    imd::ToyConfig c;
    if (!common.config_file.empty()) {
        std::ifstream in(common.config_file);
        if (!in) throw imd::Error("cannot open config file " + common.config_file);
        std::stringstream ss;
        ss << in.rdbuf();
        const std::string text = ss.str();
        const auto first = text.find_first_not_of(" \t\r\n");
        json j;
        if (first != std::string::npos && text[first] == '{') {
            try {
                j = json::parse(text);
            } catch (const json::exception& e) {
                throw imd::Error(std::string("config file: ") + e.what());
            }
        } else {
            std::istringstream is(text);
            j = imd::io::parse_key_value(is);
        }
        c = imd::io::config_from_json(j, c);
    }
    c = flags.apply(c);
    c.validate();
    return c;
}

json config_sidecar(const imd::ToyConfig& c) {
    json j = imd::io::config_to_json(c);
    j["rng"] = "mt19937_64 seeded by splitmix64; draw d uses substream d, source/target use sub-substreams 0/1";
    j["assumptions"] = {"sigma defaults to 0.35", "n_target defaults to n_source = 300",
                        "target class counts use largest-remainder rounding"};
    return j;
}

class Run {
  public:
    Run(const Common& common, std::string command) : common_(common), start_(Clock::now()) {
        manifest_["command"] = std::move(command);
        manifest_["tool_version"] = kVersion;
        fs::create_directories(common.out);
    }

    const fs::path dir() const { return fs::path(common_.out); }

    void write(const fs::path& rel, const std::string& content) {
        const fs::path p = dir() / rel;
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        std::ofstream os(p, std::ios::binary);
        if (!os) throw imd::Error("cannot write " + p.string());
        os << content;
        os.close();
        if (!os) throw imd::Error("write failed for " + p.string());
        files_.push_back(rel.generic_string());
    }

    void write_json(const fs::path& rel, const json& j) { write(rel, j.dump(2) + "\n"); }

    json& manifest() { return manifest_; }

    int finish(bool success, const std::string& diagnostic = {}) {
        manifest_["success"] = success;
        if (!diagnostic.empty()) manifest_["diagnostic"] = diagnostic;
        manifest_["outputs"] = files_;
        if (common_.timings)
            manifest_["wall_clock_ms"] =
                std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
        else
            manifest_["wall_clock_ms"] = nullptr;
        std::ofstream os(dir() / "manifest.json", std::ios::binary);
        os << manifest_.dump(2) << "\n";
        if (!diagnostic.empty()) std::cerr << "error: " << diagnostic << "\n";
        return success ? 0 : 1;
    }

  private:
    using Clock = std::chrono::steady_clock;
    const Common& common_;
    Clock::time_point start_;
    json manifest_;
    std::vector<std::string> files_;
};

std::string to_csv(const imd::LabeledDataset& d) {
    std::ostringstream os;
    imd::io::write_dataset_csv(os, d);
    return os.str();
}

imd::LabeledDataset read_csv_file(const std::string& path, std::optional<int> k = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw imd::Error("cannot open " + path);
    return imd::io::read_dataset_csv(in, k);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (item.empty() || used != item.size()) throw imd::Error("bad number '" + item + "' in list '" + s + "'");
        out.push_back(v);
    }
    if (out.empty()) throw imd::Error("empty list");
    return out;
}

int cmd_gen(const Common& common, const ConfigFlags& flags) {
    Run run(common, "gen");
    try {
        const auto cfg = load_config(common, flags);
        run.manifest()["config"] = imd::io::config_to_json(cfg);
        run.manifest()["seed"] = cfg.seed;
        const auto pair = imd::generate_pair(cfg);
        run.write("source.csv", to_csv(pair.source));
        run.write("target.csv", to_csv(pair.target));
        run.write_json("config.json", config_sidecar(cfg));
        return run.finish(true);
    } catch (const std::exception& e) {
        return run.finish(false, e.what());
    }
}

struct SolveFlags {
    std::string source, target, mode = "global";
    double beta = 0.0;
    std::string beta_vec;
    bool svg = false;
};

int cmd_solve(const Common& common, const ConfigFlags& flags, const SolveFlags& sf) {
    Run run(common, "solve");
    try {
        imd::LabeledDataset source, target;
        json cfg_json;
        if (!sf.source.empty() || !sf.target.empty()) {
            if (sf.source.empty() || sf.target.empty()) throw imd::Error("--source and --target go together");
            source = read_csv_file(sf.source, flags.k);
            target = read_csv_file(sf.target, source.num_classes());
            if (target.num_classes() > source.num_classes())
                source = imd::LabeledDataset(source.points(), source.labels(), target.num_classes());
            cfg_json = {{"source", sf.source}, {"target", sf.target}};
        } else {
            const auto cfg = load_config(common, flags);
            const auto pair = imd::generate_pair(cfg);
            source = pair.source;
            target = pair.target;
            cfg_json = imd::io::config_to_json(cfg);
            run.manifest()["seed"] = cfg.seed;
        }
        cfg_json["mode"] = sf.mode;
        run.manifest()["config"] = cfg_json;

        const auto t = imd::empirical_measure(target);
        const auto s = imd::empirical_measure(source);
        json plan;
        imd::Matrix full;
        if (sf.mode == "global") {
            const auto cost = imd::cost_matrix(target.points(), source.points());
            const auto r = imd::ot::partial_ot_global(t, s, cost, sf.beta);
            plan = imd::io::global_plan_to_json(r, sf.beta, imd::io::global_capacities(s, sf.beta));
            full = r.plan;
        } else if (sf.mode == "perclass" || sf.mode == "split") {
            const auto pc = imd::ot::per_class_problem(t, source);
            imd::ot::TransportPlanSet r;
            if (sf.mode == "perclass") {
                std::vector<double> beta(pc.conditionals.size(), 0.0);
                if (!sf.beta_vec.empty()) beta = parse_list(sf.beta_vec);
                if (beta.size() != pc.conditionals.size())
                    throw imd::Error("--beta-vec needs " + std::to_string(pc.conditionals.size()) + " entries");
                r = imd::ot::partial_ot_per_class(t, pc.conditionals, pc.proportions, beta, pc.costs);
            } else {
                r = imd::ot::partial_ot_beta_split(t, pc.conditionals, pc.proportions, sf.beta, pc.costs);
            }
            plan = imd::io::plan_set_to_json(r, sf.mode, pc, source.size());
            full = r.to_dataset_order(pc.members, source.size());
        } else {
            throw imd::Error("unknown mode '" + sf.mode + "' (global, perclass, split)");
        }
        run.write_json("plan.json", plan);
        run.manifest()["objective"] = plan["objective"];
        if (sf.svg) {
            const bool dotted = sf.mode == "global";
            run.write("plan.svg", imd::io::render_svg(source, target, {{&full, dotted, sf.mode}}));
        }
        std::cout << "objective " << imd::format_number(plan["objective"].get<double>()) << "\n";
        return run.finish(true);
    } catch (const std::exception& e) {
        return run.finish(false, e.what());
    }
}

struct SweepFlags {
    std::size_t draws = 50;
    std::string beta_grid, eta_grid, mode = "both";
};

int cmd_sweep(const Common& common, const ConfigFlags& flags, const SweepFlags& sw) {
    Run run(common, "sweep");
    try {
        const auto cfg = load_config(common, flags);
        const auto betas = sw.beta_grid.empty() ? imd::default_beta_grid(cfg.theta_deg) : parse_list(sw.beta_grid);
        const auto mode = imd::sweep_mode_from_string(sw.mode);
        run.manifest()["config"] = imd::io::config_to_json(cfg);
        run.manifest()["seed"] = cfg.seed;
        run.manifest()["draws"] = sw.draws;
        run.manifest()["beta_grid"] = betas;

        std::vector<std::pair<std::string, imd::ToyConfig>> runs;
        if (sw.eta_grid.empty()) {
            runs.emplace_back("", cfg);
        } else {
            for (double eta : parse_list(sw.eta_grid)) {
                auto c = cfg;
                c.eta = eta;
                runs.emplace_back("eta_" + imd::format_number(eta) + "/", c);
            }
            run.manifest()["eta_grid"] = parse_list(sw.eta_grid);
        }

        std::size_t failures = 0;
        json diagnostics = json::array();
        for (const auto& [prefix, c] : runs) {
            const auto res = imd::run_sweep(c, betas, sw.draws, mode, common.jobs);
            std::ostringstream rec, sum;
            imd::write_records_csv(rec, res, common.timings);
            run.write(prefix + "sweep_records.csv", rec.str());
            if (mode == imd::SweepMode::both) {
                imd::write_summary_csv(sum, res);
                run.write(prefix + "sweep_summary.csv", sum.str());
            }
            run.write_json(prefix + "config.json", config_sidecar(c));
            failures += res.failures();
            for (const auto& r : res.records)
                if (!r.accuracy)
                    diagnostics.push_back({{"eta", c.eta}, {"draw", r.draw + 1}, {"beta", r.beta}, {"mode", r.mode},
                                           {"diagnostic", r.diagnostic}});
        }
        run.manifest()["failed_cells"] = failures;
        run.manifest()["failures"] = diagnostics;
        return run.finish(failures == 0, failures ? std::to_string(failures) + " sweep cells failed" : "");
    } catch (const std::exception& e) {
        return run.finish(false, e.what());
    }
}

int cmd_check(const Common& common, const std::string& suite, std::uint64_t seed) {
    Run run(common, "check");
    try {
        run.manifest()["config"] = {{"suite", suite}, {"seed", seed}};
        run.manifest()["seed"] = seed;
        const auto entries = imd::run_check_suite(suite, seed);
        json report = json::array();
        bool ok = true;
        for (const auto& e : entries) {
            report.push_back({{"suite", e.suite},
                              {"name", e.name},
                              {"passed", e.passed},
                              {"instances", e.instances},
                              {"worst", e.worst},
                              {"detail", e.detail}});
            ok = ok && e.passed;
        }
        const json doc = {{"suite", suite}, {"passed", ok}, {"entries", report}};
        run.write_json("check_report.json", doc);
        std::cout << doc.dump(2) << "\n";
        return run.finish(ok, ok ? "" : "check suite reported failures");
    } catch (const std::exception& e) {
        return run.finish(false, e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrepancy, partial transport and label-shift experiments"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Common common;
    app.add_option("--out", common.out, "Output directory")->capture_default_str();
    app.add_option("--jobs", common.jobs, "Worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--config", common.config_file, "Config file (key=value or JSON)");
    app.add_flag("--timings", common.timings, "Record wall-clock timings (outputs stop being reproducible)");
    app.fallthrough();

    ConfigFlags flags;
    auto* gen = app.add_subcommand("gen", "Generate a source/target pair");
    flags.attach(gen);

    SolveFlags sf;
    auto* solve = app.add_subcommand("solve", "Solve one relaxed transport problem");
    flags.attach(solve);
    solve->add_option("--source", sf.source, "Source dataset CSV");
    solve->add_option("--target", sf.target, "Target dataset CSV");
    solve->add_option("--mode", sf.mode, "global, perclass or split")->capture_default_str();
    solve->add_option("--beta", sf.beta, "Relaxation (global) or total budget (split)")->capture_default_str();
    solve->add_option("--beta-vec", sf.beta_vec, "Comma-separated per-class relaxation (perclass)");
    solve->add_flag("--svg", sf.svg, "Also write plan.svg");

    SweepFlags sw;
    auto* sweep = app.add_subcommand("sweep", "Per-class versus global accuracy sweep");
    flags.attach(sweep);
    sweep->add_option("--draws", sw.draws, "Repetitions")->capture_default_str();
    sweep->add_option("--beta-grid", sw.beta_grid, "Comma-separated beta values");
    sweep->add_option("--eta-grid", sw.eta_grid, "Comma-separated imbalance values, one sweep each");
    sweep->add_option("--mode", sw.mode, "global, split or both")->capture_default_str();

    std::string suite = "all";
    std::uint64_t check_seed = 1;
    auto* check = app.add_subcommand("check", "Run property suites");
    check->add_option("--suite", suite, "imd, ot, uncertainty or all")
        ->check(CLI::IsMember({"imd", "ot", "uncertainty", "all"}))
        ->capture_default_str();
    check->add_option("--seed", check_seed, "Seed for the random instances")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) return cmd_gen(common, flags);
        if (solve->parsed()) return cmd_solve(common, flags, sf);
        if (sweep->parsed()) return cmd_sweep(common, flags, sw);
        if (check->parsed()) return cmd_check(common, suite, check_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
