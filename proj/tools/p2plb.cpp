// Command-line front end: `run` executes one experiment, `run-preset` one of
// the named experiment bundles.  Exit codes: 0 ok, 1 model violation during
// simulation, 2 usage/configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "p2plb/config.hpp"
#include "p2plb/engine.hpp"
#include "p2plb/presets.hpp"

namespace fs = std::filesystem;

namespace {

struct RunArgs {
    std::string config_file;
    std::string out_dir = "out/run";
    std::string dump_topology;
    std::vector<std::string> events;
    // raw flag values; applied over the config file so CLI wins
    std::map<std::string, std::string> kv;
};

void add_kv_option(CLI::App* sub, RunArgs& args, const std::string& flag,
                   const std::string& key, const std::string& desc) {
    sub->add_option_function<std::string>(
           flag, [&args, key](const std::string& v) { args.kv[key] = v; }, desc);
}

void write_text(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw p2plb::SimError("cannot write " + path.string());
    out << content;
}

int cmd_run(const RunArgs& args) {
    p2plb::SimConfig cfg;
    if (!args.config_file.empty()) p2plb::load_config_file(args.config_file, cfg);
    // fixed application order keeps precedence reproducible
    static const char* order[] = {"hosts",   "jobs",           "guest",   "strategy",
                                  "select",  "iter-work",      "gamma",   "migration-cost",
                                  "tau",     "steps",          "trials",  "seed",
                                  "progress-norm", "placement", "balance-every"};
    for (const char* key : order)
        if (auto it = args.kv.find(key); it != args.kv.end())
            p2plb::apply_config_kv(cfg, key, it->second);
    if (!args.events.empty()) {
        cfg.events.clear(); // CLI events replace any from the config file
        for (const std::string& ev : args.events)
            cfg.events.push_back(p2plb::parse_event(ev));
    }
    cfg.validate();

    std::ostringstream trials_csv;
    p2plb::write_trial_csv_header(trials_csv);
    p2plb::ExperimentResult res = p2plb::run_experiment(
        cfg, [&trials_csv](int i, const p2plb::TrialResult& r) {
            p2plb::write_trial_csv_rows(trials_csv, i, r.series);
        });

    const fs::path out = args.out_dir;
    write_text(out / "trials.csv", trials_csv.str());
    std::ostringstream agg;
    p2plb::write_aggregate_csv(agg, res.aggregate);
    write_text(out / "aggregate.csv", agg.str());
    write_text(out / "manifest.txt", p2plb::manifest_text(cfg));

    if (!args.dump_topology.empty()) {
        // initial host network of trial 0 (what a static run balances over)
        p2plb::Rng rng(p2plb::derive_trial_seed(cfg.master_seed, 0));
        p2plb::HostGraph g = p2plb::build_host_network(cfg.n_hosts, rng);
        std::ostringstream os;
        g.dump_edges(os);
        write_text(args.dump_topology, os.str());
    }

    if (!res.aggregate.rows.empty()) {
        const p2plb::AggregateRow& last = res.aggregate.rows.back();
        std::cout << "final t=" << last.t << " sigma=" << p2plb::format_fixed(last.sigma_mean)
                  << " progress=" << p2plb::format_fixed(last.progress_mean)
                  << " migrations=" << p2plb::format_fixed(last.migrations_mean) << "\n";
    }
    std::cout << "wrote " << (out / "aggregate.csv").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"p2plb: simulator for diffusive load balancing of loosely-synchronous "
                 "applications on dynamic peer-to-peer host networks"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Run one experiment; writes trials.csv, "
                                              "aggregate.csv and manifest.txt");
    run->add_option("--config", run_args.config_file,
                    "key=value config file ('#' comments); flags given here override it");
    add_kv_option(run, run_args, "--hosts", "hosts", "number of hosts (default 31)");
    add_kv_option(run, run_args, "--jobs", "jobs", "number of jobs (default 31)");
    add_kv_option(run, run_args, "--guest", "guest",
                  "guest graph: ring | grid | regular:<d> (default grid)");
    add_kv_option(run, run_args, "--strategy", "strategy",
                  "balancing strategy: en:<x> | dasud | pm:<p> (default pm:0.35)");
    add_kv_option(run, run_args, "--select", "select",
                  "job selection: none | edgecut | mindist (default none)");
    add_kv_option(run, run_args, "--iter-work", "iter-work",
                  "work units per iteration R (default 10)");
    add_kv_option(run, run_args, "--gamma", "gamma",
                  "sync latency cost per hop (default 0)");
    add_kv_option(run, run_args, "--migration-cost", "migration-cost",
                  "steps a migrating job is in flight (default 0)");
    add_kv_option(run, run_args, "--tau", "tau",
                  "host half-life in steps, or inf (default inf)");
    run->add_option("--event", run_args.events,
                    "scripted membership event exit@<t> | enter@<t> (repeatable)");
    add_kv_option(run, run_args, "--steps", "steps", "time steps per trial T (default 500)");
    add_kv_option(run, run_args, "--trials", "trials", "trials per experiment (default 50)");
    add_kv_option(run, run_args, "--seed", "seed", "master seed (default 42)");
    add_kv_option(run, run_args, "--progress-norm", "progress-norm",
                  "progress denominator: verbatim (|G|-1) | mean (default verbatim)");
    add_kv_option(run, run_args, "--placement", "placement",
                  "initial placement: single | uniform (default single)");
    add_kv_option(run, run_args, "--balance-every", "balance-every",
                  "balancing cadence in steps, 0 disables (default 1)");
    run->add_option("--out", run_args.out_dir, "output directory (default out/run)");
    run->add_option("--dump-topology", run_args.dump_topology,
                    "also write trial 0's initial host network as an edge list");

    std::string preset_name;
    p2plb::PresetOptions popt;
    std::string grid_csv;
    int popt_trials = 0;
    long popt_steps = 0;
    std::uint64_t popt_seed = 0;
    CLI::App* preset = app.add_subcommand("run-preset", "Run a named experiment preset");
    std::string preset_help = "one of:";
    for (const std::string& n : p2plb::preset_names()) preset_help += " " + n;
    preset->add_option("name", preset_name, preset_help)->required();
    preset->add_option("--out", popt.out_dir, "output root (default out)");
    CLI::Option* o_trials = preset->add_option("--trials", popt_trials, "override trials per experiment");
    CLI::Option* o_steps = preset->add_option("--steps", popt_steps, "override steps per trial");
    CLI::Option* o_seed = preset->add_option("--seed", popt_seed, "override master seed");
    preset->add_option("--grid", grid_csv, "comma-separated sweep values replacing the default grid");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const p2plb::InvalidConfiguration& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (preset->parsed()) {
            if (*o_trials) popt.trials = popt_trials;
            if (*o_steps) popt.steps = popt_steps;
            if (*o_seed) popt.seed = popt_seed;
            if (!grid_csv.empty()) {
                std::stringstream ss(grid_csv);
                std::string item;
                while (std::getline(ss, item, ',')) popt.grid.push_back(item);
            }
            p2plb::run_preset(preset_name, popt);
            return 0;
        }
    } catch (const p2plb::InvalidConfiguration& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const p2plb::SimError& e) {
        std::cerr << "model violation: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
