#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "p2plb/config.hpp"
#include "p2plb/engine.hpp"

namespace p2plb {

struct PresetOptions {
    std::string out_dir = "out";
    std::optional<int> trials;
    std::optional<long> steps;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> grid; // overrides the preset's swept values
};

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {
        "pm-sweep",     "migration-count", "cost-vs-p", "coverage",
        "scheduled-events", "dynamicity-sweep", "selection",
    };
    return names;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimError("cannot write " + path.string());
    out << content;
}

inline std::string dir_name(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c == ':') c = '-';
    return out;
}

inline SimConfig preset_base(const PresetOptions& opt) {
    SimConfig cfg; // stock defaults
    if (opt.trials) cfg.n_trials = *opt.trials;
    if (opt.steps) cfg.steps = *opt.steps;
    if (opt.seed) cfg.master_seed = *opt.seed;
    return cfg;
}

inline void run_and_write_aggregate(const SimConfig& cfg, const std::filesystem::path& dir) {
    ExperimentResult res = run_experiment(cfg);
    std::ostringstream os;
    write_aggregate_csv(os, res.aggregate);
    write_file(dir / "aggregate.csv", os.str());
}

inline std::string preset_manifest(const SimConfig& base, const std::string& preset,
                                   const std::string& swept) {
    std::string m = "preset=" + preset + "\n";
    if (!swept.empty()) m += "sweep=" + swept + "\n";
    return m + manifest_text(base);
}

inline std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += v[i];
    }
    return out;
}

// Final-step progress of an experiment plus its standard error.
struct FinalProgress {
    double mean = 0, se = 0, sigma_mean = 0, sigma_se = 0;
};
inline FinalProgress final_progress(const SimConfig& cfg) {
    ExperimentResult res = run_experiment(cfg);
    const AggregateRow& last = res.aggregate.rows.back();
    return {last.progress_mean, last.progress_se, last.sigma_mean, last.sigma_se};
}

} // namespace detail

// Named experiment bundles reproducing the standard result set.  Each writes
// CSVs plus a manifest under <out>/<preset>/.  Swept values can be replaced
// via PresetOptions::grid.
inline void run_preset(const std::string& name, const PresetOptions& opt) {
    namespace fs = std::filesystem;
    using detail::dir_name;
    const fs::path root = fs::path(opt.out_dir) / name;

    auto grid_or = [&](std::vector<std::string> def) {
        return opt.grid.empty() ? def : opt.grid;
    };

    if (name == "pm-sweep") {
        // sigma(t) and progress(t) for PM at p in {0, 0.5, 1}, static network
        std::vector<std::string> ps = grid_or({"0", "0.5", "1"});
        SimConfig base = detail::preset_base(opt);
        detail::write_file(root / "manifest.txt",
                           detail::preset_manifest(base, name, "p=" + detail::join(ps)));
        for (const std::string& p : ps) {
            SimConfig cfg = base;
            cfg.strategy = parse_strategy("pm:" + p);
            std::cerr << "[pm-sweep] p=" << p << "\n";
            detail::run_and_write_aggregate(cfg, root / ("p=" + p));
        }
    } else if (name == "migration-count") {
        // cumulative M(t) per strategy; |G| = |H|+3 so unstable strategies
        // keep migrating
        std::vector<std::string> strats = grid_or({"dasud", "pm:1", "pm:0.5", "en:1"});
        SimConfig base = detail::preset_base(opt);
        base.n_jobs = base.n_hosts + 3;
        detail::write_file(root / "manifest.txt",
                           detail::preset_manifest(base, name, detail::join(strats)));
        for (const std::string& s : strats) {
            SimConfig cfg = base;
            cfg.strategy = parse_strategy(s);
            std::cerr << "[migration-count] " << s << "\n";
            detail::run_and_write_aggregate(cfg, root / dir_name(s));
        }
    } else if (name == "cost-vs-p") {
        // final progress across the (p, migration cost) plane; balancing every
        // 5 steps, not every step -- at cadence 1 even tiny p repairs holes
        // immediately and the curve flattens, hiding the robust-p peak
        std::vector<std::string> ps = grid_or({"0",   "0.05", "0.1", "0.15", "0.2",  "0.25",
                                               "0.3", "0.35", "0.4", "0.45", "0.5",  "0.55",
                                               "0.6", "0.65", "0.7", "0.75", "0.8",  "0.85",
                                               "0.9", "0.95", "1"});
        const std::vector<long> costs = {0, 5, 10};
        SimConfig base = detail::preset_base(opt);
        base.balance_every = 5;
        detail::write_file(root / "manifest.txt",
                           detail::preset_manifest(base, name, "p=" + detail::join(ps)));
        for (long c : costs) {
            std::ostringstream csv;
            csv << "p,progress_mean,progress_se\n";
            for (const std::string& p : ps) {
                SimConfig cfg = base;
                cfg.strategy = parse_strategy("pm:" + p);
                cfg.migration_cost = c;
                std::cerr << "[cost-vs-p] cost=" << c << " p=" << p << "\n";
                auto fp = detail::final_progress(cfg);
                csv << p << ',' << format_fixed(fp.mean) << ',' << format_fixed(fp.se) << '\n';
            }
            detail::write_file(root / ("cost=" + std::to_string(c)) / "sweep.csv", csv.str());
        }
    } else if (name == "coverage") {
        // final progress vs number of jobs, against the ideal-balance line
        SimConfig base = detail::preset_base(opt);
        base.migration_cost = 5;
        std::vector<std::string> sizes = grid_or({});
        if (sizes.empty())
            for (int gset = 1; gset <= 4 * base.n_hosts; ++gset)
                sizes.push_back(std::to_string(gset));
        detail::write_file(root / "manifest.txt",
                           detail::preset_manifest(base, name, "jobs=1.." +
                                                   std::to_string(4 * base.n_hosts)));
        for (const std::string& strat : {std::string("dasud"), std::string("pm:0.35")}) {
            std::ostringstream csv;
            csv << "jobs,progress_mean,progress_se,progress_per_job,theoretical_optimal\n";
            for (const std::string& gs : sizes) {
                SimConfig cfg = base;
                cfg.strategy = parse_strategy(strat);
                cfg.n_jobs = static_cast<int>(detail::parse_long(gs, "jobs"));
                std::cerr << "[coverage] " << strat << " jobs=" << gs << "\n";
                auto fp = detail::final_progress(cfg);
                // undo the 1/(|G|-1) normalization to get per-job progress
                double per_job = cfg.n_jobs == 1
                                     ? fp.mean
                                     : fp.mean * (cfg.n_jobs - 1) / cfg.n_jobs;
                double ideal = theoretical_optimal_progress(
                    static_cast<double>(cfg.steps), cfg.n_jobs, cfg.n_hosts,
                    cfg.work_per_iteration);
                csv << gs << ',' << format_fixed(fp.mean) << ',' << format_fixed(fp.se)
                    << ',' << format_fixed(per_job) << ',' << format_fixed(ideal) << '\n';
            }
            detail::write_file(root / dir_name(strat) / "summary.csv", csv.str());
        }
    } else if (name == "scheduled-events") {
        // one host leaves at t=200, one joins at t=300
        std::vector<std::string> strats = grid_or({"en:5", "dasud", "pm:0.35"});
        SimConfig base = detail::preset_base(opt);
        base.events = {parse_event("exit@200"), parse_event("enter@300")};
        detail::write_file(root / "manifest.txt",
                           detail::preset_manifest(base, name, detail::join(strats)));
        for (const std::string& s : strats) {
            SimConfig cfg = base;
            cfg.strategy = parse_strategy(s);
            std::cerr << "[scheduled-events] " << s << "\n";
            detail::run_and_write_aggregate(cfg, root / dir_name(s));
        }
    } else if (name == "dynamicity-sweep") {
        // half-life sweep; per-tau series plus a final-progress summary.
        // |G| = |H|+3 keeps a load remainder in play and cost 5 makes the
        // re-balancing churn triggers genuinely expensive, so the sweep shows
        // the rise-then-collapse of progress as tau shrinks
        std::vector<std::string> taus =
            grid_or({"5", "10", "20", "50", "100", "200", "500", "1000", "inf"});
        SimConfig base = detail::preset_base(opt);
        base.n_jobs = base.n_hosts + 3;
        base.migration_cost = 5;
        detail::write_file(root / "manifest.txt",
                           detail::preset_manifest(base, name, "tau=" + detail::join(taus)));
        for (const std::string& strat : {std::string("dasud"), std::string("pm:0.35")}) {
            std::ostringstream csv;
            csv << "tau,progress_mean,progress_se,sigma_mean,sigma_se\n";
            for (const std::string& ts : taus) {
                SimConfig cfg = base;
                cfg.strategy = parse_strategy(strat);
                cfg.half_life = parse_tau(ts);
                std::cerr << "[dynamicity-sweep] " << strat << " tau=" << ts << "\n";
                ExperimentResult res = run_experiment(cfg);
                const AggregateRow& last = res.aggregate.rows.back();
                std::ostringstream os;
                write_aggregate_csv(os, res.aggregate);
                detail::write_file(root / dir_name(strat) / ("tau=" + ts) / "aggregate.csv",
                                   os.str());
                csv << ts << ',' << format_fixed(last.progress_mean) << ','
                    << format_fixed(last.progress_se) << ',' << format_fixed(last.sigma_mean)
                    << ',' << format_fixed(last.sigma_se) << '\n';
            }
            detail::write_file(root / dir_name(strat) / "summary.csv", csv.str());
        }
    } else if (name == "selection") {
        // job-selection policies under sync latency.  Two jobs per host: with
        // |G| <= |H| the balanced state leaves one job per source, so every
        // policy picks the same lone candidate and the comparison is void
        std::vector<std::string> sels = grid_or({"none", "edgecut", "mindist"});
        SimConfig base = detail::preset_base(opt);
        base.n_jobs = 2 * base.n_hosts;
        base.gamma = 3.0;
        detail::write_file(root / "manifest.txt",
                           detail::preset_manifest(base, name, detail::join(sels)));
        for (const std::string& s : sels) {
            SimConfig cfg = base;
            cfg.selection = parse_selection(s);
            std::cerr << "[selection] " << s << "\n";
            detail::run_and_write_aggregate(cfg, root / s);
        }
    } else {
        std::string msg = "unknown preset '" + name + "'; available:";
        for (const std::string& p : preset_names()) msg += " " + p;
        throw InvalidConfiguration(msg);
    }
}

} // namespace p2plb
