#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "p2plb/application.hpp"
#include "p2plb/balancing.hpp"
#include "p2plb/churn.hpp"
#include "p2plb/guest_graph.hpp"
#include "p2plb/host_graph.hpp"
#include "p2plb/metrics.hpp"

namespace p2plb {

enum class InitialPlacement { SingleHost, UniformRandom };

struct SimConfig {
    int n_hosts = 31;
    int n_jobs = 31;
    GuestTopology guest = GuestTopology::Grid2d;
    int regular_degree = 4;
    Strategy strategy{Strategy::Kind::PM, 1, 0.35};
    Selection selection = Selection::None;
    double work_per_iteration = 10.0; // R
    double gamma = 0.0;
    long migration_cost = 0;
    std::optional<long> half_life; // tau; nullopt = static
    std::vector<ScriptedEvent> events;
    long steps = 500; // T
    int n_trials = 50;
    std::uint64_t master_seed = 42;
    InitialPlacement placement = InitialPlacement::SingleHost;
    ProgressNorm progress_norm = ProgressNorm::Verbatim;
    long balance_every = 1; // 0 disables balancing entirely

    void validate() const {
        if (n_hosts < 2) throw InvalidConfiguration("hosts must be >= 2");
        if (n_jobs < 1) throw InvalidConfiguration("jobs must be >= 1");
        if (work_per_iteration <= 0) throw InvalidConfiguration("iter-work must be > 0");
        if (gamma < 0) throw InvalidConfiguration("gamma must be >= 0");
        if (migration_cost < 0) throw InvalidConfiguration("migration-cost must be >= 0");
        if (half_life && *half_life < 1) throw InvalidConfiguration("tau must be >= 1 or inf");
        if (steps < 0) throw InvalidConfiguration("steps must be >= 0");
        if (n_trials < 1) throw InvalidConfiguration("trials must be >= 1");
        if (balance_every < 0) throw InvalidConfiguration("balance-every must be >= 0");
        if (strategy.kind == Strategy::Kind::EN && strategy.radius < 1)
            throw InvalidConfiguration("en radius must be >= 1");
        if (strategy.kind == Strategy::Kind::PM &&
            (strategy.prob < 0.0 || strategy.prob > 1.0))
            throw InvalidConfiguration("pm probability must be in [0, 1]");
        for (const ScriptedEvent& ev : events)
            if (ev.t < 0) throw InvalidConfiguration("event times must be >= 0");
    }
};

struct TrialResult {
    std::uint64_t seed = 0;
    std::vector<MetricsSample> series;
    std::vector<MigrationOrder> orders;   // balancer-issued only
    std::vector<HostId> final_placement;  // job -> host (in-flight: destination)
    std::vector<long> final_iterations;   // job -> sync points reached
    std::size_t final_hosts = 0;
    std::size_t final_edges = 0;
};

namespace detail {

// After a membership phase, re-derive every job's host from the resident
// lists (hand-off chains within one tick make incremental patching
// error-prone), then fix up in-flight jobs: one headed for an exited host is
// re-routed round-robin across that host's last neighbor set, continuing the
// rotation the resident hand-offs started; if even those are gone, any
// surviving host takes it.
inline void sync_placements(HostGraph& g, std::vector<JobState>& jobs,
                            const std::vector<NetworkEvent>& events, Rng& rng) {
    if (events.empty()) return;
    for (HostId h : g.host_ids())
        for (JobId j : g.jobs_on(h)) jobs[j.v].host = h;
    std::vector<char> rerouted(jobs.size(), 0);
    for (const NetworkEvent& ev : events) {
        if (ev.kind != NetworkEvent::Kind::Exited) continue;
        std::size_t rr = ev.exit.handoffs.size();
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            JobState& js = jobs[i];
            if (js.phase != JobPhase::Migrating || js.host != ev.host) continue;
            if (!ev.exit.recipients.empty())
                js.host = ev.exit.recipients[rr++ % ev.exit.recipients.size()];
            rerouted[i] = 1;
        }
    }
    // catch re-routes whose target exited later in the same tick
    for (JobState& js : jobs) {
        if (js.phase != JobPhase::Migrating || g.contains(js.host)) continue;
        js.host = rng.pick(g.host_ids());
    }
    // an exited destination took its inbound credit with it; the re-routed
    // target carries it from here on
    for (std::size_t i = 0; i < jobs.size(); ++i)
        if (rerouted[i]) g.note_inbound(jobs[i].host);
}

// Every job lives in exactly one resident list, or is in flight -- always.
// In-flight jobs and inbound credits must also match one-for-one.
inline void check_conservation(const HostGraph& g, const std::vector<JobState>& jobs,
                               std::vector<std::uint8_t>& scratch) {
    scratch.assign(jobs.size(), 0);
    for (HostId h : g.host_ids())
        for (JobId j : g.jobs_on(h)) ++scratch[j.v];
    std::size_t flying = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i)
        if (jobs[i].phase == JobPhase::Migrating) {
            ++scratch[i];
            ++flying;
        }
    for (std::size_t i = 0; i < jobs.size(); ++i)
        if (scratch[i] != 1)
            throw SimError("job conservation violated for job " + std::to_string(i));
    if (g.total_inbound() != flying)
        throw SimError("inbound credits (" + std::to_string(g.total_inbound()) +
                       ") != jobs in flight (" + std::to_string(flying) + ")");
}

} // namespace detail

// One seeded trial: per step, membership churn, then (by cadence) one
// balancing sweep, then one application time step, then a metrics sample.
// A single RNG drives everything, so a (config, seed) pair fixes the whole
// trajectory.
inline TrialResult run_trial(const SimConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);

    HostGraph g = build_host_network(cfg.n_hosts, rng);
    GuestGraph guest = build_guest_graph(cfg.n_jobs, cfg.guest, cfg.regular_degree, rng);
    std::vector<JobState> jobs(cfg.n_jobs);

    {
        std::vector<HostId> ids = g.host_ids();
        if (cfg.placement == InitialPlacement::SingleHost) {
            HostId h = rng.pick(ids);
            for (std::uint32_t j = 0; j < jobs.size(); ++j) {
                g.place_job(h, JobId{j});
                jobs[j].host = h;
            }
        } else {
            for (std::uint32_t j = 0; j < jobs.size(); ++j) {
                HostId h = rng.pick(ids);
                g.place_job(h, JobId{j});
                jobs[j].host = h;
            }
        }
    }

    ChurnModel churn{cfg.half_life, cfg.events};
    AppParams params{cfg.work_per_iteration, cfg.gamma, cfg.migration_cost, cfg.steps};

    TrialResult res;
    res.seed = seed;
    res.series.reserve(cfg.steps);
    std::map<HostId, long> migrations_by_host;
    long total_migrations = 0;
    std::vector<std::uint8_t> scratch;
    std::vector<long> iterations(jobs.size());

    for (long t = 0; t < cfg.steps; ++t) {
        auto events = churn_tick(g, churn, t, rng);
        detail::sync_placements(g, jobs, events, rng);

        if (cfg.balance_every > 0 && t % cfg.balance_every == 0) {
            auto issued = balancing_round(g, guest, jobs, cfg.strategy, cfg.selection,
                                          cfg.migration_cost, t, rng, migrations_by_host);
            total_migrations += static_cast<long>(issued.size());
            res.orders.insert(res.orders.end(), issued.begin(), issued.end());
        }

        advance_time_step(g, guest, jobs, params, t);

        std::vector<int> loads;
        loads.reserve(g.size());
        for (HostId h : g.host_ids()) loads.push_back(g.load(h));
        for (std::size_t i = 0; i < jobs.size(); ++i) iterations[i] = jobs[i].iterations;
        res.series.push_back({t, load_sigma(loads),
                              average_progress(iterations, cfg.progress_norm),
                              total_migrations});

        detail::check_conservation(g, jobs, scratch);
    }

    res.final_placement.reserve(jobs.size());
    res.final_iterations.reserve(jobs.size());
    for (const JobState& js : jobs) {
        res.final_placement.push_back(js.host);
        res.final_iterations.push_back(js.iterations);
    }
    res.final_hosts = g.size();
    res.final_edges = g.edge_count();
    return res;
}

struct ExperimentResult {
    TrialAggregate aggregate;
    std::vector<std::uint64_t> seeds;
};

// Runs cfg.n_trials independent trials (trial i seeded by
// derive_trial_seed(master_seed, i)) and aggregates them in index order.
// `per_trial`, when given, sees each TrialResult as it completes.
inline ExperimentResult
run_experiment(const SimConfig& cfg,
               const std::function<void(int, const TrialResult&)>& per_trial = {}) {
    cfg.validate();
    ExperimentResult out;
    AggregateBuilder builder;
    for (int i = 0; i < cfg.n_trials; ++i) {
        std::uint64_t seed = derive_trial_seed(cfg.master_seed, i);
        out.seeds.push_back(seed);
        TrialResult r = run_trial(cfg, seed);
        builder.add_trial(r.series);
        if (per_trial) per_trial(i, r);
    }
    out.aggregate = builder.finish();
    return out;
}

} // namespace p2plb
