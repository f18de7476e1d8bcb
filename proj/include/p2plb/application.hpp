#pragma once

#include <cmath>
#include <vector>

#include "p2plb/guest_graph.hpp"
#include "p2plb/host_graph.hpp"

namespace p2plb {

enum class JobPhase { Running, Synchronizing, Blocked, Migrating, Ended };

struct AppParams {
    double work_per_iteration = 10.0; // R
    double gamma = 0.0;               // latency cost per hop at a sync point
    long migration_cost = 0;          // steps a migrating job is off the CPU
    long end_time = 500;              // all jobs end simultaneously at t >= end_time
};

struct JobState {
    JobPhase phase = JobPhase::Running;
    double work_done = 0.0; // in [0, R); resets when an iteration completes
    long iterations = 0;    // sync points reached so far (I_j)
    long sync_timer = 0;    // latency left before this sync can complete
    HostId host{};          // current host; for a migrating job, its destination
    long migrate_timer = 0;
    JobPhase resume_phase = JobPhase::Running; // phase to restore on arrival
};

// Floating-point slack when testing work_done against R (1/k shares don't sum
// exactly).
inline constexpr double kWorkEps = 1e-9;

namespace detail {

// Neighbor n satisfies j's barrier for iteration k once n has reached sync
// point k (or beyond) and is not in flight: migrating jobs can't take part in
// synchronization.
inline bool neighbors_ready(const GuestGraph& guest, const std::vector<JobState>& jobs,
                            JobId j) {
    long k = jobs[j.v].iterations;
    for (JobId n : guest.neighbors(j)) {
        const JobState& ns = jobs[n.v];
        if (ns.phase == JobPhase::Migrating) return false;
        if (ns.iterations < k) return false;
    }
    return true;
}

} // namespace detail

// Advance the application by one time unit.
//
//   A. in-flight jobs land once their timer has run out (before the work
//      phase, so a cost-c migration costs exactly c work steps);
//   B. each host's processor is shared equally by its Running residents;
//   C. a job reaching R enters its next sync point: iteration count up, work
//      reset, latency = ceil(gamma * max hop distance to its guest
//      neighbors' hosts) using placements as of now;
//   D. a sync completes when its latency has elapsed and every guest
//      neighbor has reached the same sync point -- with zero latency and
//      ready neighbors that is the same step it was entered, so an
//      unsynchronized job iterates exactly every R steps.
inline void advance_time_step(HostGraph& g, const GuestGraph& guest,
                              std::vector<JobState>& jobs, const AppParams& p, long t) {
    if (t >= p.end_time) {
        for (JobState& js : jobs) js.phase = JobPhase::Ended;
        return;
    }

    // A: arrivals first, then tick the rest
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        JobState& js = jobs[i];
        if (js.phase != JobPhase::Migrating) continue;
        if (js.migrate_timer == 0) {
            g.place_job(js.host, JobId{static_cast<std::uint32_t>(i)});
            g.drop_inbound(js.host);
            js.phase = js.resume_phase;
        } else {
            --js.migrate_timer;
        }
    }

    // B: processor sharing
    for (HostId h : g.host_ids()) {
        const auto& resident = g.jobs_on(h);
        int running = 0;
        for (JobId j : resident)
            if (jobs[j.v].phase == JobPhase::Running) ++running;
        if (running == 0) continue;
        double share = 1.0 / running;
        for (JobId j : resident)
            if (jobs[j.v].phase == JobPhase::Running) jobs[j.v].work_done += share;
    }

    // C: sync-point entry
    std::vector<char> entered(jobs.size(), 0);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        JobState& js = jobs[i];
        if (js.phase != JobPhase::Running) continue;
        if (js.work_done + kWorkEps < p.work_per_iteration) continue;
        js.work_done = 0.0;
        ++js.iterations;
        long latency = 0;
        if (p.gamma > 0.0) {
            int far = 0;
            for (JobId n : guest.neighbors(JobId{static_cast<std::uint32_t>(i)}))
                far = std::max(far, g.hop_distance(js.host, jobs[n.v].host));
            latency = static_cast<long>(std::ceil(p.gamma * far - 1e-9));
            if (latency < 0) latency = 0;
        }
        js.sync_timer = latency;
        js.phase = JobPhase::Synchronizing;
        entered[i] = 1;
    }

    // D: latency then barrier.  Readiness depends only on iteration counters
    // and Migrating flags, neither of which changes here, so the scan order
    // is immaterial.
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        JobState& js = jobs[i];
        if (js.phase != JobPhase::Synchronizing && js.phase != JobPhase::Blocked) continue;
        if (js.sync_timer > 0 && !entered[i]) --js.sync_timer;
        if (js.sync_timer > 0) continue;
        if (detail::neighbors_ready(guest, jobs, JobId{static_cast<std::uint32_t>(i)}))
            js.phase = JobPhase::Running;
        else
            js.phase = JobPhase::Blocked;
    }
}

} // namespace p2plb
