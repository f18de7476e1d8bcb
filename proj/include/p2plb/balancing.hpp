#pragma once

#include <map>
#include <optional>
#include <vector>

#include "p2plb/application.hpp"
#include "p2plb/guest_graph.hpp"
#include "p2plb/host_graph.hpp"

namespace p2plb {

struct Strategy {
    enum class Kind { EN, DASUD, PM };
    Kind kind = Kind::PM;
    int radius = 1;    // EN: domain radius x
    double prob = 0.0; // PM: over-migration probability p
};

enum class Selection { None, MinEdgeCut, MinTotalDistance };

struct MigrationOrder {
    JobId job;
    HostId source;
    HostId dest;
    long issued_at = 0;
};

// One strategy decision: move `count` jobs source -> dest.  Jobs are chosen
// one at a time by the selection policy when the transfer is executed.
struct TransferDecision {
    HostId source;
    HostId dest;
    int count = 0;
};

namespace detail {

// Least-loaded candidate; a tie consumes exactly one draw, a unique minimum
// consumes none.  Deterministic given loads + stream.
inline HostId pick_least_loaded(const HostGraph& g, const std::vector<HostId>& cands,
                                Rng& rng) {
    int best = g.visible_load(cands.front());
    std::vector<HostId> ties{cands.front()};
    for (std::size_t i = 1; i < cands.size(); ++i) {
        int w = g.visible_load(cands[i]);
        if (w < best) {
            best = w;
            ties.assign(1, cands[i]);
        } else if (w == best) {
            ties.push_back(cands[i]);
        }
    }
    return ties.size() == 1 ? ties[0] : rng.pick(ties);
}

inline HostId pick_most_loaded(const HostGraph& g, const std::vector<HostId>& cands,
                               Rng& rng) {
    int best = g.visible_load(cands.front());
    std::vector<HostId> ties{cands.front()};
    for (std::size_t i = 1; i < cands.size(); ++i) {
        int w = g.visible_load(cands[i]);
        if (w > best) {
            best = w;
            ties.assign(1, cands[i]);
        } else if (w == best) {
            ties.push_back(cands[i]);
        }
    }
    return ties.size() == 1 ? ties[0] : rng.pick(ties);
}

} // namespace detail

// Exchange-with-neighborhood, domain radius x.  The center pushes half its
// surplus to the domain's least-loaded host; if the center itself is (tied-)
// least loaded it instead pulls half the gap from the domain's most-loaded
// host.
inline std::optional<TransferDecision> en_decide(const HostGraph& g, HostId center,
                                                 int radius, Rng& rng) {
    std::vector<HostId> dom = g.domain(center, radius);
    if (dom.size() <= 1) return std::nullopt;
    HostId j = detail::pick_least_loaded(g, dom, rng);
    const int li = g.visible_load(center);
    const int lj = g.visible_load(j);
    if (j != center && li - lj >= 2) return TransferDecision{center, j, (li - lj) / 2};
    if (li == lj) { // center is least loaded (possibly tied)
        HostId k = detail::pick_most_loaded(g, dom, rng);
        const int lk = g.visible_load(k);
        if (lk - li >= 2) return TransferDecision{k, center, (lk - li) / 2};
    }
    return std::nullopt;
}

// DASUD over the closed neighborhood: move half the spread from its most- to
// its least-loaded host, whichever hosts those are.  Fixpoint: every closed
// neighborhood has max - min <= 1.
inline std::optional<TransferDecision> dasud_decide(const HostGraph& g, HostId center,
                                                    Rng& rng) {
    std::vector<HostId> dom = g.domain(center, 1);
    if (dom.size() <= 1) return std::nullopt;
    HostId a = detail::pick_most_loaded(g, dom, rng);
    HostId b = detail::pick_least_loaded(g, dom, rng);
    const int gap = g.visible_load(a) - g.visible_load(b);
    if (gap >= 2) return TransferDecision{a, b, gap / 2};
    return std::nullopt;
}

// Probabilistic-migration: EN(1) plus over-migration.  When the EN(1) core
// finds nothing to do, the center holds work, and its least-loaded neighbor
// sits exactly one job below it, one job is pushed there with probability p
// even though that cannot reduce the gap.  Equal loads never fire, so a
// perfectly balanced network is a fixpoint and PM(0) is order-for-order
// identical to EN(1) on a shared stream (no draw happens unless p > 0).
inline std::optional<TransferDecision> pm_decide(const HostGraph& g, HostId center,
                                                 double prob, Rng& rng) {
    auto base = en_decide(g, center, 1, rng);
    if (base || prob <= 0.0) return base;
    if (g.visible_load(center) < 1) return std::nullopt;
    const auto& nbrs = g.neighbors(center);
    if (nbrs.empty()) return std::nullopt;
    HostId j = detail::pick_least_loaded(g, nbrs, rng);
    if (g.visible_load(center) - g.visible_load(j) == 1 && rng.chance(prob))
        return TransferDecision{center, j, 1};
    return std::nullopt;
}

inline std::optional<TransferDecision> strategy_decide(const HostGraph& g,
                                                       const Strategy& s, HostId center,
                                                       Rng& rng) {
    switch (s.kind) {
    case Strategy::Kind::EN: return en_decide(g, center, s.radius, rng);
    case Strategy::Kind::DASUD: return dasud_decide(g, center, rng);
    case Strategy::Kind::PM: return pm_decide(g, center, s.prob, rng);
    }
    return std::nullopt;
}

// Pick which resident of `source` to send to `dest`.  Scores use current
// placements; a guest neighbor in flight counts at its destination.  Returns
// nothing when the source has no resident job (that order is dropped).
inline std::optional<JobId> select_job(Selection sel, HostId source, HostId dest,
                                       const HostGraph& g, const GuestGraph& guest,
                                       const std::vector<JobState>& jobs, Rng& rng) {
    const auto& cands = g.jobs_on(source);
    if (cands.empty()) return std::nullopt;
    if (sel == Selection::None) return cands[rng.index(cands.size())];

    auto score = [&](JobId j) -> long {
        long s = 0;
        for (JobId n : guest.neighbors(j)) {
            if (sel == Selection::MinEdgeCut)
                s += jobs[n.v].host != dest ? 1 : 0;
            else
                s += g.hop_distance(dest, jobs[n.v].host);
        }
        return s;
    };

    long best = score(cands.front());
    std::vector<JobId> ties{cands.front()};
    for (std::size_t i = 1; i < cands.size(); ++i) {
        long s = score(cands[i]);
        if (s < best) {
            best = s;
            ties.assign(1, cands[i]);
        } else if (s == best) {
            ties.push_back(cands[i]);
        }
    }
    return ties.size() == 1 ? ties[0] : rng.pick(ties);
}

// Execute one order: the job leaves its source immediately (load reads are
// live) and either lands on dest in the same step (cost 0) or goes into
// flight for `cost` steps, during which dest carries an inbound credit so
// later deciders don't target it again.  Counted against the source at
// issue time.
inline void apply_migration(HostGraph& g, std::vector<JobState>& jobs, JobId job,
                            HostId source, HostId dest, long cost,
                            std::map<HostId, long>& migrations_by_host) {
    g.remove_job(source, job);
    ++migrations_by_host[source];
    JobState& js = jobs[job.v];
    js.host = dest;
    if (cost <= 0) {
        g.place_job(dest, job);
    } else {
        js.resume_phase = js.phase;
        js.phase = JobPhase::Migrating;
        js.migrate_timer = cost;
        g.note_inbound(dest);
    }
}

// One balancing sweep: every host takes the center role once, in a fresh
// random order, against live load values; each decision's orders are
// selected and applied immediately.
inline std::vector<MigrationOrder> balancing_round(HostGraph& g, const GuestGraph& guest,
                                                   std::vector<JobState>& jobs,
                                                   const Strategy& strat, Selection sel,
                                                   long migration_cost, long t, Rng& rng,
                                                   std::map<HostId, long>& migrations_by_host) {
    std::vector<HostId> order = g.host_ids();
    rng.shuffle(order);
    std::vector<MigrationOrder> issued;
    for (HostId center : order) {
        auto d = strategy_decide(g, strat, center, rng);
        if (!d) continue;
        for (int n = 0; n < d->count; ++n) {
            auto job = select_job(sel, d->source, d->dest, g, guest, jobs, rng);
            if (!job) break; // no eligible job left; drop the rest of the batch
            apply_migration(g, jobs, *job, d->source, d->dest, migration_cost,
                            migrations_by_host);
            issued.push_back({*job, d->source, d->dest, t});
        }
    }
    return issued;
}

} // namespace p2plb
