#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "p2plb/errors.hpp"
#include "p2plb/ids.hpp"
#include "p2plb/rng.hpp"

namespace p2plb {

struct HandOff {
    JobId job;
    HostId dest;
};

// Everything host_exit did: which jobs went where, and the shuffled neighbor
// order the round-robin used (callers re-use it to re-route in-flight jobs
// that were headed for the exited host).
struct ExitRecord {
    HostId host;
    std::vector<HandOff> handoffs;
    std::vector<HostId> recipients;
};

// How many hosts a newcomer attaches to when the network currently holds
// `existing` hosts: floor(log2(existing)), at least 1, at most `existing`.
inline int attach_count(std::size_t existing) {
    if (existing == 0) return 0;
    int lg = std::bit_width(existing) - 1; // exact floor(log2)
    return static_cast<int>(std::min<std::size_t>(std::max(lg, 1), existing));
}

// Undirected host network plus the job->host placement (each host keeps its
// resident job list; a job mid-migration is on no list at all).
class HostGraph {
public:
    HostId add_host() {
        HostId id{next_id_++};
        hosts_.emplace(id, Entry{});
        invalidate();
        return id;
    }

    void add_edge(HostId a, HostId b) {
        if (a == b) throw InvalidConfiguration("self-edge on " + std::to_string(a.v));
        auto& ea = entry(a).nbrs;
        auto& eb = entry(b).nbrs;
        auto ita = std::lower_bound(ea.begin(), ea.end(), b);
        if (ita != ea.end() && *ita == b) return; // already connected
        ea.insert(ita, b);
        eb.insert(std::lower_bound(eb.begin(), eb.end(), a), a);
        invalidate();
    }

    bool contains(HostId h) const { return hosts_.count(h) != 0; }
    std::size_t size() const { return hosts_.size(); }

    std::size_t edge_count() const {
        std::size_t deg = 0;
        for (const auto& [id, e] : hosts_) deg += e.nbrs.size();
        return deg / 2;
    }

    const std::vector<HostId>& neighbors(HostId h) const { return entry(h).nbrs; }

    std::vector<HostId> host_ids() const {
        std::vector<HostId> out;
        out.reserve(hosts_.size());
        for (const auto& [id, e] : hosts_) out.push_back(id);
        return out;
    }

    // --- residency ------------------------------------------------------
    const std::vector<JobId>& jobs_on(HostId h) const { return entry(h).jobs; }
    int load(HostId h) const { return static_cast<int>(entry(h).jobs.size()); }

    // Load as a balancer must see it: residents plus transfers already
    // committed to h but still in the air.  Without the credit, two centers
    // in the same round both "fill" the same hole and the overshoot pays the
    // migration cost twice -- a delayed-feedback oscillation, not balancing.
    int visible_load(HostId h) const {
        const Entry& e = entry(h);
        return static_cast<int>(e.jobs.size()) + e.inbound;
    }
    int inbound(HostId h) const { return entry(h).inbound; }
    void note_inbound(HostId h) { ++entry(h).inbound; }
    void drop_inbound(HostId h) {
        int& n = entry(h).inbound;
        if (n <= 0)
            throw SimError("inbound underflow on host " + std::to_string(h.v));
        --n;
    }
    std::size_t total_inbound() const {
        std::size_t n = 0;
        for (const auto& [id, e] : hosts_) n += static_cast<std::size_t>(e.inbound);
        return n;
    }

    void place_job(HostId h, JobId j) { entry(h).jobs.push_back(j); }

    void remove_job(HostId h, JobId j) {
        auto& js = entry(h).jobs;
        auto it = std::find(js.begin(), js.end(), j);
        if (it == js.end())
            throw SimError("job not resident on host " + std::to_string(h.v));
        js.erase(it);
    }

    std::size_t total_jobs() const {
        std::size_t n = 0;
        for (const auto& [id, e] : hosts_) n += e.jobs.size();
        return n;
    }

    // --- membership changes ----------------------------------------------
    // A newcomer wires itself to attach_count(|H|) distinct random hosts.
    HostId enter(Rng& rng) {
        std::vector<HostId> targets = host_ids();
        int k = attach_count(targets.size());
        // partial Fisher-Yates: the first k entries become the sample
        for (int i = 0; i < k; ++i) {
            std::size_t j = i + rng.index(targets.size() - i);
            std::swap(targets[i], targets[j]);
        }
        HostId id = add_host();
        for (int i = 0; i < k; ++i) add_edge(id, targets[i]);
        return id;
    }

    // True when removing h would strand jobs: h is the last host, or h holds
    // jobs but has nobody to hand them to.
    bool exit_would_orphan(HostId h) const {
        const Entry& e = entry(h);
        if (hosts_.size() <= 1) return true;
        return !e.jobs.empty() && e.nbrs.empty();
    }

    // Remove h; its resident jobs go round-robin over a random permutation of
    // its neighbors, so recipient counts differ by at most one.  These
    // hand-offs are instantaneous and are not migrations.
    ExitRecord exit(HostId h, Rng& rng) {
        const Entry& e = entry(h); // throws UnknownHost if absent
        if (hosts_.size() <= 1)
            throw ForbiddenExit("cannot remove the last host");
        if (!e.jobs.empty() && e.nbrs.empty())
            throw ForbiddenExit("host " + std::to_string(h.v) +
                                " holds jobs but has no neighbors");
        ExitRecord rec;
        rec.host = h;
        rec.recipients = e.nbrs;
        rng.shuffle(rec.recipients);
        for (std::size_t i = 0; i < e.jobs.size(); ++i) {
            HostId dest = rec.recipients[i % rec.recipients.size()];
            rec.handoffs.push_back({e.jobs[i], dest});
        }
        for (const HandOff& ho : rec.handoffs) entry(ho.dest).jobs.push_back(ho.job);
        for (HostId n : rec.recipients) {
            auto& ns = entry(n).nbrs;
            ns.erase(std::lower_bound(ns.begin(), ns.end(), h));
        }
        hosts_.erase(h);
        invalidate();
        return rec;
    }

    // --- distances --------------------------------------------------------
    // Hop distance via BFS, cached per source until the topology changes.
    // A query between disconnected hosts is outside the model.
    int hop_distance(HostId a, HostId b) const {
        entry(b); // validate
        const auto& dist = bfs_from(a);
        auto it = dist.find(b);
        if (it == dist.end())
            throw ModelViolation("hosts " + std::to_string(a.v) + " and " +
                                 std::to_string(b.v) + " are disconnected");
        return it->second;
    }

    // All hosts within `radius` hops of center (center included), ascending.
    std::vector<HostId> domain(HostId center, int radius) const {
        entry(center);
        std::map<HostId, int> seen{{center, 0}};
        std::deque<HostId> q{center};
        while (!q.empty()) {
            HostId u = q.front();
            q.pop_front();
            int d = seen[u];
            if (d >= radius) continue;
            for (HostId v : entry(u).nbrs)
                if (seen.emplace(v, d + 1).second) q.push_back(v);
        }
        std::vector<HostId> out;
        out.reserve(seen.size());
        for (const auto& [id, d] : seen) out.push_back(id);
        return out;
    }

    // Longest shortest path; disconnected graphs have no diameter.
    int diameter() const {
        int best = 0;
        for (const auto& [id, e] : hosts_) {
            const auto& dist = bfs_from(id);
            if (dist.size() != hosts_.size())
                throw ModelViolation("graph is disconnected");
            for (const auto& [v, d] : dist) best = std::max(best, d);
        }
        return best;
    }

    // Edge list, one "u v" pair per line, for debugging/plotting.
    void dump_edges(std::ostream& os) const {
        for (const auto& [id, e] : hosts_)
            for (HostId n : e.nbrs)
                if (id < n) os << id.v << ' ' << n.v << '\n';
    }

private:
    struct Entry {
        std::vector<HostId> nbrs; // sorted ascending
        std::vector<JobId> jobs;  // arrival order
        int inbound = 0;          // in-flight jobs committed to this host
    };

    Entry& entry(HostId h) {
        auto it = hosts_.find(h);
        if (it == hosts_.end())
            throw UnknownHost("no host with id " + std::to_string(h.v));
        return it->second;
    }
    const Entry& entry(HostId h) const {
        auto it = hosts_.find(h);
        if (it == hosts_.end())
            throw UnknownHost("no host with id " + std::to_string(h.v));
        return it->second;
    }

    void invalidate() { dist_cache_.clear(); }

    const std::map<HostId, int>& bfs_from(HostId src) const {
        auto it = dist_cache_.find(src);
        if (it != dist_cache_.end()) return it->second;
        entry(src);
        std::map<HostId, int> dist{{src, 0}};
        std::deque<HostId> q{src};
        while (!q.empty()) {
            HostId u = q.front();
            q.pop_front();
            int d = dist[u];
            for (HostId v : entry(u).nbrs)
                if (dist.emplace(v, d + 1).second) q.push_back(v);
        }
        return dist_cache_.emplace(src, std::move(dist)).first->second;
    }

    std::map<HostId, Entry> hosts_;
    std::uint32_t next_id_ = 0;
    mutable std::map<HostId, std::map<HostId, int>> dist_cache_;
};

// Grow a network host by host; each arrival uses the same attachment rule as
// live entry, so the result is connected by construction.
inline HostGraph build_host_network(int n_hosts, Rng& rng) {
    if (n_hosts < 2)
        throw InvalidConfiguration("need at least 2 hosts, got " + std::to_string(n_hosts));
    HostGraph g;
    g.add_host();
    for (int i = 1; i < n_hosts; ++i) g.enter(rng);
    return g;
}

} // namespace p2plb
