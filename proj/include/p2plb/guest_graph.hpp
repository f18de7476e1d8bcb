#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "p2plb/errors.hpp"
#include "p2plb/ids.hpp"
#include "p2plb/rng.hpp"

namespace p2plb {

enum class GuestTopology { Ring, Grid2d, RandomRegular };

// Static synchronization graph of the application: job j must sync with
// neighbors(j) at every iteration boundary.  Immutable after construction.
class GuestGraph {
public:
    GuestGraph() = default;

    static GuestGraph from_edges(std::size_t n_jobs,
                                 const std::vector<std::pair<JobId, JobId>>& edges) {
        GuestGraph g;
        g.adj_.resize(n_jobs);
        for (auto [a, b] : edges) {
            if (a == b || a.v >= n_jobs || b.v >= n_jobs)
                throw InvalidConfiguration("bad guest edge");
            g.adj_[a.v].push_back(b);
            g.adj_[b.v].push_back(a);
        }
        for (auto& ns : g.adj_) std::sort(ns.begin(), ns.end());
        return g;
    }

    std::size_t size() const { return adj_.size(); }
    const std::vector<JobId>& neighbors(JobId j) const { return adj_.at(j.v); }

    std::size_t edge_count() const {
        std::size_t d = 0;
        for (const auto& ns : adj_) d += ns.size();
        return d / 2;
    }

private:
    std::vector<std::vector<JobId>> adj_;
};

// rows x cols factorization of m with |rows - cols| minimal (rows <= cols).
inline std::pair<int, int> grid_shape(int m) {
    for (int r = static_cast<int>(std::sqrt(static_cast<double>(m))); r >= 1; --r)
        if (m % r == 0) return {r, m / r};
    return {1, m};
}

// Build the guest graph.  `degree` only matters for RandomRegular.
inline GuestGraph build_guest_graph(int n_jobs, GuestTopology kind, int degree, Rng& rng) {
    if (n_jobs < 1) throw InvalidConfiguration("need at least 1 job");
    const std::size_t m = static_cast<std::size_t>(n_jobs);
    std::vector<std::pair<JobId, JobId>> edges;

    switch (kind) {
    case GuestTopology::Ring:
        if (m == 2) {
            edges.push_back({JobId{0}, JobId{1}});
        } else if (m > 2) {
            for (std::uint32_t i = 0; i < m; ++i)
                edges.push_back({JobId{i}, JobId{static_cast<std::uint32_t>((i + 1) % m)}});
        }
        break;

    case GuestTopology::Grid2d: {
        // non-periodic von Neumann 4-neighborhood
        auto [rows, cols] = grid_shape(n_jobs);
        auto at = [cols = cols](int r, int c) {
            return JobId{static_cast<std::uint32_t>(r * cols + c)};
        };
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                if (c + 1 < cols) edges.push_back({at(r, c), at(r, c + 1)});
                if (r + 1 < rows) edges.push_back({at(r, c), at(r + 1, c)});
            }
        break;
    }

    case GuestTopology::RandomRegular: {
        if (degree < 0 || degree >= n_jobs)
            throw InvalidConfiguration("regular degree must be in [0, n_jobs)");
        if ((static_cast<long>(n_jobs) * degree) % 2 != 0)
            throw InvalidConfiguration("n_jobs * degree must be even for a regular graph");
        if (degree == 0) break;
        // pairing model: shuffle stubs, reject self-loops and parallel edges
        for (int attempt = 0; attempt < 1000; ++attempt) {
            std::vector<std::uint32_t> stubs;
            stubs.reserve(m * degree);
            for (std::uint32_t v = 0; v < m; ++v)
                for (int k = 0; k < degree; ++k) stubs.push_back(v);
            rng.shuffle(stubs);
            std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
            bool ok = true;
            for (std::size_t i = 0; ok && i < stubs.size(); i += 2) {
                std::uint32_t a = stubs[i], b = stubs[i + 1];
                if (a == b) ok = false;
                else if (!seen.emplace(std::min(a, b), std::max(a, b)).second) ok = false;
            }
            if (!ok) continue;
            for (auto [a, b] : seen) edges.push_back({JobId{a}, JobId{b}});
            return GuestGraph::from_edges(m, edges);
        }
        throw InvalidConfiguration("could not realize a simple " + std::to_string(degree) +
                                   "-regular graph on " + std::to_string(n_jobs) + " jobs");
    }
    }

    return GuestGraph::from_edges(m, edges);
}

} // namespace p2plb
