#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "p2plb/host_graph.hpp"

namespace p2plb {

enum class ScriptedKind { ExitRandom, ExitHost, Enter };

struct ScriptedEvent {
    long t = 0;
    ScriptedKind kind = ScriptedKind::Enter;
    HostId host{}; // ExitHost only
};

// Dynamic-membership model: an optional half-life tau (every host independently
// exits each step with p = 1 - 2^(-1/tau), and each such exit is immediately
// paired with one entry, keeping |H| constant), plus scripted one-off events
// that do change |H|.
struct ChurnModel {
    std::optional<long> half_life; // nullopt: static network
    std::vector<ScriptedEvent> script;

    double exit_probability() const {
        if (!half_life) return 0.0;
        return 1.0 - std::exp2(-1.0 / static_cast<double>(*half_life));
    }
};

struct NetworkEvent {
    enum class Kind { Entered, Exited };
    Kind kind = Kind::Entered;
    HostId host{};
    bool scripted = false;
    ExitRecord exit; // Exited only
};

// One membership phase.  Scripted events for step t fire first, in script
// order; then, under finite tau, every host present afterwards draws its exit
// Bernoulli.  Stochastic exits whose hand-off would strand jobs are skipped
// (the draw still happens, keeping the stream aligned).  With tau = inf and
// no matching script entries this consumes no randomness at all.
inline std::vector<NetworkEvent> churn_tick(HostGraph& g, const ChurnModel& model,
                                            long t, Rng& rng) {
    std::vector<NetworkEvent> events;

    for (const ScriptedEvent& ev : model.script) {
        if (ev.t != t) continue;
        switch (ev.kind) {
        case ScriptedKind::Enter: {
            HostId id = g.enter(rng);
            events.push_back({NetworkEvent::Kind::Entered, id, true, {}});
            break;
        }
        case ScriptedKind::ExitHost: {
            ExitRecord rec = g.exit(ev.host, rng);
            events.push_back({NetworkEvent::Kind::Exited, ev.host, true, std::move(rec)});
            break;
        }
        case ScriptedKind::ExitRandom: {
            if (g.size() <= 1) throw ForbiddenExit("scripted exit with one host left");
            std::vector<HostId> eligible;
            for (HostId h : g.host_ids())
                if (!g.exit_would_orphan(h)) eligible.push_back(h);
            if (eligible.empty())
                throw ForbiddenExit("no host can exit without stranding jobs");
            HostId victim = rng.pick(eligible);
            ExitRecord rec = g.exit(victim, rng);
            events.push_back({NetworkEvent::Kind::Exited, victim, true, std::move(rec)});
            break;
        }
        }
    }

    if (model.half_life) {
        const double p = model.exit_probability();
        for (HostId h : g.host_ids()) { // snapshot: this step's entrants don't draw
            if (!rng.chance(p)) continue;
            if (g.exit_would_orphan(h)) continue;
            ExitRecord rec = g.exit(h, rng);
            events.push_back({NetworkEvent::Kind::Exited, h, false, std::move(rec)});
            HostId id = g.enter(rng);
            events.push_back({NetworkEvent::Kind::Entered, id, false, {}});
        }
    }

    return events;
}

} // namespace p2plb
