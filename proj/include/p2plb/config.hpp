#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "p2plb/engine.hpp"

namespace p2plb {

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline long parse_long(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InvalidConfiguration("bad integer for " + what + ": '" + s + "'");
    }
}

inline double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InvalidConfiguration("bad number for " + what + ": '" + s + "'");
    }
}

} // namespace detail

// "en:<x>" | "dasud" | "pm:<p>"
inline Strategy parse_strategy(const std::string& text) {
    Strategy s;
    std::string kind = text, arg;
    if (auto colon = text.find(':'); colon != std::string::npos) {
        kind = text.substr(0, colon);
        arg = text.substr(colon + 1);
    }
    if (kind == "dasud") {
        if (!arg.empty()) throw InvalidConfiguration("dasud takes no parameter");
        s.kind = Strategy::Kind::DASUD;
    } else if (kind == "en") {
        s.kind = Strategy::Kind::EN;
        if (arg.empty()) throw InvalidConfiguration("en needs a radius, e.g. en:1");
        s.radius = static_cast<int>(detail::parse_long(arg, "en radius"));
        if (s.radius < 1) throw InvalidConfiguration("en radius must be >= 1");
    } else if (kind == "pm") {
        s.kind = Strategy::Kind::PM;
        if (arg.empty()) throw InvalidConfiguration("pm needs a probability, e.g. pm:0.35");
        s.prob = detail::parse_double(arg, "pm probability");
        if (s.prob < 0.0 || s.prob > 1.0)
            throw InvalidConfiguration("pm probability must be in [0, 1]");
    } else {
        throw InvalidConfiguration("unknown strategy '" + text +
                                   "' (want en:<x> | dasud | pm:<p>)");
    }
    return s;
}

inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline std::string strategy_to_string(const Strategy& s) {
    switch (s.kind) {
    case Strategy::Kind::EN: return "en:" + std::to_string(s.radius);
    case Strategy::Kind::DASUD: return "dasud";
    case Strategy::Kind::PM: return "pm:" + format_number(s.prob);
    }
    return "?";
}

inline Selection parse_selection(const std::string& text) {
    if (text == "none") return Selection::None;
    if (text == "edgecut") return Selection::MinEdgeCut;
    if (text == "mindist") return Selection::MinTotalDistance;
    throw InvalidConfiguration("unknown selection '" + text +
                               "' (want none | edgecut | mindist)");
}

inline std::string selection_to_string(Selection s) {
    switch (s) {
    case Selection::None: return "none";
    case Selection::MinEdgeCut: return "edgecut";
    case Selection::MinTotalDistance: return "mindist";
    }
    return "?";
}

// "ring" | "grid" | "regular:<d>"
inline void parse_guest(const std::string& text, GuestTopology& kind, int& degree) {
    if (text == "ring") {
        kind = GuestTopology::Ring;
    } else if (text == "grid") {
        kind = GuestTopology::Grid2d;
    } else if (text.rfind("regular:", 0) == 0) {
        kind = GuestTopology::RandomRegular;
        degree = static_cast<int>(detail::parse_long(text.substr(8), "regular degree"));
    } else {
        throw InvalidConfiguration("unknown guest topology '" + text +
                                   "' (want ring | grid | regular:<d>)");
    }
}

inline std::string guest_to_string(GuestTopology kind, int degree) {
    switch (kind) {
    case GuestTopology::Ring: return "ring";
    case GuestTopology::Grid2d: return "grid";
    case GuestTopology::RandomRegular: return "regular:" + std::to_string(degree);
    }
    return "?";
}

// "inf" or an integer >= 1
inline std::optional<long> parse_tau(const std::string& text) {
    if (text == "inf") return std::nullopt;
    long v = detail::parse_long(text, "tau");
    if (v < 1) throw InvalidConfiguration("tau must be >= 1 or inf");
    return v;
}

inline std::string tau_to_string(const std::optional<long>& tau) {
    return tau ? std::to_string(*tau) : "inf";
}

// "exit@<t>" | "enter@<t>"
inline ScriptedEvent parse_event(const std::string& text) {
    auto at = text.find('@');
    if (at == std::string::npos)
        throw InvalidConfiguration("bad event '" + text + "' (want exit@<t> | enter@<t>)");
    std::string kind = text.substr(0, at);
    long t = detail::parse_long(text.substr(at + 1), "event time");
    if (t < 0) throw InvalidConfiguration("event time must be >= 0");
    if (kind == "exit") return {t, ScriptedKind::ExitRandom, {}};
    if (kind == "enter") return {t, ScriptedKind::Enter, {}};
    throw InvalidConfiguration("bad event '" + text + "' (want exit@<t> | enter@<t>)");
}

inline std::string event_to_string(const ScriptedEvent& ev) {
    switch (ev.kind) {
    case ScriptedKind::Enter: return "enter@" + std::to_string(ev.t);
    case ScriptedKind::ExitRandom: return "exit@" + std::to_string(ev.t);
    case ScriptedKind::ExitHost:
        return "exit-host:" + std::to_string(ev.host.v) + "@" + std::to_string(ev.t);
    }
    return "?";
}

// Apply one key=value setting (same keys as the CLI flags, sans dashes).
inline void apply_config_kv(SimConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_double;
    using detail::parse_long;
    if (key == "hosts") cfg.n_hosts = static_cast<int>(parse_long(value, key));
    else if (key == "jobs") cfg.n_jobs = static_cast<int>(parse_long(value, key));
    else if (key == "guest") parse_guest(value, cfg.guest, cfg.regular_degree);
    else if (key == "strategy") cfg.strategy = parse_strategy(value);
    else if (key == "select") cfg.selection = parse_selection(value);
    else if (key == "iter-work") cfg.work_per_iteration = parse_double(value, key);
    else if (key == "gamma") cfg.gamma = parse_double(value, key);
    else if (key == "migration-cost") cfg.migration_cost = parse_long(value, key);
    else if (key == "tau") cfg.half_life = parse_tau(value);
    else if (key == "event") cfg.events.push_back(parse_event(value));
    else if (key == "steps") cfg.steps = parse_long(value, key);
    else if (key == "trials") cfg.n_trials = static_cast<int>(parse_long(value, key));
    else if (key == "seed") cfg.master_seed = static_cast<std::uint64_t>(parse_long(value, key));
    else if (key == "progress-norm") {
        if (value == "verbatim") cfg.progress_norm = ProgressNorm::Verbatim;
        else if (value == "mean") cfg.progress_norm = ProgressNorm::Mean;
        else throw InvalidConfiguration("progress-norm must be verbatim or mean");
    } else if (key == "placement") {
        if (value == "single") cfg.placement = InitialPlacement::SingleHost;
        else if (value == "uniform") cfg.placement = InitialPlacement::UniformRandom;
        else throw InvalidConfiguration("placement must be single or uniform");
    } else if (key == "balance-every") cfg.balance_every = parse_long(value, key);
    else throw InvalidConfiguration("unknown config key '" + key + "'");
}

// Flat key=value file; '#' starts a comment; blank lines ignored; unknown
// keys are errors.  CLI flags parsed afterwards override these values.
inline void load_config_file(const std::string& path, SimConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw InvalidConfiguration("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidConfiguration(path + ":" + std::to_string(lineno) +
                                       ": expected key=value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        try {
            apply_config_kv(cfg, key, value);
        } catch (const InvalidConfiguration& e) {
            throw InvalidConfiguration(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

// Fully resolved configuration, one key=value per line.  Deliberately free of
// timestamps and absolute paths: rerunning a seed must reproduce this file
// byte for byte.
inline std::string manifest_text(const SimConfig& cfg) {
    std::ostringstream os;
    os << "hosts=" << cfg.n_hosts << '\n';
    os << "jobs=" << cfg.n_jobs << '\n';
    os << "guest=" << guest_to_string(cfg.guest, cfg.regular_degree) << '\n';
    os << "strategy=" << strategy_to_string(cfg.strategy) << '\n';
    os << "select=" << selection_to_string(cfg.selection) << '\n';
    os << "iter-work=" << format_number(cfg.work_per_iteration) << '\n';
    os << "gamma=" << format_number(cfg.gamma) << '\n';
    os << "migration-cost=" << cfg.migration_cost << '\n';
    os << "tau=" << tau_to_string(cfg.half_life) << '\n';
    for (const ScriptedEvent& ev : cfg.events) os << "event=" << event_to_string(ev) << '\n';
    os << "steps=" << cfg.steps << '\n';
    os << "trials=" << cfg.n_trials << '\n';
    os << "seed=" << cfg.master_seed << '\n';
    os << "placement=" << (cfg.placement == InitialPlacement::SingleHost ? "single" : "uniform")
       << '\n';
    os << "progress-norm="
       << (cfg.progress_norm == ProgressNorm::Verbatim ? "verbatim" : "mean") << '\n';
    os << "balance-every=" << cfg.balance_every << '\n';
    return os.str();
}

} // namespace p2plb
