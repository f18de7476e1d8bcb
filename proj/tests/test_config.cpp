#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <string>

#include "p2plb/config.hpp"

using namespace p2plb;

namespace {

struct TempFile {
    std::string path;
    TempFile(const std::string& name, const std::string& content) : path(name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("strategy strings round-trip") {
    Strategy s = parse_strategy("en:3");
    CHECK(s.kind == Strategy::Kind::EN);
    CHECK(s.radius == 3);
    CHECK(strategy_to_string(s) == "en:3");

    s = parse_strategy("dasud");
    CHECK(s.kind == Strategy::Kind::DASUD);
    CHECK(strategy_to_string(s) == "dasud");

    s = parse_strategy("pm:0.35");
    CHECK(s.kind == Strategy::Kind::PM);
    CHECK(s.prob == 0.35);
    CHECK(strategy_to_string(s) == "pm:0.35");

    CHECK(parse_strategy("pm:0").prob == 0.0);
    CHECK(parse_strategy("pm:1").prob == 1.0);
}

TEST_CASE("malformed strategies are rejected") {
    for (const char* bad : {"en", "en:", "en:0", "en:-1", "en:x", "pm", "pm:",
                            "pm:1.5", "pm:-0.1", "pm:x", "dasud:2", "foo", ""})
        CHECK_THROWS_AS(parse_strategy(bad), InvalidConfiguration);
}

TEST_CASE("selection strings") {
    CHECK(parse_selection("none") == Selection::None);
    CHECK(parse_selection("edgecut") == Selection::MinEdgeCut);
    CHECK(parse_selection("mindist") == Selection::MinTotalDistance);
    CHECK(selection_to_string(Selection::MinEdgeCut) == "edgecut");
    CHECK_THROWS_AS(parse_selection("best"), InvalidConfiguration);
}

TEST_CASE("guest topology strings") {
    GuestTopology kind{};
    int degree = 0;
    parse_guest("ring", kind, degree);
    CHECK(kind == GuestTopology::Ring);
    parse_guest("grid", kind, degree);
    CHECK(kind == GuestTopology::Grid2d);
    parse_guest("regular:4", kind, degree);
    CHECK(kind == GuestTopology::RandomRegular);
    CHECK(degree == 4);
    CHECK(guest_to_string(GuestTopology::RandomRegular, 4) == "regular:4");
    CHECK_THROWS_AS(parse_guest("mesh", kind, degree), InvalidConfiguration);
    CHECK_THROWS_AS(parse_guest("regular:", kind, degree), InvalidConfiguration);
}

TEST_CASE("half-life strings") {
    CHECK_FALSE(parse_tau("inf"));
    CHECK(parse_tau("100") == 100);
    CHECK(tau_to_string(parse_tau("inf")) == "inf");
    CHECK(tau_to_string(parse_tau("7")) == "7");
    CHECK_THROWS_AS(parse_tau("0"), InvalidConfiguration);
    CHECK_THROWS_AS(parse_tau("-3"), InvalidConfiguration);
    CHECK_THROWS_AS(parse_tau("soon"), InvalidConfiguration);
}

TEST_CASE("scripted event strings") {
    ScriptedEvent ev = parse_event("exit@200");
    CHECK(ev.t == 200);
    CHECK(ev.kind == ScriptedKind::ExitRandom);
    CHECK(event_to_string(ev) == "exit@200");
    ev = parse_event("enter@300");
    CHECK(ev.t == 300);
    CHECK(ev.kind == ScriptedKind::Enter);
    CHECK(event_to_string(ev) == "enter@300");
    for (const char* bad : {"exit", "kill@3", "exit@-1", "exit@x", "@5"})
        CHECK_THROWS_AS(parse_event(bad), InvalidConfiguration);
}

TEST_CASE("key=value settings cover every field") {
    SimConfig cfg;
    apply_config_kv(cfg, "hosts", "16");
    apply_config_kv(cfg, "jobs", "40");
    apply_config_kv(cfg, "guest", "regular:3");
    apply_config_kv(cfg, "strategy", "en:2");
    apply_config_kv(cfg, "select", "mindist");
    apply_config_kv(cfg, "iter-work", "25");
    apply_config_kv(cfg, "gamma", "1.5");
    apply_config_kv(cfg, "migration-cost", "4");
    apply_config_kv(cfg, "tau", "250");
    apply_config_kv(cfg, "event", "exit@10");
    apply_config_kv(cfg, "event", "enter@20");
    apply_config_kv(cfg, "steps", "2500");
    apply_config_kv(cfg, "trials", "5");
    apply_config_kv(cfg, "seed", "1234");
    apply_config_kv(cfg, "progress-norm", "mean");
    apply_config_kv(cfg, "placement", "uniform");
    apply_config_kv(cfg, "balance-every", "3");

    CHECK(cfg.n_hosts == 16);
    CHECK(cfg.n_jobs == 40);
    CHECK(cfg.guest == GuestTopology::RandomRegular);
    CHECK(cfg.regular_degree == 3);
    CHECK(cfg.strategy.kind == Strategy::Kind::EN);
    CHECK(cfg.strategy.radius == 2);
    CHECK(cfg.selection == Selection::MinTotalDistance);
    CHECK(cfg.work_per_iteration == 25.0);
    CHECK(cfg.gamma == 1.5);
    CHECK(cfg.migration_cost == 4);
    CHECK(cfg.half_life == 250);
    REQUIRE(cfg.events.size() == 2);
    CHECK(cfg.events[1].kind == ScriptedKind::Enter);
    CHECK(cfg.steps == 2500);
    CHECK(cfg.n_trials == 5);
    CHECK(cfg.master_seed == 1234);
    CHECK(cfg.progress_norm == ProgressNorm::Mean);
    CHECK(cfg.placement == InitialPlacement::UniformRandom);
    CHECK(cfg.balance_every == 3);
    CHECK_NOTHROW(cfg.validate());

    CHECK_THROWS_AS(apply_config_kv(cfg, "speed", "11"), InvalidConfiguration);
    CHECK_THROWS_AS(apply_config_kv(cfg, "placement", "spread"), InvalidConfiguration);
    CHECK_THROWS_AS(apply_config_kv(cfg, "progress-norm", "median"), InvalidConfiguration);
}

TEST_CASE("config files parse with comments and blank lines") {
    TempFile f("cfg_ok.tmp",
               "# experiment setup\n"
               "hosts = 9\n"
               "\n"
               "strategy=dasud   # closed neighborhood\n"
               "  tau = 50\n"
               "event=exit@5\n"
               "event=enter@6\n");
    SimConfig cfg;
    load_config_file(f.path, cfg);
    CHECK(cfg.n_hosts == 9);
    CHECK(cfg.strategy.kind == Strategy::Kind::DASUD);
    CHECK(cfg.half_life == 50);
    CHECK(cfg.events.size() == 2);
    CHECK(cfg.n_jobs == 31); // untouched default
}

TEST_CASE("config file errors carry the line number") {
    TempFile f("cfg_bad.tmp", "hosts=9\nspeed=11\n");
    SimConfig cfg;
    CHECK_THROWS_WITH(load_config_file(f.path, cfg),
                      Catch::Matchers::ContainsSubstring("cfg_bad.tmp:2"));

    TempFile g("cfg_noeq.tmp", "hosts\n");
    CHECK_THROWS_WITH(load_config_file(g.path, cfg),
                      Catch::Matchers::ContainsSubstring("expected key=value"));

    CHECK_THROWS_AS(load_config_file("does_not_exist.tmp", cfg), InvalidConfiguration);
}

TEST_CASE("later settings win, matching flag-over-file precedence") {
    TempFile f("cfg_base.tmp", "hosts=5\nsteps=100\n");
    SimConfig cfg;
    load_config_file(f.path, cfg);
    apply_config_kv(cfg, "hosts", "9"); // the CLI layer re-applies flags after the file
    CHECK(cfg.n_hosts == 9);
    CHECK(cfg.steps == 100);
}

TEST_CASE("the manifest is a frozen rendering of the full configuration") {
    SimConfig cfg;
    CHECK(manifest_text(cfg) ==
          "hosts=31\n"
          "jobs=31\n"
          "guest=grid\n"
          "strategy=pm:0.35\n"
          "select=none\n"
          "iter-work=10\n"
          "gamma=0\n"
          "migration-cost=0\n"
          "tau=inf\n"
          "steps=500\n"
          "trials=50\n"
          "seed=42\n"
          "placement=single\n"
          "progress-norm=verbatim\n"
          "balance-every=1\n");

    apply_config_kv(cfg, "event", "exit@200");
    apply_config_kv(cfg, "tau", "100");
    std::string m = manifest_text(cfg);
    CHECK(m.find("tau=100\n") != std::string::npos);
    CHECK(m.find("event=exit@200\n") != std::string::npos);
}

TEST_CASE("a manifest can be loaded back as a config file") {
    SimConfig cfg;
    apply_config_kv(cfg, "hosts", "13");
    apply_config_kv(cfg, "strategy", "en:2");
    apply_config_kv(cfg, "tau", "75");
    apply_config_kv(cfg, "event", "enter@9");
    TempFile f("cfg_roundtrip.tmp", manifest_text(cfg));
    SimConfig back;
    load_config_file(f.path, back);
    CHECK(manifest_text(back) == manifest_text(cfg));
}
