#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fixtures.hpp"

using namespace nlslab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("nlslab_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config round trip and hash") {
    LabConfig c;
    c.grid.n_points = 2048;
    json j = c;
    LabConfig d = config_from_json(j);
    CHECK(d.grid.n_points == 2048);
    CHECK(config_hash(c) == config_hash(d));
    CHECK(config_hash(c).size() == 16);
    d.evolution.dt = 2e-4;
    CHECK(config_hash(c) != config_hash(d));
  }

  TEST_CASE("config validation") {
    CHECK_THROWS_AS(config_from_json(json{{"grid", {{"n_points", 100}}}}), Error);
    CHECK_THROWS_AS(config_from_json(json{{"grid", {{"r_max", 10.0}}}}), Error);
    CHECK_THROWS_AS(config_from_json(json{{"tolerances", {{"shoot_tol", -1.0}}}}), Error);
    CHECK_THROWS_AS(config_from_json(json{{"grdi", {}}}), Error);
    CHECK_THROWS_AS(load_config(std::string("/nonexistent/config.json")), Error);
  }

  TEST_CASE("config file and environment") {
    auto dir = scratch("cfg");
    std::ofstream(dir / "c.json") << R"({"seed": 11, "evolution": {"dt": 5e-5}})";
    auto c = load_config((dir / "c.json").string());
    CHECK(c.seed == 11);
    CHECK(c.evolution.dt == 5e-5);
    setenv("NLS_LAB_CONFIG", (dir / "c.json").c_str(), 1);
    CHECK(config_path_from_env() == (dir / "c.json").string());
    unsetenv("NLS_LAB_CONFIG");
    CHECK(!config_path_from_env());
  }

  TEST_CASE("golden constants carry oracle provenance") {
    auto g = fixtures::golden();
    CHECK(g.q0.provenance.find("oracle-shoot") != std::string::npos);
    CHECK(g.m_q.provenance.find("oracle-shoot") != std::string::npos);
    CHECK(g.e0.provenance.find("oracle-dense-eig") != std::string::npos);
    auto dir = scratch("golden");
    std::ofstream(dir / "g.json") << R"({"q0": {"value": 4.3, "provenance": "typed in"},
      "m_Q": {"value": 18.9, "provenance": "oracle"}, "e0": {"value": 5.5, "provenance": "oracle"}})";
    CHECK_THROWS_AS(load_golden(dir / "g.json"), Error);
    CHECK_THROWS_AS(load_golden(dir / "missing.json"), Error);
  }

  TEST_CASE("envelope fields") {
    LabConfig c;
    json j = envelope(c, {{"x", 1}});
    CHECK(j["config_hash"] == config_hash(c));
    CHECK(j["code_version"] == code_version());
  }

  TEST_CASE("csv round trip keeps every digit") {
    auto dir = scratch("csv");
    std::vector<CsvColumn> cols{{"a", {0.1, 1.0 / 3.0, 1e-300}}, {"b", {-2.5, 7.0, 3.141592653589793}}};
    write_csv(dir / "x.csv", cols, "note");
    auto back = read_csv(dir / "x.csv");
    REQUIRE(back.size() == 2);
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < 3; ++i) CHECK(back[c].values[i] == cols[c].values[i]);
  }

  TEST_CASE("trace directory round trip") {
    const auto& gs = fixtures::coarse().gs;
    EvolveOptions o;
    o.dt = 1e-3;
    o.snapshot_records = true;
    auto tr = integrate(gs.q, 0.0, 0.05, gs, o);
    auto dir = scratch("trace");
    write_trace_dir(dir, tr, LabConfig{});
    auto [n, r_max] = trace_grid(dir);
    CHECK(n == 1024);
    CHECK(r_max == 30.0);
    auto back = read_trace_dir(dir, gs.q.grid);
    CHECK(back.times == tr.times);
    CHECK(back.dist_series == tr.dist_series);
    REQUIRE(back.snapshots.size() == tr.snapshots.size());
    CHECK(h1_norm(back.final_state() - tr.final_state()) == 0.0);
    CHECK_THROWS_AS(read_trace_dir(dir, make_grid(512, 30.0)), Error);
  }
}
