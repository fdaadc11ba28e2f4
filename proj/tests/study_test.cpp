#include "nsdc/study.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "nsdc/errors.hpp"

using namespace nsdc;

TEST_CASE("full config parses into typed fields") {
  const std::string text = R"({
    "problem": "T2",
    "stencil": "OPTIMAL",
    "grids": [40, 80, 160],
    "node_family": "gauss_lobatto",
    "num_nodes": 3,
    "iterations": 4,
    "residual_cutoff": 0.02,
    "t_final": 0.5,
    "dt_rule": "appendix",
    "reference": "highres",
    "reference_n": 640,
    "output": "out.csv"
  })";
  StudyConfig cfg = parse_study_config(text);
  CHECK(cfg.problem == StudyConfig::Problem::T2);
  CHECK(cfg.stencil.kind == StencilChoice::Kind::Narrow8);
  CHECK(cfg.stencil.params[0] == kOptimalM47);
  CHECK(cfg.resolutions == std::vector<int>{40, 80, 160});
  CHECK(cfg.integrator.iterations == 4);
  CHECK(cfg.integrator.residual_ratio_cutoff == 0.02);
  CHECK(cfg.t_final == 0.5);
  CHECK(cfg.reference == StudyConfig::Reference::HighRes);
  CHECK(cfg.reference_resolution == 640);
  CHECK(cfg.output_path == "out.csv");
}

TEST_CASE("defaults fill the gaps") {
  StudyConfig cfg = parse_study_config(R"({"problem": "T1", "grids": [20, 40]})");
  CHECK(cfg.stencil_name == "SMC");
  CHECK(cfg.stencil.params[0] == kSmcM47);
  CHECK(cfg.stencil.params[1] == kSmcM48);
  CHECK(cfg.integrator.family == IntegratorSpec::Family::GaussLobatto);
  CHECK(cfg.integrator.num_nodes == 3);
  CHECK(cfg.integrator.iterations == 4);
  CHECK(cfg.integrator.residual_ratio_cutoff == 0.05);
  CHECK(cfg.t_final == 1.0);
  CHECK(cfg.dt_rule == StudyConfig::DtRule::AppendixFormula);
  CHECK(cfg.reference == StudyConfig::Reference::Exact);
  CHECK(cfg.lambda1 == -1.0);
  CHECK(cfg.lambda2 == -10.0);
  CHECK(cfg.stiffness == 1.0e4);
  CHECK(cfg.stiff.rtol == 1e-10);
  CHECK(cfg.stiff.atol == 1e-12);
  CHECK(cfg.machine_flops == 460.8e9);
  CHECK(cfg.machine_bandwidth == 8.0e9);
  CHECK(cfg.components == 64);
}

TEST_CASE("stencil parameters ride on top of the preset") {
  StudyConfig cfg = parse_study_config(
      R"({"problem": "T1", "grids": [20], "stencil": "ZERO", "stencil_m47": 0.25})");
  CHECK(cfg.stencil.params[0] == 0.25);
  CHECK(cfg.stencil.params[1] == 0.0);

  StudyConfig six = parse_study_config(
      R"({"problem": "T1", "grids": [20], "stencil": "NARROW6", "stencil_m36": 0.08})");
  CHECK(six.stencil.kind == StencilChoice::Kind::Narrow6);
  CHECK(six.stencil.params[0] == 0.08);
}

TEST_CASE("config validation rejects malformed input") {
  CHECK_THROWS_AS(parse_study_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_study_config("[1,2]"), ConfigError);
  CHECK_THROWS_AS(parse_study_config(R"({"problem": "T1", "grids": [20], "zzz": 1})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_study_config(R"({"grids": [20]})"), ConfigError);
  CHECK_THROWS_AS(parse_study_config(R"({"problem": "T9", "grids": [20]})"), ConfigError);
  CHECK_THROWS_AS(parse_study_config(R"({"problem": "T1"})"), ConfigError);
  CHECK_THROWS_AS(parse_study_config(R"({"problem": "T1", "grids": [40, 20]})"), ConfigError);
  CHECK_THROWS_AS(parse_study_config(R"({"problem": "T1", "grids": [20.5]})"), ConfigError);
  CHECK_THROWS_AS(parse_study_config(R"({"problem": "T1", "grids": [20], "stencil": "XX"})"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_study_config(R"({"problem": "T1", "grids": [20], "stencil_m36": 0.1})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_study_config(
          R"({"problem": "T1", "grids": [20], "stencil": "WIDE", "stencil_m47": 0.1})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_study_config(R"({"problem": "T1", "grids": [20], "node_family": "radau"})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_study_config(R"({"problem": "T1", "grids": [20], "hierarchy": "type_d"})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_study_config(R"({"problem": "T1", "grids": [20], "dt_rule": "fixed"})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_study_config(
          R"({"problem": "T1", "grids": [20, 40], "dt_rule": "halving_list", "dt_list": [0.1]})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_study_config(R"({"problem": "T1", "grids": [20], "reference": "psychic"})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_study_config(
          R"({"problem": "T2", "grids": [30], "reference": "highres", "reference_n": 640})"),
      ConfigError);
  CHECK_THROWS_AS(parse_study_config(R"({"problem": "T1", "grids": [20], "t_final": "soon"})"),
                  ConfigError);
}

TEST_CASE("cost model config needs no grids") {
  StudyConfig cfg = parse_study_config(R"({"problem": "CostModel", "N": 9})");
  CHECK(cfg.components == 9);
  CHECK(run_study(cfg).empty());
}

TEST_CASE("config file loading") {
  CHECK_THROWS_AS(load_study_config("/nonexistent/nsdc.json"), ConfigError);
  const std::string path = "/tmp/nsdc_study_test_cfg.json";
  {
    std::ofstream out(path);
    out << R"({"problem": "SdcOrderODE", "grids": [4, 8], "t_final": 1.0})";
  }
  StudyConfig cfg = load_study_config(path);
  CHECK(cfg.problem == StudyConfig::Problem::SdcOrderODE);
  std::remove(path.c_str());
}

TEST_CASE("rate computation") {
  std::vector<ConvergenceRow> rows(3);
  rows[0].linf = 1.0;
  rows[0].l2 = 1.0;
  rows[1].linf = 1.0 / 256.0;
  rows[1].l2 = 0.5;
  rows[2].linf = 0.0;
  rows[2].l2 = 0.5;
  rows = compute_rates(rows);
  CHECK_FALSE(rows[0].linf_rate.has_value());
  CHECK(rows[1].linf_rate.value() == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(rows[1].l2_rate.value() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(rows[2].linf_rate.has_value());  // current error vanished
  CHECK(rows[2].l2_rate.value() == doctest::Approx(0.0).scale(1.0));

  // A vanished previous error also leaves the rate empty.
  std::vector<ConvergenceRow> tail(2);
  tail[0].linf = 0.0;
  tail[1].linf = 1e-3;
  tail = compute_rates(tail);
  CHECK_FALSE(tail[1].linf_rate.has_value());
}

TEST_CASE("CSV serialization round-trips") {
  std::vector<ConvergenceRow> rows(2);
  rows[0].resolution = 20;
  rows[0].dt = 0.125;
  rows[0].linf = 0.5;
  rows[0].l2 = 0.25;
  rows[1].resolution = 40;
  rows[1].dt = 0.0625;
  rows[1].linf = 0.03125;
  rows[1].linf_rate = 4.0;
  rows[1].l2 = 0.015625;
  rows[1].l2_rate = 4.0;

  const std::string expected =
      "resolution,dt,linf,linf_rate,l2,l2_rate\n"
      "20,0.125,0.5,,0.25,\n"
      "40,0.0625,0.03125,4,0.015625,4\n";
  CHECK(to_csv(rows) == expected);

  std::vector<ConvergenceRow> parsed = parse_csv(expected);
  REQUIRE(parsed.size() == 2);
  CHECK_FALSE(parsed[0].linf_rate.has_value());
  CHECK(parsed[1].linf_rate.value() == 4.0);
  CHECK(to_csv(parsed) == expected);

  CHECK_THROWS_AS(parse_csv("nope\n1,2,3,4,5,6\n"), ConfigError);
}

TEST_CASE("ODE study produces fourth-order rows") {
  StudyConfig cfg;
  cfg.problem = StudyConfig::Problem::SdcOrderODE;
  cfg.resolutions = {4, 8};
  cfg.t_final = 1.0;
  cfg.lambda1 = -1.0;
  cfg.output_path = "/tmp/nsdc_study_test_rows.csv";

  auto rows = run_study(cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].resolution == 4.0);
  CHECK(rows[0].dt == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_FALSE(rows[0].linf_rate.has_value());
  CHECK(rows[1].linf_rate.value() == doctest::Approx(4.0).epsilon(0.25));

  std::ifstream in(cfg.output_path);
  REQUIRE(in.good());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(parse_csv(text).size() == 2);
  std::remove(cfg.output_path.c_str());
}

TEST_CASE("multirate studies run end to end") {
  SUBCASE("explicit split") {
    StudyConfig cfg;
    cfg.problem = StudyConfig::Problem::MrsdcMode1ODE;
    cfg.resolutions = {2, 4};
    cfg.t_final = 0.5;
    cfg.lambda1 = -1.0;
    cfg.lambda2 = -10.0;
    cfg.integrator.hierarchy = IntegratorSpec::Hierarchy::TypeB;
    cfg.integrator.fine_nodes = 5;
    auto rows = run_study(cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].linf < rows[0].linf);
  }

  SUBCASE("implicit stiff split") {
    StudyConfig cfg;
    cfg.problem = StudyConfig::Problem::MrsdcMode2ODE;
    cfg.resolutions = {4, 8};
    cfg.t_final = 0.5;
    cfg.stiffness = 100.0;
    cfg.integrator.hierarchy = IntegratorSpec::Hierarchy::TypeB;
    cfg.integrator.fine_nodes = 5;
    auto rows = run_study(cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].linf < rows[0].linf);
  }

  SUBCASE("multirate problems insist on a hierarchy") {
    StudyConfig cfg;
    cfg.problem = StudyConfig::Problem::MrsdcMode1ODE;
    cfg.resolutions = {2};
    CHECK_THROWS_AS(run_study(cfg), ConfigError);
  }
}

TEST_CASE("heat study smoke and the zero-duration edge") {
  StudyConfig cfg;
  cfg.problem = StudyConfig::Problem::T1;
  cfg.resolutions = {12};
  cfg.dt_rule = StudyConfig::DtRule::Fixed;
  cfg.dt = 0.005;
  cfg.t_final = 0.01;

  auto rows = run_study(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].resolution == 12.0);
  CHECK(rows[0].dt == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(rows[0].linf > 0.0);
  CHECK(rows[0].linf < 1e-5);

  cfg.t_final = 0.0;
  rows = run_study(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].linf == 0.0);
  CHECK(rows[0].l2 == 0.0);
  CHECK(rows[0].precision_limited);
  CHECK(rows[0].dt == 0.0);
}

TEST_CASE("high-resolution reference restricts onto each grid") {
  StudyConfig cfg;
  cfg.problem = StudyConfig::Problem::T2;
  cfg.resolutions = {12};
  cfg.reference = StudyConfig::Reference::HighRes;
  cfg.reference_resolution = 24;
  cfg.t_final = 0.05;

  auto rows = run_study(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].linf > 0.0);
  CHECK(rows[0].linf < 1.0);
}
