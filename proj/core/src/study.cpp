#include "nsdc/study.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "nsdc/errors.hpp"
#include "nsdc/pde.hpp"
#include "nsdc/sdc.hpp"

namespace nsdc {
namespace {

using nlohmann::json;

const std::map<std::string, StudyConfig::Problem> kProblems = {
    {"T1", StudyConfig::Problem::T1},
    {"T2", StudyConfig::Problem::T2},
    {"SdcOrderODE", StudyConfig::Problem::SdcOrderODE},
    {"MrsdcMode1ODE", StudyConfig::Problem::MrsdcMode1ODE},
    {"MrsdcMode2ODE", StudyConfig::Problem::MrsdcMode2ODE},
    {"CostModel", StudyConfig::Problem::CostModel},
};

const std::set<std::string> kKnownKeys = {
    "problem",      "stencil",     "stencil_m47", "stencil_m48", "stencil_m36",
    "grids",        "node_family", "num_nodes",   "iterations",  "hierarchy",
    "fine_family",  "fine_nodes",  "repeats",     "residual_cutoff",
    "t_final",      "dt_rule",     "dt",          "dt_list",     "reference",
    "reference_n",  "output",      "lambda1",     "lambda2",     "stiffness",
    "rtol",         "atol",        "N",           "flops",       "bandwidth",
};

IntegratorSpec::Family parse_family(const std::string& s) {
  if (s == "gauss_lobatto") return IntegratorSpec::Family::GaussLobatto;
  if (s == "clenshaw_curtis") return IntegratorSpec::Family::ClenshawCurtis;
  throw ConfigError("unknown node family: " + s);
}

double get_num(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
  return j[key].get<double>();
}

int get_int(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
  return j[key].get<int>();
}

std::string get_str(const json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) throw ConfigError(std::string(key) + " must be a string");
  return j[key].get<std::string>();
}

}  // namespace

StudyConfig parse_study_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& item : j.items())
    if (!kKnownKeys.count(item.key())) throw ConfigError("unknown config key: " + item.key());

  StudyConfig cfg;
  const std::string prob = get_str(j, "problem", "");
  const auto it = kProblems.find(prob);
  if (it == kProblems.end())
    throw ConfigError(prob.empty() ? std::string("missing required key: problem")
                                   : "unknown problem: " + prob);
  cfg.problem = it->second;

  cfg.stencil_name = get_str(j, "stencil", "SMC");
  try {
    cfg.stencil = stencil_preset(cfg.stencil_name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (j.contains("stencil_m47") || j.contains("stencil_m48")) {
    if (cfg.stencil.kind != StencilChoice::Kind::Narrow8)
      throw ConfigError("stencil_m47/m48 apply only to 8th-order narrow stencils");
    cfg.stencil.params[0] = get_num(j, "stencil_m47", cfg.stencil.params[0]);
    cfg.stencil.params[1] = get_num(j, "stencil_m48", cfg.stencil.params[1]);
  }
  if (j.contains("stencil_m36")) {
    if (cfg.stencil.kind != StencilChoice::Kind::Narrow6)
      throw ConfigError("stencil_m36 applies only to the 6th-order narrow stencil");
    cfg.stencil.params[0] = get_num(j, "stencil_m36", cfg.stencil.params[0]);
  }

  if (j.contains("grids")) {
    if (!j["grids"].is_array()) throw ConfigError("grids must be an array of integers");
    for (const auto& g : j["grids"]) {
      if (!g.is_number_integer()) throw ConfigError("grids must be an array of integers");
      cfg.resolutions.push_back(g.get<int>());
    }
    for (std::size_t i = 1; i < cfg.resolutions.size(); ++i)
      if (cfg.resolutions[i] <= cfg.resolutions[i - 1])
        throw ConfigError("grids must be sorted ascending");
  }
  if (cfg.problem != StudyConfig::Problem::CostModel && cfg.resolutions.empty())
    throw ConfigError("grids is required for this problem");

  cfg.integrator.family = parse_family(get_str(j, "node_family", "gauss_lobatto"));
  cfg.integrator.num_nodes = get_int(j, "num_nodes", 3);
  cfg.integrator.iterations = get_int(j, "iterations", 4);
  cfg.integrator.residual_ratio_cutoff = get_num(j, "residual_cutoff", 0.05);
  const std::string hier = get_str(j, "hierarchy", "none");
  if (hier == "none")
    cfg.integrator.hierarchy = IntegratorSpec::Hierarchy::None;
  else if (hier == "type_a")
    cfg.integrator.hierarchy = IntegratorSpec::Hierarchy::TypeA;
  else if (hier == "type_b")
    cfg.integrator.hierarchy = IntegratorSpec::Hierarchy::TypeB;
  else if (hier == "type_c")
    cfg.integrator.hierarchy = IntegratorSpec::Hierarchy::TypeC;
  else
    throw ConfigError("unknown hierarchy: " + hier);
  cfg.integrator.fine_family = parse_family(get_str(j, "fine_family", "gauss_lobatto"));
  cfg.integrator.fine_nodes = get_int(j, "fine_nodes", 0);
  cfg.integrator.repeats = get_int(j, "repeats", 1);

  cfg.t_final = get_num(j, "t_final", 1.0);
  const std::string rule = get_str(j, "dt_rule", "appendix");
  if (rule == "appendix")
    cfg.dt_rule = StudyConfig::DtRule::AppendixFormula;
  else if (rule == "fixed")
    cfg.dt_rule = StudyConfig::DtRule::Fixed;
  else if (rule == "halving_list")
    cfg.dt_rule = StudyConfig::DtRule::HalvingList;
  else
    throw ConfigError("unknown dt_rule: " + rule);
  cfg.dt = get_num(j, "dt", 0.0);
  if (cfg.dt_rule == StudyConfig::DtRule::Fixed && !(cfg.dt > 0.0))
    throw ConfigError("dt_rule fixed requires a positive dt");
  if (j.contains("dt_list")) {
    if (!j["dt_list"].is_array()) throw ConfigError("dt_list must be an array of numbers");
    for (const auto& d : j["dt_list"]) {
      if (!d.is_number()) throw ConfigError("dt_list must be an array of numbers");
      cfg.dt_list.push_back(d.get<double>());
    }
  }
  if (cfg.dt_rule == StudyConfig::DtRule::HalvingList &&
      cfg.dt_list.size() != cfg.resolutions.size())
    throw ConfigError("dt_list must have one entry per grid");

  const std::string ref = get_str(j, "reference", "exact");
  if (ref == "exact")
    cfg.reference = StudyConfig::Reference::Exact;
  else if (ref == "highres")
    cfg.reference = StudyConfig::Reference::HighRes;
  else
    throw ConfigError("unknown reference: " + ref);
  cfg.reference_resolution = get_int(j, "reference_n", 640);
  if (cfg.reference == StudyConfig::Reference::HighRes)
    for (int n : cfg.resolutions)
      if (cfg.reference_resolution % n != 0)
        throw ConfigError("reference_n must be divisible by every grid extent");

  cfg.output_path = get_str(j, "output", "");
  cfg.lambda1 = get_num(j, "lambda1", -1.0);
  cfg.lambda2 = get_num(j, "lambda2", -10.0);
  cfg.stiffness = get_num(j, "stiffness", 1.0e4);
  cfg.stiff.rtol = get_num(j, "rtol", 1e-10);
  cfg.stiff.atol = get_num(j, "atol", 1e-12);
  cfg.machine_flops = get_num(j, "flops", 460.8e9);
  cfg.machine_bandwidth = get_num(j, "bandwidth", 8.0e9);
  cfg.components = get_int(j, "N", 64);
  return cfg;
}

StudyConfig load_study_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_study_config(buf.str());
}

std::vector<ConvergenceRow> compute_rates(std::vector<ConvergenceRow> rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i - 1].linf > 0.0 && rows[i].linf > 0.0)
      rows[i].linf_rate = std::log2(rows[i - 1].linf / rows[i].linf);
    if (rows[i - 1].l2 > 0.0 && rows[i].l2 > 0.0)
      rows[i].l2_rate = std::log2(rows[i - 1].l2 / rows[i].l2);
  }
  return rows;
}

namespace {

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string to_csv(const std::vector<ConvergenceRow>& rows) {
  std::string out = "resolution,dt,linf,linf_rate,l2,l2_rate\n";
  for (const ConvergenceRow& r : rows) {
    out += std::to_string(static_cast<long long>(r.resolution));
    out += ',';
    out += fmt6(r.dt);
    out += ',';
    out += fmt6(r.linf);
    out += ',';
    if (r.linf_rate) out += fmt6(*r.linf_rate);
    out += ',';
    out += fmt6(r.l2);
    out += ',';
    if (r.l2_rate) out += fmt6(*r.l2_rate);
    out += '\n';
  }
  return out;
}

std::vector<ConvergenceRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "resolution,dt,linf,linf_rate,l2,l2_rate")
    throw ConfigError("unrecognized CSV header");
  std::vector<ConvergenceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    while (cells.size() < 6) cells.emplace_back();
    if (cells.size() != 6) throw ConfigError("malformed CSV row: " + line);
    ConvergenceRow r;
    r.resolution = std::stod(cells[0]);
    r.dt = std::stod(cells[1]);
    r.linf = std::stod(cells[2]);
    if (!cells[3].empty()) r.linf_rate = std::stod(cells[3]);
    r.l2 = std::stod(cells[4]);
    if (!cells[5].empty()) r.l2_rate = std::stod(cells[5]);
    rows.push_back(r);
  }
  return rows;
}

namespace {

NodeSet make_nodes(IntegratorSpec::Family family, int n) {
  return family == IntegratorSpec::Family::GaussLobatto ? gauss_lobatto(n) : clenshaw_curtis(n);
}

MultirateHierarchy hierarchy_from_spec(const IntegratorSpec& spec) {
  const NodeSet coarse = make_nodes(spec.family, spec.num_nodes);
  if (spec.fine_nodes < 2) throw ConfigError("fine_nodes must be >= 2 for multirate problems");
  const NodeSet inner = make_nodes(spec.fine_family, spec.fine_nodes);
  switch (spec.hierarchy) {
    case IntegratorSpec::Hierarchy::TypeA:
      return build_hierarchy(coarse, TypeA{inner});
    case IntegratorSpec::Hierarchy::TypeB:
      return build_hierarchy(coarse, TypeB{inner});
    case IntegratorSpec::Hierarchy::TypeC:
      return build_hierarchy(coarse, TypeC{inner, spec.repeats});
    case IntegratorSpec::Hierarchy::None:
      break;
  }
  throw ConfigError("this problem requires hierarchy type_a, type_b, or type_c");
}

StepControls controls_from_spec(const IntegratorSpec& spec) {
  StepControls c;
  c.num_iterations = spec.iterations;
  c.residual_ratio_cutoff = spec.residual_ratio_cutoff;
  return c;
}

struct StepRule {
  int steps = 0;
  double dt = 0.0;
};

StepRule resolve_steps(const StudyConfig& cfg, double dt_hint) {
  StepRule r;
  if (!(dt_hint > 0.0) || cfg.t_final <= 0.0) return r;
  r.steps = static_cast<int>(std::ceil(cfg.t_final / dt_hint - 1e-9));
  if (r.steps < 1) r.steps = 1;
  r.dt = cfg.t_final / r.steps;
  return r;
}

ConvergenceRow heat_row(const StudyConfig& cfg, const HeatProblem& prob, int n,
                        const Field2D* ref, double dt_hint) {
  const Grid2D grid{n, n};
  HeatOperator op(prob, grid, cfg.stencil);
  const StepRule rule = resolve_steps(cfg, dt_hint);

  Field2D u = eval_on_grid(grid, prob.u0);
  if (rule.steps > 0) {
    auto [uend, diag] = integrate_sdc(op.as_rhs(), u.v, 0.0, cfg.t_final, rule.steps,
                                      make_nodes(cfg.integrator.family, cfg.integrator.num_nodes),
                                      controls_from_spec(cfg.integrator));
    u.v = std::move(uend);
  }

  Field2D reference;
  if (ref) {
    reference = restrict_sample(*ref, n, n);
  } else {
    if (!prob.exact) throw ConfigError("exact reference requested but unavailable");
    const double t = cfg.t_final;
    reference = eval_on_grid(grid, [&](double x, double y) { return prob.exact(t, x, y); });
  }
  const ErrorNorms e = error_norms(u, reference);
  ConvergenceRow row;
  row.resolution = n;
  row.dt = rule.dt;
  row.linf = e.linf;
  row.l2 = e.l2;
  row.precision_limited = e.linf < 1e-13;
  return row;
}

std::vector<ConvergenceRow> run_heat_study(const StudyConfig& cfg) {
  const HeatProblem prob = cfg.problem == StudyConfig::Problem::T1 ? make_t1() : make_t2();
  Field2D ref;
  const bool highres = cfg.reference == StudyConfig::Reference::HighRes;
  if (highres) {
    const int nr = cfg.reference_resolution;
    const Grid2D rg{nr, nr};
    HeatOperator op(prob, rg, cfg.stencil);
    const StepRule rule = resolve_steps(cfg, appendix_dt(rg, prob));
    ref = eval_on_grid(rg, prob.u0);
    std::cout << "reference run " << nr << "^2, " << rule.steps << " steps\n";
    if (rule.steps > 0) {
      auto [uend, diag] =
          integrate_sdc(op.as_rhs(), ref.v, 0.0, cfg.t_final, rule.steps,
                        make_nodes(cfg.integrator.family, cfg.integrator.num_nodes),
                        controls_from_spec(cfg.integrator));
      ref.v = std::move(uend);
    }
  }

  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 0; i < cfg.resolutions.size(); ++i) {
    const int n = cfg.resolutions[i];
    double dt_hint = 0.0;
    switch (cfg.dt_rule) {
      case StudyConfig::DtRule::AppendixFormula:
        dt_hint = appendix_dt(Grid2D{n, n}, prob);
        break;
      case StudyConfig::DtRule::Fixed:
        dt_hint = cfg.dt;
        break;
      case StudyConfig::DtRule::HalvingList:
        dt_hint = cfg.dt_list[i];
        break;
    }
    rows.push_back(heat_row(cfg, prob, n, highres ? &ref : nullptr, dt_hint));
  }
  return rows;
}

std::vector<ConvergenceRow> run_ode_study(const StudyConfig& cfg) {
  std::vector<ConvergenceRow> rows;
  for (int steps : cfg.resolutions) {
    if (steps < 1) throw ConfigError("ODE studies use step counts as grid entries");
    const double dt = cfg.t_final / steps;
    double value = 0.0, exact = 0.0;
    if (cfg.problem == StudyConfig::Problem::SdcOrderODE) {
      const double l = cfg.lambda1;
      Rhs f = [l](double, const Field& u, Field& out) { out[0] = l * u[0]; };
      auto [u, diag] = integrate_sdc(f, Field{1.0}, 0.0, cfg.t_final, steps,
                                     make_nodes(cfg.integrator.family, cfg.integrator.num_nodes),
                                     controls_from_spec(cfg.integrator));
      value = u[0];
      exact = std::exp(l * cfg.t_final);
    } else if (cfg.problem == StudyConfig::Problem::MrsdcMode1ODE) {
      const SplitLinearProblem p = make_split_linear(cfg.lambda1, cfg.lambda2);
      auto [u, diag] = integrate_mrsdc(p.rhs, Field{1.0}, 0.0, cfg.t_final, steps,
                                       hierarchy_from_spec(cfg.integrator),
                                       controls_from_spec(cfg.integrator));
      value = u[0];
      exact = p.exact(1.0, cfg.t_final);
    } else {
      const double sigma = cfg.stiffness;
      SplitRHS rhs;
      rhs.f1 = [sigma](double t, const Field& u, Field& out) {
        out[0] = -sigma * (u[0] - std::cos(t));
      };
      rhs.f2 = [](double t, const Field&, Field& out) { out[0] = -std::sin(t); };
      rhs.f1_stiffness = SplitRHS::Stiffness::Implicit;
      auto [u, diag] =
          integrate_mrsdc(rhs, Field{1.0}, 0.0, cfg.t_final, steps,
                          hierarchy_from_spec(cfg.integrator), controls_from_spec(cfg.integrator),
                          cfg.stiff);
      value = u[0];
      exact = std::cos(cfg.t_final);
    }
    ConvergenceRow row;
    row.resolution = steps;
    row.dt = dt;
    row.linf = row.l2 = std::fabs(value - exact);
    row.precision_limited = row.linf < 1e-13;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::vector<ConvergenceRow> run_study(const StudyConfig& cfg) {
  if (cfg.problem == StudyConfig::Problem::CostModel) {
    const MachineModel m{cfg.machine_flops, cfg.machine_bandwidth};
    const long long n = cfg.components;
    std::cout << "cost model: N=" << n << " narrow_flops=" << narrow_flops(n)
              << " wide_flops=" << wide_flops(n) << " time_delta=" << time_delta(n, m)
              << " s crossover_bandwidth=" << crossover_bandwidth(n, m.flops) << " B/s\n";
    return {};
  }

  std::vector<ConvergenceRow> rows =
      (cfg.problem == StudyConfig::Problem::T1 || cfg.problem == StudyConfig::Problem::T2)
          ? run_heat_study(cfg)
          : run_ode_study(cfg);
  rows = compute_rates(rows);

  for (const ConvergenceRow& r : rows) {
    std::cout << "N=" << r.resolution << " dt=" << fmt6(r.dt) << " linf=" << fmt6(r.linf);
    if (r.linf_rate) std::cout << " rate=" << fmt6(*r.linf_rate);
    std::cout << " l2=" << fmt6(r.l2);
    if (r.l2_rate) std::cout << " rate=" << fmt6(*r.l2_rate);
    if (r.precision_limited) std::cout << "  (precision-limited)";
    std::cout << '\n';
  }
  if (!cfg.output_path.empty()) {
    std::ofstream out(cfg.output_path);
    if (!out) throw ConfigError("cannot write output file: " + cfg.output_path);
    out << to_csv(rows);
  }
  return rows;
}

}  // namespace nsdc
