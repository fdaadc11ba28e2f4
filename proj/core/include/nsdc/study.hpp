#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nsdc/costmodel.hpp"
#include "nsdc/stencil.hpp"
#include "nsdc/stiff.hpp"

namespace nsdc {

/// What a study integrates and how the two node levels are laid out.
/// hierarchy None means single-rate.
struct IntegratorSpec {
  enum class Family { GaussLobatto, ClenshawCurtis };
  enum class Hierarchy { None, TypeA, TypeB, TypeC };

  Family family = Family::GaussLobatto;
  int num_nodes = 3;
  int iterations = 4;
  Hierarchy hierarchy = Hierarchy::None;
  Family fine_family = Family::GaussLobatto;
  int fine_nodes = 0;
  int repeats = 1;
  double residual_ratio_cutoff = 0.05;
};

/// Declarative description of a convergence study, parsed from a flat JSON
/// object (one level of keys, no nesting).
struct StudyConfig {
  enum class Problem { T1, T2, SdcOrderODE, MrsdcMode1ODE, MrsdcMode2ODE, CostModel };
  enum class DtRule { AppendixFormula, Fixed, HalvingList };
  enum class Reference { Exact, HighRes };

  Problem problem = Problem::T1;
  StencilChoice stencil = StencilChoice::narrow8(kSmcM47, kSmcM48);
  std::string stencil_name = "SMC";
  std::vector<int> resolutions;
  IntegratorSpec integrator;
  double t_final = 1.0;
  DtRule dt_rule = DtRule::AppendixFormula;
  double dt = 0.0;                // Fixed
  std::vector<double> dt_list;    // HalvingList
  Reference reference = Reference::Exact;
  int reference_resolution = 0;   // HighRes
  std::string output_path;
  double lambda1 = 0.0;           // ODE problems
  double lambda2 = 0.0;
  double stiffness = 1.0e4;       // MrsdcMode2ODE
  StiffOptions stiff;
  double machine_flops = 0.0;     // CostModel
  double machine_bandwidth = 0.0;
  long long components = 0;
};

/// One line of a convergence table. Rates are empty on the first row and
/// whenever the previous error vanishes.
struct ConvergenceRow {
  double resolution = 0.0;  // grid extent, or 1/dt for pure-ODE studies
  double dt = 0.0;
  double linf = 0.0;
  std::optional<double> linf_rate;
  double l2 = 0.0;
  std::optional<double> l2_rate;
  bool precision_limited = false;  // console annotation only, not in the CSV
};

/// Parses a config from JSON text / from a file. Unknown keys, wrong types,
/// or inconsistent combinations raise ConfigError.
StudyConfig parse_study_config(const std::string& json_text);
StudyConfig load_study_config(const std::string& path);

/// Fills in successive-refinement rates log2(E_coarse / E_fine) in place and
/// returns the rows. A vanishing previous error leaves the rate empty.
std::vector<ConvergenceRow> compute_rates(std::vector<ConvergenceRow> rows);

/// CSV with the fixed header resolution,dt,linf,linf_rate,l2,l2_rate and
/// six-significant-digit values; blank cells for missing rates. parse_csv
/// inverts to_csv bit-for-bit on the printed precision.
std::string to_csv(const std::vector<ConvergenceRow>& rows);
std::vector<ConvergenceRow> parse_csv(const std::string& text);

/// Runs the study, writes the CSV when output_path is set, logs one line per
/// row to stdout, and returns the rows with rates filled in.
std::vector<ConvergenceRow> run_study(const StudyConfig& cfg);

}  // namespace nsdc
