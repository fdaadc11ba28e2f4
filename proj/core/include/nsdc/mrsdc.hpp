#pragma once

#include <vector>

#include "nsdc/field.hpp"
#include "nsdc/quadrature.hpp"
#include "nsdc/sdc.hpp"
#include "nsdc/stiff.hpp"

namespace nsdc {

/// Additive splitting u' = f1 + f2 with f1 on the coarse node set and f2 on
/// the fine one.
struct SplitRHS {
  Rhs f1;
  Rhs f2;
  enum class Stiffness { Explicit, Implicit };
  Stiffness f1_stiffness = Stiffness::Explicit;
};

/// Node values of a multirate sweep: U and F2 at every fine node, F1 at the
/// fine positions of the coarse nodes (indexed by coarse node).
struct MRSweepState {
  std::vector<Field> u;
  std::vector<Field> f1;  // size M1 + 1
  std::vector<Field> f2;  // size M2 + 1
  int k = 0;
};

struct MrsdcDiagnostics {
  std::vector<double> residual_history;
  int sweeps = 0;
  int f1_evals = 0;
  int f2_evals = 0;
  int implicit_solves = 0;
  int newton_f1_evals = 0;  // f1 evaluations consumed inside Newton, counted apart
  bool early_stop = false;
};

/// Max-norm of the two-rate collocation residual
///   u0 + dt * (q21 F1 + q22 F2) - U_M2
/// using the last rows of the prefix matrices.
double mrsdc_residual(const MRSweepState& state, const Field& u0, double dt,
                      const MultirateHierarchy& h);

/// Multirate deferred corrections over one step. Mode 1 treats both terms
/// explicitly, refreshing f1 only when a sweep crosses a coarse node. Mode 2
/// treats f1 implicitly: per coarse sub-interval one backward-Euler-form
/// Newton solve absorbs the stiff update, then the fine sweep proceeds
/// explicitly in f2 against the frozen coarse bracket.
class MrsdcStepper {
 public:
  MrsdcStepper(MultirateHierarchy h, StepControls controls, StiffOptions stiff = {});

  struct Result {
    Field u;
    Field f1_end;
    Field f2_end;
    MrsdcDiagnostics diag;
  };

  /// f0_1 / f0_2, when non-null, must equal f1 / f2 at (t_n, u0) and are
  /// reused for the first node.
  Result step_mode1(const SplitRHS& rhs, const Field& u0, double t_n, double dt,
                    const Field* f0_1 = nullptr, const Field* f0_2 = nullptr);
  Result step_mode2(const SplitRHS& rhs, const Field& u0, double t_n, double dt,
                    const Field* f0_1 = nullptr, const Field* f0_2 = nullptr);

  const MultirateHierarchy& hierarchy() const { return h_; }
  const MRSweepState& state() const { return state_; }

 private:
  void provisional(const SplitRHS& rhs, const Field& u0, double t_n, const Field* f0_1,
                   const Field* f0_2, MrsdcDiagnostics& diag);
  void accumulate_node_terms(double dt);

  MultirateHierarchy h_;
  StepControls controls_;
  StiffOptions stiff_;
  MRSweepState state_;
  std::vector<Field> s_old_;  // dt * (s21 F1 + s22 F2) rows from previous sweep
};

/// One-shot wrappers.
std::pair<Field, MrsdcDiagnostics> mrsdc_step_mode1(const SplitRHS& rhs, const Field& u0,
                                                    double t_n, double dt,
                                                    const MultirateHierarchy& h,
                                                    const StepControls& controls);
std::pair<Field, MrsdcDiagnostics> mrsdc_step_mode2(const SplitRHS& rhs, const Field& u0,
                                                    double t_n, double dt,
                                                    const MultirateHierarchy& h,
                                                    const StepControls& controls,
                                                    const StiffOptions& stiff);

/// Fixed-step integration recycling end-of-step evaluations, mode selected
/// by rhs.f1_stiffness. Diagnostics are summed over steps.
std::pair<Field, MrsdcDiagnostics> integrate_mrsdc(const SplitRHS& rhs, const Field& u0,
                                                   double t0, double t1, int nsteps,
                                                   const MultirateHierarchy& h,
                                                   const StepControls& controls,
                                                   const StiffOptions& stiff = {});

}  // namespace nsdc
