#pragma once

#include <vector>

#include "nsdc/field.hpp"
#include "nsdc/matrix.hpp"
#include "nsdc/quadrature.hpp"

namespace nsdc {

/// Knobs shared by all deferred-correction sweeps.
struct StepControls {
  int num_iterations = 4;
  /// Early-stop when the residual stalls: stop after sweep k if
  /// |R_{k-1}| / |R_k| lies within this fraction of 1. Non-positive
  /// disables the check.
  double residual_ratio_cutoff = 0.05;
  /// Reuse a caller-provided f(u0) instead of evaluating it afresh.
  bool reuse_first_eval = true;
};

/// Node values carried through one step: U[m] and F[m] = f(U[m]) at each
/// quadrature node, plus the sweep counter.
struct SweepState {
  std::vector<Field> u;
  std::vector<Field> f;
  int k = 0;
};

struct SweepDiagnostics {
  std::vector<double> residual_history;
  int sweeps = 0;
  int fresh_evals = 0;
  bool early_stop = false;
};

/// Max-norm of the collocation residual u0 + dt * (q F) - U_M where q is the
/// last row of the prefix-integration matrix.
double sdc_residual(const SweepState& state, const Field& u0, double dt, const Matrix& q);

/// Single-rate spectral deferred corrections over one step [t_n, t_n + dt].
///
/// The stepper owns its workspaces, so one instance serves a whole
/// integration; it is not safe to share across threads.
class SdcStepper {
 public:
  SdcStepper(NodeSet nodes, StepControls controls);

  /// Advances u0 by dt. If f0 is non-null it must equal f(t_n, u0) and is
  /// reused as the first-node evaluation. On return u holds the solution at
  /// t_n + dt and f_end the right-hand side at the final node, suitable to
  /// pass as f0 of the next step.
  struct Result {
    Field u;
    Field f_end;
    SweepDiagnostics diag;
  };
  Result step(const Rhs& f, const Field& u0, double t_n, double dt, const Field* f0 = nullptr);

  const NodeSet& nodes() const { return nodes_; }
  const IntegrationMatrices& matrices() const { return mats_; }
  const SweepState& state() const { return state_; }

 private:
  NodeSet nodes_;
  IntegrationMatrices mats_;
  StepControls controls_;
  SweepState state_;
};

/// One-shot convenience wrapper around SdcStepper::step.
std::pair<Field, SweepDiagnostics> sdc_step(const Rhs& f, const Field& u0, double t_n,
                                            double dt, const NodeSet& nodes,
                                            const StepControls& controls);

/// Fixed-step integration from t0 to t1 in nsteps steps, recycling the
/// final-node evaluation between steps. Diagnostics are summed over steps.
std::pair<Field, SweepDiagnostics> integrate_sdc(const Rhs& f, const Field& u0, double t0,
                                                 double t1, int nsteps, const NodeSet& nodes,
                                                 const StepControls& controls);

/// Solves the collocation equations U_m = u0 + dt * sum_j Q(m, j) A U_j
/// exactly (up to linear algebra) for the linear system u' = A u. Returns
/// the state at every node. Independent of the sweep machinery; used as the
/// reference the sweeps must converge to.
std::vector<Field> collocation_oracle(const Matrix& a, const Field& u0, double dt,
                                      const NodeSet& nodes);

}  // namespace nsdc
