#pragma once

#include <functional>

#include "nsdc/field.hpp"
#include "nsdc/matrix.hpp"

namespace nsdc {

struct StiffOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  int max_newton_iters = 16;
  /// First attempted step as a fraction of the interval length.
  double initial_step_fraction = 1e-3;
  enum class Jacobian { FiniteDifference, UserSupplied };
  Jacobian jacobian = Jacobian::FiniteDifference;
  /// Required when jacobian == UserSupplied: writes df/du at (t, u).
  std::function<void(double t, const Field& u, Matrix& j)> user_jacobian;
};

struct NewtonReport {
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  int f_evals = 0;  // includes evaluations spent on finite-difference Jacobians
};

/// Solves the backward-Euler-form algebraic system
///   w = c + beta * f(t_eval, w)
/// by Newton iteration starting from guess. The same kernel backs the stiff
/// integrator's implicit steps and the implicit substep of multirate sweeps.
/// Throws IntegrationError if Newton does not converge and report is null;
/// with a report the caller inspects report->converged instead.
Field solve_backward_euler(const Rhs& f, double t_eval, double beta, const Field& c,
                           const Field& guess, const StiffOptions& opts,
                           NewtonReport* report = nullptr);

/// Integrates u' = f(t, u) from t0 to t1 with an adaptive implicit method:
/// backward Euler to start, variable-step BDF2 once two accepted states
/// exist, error-controlled by step doubling. Intended for stiff problems
/// where explicit stepping is impractical. Throws IntegrationError when the
/// step size collapses without Newton convergence.
Field integrate_stiff(const Rhs& f, const Field& u0, double t0, double t1,
                      const StiffOptions& opts);

}  // namespace nsdc
