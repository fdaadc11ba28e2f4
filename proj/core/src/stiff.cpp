#include "nsdc/stiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "nsdc/errors.hpp"

namespace nsdc {
namespace {

// One-sided finite-difference Jacobian of f at (t, w); fw = f(t, w) is
// already available.
void fd_jacobian(const Rhs& f, double t, const Field& w, const Field& fw,
                 const StiffOptions& opts, Matrix& jac, Field& wp, Field& fp, int& evals) {
  const int d = static_cast<int>(w.size());
  const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  wp = w;
  for (int col = 0; col < d; ++col) {
    const double h = root_eps * std::max(std::fabs(w[col]), opts.atol);
    const double saved = wp[col];
    wp[col] = saved + h;
    f(t, wp, fp);
    ++evals;
    wp[col] = saved;
    const double inv = 1.0 / h;
    for (int row = 0; row < d; ++row) jac(row, col) = (fp[row] - fw[row]) * inv;
  }
}

}  // namespace

Field solve_backward_euler(const Rhs& f, double t_eval, double beta, const Field& c,
                           const Field& guess, const StiffOptions& opts, NewtonReport* report) {
  const int d = static_cast<int>(c.size());
  Field w = guess;
  Field fw(d), fp(d), wp(d);
  std::vector<double> delta(d);
  Matrix jf(d, d), jg(d, d);
  std::vector<int> piv;
  NewtonReport local;
  NewtonReport& rep = report ? *report : local;
  rep = NewtonReport{};

  for (int iter = 0; iter < opts.max_newton_iters; ++iter) {
    f(t_eval, w, fw);
    ++rep.f_evals;
    double rnorm = 0.0;
    for (int i = 0; i < d; ++i) {
      delta[i] = w[i] - beta * fw[i] - c[i];
      rnorm = std::max(rnorm, std::fabs(delta[i]));
    }
    rep.final_residual = rnorm;
    if (rnorm <= opts.atol + opts.rtol * max_norm(w)) {
      rep.converged = true;
      break;
    }
    if (opts.jacobian == StiffOptions::Jacobian::UserSupplied) {
      if (!opts.user_jacobian)
        throw std::invalid_argument("solve_backward_euler: user Jacobian not provided");
      opts.user_jacobian(t_eval, w, jf);
    } else {
      fd_jacobian(f, t_eval, w, fw, opts, jf, wp, fp, rep.f_evals);
    }
    for (int r = 0; r < d; ++r)
      for (int cc = 0; cc < d; ++cc)
        jg(r, cc) = (r == cc ? 1.0 : 0.0) - beta * jf(r, cc);
    if (!lu_factor(jg, piv)) break;
    lu_solve(jg, piv, delta);
    for (int i = 0; i < d; ++i) w[i] -= delta[i];
    rep.iterations = iter + 1;  // counts Newton updates actually applied
  }
  if (!rep.converged && !report)
    throw IntegrationError("backward-Euler Newton failed: residual " +
                           std::to_string(rep.final_residual) + " after " +
                           std::to_string(rep.iterations) + " iterations");
  return w;
}

namespace {

// Variable-step BDF2 solve from (u_nm1, u_n) to t + h, rho = h / h_prev.
bool bdf2_solve(const Rhs& f, double t_new, double h, double rho, const Field& u_nm1,
                const Field& u_n, const StiffOptions& opts, Field& out) {
  const int d = static_cast<int>(u_n.size());
  const double denom = 1.0 + 2.0 * rho;
  Field c(d), guess(d);
  for (int i = 0; i < d; ++i) {
    c[i] = ((1.0 + rho) * (1.0 + rho) * u_n[i] - rho * rho * u_nm1[i]) / denom;
    guess[i] = u_n[i] + rho * (u_n[i] - u_nm1[i]);
  }
  NewtonReport rep;
  out = solve_backward_euler(f, t_new, h * (1.0 + rho) / denom, c, guess, opts, &rep);
  return rep.converged;
}

bool be_solve(const Rhs& f, double t_new, double h, const Field& u_n, const StiffOptions& opts,
              Field& out) {
  NewtonReport rep;
  out = solve_backward_euler(f, t_new, h, u_n, u_n, opts, &rep);
  return rep.converged;
}

double diff_norm(const Field& full, const Field& half) {
  double e = 0.0;
  for (std::size_t i = 0; i < full.size(); ++i)
    e = std::max(e, std::fabs(full[i] - half[i]));
  return e;
}

// Leading local-error coefficient of one variable-step BDF2 step with step
// ratio rho: LTE = c(rho) h^3 y''' + O(h^4).
double bdf2_coeff(double rho) {
  return -(1.0 + rho) * (1.0 + rho) / (6.0 * rho * (1.0 + 2.0 * rho));
}

}  // namespace

Field integrate_stiff(const Rhs& f, const Field& u0, double t0, double t1,
                      const StiffOptions& opts) {
  const double span = t1 - t0;
  if (span == 0.0) return u0;
  if (span < 0.0) throw std::invalid_argument("integrate_stiff: t1 must be >= t0");
  if (opts.rtol <= 0.0 || opts.atol < 0.0)
    throw std::invalid_argument("integrate_stiff: bad tolerances");

  Field u = u0, u_prev;
  double t = t0;
  double h_prev = 0.0;
  double h = std::clamp(opts.initial_step_fraction, 1e-12, 1.0) * span;
  const double h_min = 1e-14 * span;
  bool have_history = false;

  Field y_full, y_mid, y_half;
  while (t < t1) {
    h = std::min(h, t1 - t);
    if (h < h_min)
      throw IntegrationError("integrate_stiff: step size collapsed at t = " + std::to_string(t));

    // weight turns the full/half difference into the half-composite error and
    // into the Richardson correction applied on acceptance. For the BDF2 pair
    // the two legs carry step-ratio-dependent coefficients, so the classic
    // constant-step value 1/3 is replaced by the exact ratio.
    bool newton_ok;
    double weight;
    if (!have_history) {
      // Backward Euler with step doubling until two accepted states exist.
      newton_ok = be_solve(f, t + h, h, u, opts, y_full) &&
                  be_solve(f, t + 0.5 * h, 0.5 * h, u, opts, y_mid) &&
                  be_solve(f, t + h, 0.5 * h, y_mid, opts, y_half);
      weight = 1.0;
    } else {
      const double rho_full = h / h_prev;
      const double rho_mid = 0.5 * h / h_prev;
      newton_ok = bdf2_solve(f, t + h, h, rho_full, u_prev, u, opts, y_full) &&
                  bdf2_solve(f, t + 0.5 * h, 0.5 * h, rho_mid, u_prev, u, opts, y_mid) &&
                  bdf2_solve(f, t + h, 0.5 * h, 1.0, u, y_mid, opts, y_half);
      const double c_full = bdf2_coeff(rho_full);
      // second leg amplifies the first leg's error by (1+rho)^2/(1+2rho) at
      // rho = 1, hence the 4/3 on the first coefficient.
      const double c_half = ((4.0 / 3.0) * bdf2_coeff(rho_mid) + bdf2_coeff(1.0)) / 8.0;
      weight = std::clamp(c_half / (c_full - c_half), 0.05, 2.0);
    }
    if (!newton_ok) {
      h *= 0.5;
      continue;
    }
    const double err = weight * diff_norm(y_full, y_half);

    const double p = have_history ? 3.0 : 2.0;  // order + 1 of the formula in use
    const double tol = opts.rtol * max_norm(y_half) + opts.atol;
    if (err <= tol) {
      for (std::size_t i = 0; i < y_half.size(); ++i)
        y_half[i] += weight * (y_half[i] - y_full[i]);
      u_prev = std::move(u);
      u = std::move(y_half);
      t += h;
      h_prev = h;
      have_history = true;
      y_half = Field();
    }
    double factor = err > 0.0 ? 0.9 * std::pow(tol / err, 1.0 / p) : 5.0;
    factor = std::clamp(factor, 0.2, 5.0);
    h *= factor;
  }
  return u;
}

}  // namespace nsdc
