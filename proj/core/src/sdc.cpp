#include "nsdc/sdc.hpp"

#include <cmath>
#include <stdexcept>

namespace nsdc {
namespace {

bool residual_stalled(const std::vector<double>& history, double cutoff) {
  if (cutoff <= 0.0 || history.size() < 2) return false;
  const double prev = history[history.size() - 2];
  const double cur = history.back();
  if (cur == 0.0) return true;
  const double ratio = prev / cur;
  return ratio >= 1.0 - cutoff && ratio <= 1.0 + cutoff;
}

}  // namespace

double sdc_residual(const SweepState& state, const Field& u0, double dt, const Matrix& q) {
  const int last = q.rows - 1;
  const std::size_t dim = u0.size();
  double r = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    double acc = 0.0;
    for (int j = 0; j < q.cols; ++j) acc += q(last, j) * state.f[j][i];
    r = std::max(r, std::fabs(u0[i] + dt * acc - state.u[q.cols - 1][i]));
  }
  return r;
}

SdcStepper::SdcStepper(NodeSet nodes, StepControls controls)
    : nodes_(std::move(nodes)), mats_(integration_matrices(nodes_)), controls_(controls) {
  if (controls_.num_iterations < 1)
    throw std::invalid_argument("SdcStepper: need at least one sweep");
}

SdcStepper::Result SdcStepper::step(const Rhs& f, const Field& u0, double t_n, double dt,
                                    const Field* f0) {
  const int m_count = nodes_.intervals();
  const std::size_t dim = u0.size();
  const std::vector<double>& tau = nodes_.nodes;
  SweepDiagnostics diag;

  state_.u.assign(m_count + 1, u0);
  state_.f.assign(m_count + 1, Field(dim));
  state_.k = 0;
  if (f0 && controls_.reuse_first_eval) {
    state_.f[0] = *f0;
  } else {
    f(t_n, u0, state_.f[0]);
    ++diag.fresh_evals;
  }
  for (int m = 1; m <= m_count; ++m) state_.f[m] = state_.f[0];

  std::vector<Field> integral(m_count, Field(dim));
  Field fold(dim);

  for (int k = 1; k <= controls_.num_iterations; ++k) {
    state_.k = k;
    for (int m = 0; m < m_count; ++m) {
      Field& row = integral[m];
      for (std::size_t i = 0; i < dim; ++i) {
        double acc = 0.0;
        for (int j = 0; j <= m_count; ++j) acc += mats_.s(m, j) * state_.f[j][i];
        row[i] = dt * acc;
      }
    }
    for (int m = 0; m < m_count; ++m) {
      const double dtm = (tau[m + 1] - tau[m]) * dt;
      Field& next = state_.u[m + 1];
      const Field& cur = state_.u[m];
      if (m == 0) {
        for (std::size_t i = 0; i < dim; ++i) next[i] = cur[i] + integral[0][i];
      } else {
        for (std::size_t i = 0; i < dim; ++i)
          next[i] = cur[i] + dtm * (state_.f[m][i] - fold[i]) + integral[m][i];
      }
      fold = state_.f[m + 1];
      f(t_n + tau[m + 1] * dt, next, state_.f[m + 1]);
      ++diag.fresh_evals;
    }
    diag.sweeps = k;
    diag.residual_history.push_back(sdc_residual(state_, u0, dt, mats_.q));
    if (residual_stalled(diag.residual_history, controls_.residual_ratio_cutoff)) {
      diag.early_stop = true;
      break;
    }
  }

  Result out;
  out.u = state_.u[m_count];
  out.f_end = state_.f[m_count];
  out.diag = std::move(diag);
  return out;
}

std::pair<Field, SweepDiagnostics> sdc_step(const Rhs& f, const Field& u0, double t_n, double dt,
                                            const NodeSet& nodes, const StepControls& controls) {
  SdcStepper stepper(nodes, controls);
  SdcStepper::Result r = stepper.step(f, u0, t_n, dt);
  return {std::move(r.u), std::move(r.diag)};
}

std::pair<Field, SweepDiagnostics> integrate_sdc(const Rhs& f, const Field& u0, double t0,
                                                 double t1, int nsteps, const NodeSet& nodes,
                                                 const StepControls& controls) {
  if (nsteps < 0) throw std::invalid_argument("integrate_sdc: negative step count");
  SdcStepper stepper(nodes, controls);
  Field u = u0;
  Field f_carry;
  SweepDiagnostics total;
  const double dt = (t1 - t0) / std::max(nsteps, 1);
  for (int step = 0; step < nsteps; ++step) {
    SdcStepper::Result r =
        stepper.step(f, u, t0 + step * dt, dt, step == 0 ? nullptr : &f_carry);
    u = std::move(r.u);
    f_carry = std::move(r.f_end);
    total.sweeps += r.diag.sweeps;
    total.fresh_evals += r.diag.fresh_evals;
    total.early_stop = total.early_stop || r.diag.early_stop;
    total.residual_history.insert(total.residual_history.end(),
                                  r.diag.residual_history.begin(),
                                  r.diag.residual_history.end());
  }
  return {std::move(u), std::move(total)};
}

std::vector<Field> collocation_oracle(const Matrix& a, const Field& u0, double dt,
                                      const NodeSet& nodes) {
  const int d = static_cast<int>(u0.size());
  if (a.rows != d || a.cols != d)
    throw std::invalid_argument("collocation_oracle: matrix/state size mismatch");
  const int m_count = nodes.intervals();
  const Matrix q = integration_matrices(nodes).q;
  const int n = (m_count + 1) * d;

  // (I - dt * Qhat x A) U = repeat(u0), with Qhat row 0 zero so U_0 = u0.
  Matrix sys(n, n);
  std::vector<double> rhs(n);
  for (int m = 0; m <= m_count; ++m)
    for (int i = 0; i < d; ++i) {
      const int r = m * d + i;
      sys(r, r) = 1.0;
      rhs[r] = u0[i];
      if (m == 0) continue;
      for (int j = 0; j <= m_count; ++j)
        for (int c = 0; c < d; ++c) sys(r, j * d + c) -= dt * q(m - 1, j) * a(i, c);
    }
  std::vector<int> piv;
  if (!lu_factor(sys, piv))
    throw std::invalid_argument("collocation_oracle: singular collocation system");
  lu_solve(sys, piv, rhs);

  std::vector<Field> out(m_count + 1, Field(d));
  for (int m = 0; m <= m_count; ++m)
    for (int i = 0; i < d; ++i) out[m][i] = rhs[m * d + i];
  return out;
}

}  // namespace nsdc
