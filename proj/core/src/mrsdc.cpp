#include "nsdc/mrsdc.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "nsdc/errors.hpp"

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

double mrsdc_residual(const MRSweepState& state, const Field& u0, double dt,
                      const MultirateHierarchy& h) {
  const int last = h.q22.rows - 1;
  const std::size_t dim = u0.size();
  double r = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    double acc = 0.0;
    for (int j = 0; j < h.q21.cols; ++j) acc += h.q21(last, j) * state.f1[j][i];
    for (int j = 0; j < h.q22.cols; ++j) acc += h.q22(last, j) * state.f2[j][i];
    r = std::max(r, std::fabs(u0[i] + dt * acc - state.u[h.q22.cols - 1][i]));
  }
  return r;
}

MrsdcStepper::MrsdcStepper(MultirateHierarchy h, StepControls controls, StiffOptions stiff)
    : h_(std::move(h)), controls_(controls), stiff_(stiff) {
  if (controls_.num_iterations < 1)
    throw std::invalid_argument("MrsdcStepper: need at least one sweep");
}

void MrsdcStepper::provisional(const SplitRHS& rhs, const Field& u0, double t_n,
                               const Field* f0_1, const Field* f0_2, MrsdcDiagnostics& diag) {
  const int m1 = h_.coarse.intervals();
  const int m2 = h_.fine.intervals();
  const std::size_t dim = u0.size();
  state_.u.assign(m2 + 1, u0);
  state_.f1.assign(m1 + 1, Field(dim));
  state_.f2.assign(m2 + 1, Field(dim));
  state_.k = 0;
  if (f0_1 && controls_.reuse_first_eval) {
    state_.f1[0] = *f0_1;
  } else {
    rhs.f1(t_n, u0, state_.f1[0]);
    ++diag.f1_evals;
  }
  if (f0_2 && controls_.reuse_first_eval) {
    state_.f2[0] = *f0_2;
  } else {
    rhs.f2(t_n, u0, state_.f2[0]);
    ++diag.f2_evals;
  }
  for (int p = 1; p <= m1; ++p) state_.f1[p] = state_.f1[0];
  for (int q = 1; q <= m2; ++q) state_.f2[q] = state_.f2[0];
}

// dt * (s21 F1 + s22 F2) per fine sub-interval, from the current node values.
void MrsdcStepper::accumulate_node_terms(double dt) {
  const int m2 = h_.fine.intervals();
  const std::size_t dim = state_.u[0].size();
  s_old_.assign(m2, Field(dim));
  for (int q = 0; q < m2; ++q) {
    Field& row = s_old_[q];
    for (std::size_t i = 0; i < dim; ++i) {
      double acc = 0.0;
      for (int j = 0; j < h_.s21.cols; ++j) acc += h_.s21(q, j) * state_.f1[j][i];
      for (int j = 0; j < h_.s22.cols; ++j) acc += h_.s22(q, j) * state_.f2[j][i];
      row[i] = dt * acc;
    }
  }
}

MrsdcStepper::Result MrsdcStepper::step_mode1(const SplitRHS& rhs, const Field& u0, double t_n,
                                              double dt, const Field* f0_1, const Field* f0_2) {
  const int m1 = h_.coarse.intervals();
  const int m2 = h_.fine.intervals();
  const std::size_t dim = u0.size();
  const std::vector<double>& t1 = h_.coarse.nodes;
  const std::vector<double>& t2 = h_.fine.nodes;
  MrsdcDiagnostics diag;
  provisional(rhs, u0, t_n, f0_1, f0_2, diag);

  // Coarse node reached when the sweep lands on its fine position.
  std::vector<int> coarse_at(m2 + 1, -1);
  for (int p = 0; p <= m1; ++p) coarse_at[h_.fine_of_coarse[p]] = p;

  std::vector<Field> old_f1;
  Field fold(dim);
  for (int k = 1; k <= controls_.num_iterations; ++k) {
    state_.k = k;
    accumulate_node_terms(dt);
    old_f1 = state_.f1;
    fold = state_.f2[0];
    for (int q = 0; q < m2; ++q) {
      const double dtq = (t2[q + 1] - t2[q]) * dt;
      const int p = h_.p_map[q];
      Field& next = state_.u[q + 1];
      const Field& cur = state_.u[q];
      for (std::size_t i = 0; i < dim; ++i)
        next[i] = cur[i] + dtq * (state_.f1[p][i] - old_f1[p][i]) +
                  dtq * (state_.f2[q][i] - fold[i]) + s_old_[q][i];
      fold = state_.f2[q + 1];
      rhs.f2(t_n + t2[q + 1] * dt, next, state_.f2[q + 1]);
      ++diag.f2_evals;
      if (const int pc = coarse_at[q + 1]; pc > 0) {
        rhs.f1(t_n + t1[pc] * dt, next, state_.f1[pc]);
        ++diag.f1_evals;
      }
    }
    diag.sweeps = k;
    diag.residual_history.push_back(mrsdc_residual(state_, u0, dt, h_));
    if (residual_stalled(diag.residual_history, controls_.residual_ratio_cutoff)) {
      diag.early_stop = true;
      break;
    }
  }

  Result out;
  out.u = state_.u[m2];
  out.f1_end = state_.f1[m1];
  out.f2_end = state_.f2[m2];
  out.diag = std::move(diag);
  return out;
}

MrsdcStepper::Result MrsdcStepper::step_mode2(const SplitRHS& rhs, const Field& u0, double t_n,
                                              double dt, const Field* f0_1, const Field* f0_2) {
  const int m1 = h_.coarse.intervals();
  const int m2 = h_.fine.intervals();
  const std::size_t dim = u0.size();
  const std::vector<double>& t1 = h_.coarse.nodes;
  const std::vector<double>& t2 = h_.fine.nodes;
  MrsdcDiagnostics diag;
  provisional(rhs, u0, t_n, f0_1, f0_2, diag);

  std::vector<Field> old_f1;
  Field fold(dim), c(dim);
  for (int k = 1; k <= controls_.num_iterations; ++k) {
    state_.k = k;
    accumulate_node_terms(dt);
    old_f1 = state_.f1;
    fold = state_.f2[0];
    for (int p = 0; p < m1; ++p) {
      const int q0 = h_.fine_of_coarse[p];
      const int q1 = h_.fine_of_coarse[p + 1];
      const double dt1 = (t1[p + 1] - t1[p]) * dt;
      const double t_right = t_n + t1[p + 1] * dt;

      // Backward-Euler-form correction at the right coarse node:
      //   w = U_q0 + dt1 * (f1(w) - F1_old) + integral over the interval.
      // Its solution is the new coarse-node state; the fine sweep below then
      // distributes the bracket (f1_new - F1_old) across the sub-steps.
      for (std::size_t i = 0; i < dim; ++i) {
        double acc = 0.0;
        for (int q = q0; q < q1; ++q) acc += s_old_[q][i];
        c[i] = state_.u[q0][i] + acc - dt1 * old_f1[p + 1][i];
      }
      NewtonReport rep;
      Field w = solve_backward_euler(rhs.f1, t_right, dt1, c, state_.u[q1], stiff_, &rep);
      ++diag.implicit_solves;
      diag.newton_f1_evals += rep.f_evals;
      if (!rep.converged)
        throw IntegrationError("mrsdc mode 2: Newton failed at coarse node " +
                               std::to_string(p + 1) + ", sweep " + std::to_string(k) +
                               ", residual " + std::to_string(rep.final_residual));
      rhs.f1(t_right, w, state_.f1[p + 1]);
      ++diag.f1_evals;

      for (int q = q0; q < q1; ++q) {
        const double dtq = (t2[q + 1] - t2[q]) * dt;
        Field& next = state_.u[q + 1];
        const Field& cur = state_.u[q];
        for (std::size_t i = 0; i < dim; ++i)
          next[i] = cur[i] + dtq * (state_.f1[p + 1][i] - old_f1[p + 1][i]) +
                    dtq * (state_.f2[q][i] - fold[i]) + s_old_[q][i];
        fold = state_.f2[q + 1];
        rhs.f2(t_n + t2[q + 1] * dt, next, state_.f2[q + 1]);
        ++diag.f2_evals;
      }
    }
    diag.sweeps = k;
    diag.residual_history.push_back(mrsdc_residual(state_, u0, dt, h_));
    if (residual_stalled(diag.residual_history, controls_.residual_ratio_cutoff)) {
      diag.early_stop = true;
      break;
    }
  }

  Result out;
  out.u = state_.u[m2];
  out.f1_end = state_.f1[m1];
  out.f2_end = state_.f2[m2];
  out.diag = std::move(diag);
  return out;
}

std::pair<Field, MrsdcDiagnostics> mrsdc_step_mode1(const SplitRHS& rhs, const Field& u0,
                                                    double t_n, double dt,
                                                    const MultirateHierarchy& h,
                                                    const StepControls& controls) {
  MrsdcStepper stepper(h, controls);
  MrsdcStepper::Result r = stepper.step_mode1(rhs, u0, t_n, dt);
  return {std::move(r.u), std::move(r.diag)};
}

std::pair<Field, MrsdcDiagnostics> mrsdc_step_mode2(const SplitRHS& rhs, const Field& u0,
                                                    double t_n, double dt,
                                                    const MultirateHierarchy& h,
                                                    const StepControls& controls,
                                                    const StiffOptions& stiff) {
  MrsdcStepper stepper(h, controls, stiff);
  MrsdcStepper::Result r = stepper.step_mode2(rhs, u0, t_n, dt);
  return {std::move(r.u), std::move(r.diag)};
}

std::pair<Field, MrsdcDiagnostics> integrate_mrsdc(const SplitRHS& rhs, const Field& u0,
                                                   double t0, double t1, int nsteps,
                                                   const MultirateHierarchy& h,
                                                   const StepControls& controls,
                                                   const StiffOptions& stiff) {
  if (nsteps < 0) throw std::invalid_argument("integrate_mrsdc: negative step count");
  const bool implicit = rhs.f1_stiffness == SplitRHS::Stiffness::Implicit;
  MrsdcStepper stepper(h, controls, stiff);
  Field u = u0;
  Field f1_carry, f2_carry;
  MrsdcDiagnostics total;
  const double dt = (t1 - t0) / std::max(nsteps, 1);
  for (int step = 0; step < nsteps; ++step) {
    const Field* c1 = step == 0 ? nullptr : &f1_carry;
    const Field* c2 = step == 0 ? nullptr : &f2_carry;
    MrsdcStepper::Result r = implicit
                                 ? stepper.step_mode2(rhs, u, t0 + step * dt, dt, c1, c2)
                                 : stepper.step_mode1(rhs, u, t0 + step * dt, dt, c1, c2);
    u = std::move(r.u);
    f1_carry = std::move(r.f1_end);
    f2_carry = std::move(r.f2_end);
    total.sweeps += r.diag.sweeps;
    total.f1_evals += r.diag.f1_evals;
    total.f2_evals += r.diag.f2_evals;
    total.implicit_solves += r.diag.implicit_solves;
    total.newton_f1_evals += r.diag.newton_f1_evals;
    total.early_stop = total.early_stop || r.diag.early_stop;
    total.residual_history.insert(total.residual_history.end(),
                                  r.diag.residual_history.begin(),
                                  r.diag.residual_history.end());
  }
  return {std::move(u), std::move(total)};
}

}  // namespace nsdc
