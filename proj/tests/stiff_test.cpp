#include "nsdc/stiff.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "nsdc/errors.hpp"

using namespace nsdc;

namespace {

Rhs decay(double lambda) {
  return [lambda](double, const Field& u, Field& out) {
    out.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = lambda * u[i];
  };
}

// Van der Pol oscillator (x, v), classic RK4 with a fixed tiny step. Serves
// as the brute-force reference the implicit integrator is held against.
std::pair<double, double> vdp_rk4(double mu, double x, double v, double t_end, double dt) {
  auto fx = [](double, double vv) { return vv; };
  auto fv = [mu](double xx, double vv) { return mu * (1.0 - xx * xx) * vv - xx; };
  long long n = static_cast<long long>(std::llround(t_end / dt));
  for (long long i = 0; i < n; ++i) {
    double k1x = fx(x, v), k1v = fv(x, v);
    double k2x = fx(x + 0.5 * dt * k1x, v + 0.5 * dt * k1v);
    double k2v = fv(x + 0.5 * dt * k1x, v + 0.5 * dt * k1v);
    double k3x = fx(x + 0.5 * dt * k2x, v + 0.5 * dt * k2v);
    double k3v = fv(x + 0.5 * dt * k2x, v + 0.5 * dt * k2v);
    double k4x = fx(x + dt * k3x, v + dt * k3v);
    double k4v = fv(x + dt * k3x, v + dt * k3v);
    x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
  return {x, v};
}

}  // namespace

TEST_CASE("backward-Euler solve on linear problems") {
  StiffOptions opts;
  NewtonReport report;

  SUBCASE("scalar") {
    // w = 1 + 0.25 * (-2 w)  =>  w = 2/3.
    Field w = solve_backward_euler(decay(-2.0), 0.0, 0.25, {1.0}, {1.0}, opts, &report);
    CHECK(std::abs(w[0] - 2.0 / 3.0) < 1e-12);
    CHECK(report.converged);
    CHECK(report.iterations <= 3);
    CHECK(report.f_evals > 0);
  }

  SUBCASE("diagonal system") {
    Rhs f = [](double, const Field& u, Field& out) {
      out = {-u[0], -10.0 * u[1]};
    };
    Field w = solve_backward_euler(f, 0.0, 0.5, {1.0, 1.0}, {1.0, 1.0}, opts, &report);
    CHECK(std::abs(w[0] - 1.0 / 1.5) < 1e-12);
    CHECK(std::abs(w[1] - 1.0 / 6.0) < 1e-12);
  }

  SUBCASE("user-supplied Jacobian matches finite differences") {
    StiffOptions user = opts;
    user.jacobian = StiffOptions::Jacobian::UserSupplied;
    user.user_jacobian = [](double, const Field&, Matrix& j) { j(0, 0) = -2.0; };
    Field w = solve_backward_euler(decay(-2.0), 0.0, 0.25, {1.0}, {1.0}, user, &report);
    CHECK(std::abs(w[0] - 2.0 / 3.0) < 1e-12);
  }

  SUBCASE("missing user Jacobian is rejected") {
    StiffOptions user = opts;
    user.jacobian = StiffOptions::Jacobian::UserSupplied;
    CHECK_THROWS_AS(solve_backward_euler(decay(-2.0), 0.0, 0.25, {1.0}, {1.0}, user),
                    std::invalid_argument);
  }
}

TEST_CASE("backward-Euler solve reports or throws on non-convergence") {
  // w = 5 + w^2 has no real root, so Newton cannot converge.
  Rhs square = [](double, const Field& u, Field& out) { out = {u[0] * u[0]}; };
  StiffOptions opts;

  NewtonReport report;
  Field w = solve_backward_euler(square, 0.0, 1.0, {5.0}, {0.0}, opts, &report);
  CHECK_FALSE(report.converged);
  CHECK(report.iterations == opts.max_newton_iters);

  CHECK_THROWS_AS(solve_backward_euler(square, 0.0, 1.0, {5.0}, {0.0}, opts),
                  IntegrationError);
}

TEST_CASE("strongly stiff decay reaches machine zero cheaply") {
  StiffOptions opts;  // rtol 1e-8, atol 1e-10
  Field u = integrate_stiff(decay(-1.0e4), {1.0}, 0.0, 1.0, opts);
  // e^{-10^4} is far below atol; the absolute error bound is atol itself.
  CHECK(std::abs(u[0]) <= 1e-10);
}

TEST_CASE("exponential accuracy at tight tolerance") {
  StiffOptions opts;
  opts.rtol = 1e-8;
  opts.atol = 1e-12;
  Field u = integrate_stiff(decay(-2.0), {1.0}, 0.0, 1.0, opts);
  CHECK(std::abs(u[0] - std::exp(-2.0)) <= 5e-8 * std::exp(-2.0));
}

TEST_CASE("A-stability probe: no growth for decaying modes") {
  StiffOptions opts;
  for (double lambda : {0.0, -1.0e2, -1.0e6}) {
    Field u = integrate_stiff(decay(lambda), {1.0}, 0.0, 1.0, opts);
    CHECK(std::abs(u[0]) <= 1.0 + 10.0 * opts.rtol);
  }
}

TEST_CASE("halving rtol never doubles the achieved error") {
  auto err_at = [](double rtol) {
    StiffOptions opts;
    opts.rtol = rtol;
    opts.atol = 1e-14;
    Field u = integrate_stiff(decay(-2.0), {1.0}, 0.0, 1.0, opts);
    return std::abs(u[0] - std::exp(-2.0));
  };
  for (double rtol : {1e-4, 1e-6, 1e-8}) {
    double full = err_at(rtol);
    double half = err_at(0.5 * rtol);
    CHECK(half <= 2.0 * full);
  }
}

TEST_CASE("Van der Pol orbit matches a brute-force reference") {
  // mu = 50 over roughly one relaxation period. The reference is explicit
  // RK4 at dt = 1e-6, accurate to far below the comparison threshold.
  const double mu = 50.0;
  const double t_end = 82.51;
  auto [rx, rv] = vdp_rk4(mu, 2.0, 0.0, t_end, 1e-6);

  Rhs f = [mu](double, const Field& u, Field& out) {
    out = {u[1], mu * (1.0 - u[0] * u[0]) * u[1] - u[0]};
  };
  StiffOptions opts;
  opts.rtol = 1e-9;
  opts.atol = 1e-12;
  Field u = integrate_stiff(f, {2.0, 0.0}, 0.0, t_end, opts);

  double scale = std::max(std::abs(rx), std::abs(rv));
  CHECK(std::abs(u[0] - rx) <= 1e-4 * scale);
  CHECK(std::abs(u[1] - rv) <= 1e-4 * scale);
}

TEST_CASE("integration failure and argument checks") {
  StiffOptions opts;
  CHECK_THROWS_AS(integrate_stiff(decay(-1.0), {1.0}, 1.0, 0.0, opts), std::invalid_argument);

  StiffOptions bad = opts;
  bad.rtol = 0.0;
  CHECK_THROWS_AS(integrate_stiff(decay(-1.0), {1.0}, 0.0, 1.0, bad), std::invalid_argument);

  // u' = u^2 blows up at t = 1; the step size must collapse before then.
  Rhs square = [](double, const Field& u, Field& out) { out = {u[0] * u[0]}; };
  CHECK_THROWS_AS(integrate_stiff(square, {1.0}, 0.0, 2.0, opts), IntegrationError);
}
