#include "nsdc/mrsdc.hpp"

#include <cmath>
#include <string>

#include "doctest.h"
#include "nsdc/errors.hpp"
#include "nsdc/quadrature.hpp"
#include "nsdc/sdc.hpp"

using namespace nsdc;

namespace {

Rhs scale_rhs(double lambda, int* counter = nullptr) {
  return [lambda, counter](double, const Field& u, Field& out) {
    if (counter) ++*counter;
    out.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = lambda * u[i];
  };
}

// Prothero-Robinson form: u' = -sigma (u - cos t) - sin t, exact u = cos t.
SplitRHS stiff_oscillator(double sigma) {
  SplitRHS rhs;
  rhs.f1 = [sigma](double t, const Field& u, Field& out) {
    out.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = -sigma * (u[i] - std::cos(t));
  };
  rhs.f2 = [](double t, const Field& u, Field& out) {
    out.assign(u.size(), -std::sin(t));
  };
  rhs.f1_stiffness = SplitRHS::Stiffness::Implicit;
  return rhs;
}

StepControls controls(int k, double cutoff = 0.0) {
  StepControls c;
  c.num_iterations = k;
  c.residual_ratio_cutoff = cutoff;
  return c;
}

}  // namespace

TEST_CASE("degenerate fine level collapses onto the coarse sweep") {
  // TypeB with a 2-node inner set adds no nodes: the fine level equals the
  // coarse one and S21 must coincide bitwise with the single-rate S.
  auto coarse = gauss_lobatto(3);
  auto h = build_hierarchy(coarse, TypeB{gauss_lobatto(2)});
  REQUIRE(h.fine.count() == 3);
  auto single = integration_matrices(coarse);
  for (int r = 0; r < 2; ++r)
    for (int j = 0; j < 3; ++j) CHECK(h.s21(r, j) == single.s(r, j));

  SplitRHS rhs;
  rhs.f1 = scale_rhs(-1.0);
  rhs.f2 = [](double, const Field& u, Field& out) { out.assign(u.size(), 0.0); };

  auto [u_mr, diag_mr] = mrsdc_step_mode1(rhs, {1.0}, 0.0, 0.3, h, controls(4));
  auto [u_sr, diag_sr] = sdc_step(scale_rhs(-1.0), {1.0}, 0.0, 0.3, coarse, controls(4));
  CHECK(std::abs(u_mr[0] - u_sr[0]) <= 1e-15);
}

TEST_CASE("zero slow term collapses onto the fine-level sweep") {
  auto h = build_hierarchy(gauss_lobatto(3), TypeB{gauss_lobatto(5)});
  SplitRHS rhs;
  rhs.f1 = [](double, const Field& u, Field& out) { out.assign(u.size(), 0.0); };
  rhs.f2 = scale_rhs(-1.0);

  auto [u_mr, diag_mr] = mrsdc_step_mode1(rhs, {1.0}, 0.0, 0.4, h, controls(5));
  auto [u_sr, diag_sr] = sdc_step(scale_rhs(-1.0), {1.0}, 0.0, 0.4, h.fine, controls(5));
  CHECK(std::abs(u_mr[0] - u_sr[0]) <= 1e-15);
}

TEST_CASE("mode-1 evaluation counts are K*M1 and K*M2") {
  auto h = build_hierarchy(gauss_lobatto(3), TypeB{gauss_lobatto(5)});
  SplitRHS rhs;
  int n1 = 0, n2 = 0;
  rhs.f1 = scale_rhs(-1.0, &n1);
  rhs.f2 = scale_rhs(-10.0, &n2);

  SUBCASE("seeded step") {
    MrsdcStepper stepper(h, controls(4));
    Field f01 = {-1.0}, f02 = {-10.0};
    auto res = stepper.step_mode1(rhs, {1.0}, 0.0, 0.05, &f01, &f02);
    CHECK(res.diag.f1_evals == 4 * 2);
    CHECK(res.diag.f2_evals == 4 * 8);
    CHECK(n1 == 8);
    CHECK(n2 == 32);
  }

  SUBCASE("unseeded step pays one extra per component") {
    auto [u, diag] = mrsdc_step_mode1(rhs, {1.0}, 0.0, 0.05, h, controls(4));
    CHECK(diag.f1_evals == 4 * 2 + 1);
    CHECK(diag.f2_evals == 4 * 8 + 1);
  }

  SUBCASE("integration recycles end values between steps") {
    auto [u, diag] =
        integrate_mrsdc(rhs, {1.0}, 0.0, 0.2, 4, h, controls(4));
    CHECK(diag.f1_evals == 4 * (4 * 2) + 1);
    CHECK(diag.f2_evals == 4 * (4 * 8) + 1);
  }
}

TEST_CASE("mode 1 converges at the coarse collocation order") {
  auto h = build_hierarchy(gauss_lobatto(3), TypeB{gauss_lobatto(9)});
  SplitRHS rhs;
  rhs.f1 = scale_rhs(-1.0);
  rhs.f2 = scale_rhs(-10.0);

  double prev = 0.0, slope_sum = 0.0;
  int slopes = 0;
  for (int nsteps : {4, 8, 16}) {
    auto [u, diag] = integrate_mrsdc(rhs, {1.0}, 0.0, 1.0, nsteps, h, controls(4));
    double err = std::abs(u[0] - std::exp(-11.0));
    if (prev > 0.0) {
      slope_sum += std::log2(prev / err);
      ++slopes;
    }
    prev = err;
  }
  CHECK(slope_sum / slopes == doctest::Approx(4.0).epsilon(0.075));
}

TEST_CASE("converged sweeps satisfy the two-rate collocation identity") {
  auto h = build_hierarchy(gauss_lobatto(3), TypeB{gauss_lobatto(5)});
  SplitRHS rhs;
  rhs.f1 = scale_rhs(-1.0);
  rhs.f2 = scale_rhs(-10.0);

  MrsdcStepper stepper(h, controls(25));
  auto res = stepper.step_mode1(rhs, {1.0}, 0.0, 0.05, nullptr, nullptr);
  CHECK(res.diag.residual_history.back() <= 1e-12);
  CHECK(mrsdc_residual(stepper.state(), {1.0}, 0.05, h) <= 1e-12);
}

TEST_CASE("early stop reacts to residual stagnation") {
  auto h = build_hierarchy(gauss_lobatto(3), TypeB{gauss_lobatto(5)});
  SplitRHS rhs;
  rhs.f1 = scale_rhs(-1.0);
  rhs.f2 = scale_rhs(-10.0);
  auto [u, diag] = mrsdc_step_mode1(rhs, {1.0}, 0.0, 0.05, h, controls(50, 0.05));
  CHECK(diag.early_stop);
  CHECK(diag.sweeps < 50);
}

TEST_CASE("type-a hierarchy sweeps with nested node families") {
  auto h = build_hierarchy(clenshaw_curtis(5), TypeA{clenshaw_curtis(9)});
  SplitRHS rhs;
  int n1 = 0, n2 = 0;
  rhs.f1 = scale_rhs(-1.0, &n1);
  rhs.f2 = scale_rhs(-10.0, &n2);
  MrsdcStepper stepper(h, controls(4));
  Field f01 = {-1.0}, f02 = {-10.0};
  auto res = stepper.step_mode1(rhs, {1.0}, 0.0, 0.05, &f01, &f02);
  CHECK(n1 == 4 * 4);
  CHECK(n2 == 4 * 8);
  CHECK(std::abs(res.u[0] - std::exp(-11.0 * 0.05)) < 1e-5);
}

TEST_CASE("mode 2 with a vanishing implicit term matches mode 1") {
  auto h = build_hierarchy(gauss_lobatto(3), TypeB{gauss_lobatto(5)});
  SplitRHS rhs;
  rhs.f1 = [](double, const Field& u, Field& out) { out.assign(u.size(), 0.0); };
  rhs.f2 = scale_rhs(-3.0);

  auto [u1, d1] = mrsdc_step_mode1(rhs, {1.0}, 0.0, 0.2, h, controls(4));
  rhs.f1_stiffness = SplitRHS::Stiffness::Implicit;
  auto [u2, d2] = mrsdc_step_mode2(rhs, {1.0}, 0.0, 0.2, h, controls(4), StiffOptions{});
  CHECK(std::abs(u1[0] - u2[0]) <= 1e-15);
}

TEST_CASE("mode 2 rides out stiffness far beyond the explicit limit") {
  // sigma = 1e4 caps explicit steps near 2e-4; run at dt = 2e-2.
  const double sigma = 1.0e4;
  auto h = build_hierarchy(gauss_lobatto(3), TypeB{gauss_lobatto(5)});
  StiffOptions stiff;
  stiff.rtol = 1e-12;
  stiff.atol = 1e-13;
  auto [u, diag] = integrate_mrsdc(stiff_oscillator(sigma), {1.0}, 0.0, 1.0, 50, h,
                                   controls(6), stiff);
  REQUIRE(std::isfinite(u[0]));
  CHECK(std::abs(u[0]) < 1.5);
  CHECK(std::abs(u[0] - std::cos(1.0)) < 1e-4);
}

TEST_CASE("mode 2 fixed point reaches the collocation residual floor") {
  auto h = build_hierarchy(gauss_lobatto(3), TypeB{gauss_lobatto(5)});
  StiffOptions stiff;
  stiff.rtol = 1e-12;
  stiff.atol = 1e-13;
  MrsdcStepper stepper(h, controls(20), stiff);
  auto res = stepper.step_mode2(stiff_oscillator(1.0e4), {1.0}, 0.0, 0.02, nullptr, nullptr);
  CHECK(res.diag.residual_history.back() <= 1e-9);
  CHECK(res.diag.implicit_solves == 20 * 2);
  CHECK(res.diag.f1_evals == 20 * 2 + 1);
  CHECK(res.diag.newton_f1_evals > 0);
}

TEST_CASE("reaction-style layout: implicit coarse GL(5) over a repeated fine set") {
  auto h = build_hierarchy(gauss_lobatto(5), TypeC{gauss_lobatto(3), 2});
  CHECK(h.fine.count() == 17);
  StiffOptions stiff;
  auto [u, diag] = mrsdc_step_mode2(stiff_oscillator(1.0e3), {1.0}, 0.0, 0.01, h,
                                    controls(4), stiff);
  CHECK(std::isfinite(u[0]));
  CHECK(std::abs(u[0] - std::cos(0.01)) < 1e-6);
}

TEST_CASE("mode 2 reports the failing coarse node when Newton diverges") {
  auto h = build_hierarchy(gauss_lobatto(3), TypeB{gauss_lobatto(2)});
  SplitRHS rhs;
  // w = c + beta w^2 has no real root once c is large enough.
  rhs.f1 = [](double, const Field& u, Field& out) { out = {u[0] * u[0]}; };
  rhs.f2 = [](double, const Field& u, Field& out) { out.assign(u.size(), 0.0); };
  rhs.f1_stiffness = SplitRHS::Stiffness::Implicit;
  try {
    mrsdc_step_mode2(rhs, {5.0}, 0.0, 1.0, h, controls(4), StiffOptions{});
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(std::string(e.what()).find("coarse node") != std::string::npos);
  }
}
