#include <gtest/gtest.h>

#include <cmath>

#include "conic/harmonic.hpp"

using namespace conic;

namespace {

struct Setup {
  KernelContext ctx;
  ConicalDivisor d;
  HarmonicContext hc;
};

const Setup& setup(int which) {
  static const auto make = [](std::vector<cplx> f) {
    auto* s = new Setup;
    const auto c = validate_curve(f);
    s->ctx = make_kernel_context(c, build_homology_basis(c));
    const std::vector<cplx> omega = {cplx(-0.3, -0.2), 1.0};
    s->d = divisor_from_omega(c, omega);
    s->hc = build_harmonic(s->ctx, s->d);
    return s;
  };
  static const Setup* q = make({0.0, -1.0, 0.0, 0.0, 0.0, 1.0});
  static const Setup* s = make({-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0});
  return which == 0 ? *q : *s;
}

}  // namespace

class Harmonic : public ::testing::TestWithParam<int> {};

TEST_P(Harmonic, PeriodsImaginary) {
  const auto& s = setup(GetParam());
  EXPECT_LT(s.hc.max_real_period, 1e-6);
}

TEST_P(Harmonic, PathIndependent) {
  const auto& s = setup(GetParam());
  const auto& c = s.ctx.curve;
  const cplx b = s.hc.base.x;
  const cplx qx(-0.55, 0.45);
  // A detour enclosing several branch points: lands on some sheet, compare there.
  const std::vector<cplx> detour = {b, cplx(2.0, 1.8), cplx(-2.0, 1.5), qx};
  const auto path = continue_y(c, detour, s.hc.base.y);
  const auto q2 = make_point(c, qx, path.y.back());
  const auto h2 = integrate_H(s.hc, path);
  const auto h2_direct = H_at(s.hc, q2);
  EXPECT_LT((h2 - h2_direct).cwiseAbs().maxCoeff(), 1e-6);
}

TEST_P(Harmonic, ClosedLoopNearRegularPointVanishes) {
  const auto& s = setup(GetParam());
  const auto& c = s.ctx.curve;
  const cplx center(-0.5, 0.6);
  std::vector<cplx> poly;
  for (int k = 0; k <= 24; ++k) poly.push_back(center + 0.05 * std::polar(1.0, 2.0 * kPi * k / 24));
  const auto path = continue_y(c, poly, point_on_sheet(c, poly[0], 1).y);
  EXPECT_LT(integrate_H(s.hc, path).cwiseAbs().maxCoeff(), 1e-9);
}

TEST_P(Harmonic, MeanValueProperty) {
  const auto& s = setup(GetParam());
  const auto& c = s.ctx.curve;
  const auto center = point_on_sheet(c, cplx(-0.5, 0.6), 1);
  const auto hc0 = H_at(s.hc, center);
  const int n = 32;
  Eigen::VectorXcd mean = Eigen::VectorXcd::Zero(s.hc.size());
  for (int k = 0; k < n; ++k) {
    const cplx x = center.x + 0.1 * std::polar(1.0, 2.0 * kPi * k / n);
    const auto q = make_point(c, x, continue_y(c, std::vector<cplx>{center.x, x}, center.y).y.back());
    mean += H_from(s.hc, center, hc0, q);
  }
  mean /= n;
  EXPECT_LT((mean - hc0).cwiseAbs().maxCoeff(), 1e-9);
}

TEST_P(Harmonic, BaseShiftIsConstant) {
  const auto& s = setup(GetParam());
  const auto& c = s.ctx.curve;
  HarmonicContext moved = s.hc;
  moved.base = point_on_sheet(c, cplx(-0.9, -0.8), -1);
  const auto q1 = point_on_sheet(c, cplx(0.6, 0.7), 1);
  const auto q2 = point_on_sheet(c, cplx(-0.4, -0.3), -1);
  const Eigen::VectorXcd d1 = H_at(moved, q1) - H_at(s.hc, q1);
  const Eigen::VectorXcd d2 = H_at(moved, q2) - H_at(s.hc, q2);
  EXPECT_LT((d1 - d2).cwiseAbs().maxCoeff(), 1e-8);
}

TEST_P(Harmonic, SimplePoleAtOwnCone) {
  const auto& s = setup(GetParam());
  for (int j = 0; j < s.hc.size(); ++j) {
    const auto fit = fit_expansion(s.hc, j, 1e-2, 32);
    EXPECT_GE(fit.pole_ratio_min, 0.5);
    EXPECT_LE(fit.pole_ratio_max, 2.0);
    EXPECT_LT(fit.closure, 1e-8);
    for (int k = 0; k < s.hc.size(); ++k) {
      const auto& a = fit.at_r[k];
      const auto& b = fit.at_half[k];
      EXPECT_LT(std::abs(a.b - b.b), 10.0 * std::max(a.residual, 1e-6)) << k << " " << j;
    }
  }
}

TEST_P(Harmonic, ExpansionMatchesKernels) {
  const auto& s = setup(GetParam());
  const auto cc = prop1_crosscheck(s.ctx, s.d);
  for (const auto& e : cc.entries)
    EXPECT_TRUE(e.pass) << e.quantity << "(" << e.k << "," << e.j << ") kernel " << e.kernel << " fitted " << e.fitted
                        << " tol " << e.tolerance;
  EXPECT_TRUE(cc.pass);
}

INSTANTIATE_TEST_SUITE_P(TestCurves, Harmonic, ::testing::Values(0, 1));

TEST_P(Harmonic, ExpansionMatchesKernelsChartFrames) {
  const auto& s = setup(GetParam());
  const auto& c = s.ctx.curve;
  const auto d = divisor_with_frames(c, {point_on_sheet(c, cplx(0.45, -0.35), 1), point_on_sheet(c, cplx(-0.6, 0.5), -1)});
  ASSERT_FALSE(canonical_divisor_test(bergman_matrix(s.ctx, d), 2).canonical);
  const auto cc = prop1_crosscheck(s.ctx, d);
  double worst = 0.0;
  for (const auto& e : cc.entries) worst = std::max(worst, e.abs_diff / e.tolerance);
  EXPECT_TRUE(cc.pass) << "worst diff/tol " << worst;
}
