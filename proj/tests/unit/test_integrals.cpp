#include <gtest/gtest.h>

#include <cmath>

#include "conic/integrals.hpp"

using namespace conic;

namespace {

const KernelContext& context(int which) {
  static const KernelContext q = [] {
    const auto c = validate_curve(std::vector<cplx>{0.0, -1.0, 0.0, 0.0, 0.0, 1.0});
    return make_kernel_context(c, build_homology_basis(c));
  }();
  static const KernelContext s = [] {
    const auto c = validate_curve(std::vector<cplx>{-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0});
    return make_kernel_context(c, build_homology_basis(c));
  }();
  return which == 0 ? q : s;
}

const std::vector<cplx> kOmega = {cplx(-0.3, -0.2), 1.0};

}  // namespace

class Integrals : public ::testing::TestWithParam<int> {};

TEST_P(Integrals, AreaTwoWays) {
  const auto& c = context(GetParam()).curve;
  const auto q = build_quadrature(c, kOmega, 2);
  const auto mc = monte_carlo_area(c, kOmega, 1 << 16, 11);
  EXPECT_LT(std::abs(q.area - mc.value), 1e-3 * q.area);
  EXPECT_LT(std::abs(q.area - mc.value), 2.0 * mc.error + 1e-9);
  const auto q3 = build_quadrature(c, kOmega, 3);
  EXPECT_LT(std::abs(q.area - q3.area), 1e-7 * q.area);
}

TEST_P(Integrals, HolomorphicGramIsImB) {
  const auto& ctx = context(GetParam());
  const auto q = build_quadrature(ctx.curve, kOmega, 2);
  const Eigen::MatrixXcd g = holomorphic_gram(ctx, q);
  const Eigen::MatrixXd imB = ctx.periods.riemann.imag();
  EXPECT_LT((g - imB.cast<cplx>()).cwiseAbs().maxCoeff(), 1e-6 * imB.cwiseAbs().maxCoeff());
}

TEST_P(Integrals, AreaScalesWithOmega) {
  const auto& c = context(GetParam()).curve;
  const std::vector<cplx> twice = {2.0 * kOmega[0], 2.0 * kOmega[1]};
  const double a1 = build_quadrature(c, kOmega, 2).area;
  const double a2 = build_quadrature(c, twice, 2).area;
  EXPECT_LT(std::abs(a2 - 4.0 * a1), 1e-9 * a2);
}

TEST_P(Integrals, CalHMeanFreeAndScaling) {
  const auto& ctx = context(GetParam());
  const auto& c = ctx.curve;
  const std::vector<cplx> twice = {2.0 * kOmega[0], 2.0 * kOmega[1]};
  const auto d1 = divisor_from_omega(c, kOmega);
  const auto d2 = divisor_from_omega(c, twice);
  const auto hc1 = build_harmonic(ctx, d1);
  const auto hc2 = build_harmonic(ctx, d2);
  const auto q1 = build_quadrature(c, kOmega, 1);
  const auto q2 = build_quadrature(c, twice, 1);
  const auto ch1 = calH(q1, H_on_nodes(hc1, q1));
  const auto ch2 = calH(q2, H_on_nodes(hc2, q2));
  EXPECT_LT(ch1.residual_mean.maxCoeff(), 1e-4);
  EXPECT_LT(ch2.residual_mean.maxCoeff(), 1e-4);
  // xi -> sqrt(2) xi, so calH -> calH / sqrt(2) at every point.
  for (const auto& p : {point_on_sheet(c, cplx(0.8, -0.6), 1), point_on_sheet(c, cplx(-0.5, 0.4), -1)}) {
    const Eigen::VectorXcd a = kGreenNormalization * (H_at(hc1, p) - ch1.mean);
    const Eigen::VectorXcd b = kGreenNormalization * (H_at(hc2, p) - ch2.mean);
    EXPECT_LT((b * std::sqrt(2.0) - a).cwiseAbs().maxCoeff(), 1e-8 * a.cwiseAbs().maxCoeff());
  }
}

TEST_P(Integrals, TPrimeGramProperties) {
  const auto& ctx = context(GetParam());
  const auto d = divisor_from_omega(ctx.curve, kOmega);
  const auto hc = build_harmonic(ctx, d);
  Eigen::MatrixXcd tp[2];
  for (int lvl : {1, 2}) {
    const auto q = build_quadrature(ctx.curve, kOmega, lvl);
    tp[lvl - 1] = t_prime(q, calH(q, H_on_nodes(hc, q)));
  }
  const double norm = tp[1].cwiseAbs().maxCoeff();
  EXPECT_LT((tp[1] - tp[1].adjoint()).cwiseAbs().maxCoeff(), 1e-3 * norm);
  for (int k = 0; k < 2; ++k) {
    EXPECT_GT(tp[1](k, k).real(), 0.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (tp[1] + tp[1].adjoint()));
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-3 * norm);
  // Refinement stability of int |calH|^2.
  EXPECT_LT((tp[1] - tp[0]).cwiseAbs().maxCoeff(), 1e-6 * norm);
}

INSTANTIATE_TEST_SUITE_P(TestCurves, Integrals, ::testing::Values(0, 1));

TEST(IntegralsC2, OmegaAndDoubleOmega) {
  const auto& ctx = context(0);
  const std::vector<cplx> twice = {2.0 * kOmega[0], 2.0 * kOmega[1]};
  const auto a = universal_C2(ctx, kOmega, 300000);
  const auto b = universal_C2(ctx, twice, 300000);
  EXPECT_LT(a.detT0_relative, 1e-6);
  EXPECT_LT(std::abs(a.C2 - b.C2), a.error + b.error);
  EXPECT_LT(std::abs(a.C2.imag()), a.error);
}

TEST(IntegralsErrors, Budget) {
  const auto& ctx = context(0);
  try {
    universal_C2(ctx, kOmega, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BudgetExhausted);
  }
}

TEST(IntegralsErrors, DivisorNotCanonical) {
  const auto& ctx = context(0);
  const std::vector<cplx> at_branch = {0.0, 1.0};  // zero at the branch point x = 0
  try {
    universal_C2(ctx, at_branch, 300000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DivisorNotCanonical);
  }
}

TEST(IntegralsErrors, GenusNotTwo) {
  const auto c = validate_curve(std::vector<cplx>{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0});
  const auto ctx = make_kernel_context(c, build_homology_basis(c));
  const std::vector<cplx> omega = {0.5, 0.0, 1.0};
  try {
    universal_C2(ctx, omega, 300000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GenusNotTwo);
  }
}
