#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "conic/smatrix.hpp"

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

bool verdict(const KernelContext& ctx, const SurfacePoint& p1, const SurfacePoint& p2) {
  const auto d = divisor_with_frames(ctx.curve, {p1, p2});
  return canonical_divisor_test(bergman_matrix(ctx, d), ctx.curve.genus()).canonical;
}

}  // namespace

class SMatrix : public ::testing::TestWithParam<int> {};

TEST_P(SMatrix, RandomPairsMatchFiberOracle) {
  const auto& ctx = context(GetParam());
  const auto& c = ctx.curve;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::bernoulli_distribution coin(0.5);
  int canonical = 0;
  for (int i = 0; i < 50; ++i) {
    const cplx x1(u(rng), u(rng));
    const auto p1 = point_on_sheet(c, x1, coin(rng) ? 1 : -1);
    SurfacePoint p2;
    if (i % 2 == 0) {
      p2 = involution(c, p1);
    } else {
      p2 = point_on_sheet(c, cplx(u(rng), u(rng)), coin(rng) ? 1 : -1);
    }
    const bool expected = genus2_canonical_oracle(c, p1, p2);
    canonical += expected;
    EXPECT_EQ(verdict(ctx, p1, p2), expected) << "pair " << i;
  }
  EXPECT_EQ(canonical, 25);
}

TEST_P(SMatrix, MarginShrinksApproachingFiber) {
  const auto& ctx = context(GetParam());
  const auto& c = ctx.curve;
  const auto p1 = point_on_sheet(c, cplx(0.35, 0.25), 1);
  const auto target = involution(c, p1);
  const cplx start = target.x + 0.3 * std::polar(1.0, 1.1);
  double previous = std::numeric_limits<double>::infinity();
  for (int s = 0; s <= 10; ++s) {
    const double t = s / 10.0;
    const cplx x = start + t * (target.x - start);
    // Carry the sheet by continuation so P2 lands exactly on sigma(P1).
    const std::vector<cplx> seg = {target.x, x};
    const auto path = continue_y(c, seg, target.y);
    const auto p2 = s == 10 ? target : make_point(c, x, path.y.back());
    const auto d = divisor_with_frames(c, {p1, p2});
    const auto v = canonical_divisor_test(bergman_matrix(ctx, d), 2);
    EXPECT_LT(v.margin, previous * (1.0 + 1e-9)) << "step " << s;
    EXPECT_EQ(v.canonical, s == 10) << "step " << s;
    previous = v.margin;
  }
}

TEST_P(SMatrix, SpecialDivisorDeterminant) {
  const auto& ctx = context(GetParam());
  const auto& c = ctx.curve;
  const auto p = point_on_sheet(c, cplx(0.2, -0.4), 1);
  const auto fp = chart_frame(c, p);
  const auto fs = chart_frame(c, involution(c, p));
  const auto fq = chart_frame(c, point_on_sheet(c, cplx(-0.7, 0.3), 1));
  EXPECT_LT(std::abs(special_divisor_det(ctx, {fp, fs})), 1e-10);
  EXPECT_GT(std::abs(special_divisor_det(ctx, {fp, fq})), 1e-3);
}

TEST_P(SMatrix, FrameRescaleKeepsRank) {
  const auto& ctx = context(GetParam());
  const auto& c = ctx.curve;
  const auto p = point_on_sheet(c, cplx(0.2, -0.4), 1);
  for (const auto& q : {involution(c, p), point_on_sheet(c, cplx(-0.7, 0.3), -1)}) {
    const auto d0 = divisor_with_frames(c, {p, q});
    const auto d1 = divisor_with_frames(c, {p, q}, {rescaled(chart_frame(c, p), cplx(3.0, 1.0)),
                                                    rescaled(chart_frame(c, q), cplx(0.0, 0.2))});
    EXPECT_EQ(bergman_matrix(ctx, d0).rank, bergman_matrix(ctx, d1).rank);
  }
}

TEST_P(SMatrix, BergmanMatrixHermitianPsd) {
  const auto& ctx = context(GetParam());
  const auto& c = ctx.curve;
  const auto d = divisor_with_frames(c, {point_on_sheet(c, cplx(0.2, -0.4), 1), point_on_sheet(c, cplx(-0.7, 0.3), -1)});
  const auto bm = bergman_matrix(ctx, d);
  EXPECT_LT(bm.hermitian_defect, 1e-10 * bm.singular_values(0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (bm.matrix + bm.matrix.adjoint()));
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-10 * bm.singular_values(0));
}

TEST_P(SMatrix, SZeroSymmetries) {
  const auto& ctx = context(GetParam());
  const std::vector<cplx> omega = {cplx(-0.3, -0.2), 1.0};
  const auto d = divisor_from_omega(ctx.curve, omega);
  ASSERT_EQ(d.points.size(), 2u);
  const auto s = s_zero(ctx, d);
  EXPECT_LT((s.S_aa - s.S_aa.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((s.S_ah - s.S_ah.adjoint()).cwiseAbs().maxCoeff(), 1e-8 * s.S_ah.cwiseAbs().maxCoeff());
  EXPECT_EQ(s.T(), s.S_ah);
  // Zeros of a holomorphic form are a canonical divisor.
  EXPECT_TRUE(canonical_divisor_test(bergman_matrix(ctx, d), 2).canonical);
}

INSTANTIATE_TEST_SUITE_P(TestCurves, SMatrix, ::testing::Values(0, 1));

TEST(SMatrixErrors, CoincidentAndCount) {
  const auto& c = context(0).curve;
  const auto p = point_on_sheet(c, cplx(0.2, -0.4), 1);
  try {
    divisor_with_frames(c, {p, p});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CoincidentPoints);
  }
  EXPECT_THROW(divisor_with_frames(c, {p}), Error);
}

TEST(SMatrixErrors, OracleNeedsGenusTwo) {
  const auto c = validate_curve(std::vector<cplx>{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0});
  const auto p = point_on_sheet(c, cplx(0.2, -0.4), 1);
  try {
    genus2_canonical_oracle(c, p, involution(c, p));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GenusNotTwo);
  }
}
