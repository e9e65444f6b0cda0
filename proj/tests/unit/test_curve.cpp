#include <gtest/gtest.h>

#include <cmath>

#include "conic/curve.hpp"
#include "conic/line_integral.hpp"

using namespace conic;

namespace {

std::vector<cplx> quintic() { return {0.0, -1.0, 0.0, 0.0, 0.0, 1.0}; }
std::vector<cplx> sextic() { return {-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0}; }

std::vector<cplx> circle(cplx c, double r, int n, double phase = 0.1) {
  std::vector<cplx> pts;
  for (int k = 0; k <= n; ++k) pts.push_back(c + std::polar(r, phase + 2.0 * kPi * k / n));
  pts.back() = pts.front();
  return pts;
}

}  // namespace

TEST(Curve, QuinticBranchPoints) {
  const auto c = validate_curve(quintic());
  EXPECT_EQ(c.genus(), 2);
  EXPECT_TRUE(c.branch_at_infinity());
  const std::vector<cplx> expected = {-1.0, cplx(0, -1), 0.0, cplx(0, 1), 1.0};
  ASSERT_EQ(c.branch_points().size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_LT(std::abs(c.branch_points()[i] - expected[i]), 1e-14);
}

TEST(Curve, SexticBranchPoints) {
  const auto c = validate_curve(sextic());
  EXPECT_EQ(c.genus(), 2);
  EXPECT_FALSE(c.branch_at_infinity());
  for (auto e : c.branch_points()) {
    EXPECT_NEAR(std::abs(e), 1.0, 1e-14);
    EXPECT_LT(std::abs(std::pow(e, 6) - 1.0), 1e-13);
  }
}

TEST(Curve, RepeatedRootRejected) {
  const std::vector<cplx> f = {0.0, 0.0, 0.0, 1.0, -2.0, 1.0};
  try {
    validate_curve(f);
    FAIL() << "expected RepeatedRoot";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RepeatedRoot);
  }
}

TEST(Curve, DegreeTooLow) {
  const std::vector<cplx> f = {1.0, 0.0, 0.0, 0.0, 1.0};
  try {
    validate_curve(f);
    FAIL() << "expected DegreeTooLow";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegreeTooLow);
  }
}

TEST(Continuation, MonodromyAroundOneBranchPoint) {
  const auto c = validate_curve(sextic());
  const cplx e = c.branch_points()[0];
  const auto poly = circle(e, 0.3, 16);
  const cplx y0 = c.sheet_y(poly.front(), 1);
  const auto path = continue_y(c, poly, y0);
  EXPECT_LT(std::abs(path.y.back() + y0), 1e-12 * std::abs(y0));
  for (std::size_t k = 0; k < path.size(); ++k)
    EXPECT_LT(std::abs(path.y[k] * path.y[k] - c.f(path.x[k])), 1e-12);
}

TEST(Continuation, MonodromyAroundTwoBranchPoints) {
  const auto c = validate_curve(sextic());
  const auto poly = circle(cplx(0.75, 0.4330127018922193), 0.7, 24);
  const auto path = continue_y(c, poly, c.sheet_y(poly.front(), 1));
  EXPECT_LT(std::abs(path.y.back() - path.y.front()), 1e-12);
}

TEST(Continuation, ContractibleLoop) {
  const auto c = validate_curve(sextic());
  const auto poly = circle(0.0, 0.5, 8);
  const auto path = continue_y(c, poly, c.sheet_y(poly.front(), -1));
  EXPECT_LT(std::abs(path.y.back() - path.y.front()), 1e-12);
}

TEST(Continuation, VertexOnBranchPoint) {
  const auto c = validate_curve(quintic());
  const std::vector<cplx> poly = {cplx(0.5, 0.5), 0.0, cplx(-0.5, 0.5)};
  try {
    continue_y(c, poly, c.sheet_y(poly[0], 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PathHitsBranchPoint);
  }
}

TEST(AbelianIntegral, ZeroDifferential) {
  const auto c = validate_curve(quintic());
  const std::vector<cplx> poly = {cplx(0.5, 0.5), cplx(-0.5, 0.5)};
  const auto path = continue_y(c, poly, c.sheet_y(poly[0], 1));
  const std::vector<cplx> d = {0.0, 0.0};
  EXPECT_EQ(abelian_integral(c, d, path).value, cplx(0.0));
}

TEST(AbelianIntegral, ReversedPathNegates) {
  const auto c = validate_curve(quintic());
  const std::vector<cplx> poly = {cplx(0.5, 0.5), cplx(0.2, 1.5), cplx(-0.7, 0.4)};
  const auto path = continue_y(c, poly, c.sheet_y(poly[0], 1));
  const std::vector<cplx> d = {1.0, cplx(0.3, -2.0)};
  const auto fwd = abelian_integral(c, d, path, 1e-12);
  const auto bwd = abelian_integral(c, d, path.reversed(), 1e-12);
  EXPECT_LT(std::abs(fwd.value + bwd.value), 1e-12 * std::abs(fwd.value));
}

TEST(AbelianIntegral, RefinementIndependent) {
  const auto c = validate_curve(sextic());
  const double tol = 1e-11;
  const std::vector<cplx> coarse = {cplx(0.1, 0.2), cplx(0.2, 1.4), cplx(-1.3, 0.4)};
  std::vector<cplx> fine;
  for (std::size_t i = 0; i + 1 < coarse.size(); ++i)
    for (int k = 0; k < 7; ++k) fine.push_back(coarse[i] + (coarse[i + 1] - coarse[i]) * (k / 7.0));
  fine.push_back(coarse.back());
  const cplx y0 = c.sheet_y(coarse[0], 1);
  const std::vector<cplx> d = {1.0, 1.0};
  const auto a = abelian_integral(c, d, continue_y(c, coarse, y0), tol);
  const auto b = abelian_integral(c, d, continue_y(c, fine, y0), tol);
  EXPECT_LT(std::abs(a.value - b.value), 2.0 * tol * std::max(1.0, std::abs(a.value)));
}

TEST(AbelianIntegral, HalfPeriodIdentity) {
  // A loop around [e0, e1] integrates to twice the integral from e0 to e1 up to sign.
  const auto c = validate_curve(sextic());
  const auto& bp = c.branch_points();
  const cplx mid = 0.5 * (bp[0] + bp[1]);
  const double r = 0.75 * std::abs(bp[1] - bp[0]);
  const auto loop = continue_y(c, circle(mid, r, 64, 0.2), c.sheet_y(mid + std::polar(r, 0.2), 1));
  const std::vector<cplx> d = {1.0};
  const cplx full = abelian_integral(c, d, loop, 1e-12).value;
  // Open path: bp0 -> bp1 on the straight segment, starting just off bp0 is not allowed,
  // so integrate from the midpoint to each end.
  const cplx ym = c.sheet_y(mid, 1);
  const std::vector<cplx> to1 = {mid, bp[1]};
  const std::vector<cplx> to0 = {mid, bp[0]};
  const cplx i1 = abelian_integral(c, d, continue_y(c, to1, ym), 1e-12).value;
  const cplx i0 = abelian_integral(c, d, continue_y(c, to0, ym), 1e-12).value;
  const cplx half = i1 - i0;
  EXPECT_LT(std::min(std::abs(full - 2.0 * half), std::abs(full + 2.0 * half)), 1e-10);
}

TEST(Curve, KleinFormMatchesRemainder) {
  for (const auto& f : {std::vector<cplx>{0.0, -1.0, 0.0, 0.0, 0.0, 1.0}, std::vector<cplx>{-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0}}) {
    const auto c = validate_curve(f);
    const cplx x1(0.7, -0.4), x2(-1.3, 0.9), d = x1 - x2;
    const cplx lhs = c.klein_form(x1, x2);
    const cplx rhs = c.f(x1) + c.f(x2) + d * d * c.klein_remainder(x1, x2);
    EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::abs(lhs));
    EXPECT_LT(std::abs(c.klein_form(x1, x1) - 2.0 * c.f(x1)), 1e-12);
  }
}
