#include <gtest/gtest.h>

#include <cmath>

#include "conic/kernels.hpp"

using namespace conic;

namespace {

std::vector<cplx> quintic() { return {0.0, -1.0, 0.0, 0.0, 0.0, 1.0}; }
std::vector<cplx> sextic() { return {-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0}; }

const KernelContext& context(int which) {
  static const KernelContext q = [] {
    const auto c = validate_curve(quintic());
    return make_kernel_context(c, build_homology_basis(c));
  }();
  static const KernelContext s = [] {
    const auto c = validate_curve(sextic());
    return make_kernel_context(c, build_homology_basis(c));
  }();
  return which == 0 ? q : s;
}

const KernelContext& alternate(int which) {
  static const KernelContext q = [] {
    const auto c = validate_curve(quintic());
    return make_kernel_context(c, alternate_basis(c));
  }();
  static const KernelContext s = [] {
    const auto c = validate_curve(sextic());
    return make_kernel_context(c, alternate_basis(c));
  }();
  return which == 0 ? q : s;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

class Kernels : public ::testing::TestWithParam<int> {};

TEST_P(Kernels, RawOppositeSheetsFinite) {
  const auto& c = context(GetParam()).curve;
  const auto p = point_on_sheet(c, cplx(0.3, 0.2), 1);
  const auto q = involution(c, p);
  const cplx w = raw_bidifferential(c, p, q);
  EXPECT_TRUE(std::isfinite(w.real()) && std::isfinite(w.imag()));
}

TEST_P(Kernels, RawSymmetric) {
  const auto& c = context(GetParam()).curve;
  const auto p = point_on_sheet(c, cplx(0.3, 0.2), 1);
  const auto q = point_on_sheet(c, cplx(-0.4, 0.7), -1);
  EXPECT_EQ(raw_bidifferential(c, p, q), raw_bidifferential(c, q, p));
  const auto e = branch_point(c, 1);
  EXPECT_LT(std::abs(raw_bidifferential(c, e, q) - raw_bidifferential(c, q, e)), 1e-15);
}

TEST_P(Kernels, RawBiresidue) {
  const auto& c = context(GetParam()).curve;
  const auto p = point_on_sheet(c, cplx(0.3, 0.2), 1);
  auto scaled = [&](double eps) {
    const cplx x = p.x + eps;
    const auto q = make_point(c, x, c.continue_from(p.x, p.y, x));
    return raw_bidifferential(c, p, q) * eps * eps;
  };
  const double eps = 1e-3;
  const cplx extrapolated = 2.0 * scaled(0.5 * eps) - scaled(eps);
  EXPECT_LT(std::abs(extrapolated - 1.0), 1e-6);
}

TEST_P(Kernels, RawBranchChartMatchesLimit) {
  // W0 in the t-chart at e equals lim W0(x-frame) * dx/dt as t -> 0.
  const auto& c = context(GetParam()).curve;
  const int idx = 2;
  const cplx e = c.branch_points()[idx];
  const auto q = point_on_sheet(c, cplx(0.31, -0.77), 1);
  const cplx h = branch_cofactor(c, idx);
  auto approx = [&](double t) {
    const cplx x = e + t * t;
    const cplx y = t * c.continue_cofactor(e, h, x, idx);
    return raw_bidifferential_x(c, x, y, q) * 2.0 * t;
  };
  const cplx lim = 2.0 * approx(5e-5) - approx(1e-4);
  EXPECT_LT(std::abs(lim - raw_bidifferential(c, branch_point(c, idx), q)), 1e-6);
}

TEST_P(Kernels, NormalizationOutOfSample) {
  const auto& ctx = context(GetParam());
  EXPECT_LT(ctx.correction_asymmetry, 1e-6);
  const auto q = point_on_sheet(ctx.curve, cplx(0.23, 0.41), -1);
  const auto d = check_W(ctx, q);
  EXPECT_LT(d.a_period, 1e-6);
  EXPECT_LT(d.b_period, 1e-5);
  EXPECT_LT(d.symmetry, 1e-8);
}

TEST_P(Kernels, FrameChangeScalesW) {
  const auto& ctx = context(GetParam());
  const auto p = point_on_sheet(ctx.curve, cplx(0.3, 0.2), 1);
  const auto q = point_on_sheet(ctx.curve, cplx(-0.4, 0.7), -1);
  const auto fp = chart_frame(ctx.curve, p), fq = chart_frame(ctx.curve, q);
  const auto fp2 = user_frame(ctx.curve, p, 2.0);
  EXPECT_LT(std::abs(W_frame(ctx, fp2, fq) - 0.5 * W_frame(ctx, fp, fq)), 1e-13 * std::abs(W_frame(ctx, fp, fq)));
  EXPECT_LT(std::abs(W_frame(ctx, fp, fq) - W_frame(ctx, fq, fp)), 1e-12);
}

TEST_P(Kernels, BergmanConnectionSelfConsistent) {
  const auto& ctx = context(GetParam());
  for (const auto& p : {point_on_sheet(ctx.curve, cplx(0.3, 0.2), 1), branch_point(ctx.curve, 1)}) {
    const auto f = chart_frame(ctx.curve, p);
    const auto s = bergman_proj_connection(ctx, f);
    EXPECT_LT(std::abs(s.coarse - s.fine), 1e-4 * std::max(1.0, std::abs(s.fine)));
  }
}

TEST_P(Kernels, SchwarzianTransportCocycle) {
  const auto& ctx = context(GetParam());
  const auto p = point_on_sheet(ctx.curve, cplx(0.3, 0.2), 1);
  const auto id = chart_frame(ctx.curve, p);
  const auto s0 = bergman_proj_connection(ctx, id).value;
  // Identity frame: no Schwarzian term.
  EXPECT_EQ(id.schwarzian(), cplx(0.0));
  // xi = phi(u) = u + 0.3 u^2 - 0.2 u^3, then eta = psi(xi) = 2 xi + 0.5 xi^2 + 0.1 xi^3.
  const cplx a1 = 1.0, a2 = 0.3, a3 = -0.2;
  const cplx b1 = 2.0, b2 = 0.5, b3 = 0.1;
  const auto xi = user_frame(ctx.curve, p, a1, a2, a3);
  const cplx sx = bergman_proj_connection(ctx, xi).value;
  const cplx schw_psi = 6.0 * b3 / b1 - 6.0 * (b2 / b1) * (b2 / b1);
  const cplx two_step = (sx - schw_psi) / (b1 * b1);
  // Composite eta(u) = psi(phi(u)) to third order.
  const cplx c1 = b1 * a1, c2 = b1 * a2 + b2 * a1 * a1, c3 = b1 * a3 + 2.0 * b2 * a1 * a2 + b3 * a1 * a1 * a1;
  const auto eta = user_frame(ctx.curve, p, c1, c2, c3);
  const cplx direct = bergman_proj_connection(ctx, eta).value;
  EXPECT_LT(std::abs(two_step - direct), 1e-10 * std::max(1.0, std::abs(direct)));
  EXPECT_LT(std::abs(s0 - (bergman_proj_connection(ctx, user_frame(ctx.curve, p, 1.0)).value)), 1e-14);
}

TEST_P(Kernels, BergmanKernelHermitian) {
  const auto& ctx = context(GetParam());
  const auto fp = chart_frame(ctx.curve, point_on_sheet(ctx.curve, cplx(0.3, 0.2), 1));
  const auto fq = chart_frame(ctx.curve, point_on_sheet(ctx.curve, cplx(-0.4, 0.7), -1));
  const cplx bpp = bergman_kernel(ctx, fp, fp);
  EXPECT_LT(std::abs(bpp.imag()), 1e-14 * std::abs(bpp));
  EXPECT_GT(bpp.real(), 0.0);
  EXPECT_LT(std::abs(bergman_kernel(ctx, fp, fq) - std::conj(bergman_kernel(ctx, fq, fp))), 1e-14);
}

TEST_P(Kernels, MarkingIndependence) {
  const auto& c1 = context(GetParam());
  const auto& c2 = alternate(GetParam());
  const auto p = point_on_sheet(c1.curve, cplx(0.3, 0.2), 1);
  const auto q = point_on_sheet(c1.curve, cplx(-0.4, 0.7), -1);
  const auto fp = chart_frame(c1.curve, p), fq = chart_frame(c1.curve, q);
  EXPECT_LT(rel(bergman_kernel(c1, fp, fq), bergman_kernel(c2, fp, fq)), 1e-6);
  EXPECT_LT(rel(schiffer_kernel(c1, fp, fq), schiffer_kernel(c2, fp, fq)), 1e-6);
  EXPECT_LT(rel(schiffer_proj_connection(c1, fp).value, schiffer_proj_connection(c2, fp).value), 1e-5);
  // W itself is marking dependent.
  EXPECT_GT(std::abs(W_frame(c1, fp, fq) - W_frame(c2, fp, fq)), 1e-6);
}

TEST_P(Kernels, SchifferConnectionMatchesDiagonalLimit) {
  const auto& ctx = context(GetParam());
  const auto p = point_on_sheet(ctx.curve, cplx(0.3, 0.2), 1);
  const cplx omega[] = {0.3, 1.0};
  const auto f = distinguished_frame(ctx.curve, omega, point_on_sheet(ctx.curve, -0.3, 1));
  for (const auto& fr : {chart_frame(ctx.curve, p), f, user_frame(ctx.curve, p, 1.5, 0.4, -0.3)}) {
    const auto a = schiffer_proj_connection(ctx, fr).value;
    const auto b = schiffer_diagonal_limit(ctx, fr).value;
    EXPECT_LT(rel(a, b), 1e-4);
  }
}

TEST_P(Kernels, SchifferSymmetricAndRecomposes) {
  const auto& ctx = context(GetParam());
  const auto fp = chart_frame(ctx.curve, point_on_sheet(ctx.curve, cplx(0.3, 0.2), 1));
  const auto fq = chart_frame(ctx.curve, branch_point(ctx.curve, 0));
  EXPECT_LT(std::abs(schiffer_kernel(ctx, fp, fq) - schiffer_kernel(ctx, fq, fp)), 1e-12);
  const Eigen::VectorXcd vp = v_frame(ctx, fp), vq = v_frame(ctx, fq);
  const cplx pi_term = kPi * (vp.transpose() * ctx.periods.im_inverse.cast<cplx>() * vq)(0, 0);
  EXPECT_LT(std::abs(schiffer_kernel(ctx, fp, fq) + pi_term - W_frame(ctx, fp, fq)), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(TestCurves, Kernels, ::testing::Values(0, 1));

TEST(DistinguishedFrame, MetricDensity) {
  const auto c = validate_curve(quintic());
  const cplx omega[] = {0.3, 1.0};
  const auto zeros = omega_zeros(c, omega);
  ASSERT_EQ(zeros.size(), 2u);
  const auto f = distinguished_frame(c, omega, zeros[0]);
  // |omega|^2 = 4 |xi|^2 |dxi|^2, i.e. |omega_xi| = 2 |xi| at radius r.
  const double r = 1e-2;
  for (int k = 0; k < 8; ++k) {
    const cplx xi = std::polar(r, 0.4 + 0.7 * k);
    const auto q = point_at(c, f, xi);
    const cplx omega_xi = (omega[0] + omega[1] * q.x) / q.y * dx_dxi(c, f, xi);
    EXPECT_NEAR(std::abs(omega_xi), 2.0 * r, 1e-10);
    EXPECT_LT(std::abs(omega_xi - 2.0 * xi), 1e-10);
  }
}

TEST(DistinguishedFrame, BranchFlipAndScaling) {
  const auto c = validate_curve(sextic());
  const cplx omega[] = {0.3, 1.0};
  const cplx omega4[] = {1.2, 4.0};
  const auto zeros = omega_zeros(c, omega);
  const auto f = distinguished_frame(c, omega, zeros[1]);
  const auto g = distinguished_frame(c, omega, zeros[1], -1);
  const auto h = distinguished_frame(c, omega4, zeros[1]);
  for (std::size_t n = 1; n < 6; ++n) {
    EXPECT_LT(std::abs(g.jet(n) + f.jet(n)), 1e-13 * std::abs(f.jet(1)));
    EXPECT_LT(std::abs(h.jet(n) - 2.0 * f.jet(n)), 1e-12 * std::abs(f.jet(1)));
  }
}

TEST(DistinguishedFrame, NotASimpleZero) {
  const auto c = validate_curve(quintic());
  const cplx omega[] = {0.3, 1.0};
  try {
    distinguished_frame(c, omega, point_on_sheet(c, cplx(0.5, 0.5), 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotASimpleZero);
  }
}
