#include "conic/kernels.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <random>

#include "conic/polynomial.hpp"

namespace conic {

namespace {

bool same_sheet(cplx y1, cplx y2) { return std::abs(y1 - y2) <= std::abs(y1 + y2); }

// Far apart (relative to the points themselves) the plain Klein quotient is
// stable; the remainder form cancels badly at large |x|.
bool far_apart(const HyperellipticCurve& c, cplx x1, cplx x2) {
  const double m = std::max(std::abs(x1), std::abs(x2));
  return m > 4.0 * (c.scale() + std::abs(c.centroid())) && std::abs(x1 - x2) > 0.5 * m;
}

// W0 in the x-frame at two regular points; with `drop_pole` the 1/d^2 term of a
// same-sheet pair is omitted.
cplx raw_xx(const HyperellipticCurve& c, cplx x1, cplx y1, cplx x2, cplx y2, bool drop_pole = false) {
  // Canonical argument order makes the value bitwise symmetric.
  if (poly::lex_less(x2, x1) || (x1 == x2 && poly::lex_less(y2, y1))) {
    std::swap(x1, x2);
    std::swap(y1, y2);
  }
  const cplx d = x1 - x2;
  if (!drop_pole && far_apart(c, x1, x2)) return (2.0 * y1 * y2 + c.klein_form(x1, x2)) / (4.0 * y1 * y2 * d * d);
  const cplx df = c.f_divided(x1, x2);
  const cplx gk = c.klein_remainder(x1, x2);
  const cplx yy = 4.0 * y1 * y2;
  if (same_sheet(y1, y2)) {
    const cplx s = y1 + y2;
    const cplx smooth = (df * df / (s * s) + gk) / yy;
    if (drop_pole) return smooth;
    if (std::abs(d) <= 1e-14 * std::max(1.0, std::abs(x1)))
      throw Error(ErrorKind::CoincidentPoints, "W evaluated on the diagonal");
    return 1.0 / (d * d) + smooth;
  }
  const cplx s = y1 - y2;
  return (df * df / (s * s) + gk) / yy;
}

// W0 with the first point at branch point `idx` in its t-chart and the second regular in x.
cplx raw_tx(const HyperellipticCurve& c, int idx, cplx x, cplx y) {
  const cplx e = c.branch_points()[idx];
  const cplx h = branch_cofactor(c, idx);
  const cplx d = e - x;
  if (std::abs(d) <= 1e-14 * std::max(1.0, std::abs(e)))
    throw Error(ErrorKind::CoincidentPoints, "W evaluated on the diagonal at a branch point");
  if (far_apart(c, e, x)) return c.klein_form(e, x) / (2.0 * h * y * d * d);
  return y / (2.0 * h * d * d) + c.klein_remainder(e, x) / (2.0 * h * y);
}

void require_finite(const SurfacePoint& p) {
  if (p.at_infinity) throw Error(ErrorKind::UnsupportedChart, "W is not evaluated at points over infinity");
}

double chart_scale(const HyperellipticCurve& c, const SurfacePoint& p) {
  if (p.is_branch()) {
    double others = std::numeric_limits<double>::infinity();
    const auto& bp = c.branch_points();
    for (std::size_t i = 0; i < bp.size(); ++i)
      if (static_cast<int>(i) != p.branch_index) others = std::min(others, std::abs(bp[i] - bp[p.branch_index]));
    return std::sqrt(others);
  }
  return c.branch_distance(p.x);
}

}  // namespace

cplx raw_bidifferential_x(const HyperellipticCurve& c, cplx x, cplx y, const SurfacePoint& q) {
  require_finite(q);
  if (q.is_branch()) return raw_tx(c, q.branch_index, x, y);
  return raw_xx(c, x, y, q.x, q.y);
}

cplx raw_bidifferential(const HyperellipticCurve& c, const SurfacePoint& p, const SurfacePoint& q) {
  require_finite(p);
  require_finite(q);
  if (p.is_branch() && q.is_branch()) {
    if (p.branch_index == q.branch_index)
      throw Error(ErrorKind::CoincidentPoints, "W evaluated on the diagonal at a branch point");
    const cplx e1 = c.branch_points()[p.branch_index], e2 = c.branch_points()[q.branch_index];
    return c.klein_remainder(e1, e2) / (branch_cofactor(c, p.branch_index) * branch_cofactor(c, q.branch_index));
  }
  if (p.is_branch()) return raw_tx(c, p.branch_index, q.x, q.y);
  if (q.is_branch()) return raw_tx(c, q.branch_index, p.x, p.y);
  return raw_xx(c, p.x, p.y, q.x, q.y);
}

Eigen::VectorXcd v_base(const KernelContext& ctx, const SurfacePoint& p) {
  const auto& c = ctx.curve;
  const auto& C = ctx.periods.C;
  const int g = c.genus();
  switch (chart_of(c, p)) {
    case ChartKind::Regular:
      return v_x(ctx.periods, p.x, p.y);
    case ChartKind::Branch:
      return 2.0 * v_numerators(ctx.periods, p.x) / branch_cofactor(c, p.branch_index);
    case ChartKind::InfinityOdd:
      return -2.0 * C.row(g - 1).transpose() / std::sqrt(c.leading());
    case ChartKind::InfinityEven:
      return -C.row(g - 1).transpose() / (static_cast<double>(p.sheet) * std::sqrt(c.leading()));
  }
  return {};
}

Eigen::VectorXcd v_frame(const KernelContext& ctx, const FrameJet& f) { return v_base(ctx, f.point) / f.jet(1); }

cplx W_base(const KernelContext& ctx, const SurfacePoint& p, const SurfacePoint& q) {
  const cplx raw = raw_bidifferential(ctx.curve, p, q);
  return raw + (v_base(ctx, p).transpose() * ctx.correction * v_base(ctx, q))(0, 0);
}

cplx W_x(const KernelContext& ctx, cplx x, cplx y, const SurfacePoint& q) {
  const cplx raw = raw_bidifferential_x(ctx.curve, x, y, q);
  return raw + (v_x(ctx.periods, x, y).transpose() * ctx.correction * v_base(ctx, q))(0, 0);
}

cplx W_frame(const KernelContext& ctx, const FrameJet& p, const FrameJet& q) {
  return W_base(ctx, p.point, q.point) / (p.jet(1) * q.jet(1));
}

cplx bergman_kernel(const KernelContext& ctx, const FrameJet& p, const FrameJet& q) {
  const Eigen::VectorXcd vp = v_frame(ctx, p);
  const Eigen::VectorXcd vq = v_frame(ctx, q);
  return (vp.transpose() * ctx.periods.im_inverse.cast<cplx>() * vq.conjugate())(0, 0);
}

cplx schiffer_kernel(const KernelContext& ctx, const FrameJet& p, const FrameJet& q) {
  const Eigen::VectorXcd vp = v_frame(ctx, p);
  const Eigen::VectorXcd vq = v_frame(ctx, q);
  return W_frame(ctx, p, q) - kPi * (vp.transpose() * ctx.periods.im_inverse.cast<cplx>() * vq)(0, 0);
}

namespace {

// [W(u0 + eps/2, u0 - eps/2) - eps^{-2}] in the base chart.
cplx diagonal_excess(const KernelContext& ctx, const SurfacePoint& p, double eps) {
  const auto& c = ctx.curve;
  const auto& cm = ctx.correction;
  if (p.is_branch()) {
    const int idx = p.branch_index;
    const cplx e = c.branch_points()[idx];
    const double tau = 0.25 * eps * eps;
    const cplx x = e + tau;
    // f = (x - e) k(x): exact deflation keeps the pole cancellation analytic.
    std::vector<cplx> k(c.coefficients().size() - 1);
    cplx carry = 0.0;
    const auto& f = c.coefficients();
    for (std::size_t n = f.size() - 1; n-- > 0;) {
      carry = f[n + 1] + carry * e;
      k[n] = carry;
    }
    const cplx k0 = poly::eval(k, x);
    const auto dk = poly::derivative(k);
    const cplx k1 = poly::eval(dk, x);
    const cplx raw = k1 / (2.0 * k0) + tau * k1 * k1 / (4.0 * k0 * k0) + c.klein_remainder(x, x) / k0;
    const cplx h = c.continue_cofactor(e, branch_cofactor(c, idx), x, idx);
    const Eigen::VectorXcd vt = 2.0 * v_numerators(ctx.periods, x) / h;
    return raw + (vt.transpose() * cm * vt)(0, 0);
  }
  const cplx x1 = p.x + 0.5 * eps, x2 = p.x - 0.5 * eps;
  const cplx y1 = c.polish_y(x1, c.continue_from(p.x, p.y, x1));
  const cplx y2 = c.polish_y(x2, c.continue_from(p.x, p.y, x2));
  const cplx raw = raw_xx(c, x1, y1, x2, y2, true);
  return raw + (v_x(ctx.periods, x1, y1).transpose() * cm * v_x(ctx.periods, x2, y2))(0, 0);
}

template <class F>
ProjectiveConnection richardson(F&& h, double eps) {
  const cplx h1 = h(eps), h2 = h(0.5 * eps), h4 = h(0.25 * eps);
  ProjectiveConnection out;
  out.coarse = 6.0 * (4.0 * h2 - h1) / 3.0;
  out.fine = 6.0 * (4.0 * h4 - h2) / 3.0;
  out.value = out.fine;
  out.error = std::abs(out.fine - out.coarse);
  if (out.error > 1e-4 * std::max(1.0, std::abs(out.fine)))
    throw Error(ErrorKind::ExtrapolationUnstable, "diagonal-limit extrapolation orders disagree");
  return out;
}

}  // namespace

ProjectiveConnection bergman_proj_connection(const KernelContext& ctx, const FrameJet& f, double rel_eps) {
  require_finite(f.point);
  const double eps = rel_eps * chart_scale(ctx.curve, f.point);
  auto pc = richardson([&](double e) { return diagonal_excess(ctx, f.point, e); }, eps);
  const cplx a1 = f.jet(1);
  const cplx s = f.schwarzian();
  pc.value = (pc.value - s) / (a1 * a1);
  pc.coarse = (pc.coarse - s) / (a1 * a1);
  pc.fine = (pc.fine - s) / (a1 * a1);
  pc.error /= std::norm(a1);
  return pc;
}

ProjectiveConnection schiffer_proj_connection(const KernelContext& ctx, const FrameJet& f, double rel_eps) {
  auto pc = bergman_proj_connection(ctx, f, rel_eps);
  const Eigen::VectorXcd v = v_frame(ctx, f);
  const cplx corr = 6.0 * kPi * (v.transpose() * ctx.periods.im_inverse.cast<cplx>() * v)(0, 0);
  pc.value -= corr;
  pc.coarse -= corr;
  pc.fine -= corr;
  return pc;
}

ProjectiveConnection schiffer_diagonal_limit(const KernelContext& ctx, const FrameJet& f, double rel_eps) {
  require_finite(f.point);
  const auto& c = ctx.curve;
  const Eigen::MatrixXcd M = ctx.periods.im_inverse.cast<cplx>();
  const double eps = rel_eps * chart_scale(c, f.point) * std::abs(f.jet(1));
  auto h = [&](double e) {
    const cplx xi1 = 0.5 * e, xi2 = -0.5 * e;
    const SurfacePoint q1 = point_at(c, f, xi1), q2 = point_at(c, f, xi2);
    const cplx j = dx_dxi(c, f, xi1) * dx_dxi(c, f, xi2);
    const Eigen::VectorXcd v1 = v_x(ctx.periods, q1.x, q1.y), v2 = v_x(ctx.periods, q2.x, q2.y);
    const cplx w = raw_xx(c, q1.x, q1.y, q2.x, q2.y) + (v1.transpose() * ctx.correction * v2)(0, 0);
    const cplx pi_term = kPi * (v1.transpose() * M * v2)(0, 0);
    return (w - pi_term) * j - 1.0 / (e * e);
  };
  return richardson(h, eps);
}

cplx special_divisor_det(const KernelContext& ctx, const std::vector<FrameJet>& frames) {
  const int g = ctx.curve.genus();
  if (static_cast<int>(frames.size()) != g) throw Error(ErrorKind::InvalidArgument, "special_divisor_det needs g points");
  Eigen::MatrixXcd m(g, g);
  for (int k = 0; k < g; ++k) m.row(k) = v_frame(ctx, frames[k]).transpose();
  return m.determinant();
}

void normalize_W(KernelContext& ctx, std::uint64_t seed) {
  const auto& c = ctx.curve;
  const int g = c.genus();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(1.4, 2.2), angle(0.0, 2.0 * kPi);

  for (int attempt = 0; attempt < 16; ++attempt) {
    std::vector<SurfacePoint> probes;
    for (int m = 0; m < g; ++m) {
      // First attempt uses fixed generic positions; later ones come from the seeded stream.
      const double r = attempt == 0 ? 1.6 + 0.13 * m : radius(rng);
      const double th = attempt == 0 ? 0.61 + 2.39 * m : angle(rng);
      probes.push_back(point_on_sheet(c, c.centroid() + std::polar(r * c.scale(), th), 1));
    }
    Eigen::MatrixXcd V(g, g);
    for (int m = 0; m < g; ++m) V.col(m) = v_x(ctx.periods, probes[m].x, probes[m].y);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V);
    const auto& s = svd.singularValues();
    if (!(s(g - 1) > 1e-6 * s(0))) continue;

    Integrand integrand = [&c, &probes](cplx x, cplx y, std::span<cplx> out) {
      for (std::size_t m = 0; m < probes.size(); ++m) out[m] = raw_bidifferential_x(c, x, y, probes[m]);
    };
    QuadratureOptions opt;
    opt.tolerance = ctx.quadrature_tolerance;
    Eigen::MatrixXcd per_loop(ctx.basis.loops.size(), g);
    for (std::size_t k = 0; k < ctx.basis.loops.size(); ++k) {
      const auto r = integrate_path(c, ctx.basis.loops[k], integrand, g, opt);
      for (int m = 0; m < g; ++m) per_loop(k, m) = r.value[m];
    }
    Eigen::MatrixXcd R(g, g);
    for (int i = 0; i < g; ++i) R.row(i) = combine_loops(per_loop, ctx.basis.a[i]).transpose();
    const Eigen::MatrixXcd cm = -R * V.inverse();
    ctx.correction_asymmetry = (cm - cm.transpose()).cwiseAbs().maxCoeff();
    if (ctx.correction_asymmetry > 1e-6 * std::max(1.0, cm.cwiseAbs().maxCoeff()))
      throw Error(ErrorKind::NumericallyDegenerate, "correction matrix is not symmetric");
    ctx.correction = 0.5 * (cm + cm.transpose());
    ctx.probes = probes;
    return;
  }
  throw Error(ErrorKind::ProbePointsDegenerate, "no well-conditioned probe set found");
}

KernelContext make_kernel_context(const HyperellipticCurve& c, const HomologyBasis& basis, double tolerance,
                                  std::uint64_t seed) {
  KernelContext ctx;
  ctx.curve = c;
  ctx.basis = basis;
  ctx.quadrature_tolerance = tolerance;
  ctx.periods = period_matrix(c, basis, tolerance);
  normalize_W(ctx, seed);
  return ctx;
}

WDiagnostics check_W(const KernelContext& ctx, const SurfacePoint& q) {
  const auto& c = ctx.curve;
  const int g = c.genus();
  WDiagnostics d;
  d.correction_asymmetry = ctx.correction_asymmetry;
  Integrand integrand = [&ctx, &q](cplx x, cplx y, std::span<cplx> out) { out[0] = W_x(ctx, x, y, q); };
  QuadratureOptions opt;
  opt.tolerance = ctx.quadrature_tolerance;
  Eigen::MatrixXcd per_loop(ctx.basis.loops.size(), 1);
  for (std::size_t k = 0; k < ctx.basis.loops.size(); ++k)
    per_loop(k, 0) = integrate_path(c, ctx.basis.loops[k], integrand, 1, opt).value[0];
  const Eigen::VectorXcd vq = v_base(ctx, q);
  const double vscale = 2.0 * kPi * vq.cwiseAbs().maxCoeff();
  for (int i = 0; i < g; ++i) {
    d.a_period = std::max(d.a_period, std::abs(combine_loops(per_loop, ctx.basis.a[i])(0)));
    const cplx b = combine_loops(per_loop, ctx.basis.b[i])(0);
    d.b_period = std::max(d.b_period, std::abs(b - 2.0 * kPi * kI * vq(i)) / vscale);
  }
  for (const auto& p : ctx.probes) {
    if (same_point(p, q, 1e-12)) continue;
    d.symmetry = std::max(d.symmetry, std::abs(W_base(ctx, p, q) - W_base(ctx, q, p)));
  }
  return d;
}

}  // namespace conic
