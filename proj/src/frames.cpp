#include "conic/frames.hpp"

#include <cmath>

#include "conic/polynomial.hpp"

namespace conic {

std::string_view to_string(ChartKind kind) {
  switch (kind) {
    case ChartKind::Regular: return "regular";
    case ChartKind::Branch: return "branch";
    case ChartKind::InfinityOdd: return "infinity-odd";
    case ChartKind::InfinityEven: return "infinity-even";
  }
  return "unknown";
}

ChartKind chart_of(const HyperellipticCurve& c, const SurfacePoint& p) {
  if (p.at_infinity) return c.branch_at_infinity() ? ChartKind::InfinityOdd : ChartKind::InfinityEven;
  return p.is_branch() ? ChartKind::Branch : ChartKind::Regular;
}

cplx FrameJet::schwarzian() const {
  const cplx a1 = jet(1), a2 = jet(2), a3 = jet(3);
  return 6.0 * a3 / a1 - 6.0 * (a2 / a1) * (a2 / a1);
}

cplx branch_cofactor(const HyperellipticCurve& c, int index) {
  return std::sqrt(c.df(c.branch_points().at(index)));
}

namespace {

FrameJet from_series(const HyperellipticCurve& c, const SurfacePoint& p, series::Series xi) {
  FrameJet f;
  f.point = p;
  f.chart = chart_of(c, p);
  if (xi.size() < 2 || xi[1] == 0.0) throw Error(ErrorKind::InvalidArgument, "frame needs a nonzero leading jet coefficient");
  xi[0] = 0.0;
  f.xi = series::truncate(xi, kFrameOrder);
  f.inverse = series::reversion(f.xi, kFrameOrder);
  return f;
}

}  // namespace

FrameJet chart_frame(const HyperellipticCurve& c, const SurfacePoint& p) { return from_series(c, p, {0.0, 1.0}); }

FrameJet user_frame(const HyperellipticCurve& c, const SurfacePoint& p, cplx a1, cplx a2, cplx a3) {
  return from_series(c, p, {0.0, a1, a2, a3});
}

FrameJet rescaled(const FrameJet& f, cplx lambda) {
  FrameJet g = f;
  for (auto& a : g.xi) a *= lambda;
  for (std::size_t n = 1; n < g.inverse.size(); ++n) g.inverse[n] /= std::pow(lambda, static_cast<double>(n));
  return g;
}

FrameJet flipped(const FrameJet& f) {
  FrameJet g = rescaled(f, -1.0);
  g.branch_tag = -f.branch_tag;
  return g;
}

std::vector<SurfacePoint> omega_zeros(const HyperellipticCurve& c, std::span<const cplx> omega) {
  const auto q = poly::trim(omega);
  if (q.size() == 1 && q[0] == 0.0) throw Error(ErrorKind::InvalidArgument, "omega is identically zero");
  if (static_cast<int>(omega.size()) > c.genus())
    throw Error(ErrorKind::InvalidArgument, "omega must have at most g raw coefficients");
  if (static_cast<int>(q.size()) - 1 < c.genus() - 1)
    throw Error(ErrorKind::UnsupportedChart, "omega vanishes at infinity");
  const auto r = poly::roots(q);
  std::vector<SurfacePoint> out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (std::size_t j = i + 1; j < r.size(); ++j)
      if (std::abs(r[i] - r[j]) <= c.tolerances().root_separation)
        throw Error(ErrorKind::NotASimpleZero, "omega has a repeated zero");
    if (c.branch_distance(r[i]) <= c.tolerances().root_separation)
      throw Error(ErrorKind::NotASimpleZero, "omega vanishes at a branch point (zero of even order)");
    out.push_back(point_on_sheet(c, r[i], 1));
    out.push_back(point_on_sheet(c, r[i], -1));
  }
  return out;
}

FrameJet distinguished_frame(const HyperellipticCurve& c, std::span<const cplx> omega, const SurfacePoint& p,
                             int branch_tag) {
  if (p.at_infinity) throw Error(ErrorKind::UnsupportedChart, "distinguished frames at infinity are not supported");
  if (p.is_branch()) throw Error(ErrorKind::NotASimpleZero, "a holomorphic form vanishes to even order at a branch point");
  const std::size_t n = kFrameOrder + 3;
  const auto F = poly::shift(c.coefficients(), p.x);
  const auto ys = series::sqrt(series::truncate(F, n), p.y, n);
  const auto inv_y = series::inverse(ys, n);
  const auto Q = poly::shift(omega, p.x);
  const auto phi = series::mul(series::truncate(Q, n), inv_y, n);

  double qscale = 0.0;
  for (auto a : omega) qscale = std::max(qscale, std::abs(a));
  const double tol = 1e-9 * qscale / std::max(std::abs(p.y), 1e-300) * std::max(1.0, std::abs(p.x));
  if (std::abs(phi[0]) > tol) throw Error(ErrorKind::NotASimpleZero, "omega does not vanish at the point");
  if (std::abs(phi[1]) <= tol) throw Error(ErrorKind::NotASimpleZero, "omega has a zero of order > 1");

  // w = int omega = u^2 r(u), xi = u sqrt(r(u)).
  const auto w = series::integrate(phi, n);
  series::Series r(n - 2);
  for (std::size_t k = 0; k + 2 < n; ++k) r[k] = w[k + 2];
  r[0] = phi[1] / 2.0;
  const cplx s0 = static_cast<double>(branch_tag >= 0 ? 1 : -1) * std::sqrt(r[0]);
  const auto s = series::sqrt(r, s0, kFrameOrder);
  series::Series xi(kFrameOrder, cplx(0.0));
  for (std::size_t k = 0; k + 1 < kFrameOrder; ++k) xi[k + 1] = s[k];
  auto f = from_series(c, p, xi);
  f.branch_tag = branch_tag >= 0 ? 1 : -1;
  f.distinguished = true;
  return f;
}

SurfacePoint point_at(const HyperellipticCurve& c, const FrameJet& f, cplx xi) {
  const cplx u = series::eval(f.inverse, xi);
  if (f.chart == ChartKind::Regular) {
    const cplx x = f.point.x + u;
    if (std::abs(u) >= 0.5 * c.branch_distance(f.point.x))
      throw Error(ErrorKind::InvalidArgument, "frame coordinate outside the continuation disk");
    SurfacePoint q;
    q.x = x;
    q.y = c.polish_y(x, c.continue_from(f.point.x, f.point.y, x));
    return q;
  }
  if (f.chart == ChartKind::Branch) {
    if (u == 0.0) return f.point;
    const int idx = f.point.branch_index;
    const cplx e = c.branch_points()[idx];
    const cplx x = e + u * u;
    SurfacePoint q;
    q.x = x;
    q.y = c.polish_y(x, u * c.continue_cofactor(e, branch_cofactor(c, idx), x, idx));
    return q;
  }
  throw Error(ErrorKind::UnsupportedChart, "sampling near infinity is not supported");
}

cplx dx_dxi(const HyperellipticCurve&, const FrameJet& f, cplx xi) {
  const cplx du = series::eval(series::derivative(f.inverse), xi);
  if (f.chart == ChartKind::Regular) return du;
  if (f.chart == ChartKind::Branch) return 2.0 * series::eval(f.inverse, xi) * du;
  throw Error(ErrorKind::UnsupportedChart, "dx/dxi near infinity is not supported");
}

}  // namespace conic
