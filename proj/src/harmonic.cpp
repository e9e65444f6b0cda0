#include "conic/harmonic.hpp"

#include <cmath>
#include <limits>

namespace conic {

namespace {

struct OmegaSigma {
  Eigen::VectorXcd omega, sigma;
};

OmegaSigma omega_sigma(const HarmonicContext& hc, const std::vector<cplx>& raw) {
  const int n = hc.size();
  const int g = static_cast<int>(hc.v_at_cones.cols());
  const Eigen::MatrixXd& M = hc.kernels->periods.im_inverse;
  Eigen::VectorXcd iv(g);
  for (int a = 0; a < g; ++a) iv(a) = raw[n + a];
  OmegaSigma out{Eigen::VectorXcd(n), Eigen::VectorXcd(n)};
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd im_v = hc.v_at_cones.row(k).imag().transpose();
    const Eigen::VectorXd re_v = hc.v_at_cones.row(k).real().transpose();
    const cplx s_im = iv.dot((M * im_v).cast<cplx>());
    const cplx s_re = iv.dot((M * re_v).cast<cplx>());
    // dot() conjugates its first argument; undo that for the plain sum.
    out.omega(k) = -raw[k] + 2.0 * kPi * kI * std::conj(s_im);
    out.sigma(k) = -kI * raw[k] + 2.0 * kPi * kI * std::conj(s_re);
  }
  return out;
}

void check_clearance(const HarmonicContext& hc, const SheetPath& path) {
  const auto& c = hc.kernels->curve;
  for (std::size_t v = 0; v < path.size(); ++v) {
    for (const auto& p : hc.divisor.points) {
      if (std::abs(path.x[v] - p.x) >= hc.clearance) continue;
      // Poles only sit on the sheet of P_k; a branch-point cone is on both.
      if (p.is_branch() || path.y[v] == 0.0 || std::abs(path.y[v] - p.y) <= std::abs(path.y[v] + p.y))
        throw Error(ErrorKind::PathThroughSingularity, "path passes through a cone point");
    }
  }
  (void)c;
}

std::vector<std::vector<cplx>> cycle_integrals(const HarmonicContext& hc) {
  const auto& ctx = *hc.kernels;
  const int dim = hc.size() + ctx.curve.genus();
  const auto f = harmonic_integrand(hc);
  QuadratureOptions opt;
  opt.tolerance = ctx.quadrature_tolerance;
  Eigen::MatrixXcd per_loop(ctx.basis.loops.size(), dim);
  for (std::size_t l = 0; l < ctx.basis.loops.size(); ++l) {
    check_clearance(hc, ctx.basis.loops[l]);
    const auto r = integrate_path(ctx.curve, ctx.basis.loops[l], f, dim, opt);
    for (int d = 0; d < dim; ++d) per_loop(l, d) = r.value[d];
  }
  std::vector<std::vector<cplx>> out;
  const int g = ctx.curve.genus();
  for (int i = 0; i < 2 * g; ++i) {
    const auto& cyc = i < g ? ctx.basis.a[i] : ctx.basis.b[i - g];
    const Eigen::VectorXcd v = combine_loops(per_loop, cyc);
    out.emplace_back(v.data(), v.data() + v.size());
  }
  return out;
}

SheetPath lasso(const HyperellipticCurve& c, const SurfacePoint& start) {
  int b = -1;
  const double d = c.branch_distance(start.x, &b);
  const auto& bp = c.branch_points();
  double others = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < bp.size(); ++i)
    if (static_cast<int>(i) != b) others = std::min(others, std::abs(bp[i] - bp[b]));
  const double rho = 0.3 * std::min(others, d);
  const cplx u = (start.x - bp[b]) / d;
  std::vector<cplx> poly = {start.x};
  for (int k = 0; k <= 32; ++k) poly.push_back(bp[b] + rho * u * std::polar(1.0, 2.0 * kPi * k / 32));
  poly.push_back(start.x);
  return continue_y(c, poly, start.y);
}

SheetPath join(SheetPath a, const SheetPath& b) {
  a.x.insert(a.x.end(), b.x.begin() + 1, b.x.end());
  a.y.insert(a.y.end(), b.y.begin() + 1, b.y.end());
  a.end_branch = b.end_branch;
  return a;
}

bool arrives_on(const SheetPath& p, const SurfacePoint& q) {
  if (q.is_branch()) return true;
  const cplx y = p.y.back();
  return std::abs(y - q.y) <= std::abs(y + q.y);
}

bool clear(const HarmonicContext& hc, const SheetPath& p) {
  try {
    check_clearance(hc, p);
    return true;
  } catch (const Error&) {
    return false;
  }
}

SheetPath auto_route(const HarmonicContext& hc, const SurfacePoint& from, const SurfacePoint& to) {
  const auto& c = hc.kernels->curve;
  std::vector<std::vector<cplx>> candidates = {{from.x, to.x}};
  const cplx mid = 0.5 * (from.x + to.x);
  const double len = std::max(std::abs(to.x - from.x), 0.1 * c.scale());
  for (int k = 0; k < 8; ++k)
    candidates.push_back({from.x, mid + 0.6 * len * std::polar(1.0, 0.35 + 2.0 * kPi * k / 8), to.x});
  for (const auto& poly : candidates) {
    SheetPath p;
    try {
      p = continue_y(c, poly, from.y);
      if (!arrives_on(p, to)) p = join(lasso(c, from), p.x.size() ? continue_y(c, poly, -from.y) : p);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::PathHitsBranchPoint) continue;
      throw;
    }
    if (!arrives_on(p, to)) continue;
    if (clear(hc, p)) return p;
  }
  throw Error(ErrorKind::PathThroughSingularity, "no admissible route between the points");
}

}  // namespace

Integrand harmonic_integrand(const HarmonicContext& hc) {
  const HarmonicContext* h = &hc;
  return [h](cplx x, cplx y, std::span<cplx> out) {
    const auto& ctx = *h->kernels;
    const int n = h->size();
    for (int k = 0; k < n; ++k)
      out[k] = W_x(ctx, x, y, h->divisor.frames[k].point) / h->divisor.frames[k].jet(1);
    const Eigen::VectorXcd v = v_x(ctx.periods, x, y);
    for (int a = 0; a < v.size(); ++a) out[n + a] = v(a);
  };
}

Eigen::VectorXcd harmonic_increment(const HarmonicContext& hc, const std::vector<cplx>& raw) {
  const auto os = omega_sigma(hc, raw);
  Eigen::VectorXcd dh(hc.size());
  for (int k = 0; k < hc.size(); ++k) dh(k) = os.omega(k).real() - kI * os.sigma(k).real();
  return dh;
}

HarmonicContext build_harmonic(const KernelContext& ctx, const ConicalDivisor& d, double period_tol) {
  HarmonicContext hc;
  hc.kernels = &ctx;
  hc.divisor = d;
  const auto& c = ctx.curve;
  const int n = static_cast<int>(d.frames.size());
  const int g = c.genus();
  for (const auto& p : d.points)
    if (p.at_infinity) throw Error(ErrorKind::UnsupportedChart, "cone points over infinity are not supported here");
  hc.v_at_cones.resize(n, g);
  for (int k = 0; k < n; ++k) hc.v_at_cones.row(k) = v_frame(ctx, d.frames[k]).transpose();
  hc.clearance = 1e-3 * c.scale();

  for (int attempt = 0; attempt < 16; ++attempt) {
    const cplx x = c.centroid() + 0.77 * c.scale() * std::polar(1.0, 0.913 + 0.71 * attempt);
    bool ok = c.branch_distance(x) > 0.05 * c.scale();
    for (const auto& p : d.points) ok = ok && std::abs(x - p.x) > 0.05 * c.scale();
    if (ok) {
      hc.base = point_on_sheet(c, x, 1);
      break;
    }
    if (attempt == 15) throw Error(ErrorKind::PathThroughSingularity, "no admissible base point");
  }

  const auto cyc = cycle_integrals(hc);
  hc.omega_periods.resize(2 * g, n);
  hc.sigma_periods.resize(2 * g, n);
  for (int i = 0; i < 2 * g; ++i) {
    const auto os = omega_sigma(hc, cyc[i]);
    hc.omega_periods.row(i) = os.omega.transpose();
    hc.sigma_periods.row(i) = os.sigma.transpose();
  }
  double scale = 1.0;
  for (int i = 0; i < 2 * g; ++i)
    for (int k = 0; k < n; ++k) scale = std::max({scale, std::abs(hc.omega_periods(i, k)), std::abs(hc.sigma_periods(i, k))});
  hc.max_real_period = std::max(hc.omega_periods.real().cwiseAbs().maxCoeff(), hc.sigma_periods.real().cwiseAbs().maxCoeff());
  if (hc.max_real_period > period_tol * scale)
    throw Error(ErrorKind::PeriodsNotImaginary, "Omega/Sigma periods have real part " + std::to_string(hc.max_real_period));
  return hc;
}

Eigen::VectorXcd integrate_H(const HarmonicContext& hc, const SheetPath& path) {
  check_clearance(hc, path);
  const auto& ctx = *hc.kernels;
  QuadratureOptions opt;
  opt.tolerance = ctx.quadrature_tolerance;
  const auto r = integrate_path(ctx.curve, path, harmonic_integrand(hc), hc.size() + ctx.curve.genus(), opt);
  return harmonic_increment(hc, r.value);
}

Eigen::VectorXcd H_at(const HarmonicContext& hc, const SurfacePoint& q, const std::optional<std::vector<cplx>>& polyline) {
  const auto& c = hc.kernels->curve;
  SheetPath path;
  if (polyline) {
    path = continue_y(c, *polyline, hc.base.y);
    if (!arrives_on(path, q)) throw Error(ErrorKind::InvalidArgument, "path arrives on the other sheet");
  } else {
    path = auto_route(hc, hc.base, q);
  }
  return integrate_H(hc, path);
}

Eigen::VectorXcd H_from(const HarmonicContext& hc, const SurfacePoint& start, const Eigen::VectorXcd& h_start,
                        const SurfacePoint& q) {
  const std::vector<cplx> poly = {start.x, q.x};
  const auto path = continue_y(hc.kernels->curve, poly, start.y);
  if (!arrives_on(path, q)) throw Error(ErrorKind::InvalidArgument, "segment arrives on the other sheet");
  return h_start + integrate_H(hc, path);
}

ConeFit fit_expansion(const HarmonicContext& hc, int j, double r, int samples, double residual_tol) {
  const auto& c = hc.kernels->curve;
  const auto& frame = hc.divisor.frames.at(j);
  const int n = hc.size();
  ConeFit fit;
  fit.j = j;
  fit.pole_ratio_min = std::numeric_limits<double>::infinity();

  auto one_radius = [&](double rho) {
    std::vector<SurfacePoint> q(samples);
    std::vector<cplx> xi(samples);
    for (int m = 0; m < samples; ++m) {
      xi[m] = std::polar(rho, 2.0 * kPi * m / samples);
      q[m] = point_at(c, frame, xi[m]);
    }
    std::vector<Eigen::VectorXcd> h(samples + 1);
    h[0] = H_at(hc, q[0]);
    for (int m = 0; m < samples; ++m) h[m + 1] = H_from(hc, q[m], h[m], q[(m + 1) % samples]);
    fit.closure = std::max(fit.closure, (h[samples] - h[0]).cwiseAbs().maxCoeff());

    std::vector<ExpansionCoefficients> out(n);
    for (int k = 0; k < n; ++k) {
      std::vector<cplx> vals(samples);
      for (int m = 0; m < samples; ++m) {
        vals[m] = h[m](k);
        if (k == j) {
          fit.pole_ratio_min = std::min(fit.pole_ratio_min, std::abs(vals[m]) * rho);
          fit.pole_ratio_max = std::max(fit.pole_ratio_max, std::abs(vals[m]) * rho);
          vals[m] -= 1.0 / xi[m];
        }
      }
      ExpansionCoefficients e;
      e.radius = rho;
      for (int m = 0; m < samples; ++m) {
        const cplx ph = xi[m] / rho;
        e.a += vals[m];
        e.b += vals[m] * std::conj(ph);
        e.c += vals[m] * ph;
      }
      e.a /= samples;
      e.b /= samples * rho;
      e.c /= samples * rho;
      double ss = 0.0;
      for (int m = 0; m < samples; ++m) ss += std::norm(vals[m] - (e.a + e.b * xi[m] + e.c * std::conj(xi[m])));
      e.residual = std::sqrt(ss / samples) / rho;
      if (e.residual > residual_tol * std::max({1.0, std::abs(e.b), std::abs(e.c)}))
        throw Error(ErrorKind::FitResidualTooLarge, "harmonic fit residual " + std::to_string(e.residual));
      out[k] = e;
    }
    return out;
  };

  fit.at_r = one_radius(r);
  fit.at_half = one_radius(0.5 * r);
  fit.extrapolated.resize(n);
  for (int k = 0; k < n; ++k) {
    auto& e = fit.extrapolated[k];
    const auto &e1 = fit.at_r[k], &e2 = fit.at_half[k];
    e.a = 2.0 * e2.a - e1.a;
    e.b = 2.0 * e2.b - e1.b;
    e.c = 2.0 * e2.c - e1.c;
    e.residual = std::max(e1.residual, e2.residual);
    e.radius = 0.0;
  }
  return fit;
}

CrossCheck prop1_crosscheck(const KernelContext& ctx, const ConicalDivisor& d, double r) {
  CrossCheck cc;
  cc.szero = s_zero(ctx, d);
  const auto hc = build_harmonic(ctx, d);
  cc.max_real_period = hc.max_real_period;
  const int n = hc.size();
  cc.scale = std::max(cc.szero.S_aa.cwiseAbs().maxCoeff(), cc.szero.S_ah.cwiseAbs().maxCoeff());
  for (int j = 0; j < n; ++j) cc.fits.push_back(fit_expansion(hc, j, r));
  cc.pass = true;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      for (int which = 0; which < 2; ++which) {
        CrossCheckEntry e;
        e.k = k;
        e.j = j;
        e.quantity = which == 0 ? "b" : "c";
        e.kernel = which == 0 ? cc.szero.S_aa(k, j) : cc.szero.S_ah(k, j);
        e.fitted = which == 0 ? cc.fits[j].extrapolated[k].b : cc.fits[j].extrapolated[k].c;
        e.abs_diff = std::abs(e.fitted - e.kernel);
        e.rel_diff = e.abs_diff / std::max(std::abs(e.kernel), 1e-300);
        e.tolerance = (which == 0 && k == j ? 1e-3 : 1e-4) * cc.scale;
        e.pass = e.abs_diff < e.tolerance;
        cc.pass = cc.pass && e.pass;
        cc.entries.push_back(e);
      }
    }
  return cc;
}

}  // namespace conic
