#include "conic/integrals.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "conic/polynomial.hpp"

namespace conic {

namespace {

constexpr int kRadialOrder = 8;
constexpr double kPanelTolerance = 1e-8;
constexpr double kRingTolerance = 1e-7;
constexpr int kMaxAngleFactor = 64;
// Relative accuracy of T(0) and of the H periods, not seen by the level difference.
constexpr double kKernelFloor = 1e-6;

struct Rule {
  std::vector<double> x, w;
};

// Gauss-Legendre on [0, 1].
Rule gauss_legendre(int n) {
  Rule r;
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5)), dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.x.push_back(0.5 * (1.0 - z));
    r.w.push_back(1.0 / ((1.0 - z * z) * dp * dp));
  }
  return r;
}

double smooth_step(double v) {
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / v), b = std::exp(-1.0 / (1.0 - v));
  return a / (a + b);
}

// 1 inside half the radius, 0 outside the radius.
double cutoff(double d, double r) { return smooth_step(2.0 * (1.0 - d / r)); }

int panels_for(int level) { return 1 << level; }
int angles_for(int level) { return 8 << level; }

struct Layout {
  std::vector<QuadratureRegion> regions;
  std::vector<cplx> special;
  std::vector<double> special_radius;
};

Layout layout(const HyperellipticCurve& c, std::span<const cplx> omega) {
  Layout L;
  for (cplx e : c.branch_points()) L.special.push_back(e);
  std::vector<cplx> q(omega.begin(), omega.end());
  q = poly::trim(q);
  std::vector<cplx> zeros;
  if (q.size() > 1) zeros = poly::roots(q);
  for (cplx z : zeros) {
    bool dup = false;
    for (cplx s : L.special) dup = dup || std::abs(s - z) < 1e-12 * c.scale();
    if (!dup) L.special.push_back(z);
  }
  const int nb = static_cast<int>(c.branch_points().size());
  for (std::size_t i = 0; i < L.special.size(); ++i) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < L.special.size(); ++j)
      if (i != j) d = std::min(d, std::abs(L.special[i] - L.special[j]));
    if (!std::isfinite(d)) d = c.scale();
    L.special_radius.push_back(0.45 * d);
  }

  QuadratureRegion outer;
  double best = -1.0;
  for (int a = 0; a < 8; ++a) {
    const cplx x = c.centroid() + 0.5 * c.scale() * std::polar(1.0, 0.37 + 0.9 * a);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < L.special.size(); ++i) m = std::min(m, std::abs(x - L.special[i]) / L.special_radius[i]);
    if (m > best + 1e-12) {
      best = m;
      outer.center = x;
    }
  }
  outer.radius = c.scale();
  L.regions.push_back(outer);
  for (std::size_t i = 0; i < L.special.size(); ++i) {
    QuadratureRegion r;
    r.center = L.special[i];
    r.radius = L.special_radius[i];
    if (static_cast<int>(i) < nb) {
      r.kind = QuadratureRegion::Kind::Branch;
      r.branch_index = static_cast<int>(i);
    } else {
      r.kind = QuadratureRegion::Kind::Cone;
    }
    L.regions.push_back(r);
  }
  return L;
}

struct Position {
  cplx x;
  double weight;
};

double radial_extent(const QuadratureRegion& r) {
  switch (r.kind) {
    case QuadratureRegion::Kind::Outer: return 1.0;
    case QuadratureRegion::Kind::Branch: return std::sqrt(r.radius);
    case QuadratureRegion::Kind::Cone: return r.radius;
  }
  return 0.0;
}

// x and per-sheet weight at (s, phi) before the radial and angular rule weights.
Position position(const HyperellipticCurve& c, std::span<const cplx> omega, const Layout& L,
                  const QuadratureRegion& r, double s, double phi) {
  Position p{};
  const cplx dir = std::polar(1.0, phi);
  double jac = 0.0, dens = 0.0, cut = 0.0;
  switch (r.kind) {
    case QuadratureRegion::Kind::Outer: {
      const double h = s / ((1.0 - s) * (1.0 - s));
      const double dh = (1.0 + s) / ((1.0 - s) * (1.0 - s) * (1.0 - s));
      p.x = r.center + r.radius * h * dir;
      jac = r.radius * r.radius * h * dh;
      dens = omega_density(c, omega, p.x);
      cut = 1.0;
      for (std::size_t i = 0; i < L.special.size(); ++i) cut -= cutoff(std::abs(p.x - L.special[i]), L.special_radius[i]);
      break;
    }
    case QuadratureRegion::Kind::Branch: {
      p.x = r.center + s * s * dir;
      const cplx qv = poly::eval(omega, p.x);
      jac = 2.0 * s;
      dens = std::norm(qv) / std::abs(c.f_divided(p.x, r.center));
      cut = cutoff(s * s, r.radius);
      break;
    }
    case QuadratureRegion::Kind::Cone: {
      p.x = r.center + s * dir;
      jac = s;
      dens = omega_density(c, omega, p.x);
      cut = cutoff(s, r.radius);
      break;
    }
  }
  p.weight = cut <= 0.0 ? 0.0 : jac * dens * cut;
  return p;
}

double ring_sum(const HyperellipticCurve& c, std::span<const cplx> omega, const Layout& L, const QuadratureRegion& r,
                double s, int angles) {
  double acc = 0.0;
  for (int m = 0; m < angles; ++m) acc += position(c, omega, L, r, s, (m + 0.5) * 2.0 * kPi / angles).weight;
  return acc * 2.0 * kPi / angles;
}

struct Ring {
  double s = 0.0, ws = 0.0;
  int angles = 0;
  double sum = 0.0;
};

// Doubles the angle count until the ring sum is resolved.
Ring make_ring(const HyperellipticCurve& c, std::span<const cplx> omega, const Layout& L, const QuadratureRegion& r,
               double s, int base) {
  Ring ring{s, 0.0, base, ring_sum(c, omega, L, r, s, base)};
  while (ring.angles < base * kMaxAngleFactor) {
    const double finer = ring_sum(c, omega, L, r, s, 2 * ring.angles);
    const bool ok = std::abs(finer - ring.sum) <= kRingTolerance * std::abs(finer);
    if (ok) break;
    ring.angles *= 2;
    ring.sum = finer;
  }
  return ring;
}

std::vector<Ring> panel_rings(const HyperellipticCurve& c, std::span<const cplx> omega, const Layout& L,
                              const QuadratureRegion& r, double a, double b, int base, const Rule& gl) {
  std::vector<Ring> out;
  for (std::size_t k = 0; k < gl.x.size(); ++k) {
    out.push_back(make_ring(c, omega, L, r, a + (b - a) * gl.x[k], base));
    out.back().ws = gl.w[k] * (b - a);
  }
  return out;
}

double rings_total(const std::vector<Ring>& rings) {
  double acc = 0.0;
  for (const auto& r : rings) acc += r.ws * r.sum;
  return acc;
}

// Uniform radial panels, bisected wherever the area density is not resolved.
std::vector<Ring> region_rings(const HyperellipticCurve& c, std::span<const cplx> omega, const Layout& L,
                               const QuadratureRegion& r, int panels, int base, const Rule& gl) {
  const double S = radial_extent(r);
  struct Panel {
    double a, b;
    std::vector<Ring> rings;
  };
  std::vector<Panel> todo;
  double total = 0.0;
  for (int i = panels - 1; i >= 0; --i) {
    Panel p{S * i / panels, S * (i + 1) / panels, {}};
    p.rings = panel_rings(c, omega, L, r, p.a, p.b, base, gl);
    total += rings_total(p.rings);
    todo.push_back(std::move(p));
  }
  const double tol = kPanelTolerance * total / panels;
  std::vector<Ring> out;
  while (!todo.empty()) {
    Panel p = std::move(todo.back());
    todo.pop_back();
    const double m = 0.5 * (p.a + p.b);
    Panel lo{p.a, m, panel_rings(c, omega, L, r, p.a, m, base, gl)};
    Panel hi{m, p.b, panel_rings(c, omega, L, r, m, p.b, base, gl)};
    if (std::abs(rings_total(p.rings) - rings_total(lo.rings) - rings_total(hi.rings)) <= tol || p.b - p.a < S * 1e-4) {
      out.insert(out.end(), p.rings.begin(), p.rings.end());
    } else {
      todo.push_back(std::move(hi));
      todo.push_back(std::move(lo));
    }
  }
  return out;
}

double segment_distance(cplx a, cplx b, cplx p) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  double t = len2 > 0.0 ? std::real((p - a) * std::conj(d)) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(a + t * d - p);
}

}  // namespace

double omega_density(const HyperellipticCurve& c, std::span<const cplx> omega, cplx x) {
  return std::norm(poly::eval(omega, x)) / std::abs(c.f(x));
}

std::size_t quadrature_size(const HyperellipticCurve& c, std::span<const cplx> omega, int level) {
  const auto L = layout(c, omega);
  const Rule gl = gauss_legendre(kRadialOrder);
  std::size_t n = 0;
  for (const auto& r : L.regions)
    for (const auto& ring : region_rings(c, omega, L, r, panels_for(level), angles_for(level), gl)) n += 2 * ring.angles;
  return n;
}

int level_for_budget(const HyperellipticCurve& c, std::span<const cplx> omega, std::size_t budget) {
  if (quadrature_size(c, omega, 2) > budget)
    throw Error(ErrorKind::BudgetExhausted, "budget " + std::to_string(budget) + " is below the minimal quadrature (" +
                                                std::to_string(quadrature_size(c, omega, 2)) + " nodes)");
  int level = 2;
  while (level < 7 && quadrature_size(c, omega, level + 1) <= budget) ++level;
  return level;
}

SurfaceQuadrature build_quadrature(const HyperellipticCurve& c, std::span<const cplx> omega, int level) {
  if (level < 1) throw Error(ErrorKind::InvalidArgument, "quadrature level must be >= 1");
  const auto L = layout(c, omega);
  SurfaceQuadrature q;
  q.regions = L.regions;
  q.omega.assign(omega.begin(), omega.end());
  q.level = level;
  q.radial_panels = panels_for(level);
  q.radial_order = kRadialOrder;
  q.angles = angles_for(level);
  const Rule gl = gauss_legendre(kRadialOrder);

  for (std::size_t ri = 0; ri < L.regions.size(); ++ri) {
    const auto& reg = L.regions[ri];
    const auto rings = region_rings(c, omega, L, reg, q.radial_panels, q.angles, gl);
    q.ring_angles.emplace_back();
    for (std::size_t ir = 0; ir < rings.size(); ++ir) {
      const auto& ring = rings[ir];
      q.ring_angles.back().push_back(ring.angles);
      const double dphi = 2.0 * kPi / ring.angles;
      for (int m = 0; m < ring.angles; ++m) {
        const auto p = position(c, omega, L, reg, ring.s, (m + 0.5) * dphi);
        if (!(p.weight > 0.0)) continue;
        for (int sheet : {1, -1}) {
          SurfaceNode n;
          n.point = point_on_sheet(c, p.x, sheet);
          n.weight = p.weight * ring.ws * dphi;
          n.region = static_cast<int>(ri);
          n.ring = static_cast<int>(ir);
          n.angle = m;
          q.nodes.push_back(n);
          q.area += n.weight;
        }
      }
    }
  }
  return q;
}

MonteCarloArea monte_carlo_area(const HyperellipticCurve& c, std::span<const cplx> omega, std::size_t per_region,
                                std::uint64_t seed) {
  const auto L = layout(c, omega);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int side = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(per_region))));
  MonteCarloArea out;
  double var = 0.0;
  for (const auto& reg : L.regions) {
    const double S = radial_extent(reg);
    const double cell = S / side * (2.0 * kPi / side);
    for (int i = 0; i < side; ++i) {
      // Two jittered samples per stratum give a per-stratum variance estimate.
      for (int j = 0; j < side; ++j) {
        double v[2];
        for (double& vv : v) {
          const double s = (i + u(rng)) * S / side, phi = (j + u(rng)) * 2.0 * kPi / side;
          vv = 2.0 * position(c, omega, L, reg, s, phi).weight * cell;
        }
        out.value += 0.5 * (v[0] + v[1]);
        var += 0.25 * (v[0] - v[1]) * (v[0] - v[1]);
        out.samples += 2;
      }
    }
  }
  out.error = 3.0 * std::sqrt(var);
  return out;
}

Eigen::MatrixXcd holomorphic_gram(const KernelContext& ctx, const SurfaceQuadrature& q) {
  const int g = ctx.curve.genus();
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(g, g);
  for (const auto& n : q.nodes) {
    const Eigen::VectorXcd v = v_x(ctx.periods, n.point.x, n.point.y);
    const double dens = omega_density(ctx.curve, q.omega, n.point.x);
    G += (n.weight / dens) * v * v.adjoint();
  }
  return G;
}

Eigen::MatrixXcd H_on_nodes(const HarmonicContext& hc, const SurfaceQuadrature& q, int workers) {
  const auto& ctx = *hc.kernels;
  const auto& c = ctx.curve;
  const int n = hc.size();
  const int dim = n + c.genus();
  Eigen::MatrixXcd H(q.nodes.size(), n);
  const auto base_integrand = harmonic_integrand(hc);
  const Integrand both = [&base_integrand, dim](cplx x, cplx y, std::span<cplx> out) {
    base_integrand(x, y, out.subspan(0, dim));
    base_integrand(x, -y, out.subspan(dim, dim));
  };
  QuadratureOptions opt;
  opt.tolerance = std::max(ctx.quadrature_tolerance, 1e-12);
  const auto L = layout(c, q.omega);
  // Node index of the + and - labelled points at each position of a region.
  std::vector<std::vector<std::size_t>> offset(q.regions.size());
  std::vector<std::vector<long>> first(q.regions.size());
  for (std::size_t ri = 0; ri < q.regions.size(); ++ri) {
    std::size_t total = 0;
    for (int a : q.ring_angles[ri]) {
      offset[ri].push_back(total);
      total += a;
    }
    first[ri].assign(total, -1);
  }
  for (std::size_t i = 0; i < q.nodes.size(); i += 2) {
    const auto& nd = q.nodes[i];
    first[nd.region][offset[nd.region][nd.ring] + nd.angle] = static_cast<long>(i);
  }

  auto run_region = [&](std::size_t ri) {
    const auto& reg = q.regions[ri];
    const auto& idx = first[ri];
    struct State {
      bool done = false;
      cplx x, y;  // continued y labelled "plus"
      Eigen::VectorXcd hp, hm;
    };
    std::vector<State> st(idx.size());
    const bool outward = reg.kind == QuadratureRegion::Kind::Outer;

    auto admissible = [&](cplx a, cplx b) {
      if (!outward) return true;
      for (std::size_t i = 0; i < L.special.size(); ++i)
        if (segment_distance(a, b, L.special[i]) < 0.3 * L.special_radius[i]) return false;
      return true;
    };
    auto step = [&](const State& from, cplx x) {
      const std::vector<cplx> poly = {from.x, x};
      const auto path = continue_y(c, poly, from.y);
      PathIntegral r;
      try {
        r = integrate_path(c, path, both, 2 * dim, opt);
      } catch (const Error& e) {
        std::ostringstream os;
        os << e.message() << " on the chord " << from.x << " -> " << x << " (region " << ri << ")";
        throw Error(e.kind(), os.str());
      }
      State s;
      s.done = true;
      s.x = x;
      s.y = path.y.back();
      s.hp = from.hp + harmonic_increment(hc, std::vector<cplx>(r.value.begin(), r.value.begin() + dim));
      s.hm = from.hm + harmonic_increment(hc, std::vector<cplx>(r.value.begin() + dim, r.value.end()));
      return s;
    };

    const auto& angles = q.ring_angles[ri];
    const int rings = static_cast<int>(angles.size());
    int prev_ring = -1;
    for (int t = 0; t < rings; ++t) {
      const int ring = outward ? t : rings - 1 - t;
      for (int m = 0; m < angles[ring]; ++m) {
        const std::size_t pos = offset[ri][ring] + m;
        if (idx[pos] < 0) continue;
        const cplx x = q.nodes[idx[pos]].point.x;
        std::size_t below = 0;
        if (prev_ring >= 0) {
          const long mb = static_cast<long>((m + 0.5) * angles[prev_ring] / angles[ring]);
          below = offset[ri][prev_ring] + std::min<long>(mb, angles[prev_ring] - 1);
        }
        State s;
        if (m > 0 && st[pos - 1].done && admissible(st[pos - 1].x, x)) {
          s = step(st[pos - 1], x);
        } else if (prev_ring >= 0 && st[below].done && admissible(st[below].x, x)) {
          s = step(st[below], x);
        } else {
          s.done = true;
          s.x = x;
          s.y = c.sheet_y(x, 1);
          s.hp = H_at(hc, point_on_sheet(c, x, 1));
          s.hm = H_at(hc, point_on_sheet(c, x, -1));
        }
        st[pos] = s;
        const auto& plus = q.nodes[idx[pos]].point;
        const bool same = std::abs(s.y - plus.y) <= std::abs(s.y + plus.y);
        H.row(idx[pos]) = (same ? s.hp : s.hm).transpose();
        H.row(idx[pos] + 1) = (same ? s.hm : s.hp).transpose();
      }
      prev_ring = ring;
    }
  };

  workers = std::max(1, workers);
  if (workers == 1) {
    for (std::size_t ri = 0; ri < q.regions.size(); ++ri) run_region(ri);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t ri = w; ri < q.regions.size(); ri += workers) run_region(ri);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return H;
}

CalH calH(const SurfaceQuadrature& q, const Eigen::MatrixXcd& h) {
  const int n = static_cast<int>(h.cols());
  CalH out;
  out.mean = Eigen::VectorXcd::Zero(n);
  for (std::size_t i = 0; i < q.nodes.size(); ++i) out.mean += q.nodes[i].weight * h.row(i).transpose();
  out.mean /= q.area;
  out.values = kGreenNormalization * (h.rowwise() - out.mean.transpose());
  out.residual_mean = Eigen::VectorXd::Zero(n);
  out.l2 = Eigen::VectorXd::Zero(n);
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(n);
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    s += q.nodes[i].weight * out.values.row(i).transpose();
    out.l2 += q.nodes[i].weight * out.values.row(i).cwiseAbs2().transpose();
  }
  out.l2 = out.l2.cwiseSqrt();
  for (int k = 0; k < n; ++k) out.residual_mean(k) = std::abs(s(k)) / (std::sqrt(q.area) * out.l2(k));
  return out;
}

Eigen::MatrixXcd t_prime(const SurfaceQuadrature& q, const CalH& ch) {
  const int n = static_cast<int>(ch.values.cols());
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const Eigen::VectorXcd v = ch.values.row(i).transpose();
    T += q.nodes[i].weight * v * v.adjoint();
  }
  return T;
}

namespace {

cplx c2_of(const Eigen::MatrixXcd& T, const Eigen::MatrixXcd& Tp) {
  return Tp(0, 0) * T(1, 1) + T(0, 0) * Tp(1, 1) - Tp(0, 1) * T(1, 0) - T(0, 1) * Tp(1, 0);
}

}  // namespace

C2Result universal_C2(const KernelContext& ctx, std::span<const cplx> omega, std::size_t budget, int workers) {
  const auto& c = ctx.curve;
  if (c.genus() != 2) throw Error(ErrorKind::GenusNotTwo, "C2 is computed at genus 2 only");
  C2Result r;
  try {
    r.divisor = divisor_from_omega(c, omega);
  } catch (const Error& e) {
    throw Error(ErrorKind::DivisorNotCanonical, std::string("zeros of omega unusable: ") + e.what());
  }
  const auto hc = build_harmonic(ctx, r.divisor);
  r.T = s_zero(ctx, r.divisor).S_ah;
  r.detT0 = r.T.determinant();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(r.T);
  r.detT0_relative = svd.singularValues()(1) / svd.singularValues()(0);

  r.level = level_for_budget(c, omega, budget);
  const auto qf = build_quadrature(c, omega, r.level);
  const auto qc = build_quadrature(c, omega, r.level - 1);
  r.nodes = qf.nodes.size() + qc.nodes.size();
  const auto hf = calH(qf, H_on_nodes(hc, qf, workers));
  const auto hcoarse = calH(qc, H_on_nodes(hc, qc, workers));
  r.Tprime = t_prime(qf, hf);
  r.Tprime_coarse = t_prime(qc, hcoarse);
  r.Tprime_error = (r.Tprime - r.Tprime_coarse).cwiseAbs().maxCoeff();
  r.hermitian_defect = (r.Tprime - r.Tprime.adjoint()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (r.Tprime + r.Tprime.adjoint()));
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  r.max_mean_residual = hf.residual_mean.maxCoeff();
  r.area = qf.area;
  r.area_error = std::abs(qf.area - qc.area);
  r.gram = holomorphic_gram(ctx, qf);
  r.gram_error = (r.gram - ctx.periods.riemann.imag().cast<cplx>()).cwiseAbs().maxCoeff();

  r.C2 = c2_of(r.T, r.Tprime);
  r.error = std::abs(r.C2 - c2_of(r.T, r.Tprime_coarse)) + kKernelFloor * std::abs(r.C2);
  return r;
}

}  // namespace conic
