#include "conic/line_integral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace conic {

namespace {

// Gauss-Kronrod 7/15 on [-1, 1]; the odd-indexed Kronrod nodes are the Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Leg {
  // x(s) = x0 + s * dx for ordinary legs; for branch legs t(s) = t0 (1 - s).
  cplx x0, y0, dx;
  bool branch = false;
  int branch_index = -1;
  cplx t0, h0, e;
  double length = 0.0;
};

struct Piece {
  int leg;
  double a, b;
};

class GkEngine {
 public:
  GkEngine(const HyperellipticCurve& c, const Integrand& f, int dim)
      : c_(c), f_(f), dim_(dim), buf_(dim), k_(dim), g_(dim) {}

  // Returns the max-norm error estimate; writes Kronrod values to `out`.
  double apply(const Leg& leg, double a, double b, std::vector<cplx>& out) {
    std::fill(k_.begin(), k_.end(), cplx(0.0));
    std::fill(g_.begin(), g_.end(), cplx(0.0));
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int i = 0; i < 15; ++i) {
      const int j = i < 8 ? i : 14 - i;
      const double sgn = i < 8 ? -1.0 : 1.0;
      const double node = mid + sgn * kXgk[j] * half;
      eval(leg, node);
      const double wk = kWgk[j];
      const bool gauss = (j % 2 == 1) || j == 7;
      const double wg = j == 7 ? kWg[3] : (j % 2 == 1 ? kWg[j / 2] : 0.0);
      for (int d = 0; d < dim_; ++d) {
        k_[d] += wk * buf_[d];
        if (gauss) g_[d] += wg * buf_[d];
      }
    }
    double err = 0.0;
    out.resize(dim_);
    for (int d = 0; d < dim_; ++d) {
      out[d] = k_[d] * half;
      err = std::max(err, std::abs((k_[d] - g_[d]) * half));
    }
    return err;
  }

 private:
  void eval(const Leg& leg, double s) {
    if (!leg.branch) {
      const cplx x = leg.x0 + s * leg.dx;
      const cplx y = c_.continue_from(leg.x0, leg.y0, x);
      f_(x, y, buf_);
      for (auto& v : buf_) v *= leg.dx;
    } else {
      const cplx t = leg.t0 * (1.0 - s);
      const cplx x = leg.e + t * t;
      const cplx y = t * c_.continue_cofactor(leg.x0, leg.h0, x, leg.branch_index);
      f_(x, y, buf_);
      const cplx jac = 2.0 * t * (-leg.t0);
      for (auto& v : buf_) v *= jac;
    }
  }

  const HyperellipticCurve& c_;
  const Integrand& f_;
  int dim_;
  std::vector<cplx> buf_, k_, g_;
};

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (auto z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

PathIntegral integrate_path(const HyperellipticCurve& c, const SheetPath& path, const Integrand& f,
                            int dim, const QuadratureOptions& opt) {
  std::vector<Leg> legs;
  double total = 0.0;
  const std::size_t n = path.x.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Leg leg;
    leg.x0 = path.x[i];
    leg.y0 = path.y[i];
    const bool last = (i + 2 == n);
    if (last && path.end_branch >= 0) {
      leg.branch = true;
      leg.branch_index = path.end_branch;
      leg.e = c.branch_points()[path.end_branch];
      leg.t0 = std::sqrt(leg.x0 - leg.e);
      leg.h0 = leg.y0 / leg.t0;
      leg.length = std::abs(leg.x0 - leg.e);
    } else {
      leg.dx = path.x[i + 1] - path.x[i];
      leg.length = std::abs(leg.dx);
    }
    if (leg.length == 0.0) continue;
    total += leg.length;
    legs.push_back(leg);
  }

  PathIntegral result;
  result.value.assign(dim, cplx(0.0));
  if (legs.empty()) return result;

  GkEngine gk(c, f, dim);
  std::vector<cplx> val;
  std::vector<Piece> stack;
  for (int l = static_cast<int>(legs.size()) - 1; l >= 0; --l) stack.push_back({l, 0.0, 1.0});

  // Depth-first bisection keeps the summation order fixed and the run deterministic.
  while (!stack.empty()) {
    const Piece p = stack.back();
    stack.pop_back();
    const Leg& leg = legs[p.leg];
    const double err = gk.apply(leg, p.a, p.b, val);
    ++result.intervals;
    const double frac = (p.b - p.a) * leg.length / total;
    const double allowed = opt.tolerance * std::max(frac, max_abs(val));
    const bool tiny = (p.b - p.a) < 1e-13;
    if (err <= allowed || tiny) {
      for (int d = 0; d < dim; ++d) result.value[d] += val[d];
      result.error += err;
      continue;
    }
    if (result.intervals > opt.max_intervals)
      throw Error(ErrorKind::ToleranceNotReached, "adaptive path quadrature exhausted its interval budget");
    const double mid = 0.5 * (p.a + p.b);
    stack.push_back({p.leg, mid, p.b});
    stack.push_back({p.leg, p.a, mid});
  }
  return result;
}

Integrand raw_holomorphic_integrand(int genus) {
  return [genus](cplx x, cplx y, std::span<cplx> out) {
    cplx p = 1.0 / y;
    for (int j = 0; j < genus; ++j) {
      out[j] = p;
      p *= x;
    }
  };
}

AbelianIntegral abelian_integral(const HyperellipticCurve& c, std::span<const cplx> differential,
                                 const SheetPath& path, double tolerance) {
  AbelianIntegral out;
  bool all_zero = true;
  for (auto d : differential) all_zero = all_zero && d == 0.0;
  if (all_zero) return out;
  std::vector<cplx> coeffs(differential.begin(), differential.end());
  Integrand f = [coeffs](cplx x, cplx y, std::span<cplx> o) {
    cplx acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    o[0] = acc / y;
  };
  QuadratureOptions opt;
  opt.tolerance = tolerance;
  const auto r = integrate_path(c, path, f, 1, opt);
  out.value = r.value[0];
  out.error = r.error;
  return out;
}

}  // namespace conic
