#include "conic/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "conic/polynomial.hpp"

namespace conic {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::RepeatedRoot: return "RepeatedRoot";
    case ErrorKind::DegreeTooLow: return "DegreeTooLow";
    case ErrorKind::PathHitsBranchPoint: return "PathHitsBranchPoint";
    case ErrorKind::ToleranceNotReached: return "ToleranceNotReached";
    case ErrorKind::SingularPeriodMatrix: return "SingularPeriodMatrix";
    case ErrorKind::CoincidentPoints: return "CoincidentPoints";
    case ErrorKind::NumericallyDegenerate: return "NumericallyDegenerate";
    case ErrorKind::ProbePointsDegenerate: return "ProbePointsDegenerate";
    case ErrorKind::ExtrapolationUnstable: return "ExtrapolationUnstable";
    case ErrorKind::NotASimpleZero: return "NotASimpleZero";
    case ErrorKind::UnsupportedChart: return "UnsupportedChart";
    case ErrorKind::GenusNotTwo: return "GenusNotTwo";
    case ErrorKind::PeriodsNotImaginary: return "PeriodsNotImaginary";
    case ErrorKind::PathThroughSingularity: return "PathThroughSingularity";
    case ErrorKind::FitResidualTooLarge: return "FitResidualTooLarge";
    case ErrorKind::BudgetExhausted: return "BudgetExhausted";
    case ErrorKind::DivisorNotCanonical: return "DivisorNotCanonical";
    case ErrorKind::NotConnected: return "NotConnected";
    case ErrorKind::ResolutionTooLow: return "ResolutionTooLow";
    case ErrorKind::EigensolverFailure: return "EigensolverFailure";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

HyperellipticCurve validate_curve(std::span<const cplx> coefficients, const Tolerances& tol) {
  HyperellipticCurve c;
  c.f_ = poly::trim(coefficients);
  c.tol_ = tol;
  const int deg = c.degree();
  if (deg < 5) {
    std::ostringstream os;
    os << "deg f = " << deg << " gives genus < 2";
    throw Error(ErrorKind::DegreeTooLow, os.str());
  }
  c.genus_ = (deg - 1) / 2;
  c.df_ = poly::derivative(c.f_);
  c.d2f_ = poly::derivative(c.df_);
  c.branch_ = poly::roots(c.f_);

  for (std::size_t i = 0; i < c.branch_.size(); ++i)
    for (std::size_t j = i + 1; j < c.branch_.size(); ++j)
      if (std::abs(c.branch_[i] - c.branch_[j]) <= tol.root_separation) {
        std::ostringstream os;
        os << "roots " << c.branch_[i] << " and " << c.branch_[j] << " collide";
        throw Error(ErrorKind::RepeatedRoot, os.str());
      }
  // A double root also shows up as a tiny derivative at the polished root.
  double fscale = 0.0;
  for (auto a : c.f_) fscale = std::max(fscale, std::abs(a));
  for (auto e : c.branch_) {
    const double sz = std::max(1.0, std::pow(std::abs(e), deg));
    if (std::abs(poly::eval(c.f_, e)) > 1e3 * tol.root * fscale * sz)
      throw Error(ErrorKind::RepeatedRoot, "root polishing failed to reproduce f(e) = 0");
    if (std::abs(poly::eval(c.df_, e)) <= tol.root_separation * fscale * sz)
      throw Error(ErrorKind::RepeatedRoot, "f' vanishes at a root");
  }

  cplx sum = 0.0;
  for (auto e : c.branch_) sum += e;
  c.centroid_ = sum / static_cast<double>(c.branch_.size());
  double sc = 0.0;
  for (auto e : c.branch_) sc = std::max(sc, std::abs(e - c.centroid_));
  c.scale_ = std::max(sc, 1e-3);
  c.sqrt_lc_ = std::sqrt(c.f_.back());
  return c;
}

cplx HyperellipticCurve::f(cplx x) const { return poly::eval(f_, x); }
cplx HyperellipticCurve::df(cplx x) const { return poly::eval(df_, x); }
cplx HyperellipticCurve::d2f(cplx x) const { return poly::eval(d2f_, x); }
cplx HyperellipticCurve::f_divided(cplx x1, cplx x2) const { return poly::divided_difference(f_, x1, x2); }
cplx HyperellipticCurve::df_divided(cplx x1, cplx x2) const { return poly::divided_difference(df_, x1, x2); }

cplx HyperellipticCurve::klein_form(cplx x1, cplx x2) const {
  auto coef = [this](std::size_t i) { return i < f_.size() ? f_[i] : cplx(0.0); };
  const cplx p = x1 * x2, s = x1 + x2;
  cplx acc = 0.0;
  for (std::size_t k = (f_.size() + 1) / 2; k-- > 0;) acc = acc * p + 2.0 * coef(2 * k) + coef(2 * k + 1) * s;
  return acc;
}

cplx HyperellipticCurve::klein_remainder(cplx x1, cplx x2) const {
  // -sum_k [f_{2k} h_{k-1}^2 + f_{2k+1} h_k h_{k-1}], h_m the complete homogeneous polynomial.
  auto coef = [this](std::size_t i) { return i < f_.size() ? f_[i] : cplx(0.0); };
  cplx acc = 0.0;
  cplx h_prev = 0.0, h = 1.0, x2pow = 1.0;
  for (std::size_t k = 0; 2 * k < f_.size(); ++k) {
    acc -= coef(2 * k) * h_prev * h_prev + coef(2 * k + 1) * h * h_prev;
    x2pow *= x2;
    h_prev = h;
    h = x1 * h + x2pow;
  }
  return acc;
}

double HyperellipticCurve::branch_distance(cplx x, int* index) const {
  double best = std::numeric_limits<double>::infinity();
  int bi = -1;
  for (std::size_t i = 0; i < branch_.size(); ++i) {
    const double d = std::abs(x - branch_[i]);
    if (d < best) {
      best = d;
      bi = static_cast<int>(i);
    }
  }
  if (index) *index = bi;
  return best;
}

cplx HyperellipticCurve::sheet_y(cplx x, int sheet) const {
  cplx y = sqrt_lc_;
  for (auto e : branch_) y *= std::sqrt(x - e);
  return sheet >= 0 ? y : -y;
}

int HyperellipticCurve::sheet_of(cplx x, cplx y) const {
  const cplx y1 = sheet_y(x, 1);
  return std::abs(y - y1) <= std::abs(y + y1) ? 1 : -1;
}

cplx HyperellipticCurve::continue_from(cplx xa, cplx ya, cplx x) const {
  cplx r = ya;
  for (auto e : branch_) r *= std::sqrt((x - e) / (xa - e));
  return r;
}

cplx HyperellipticCurve::continue_cofactor(cplx xa, cplx ha, cplx x, int skip) const {
  cplx r = ha;
  for (std::size_t i = 0; i < branch_.size(); ++i)
    if (static_cast<int>(i) != skip) r *= std::sqrt((x - branch_[i]) / (xa - branch_[i]));
  return r;
}

cplx HyperellipticCurve::polish_y(cplx x, cplx y) const {
  if (y == 0.0) return y;
  return 0.5 * (y + f(x) / y);
}

SurfacePoint point_on_sheet(const HyperellipticCurve& c, cplx x, int sheet) {
  return make_point(c, x, c.sheet_y(x, sheet));
}

SurfacePoint make_point(const HyperellipticCurve& c, cplx x, cplx y) {
  SurfacePoint p;
  int idx = -1;
  const double d = c.branch_distance(x, &idx);
  if (d <= c.tolerances().root * std::max(1.0, std::abs(x))) {
    p.x = c.branch_points()[idx];
    p.y = 0.0;
    p.branch_index = idx;
    return p;
  }
  p.x = x;
  p.y = y;
  const cplx fx = c.f(x);
  if (std::abs(y * y - fx) > 1e-6 * std::max(std::abs(fx), 1e-300))
    throw Error(ErrorKind::InvalidArgument, "point does not satisfy y^2 = f(x)");
  p.y = c.polish_y(x, y);
  return p;
}

SurfacePoint branch_point(const HyperellipticCurve& c, int index) {
  SurfacePoint p;
  p.x = c.branch_points().at(index);
  p.y = 0.0;
  p.branch_index = index;
  return p;
}

SurfacePoint infinity_point(const HyperellipticCurve& c, int sheet) {
  SurfacePoint p;
  p.at_infinity = true;
  p.sheet = c.branch_at_infinity() ? 1 : (sheet >= 0 ? 1 : -1);
  return p;
}

SurfacePoint involution(const HyperellipticCurve& c, const SurfacePoint& p) {
  SurfacePoint q = p;
  if (p.at_infinity) {
    if (!c.branch_at_infinity()) q.sheet = -p.sheet;
    return q;
  }
  q.y = -p.y;
  return q;
}

bool same_point(const SurfacePoint& a, const SurfacePoint& b, double tol) {
  if (a.at_infinity || b.at_infinity) return a.at_infinity == b.at_infinity && a.sheet == b.sheet;
  if (std::abs(a.x - b.x) > tol * std::max(1.0, std::abs(a.x))) return false;
  if (a.is_branch() || b.is_branch()) return a.is_branch() && b.is_branch();
  return std::abs(a.y - b.y) <= std::abs(a.y + b.y);
}

bool SheetPath::closed(double tol) const {
  if (x.size() < 2) return false;
  const double sx = std::max(1.0, std::abs(x.front()));
  return std::abs(x.front() - x.back()) <= tol * sx &&
         std::abs(y.front() - y.back()) <= 1e-6 * std::max(std::abs(y.front()), 1e-300);
}

SheetPath SheetPath::reversed() const {
  if (end_branch >= 0) throw Error(ErrorKind::InvalidArgument, "cannot reverse a path ending at a branch point");
  SheetPath r;
  r.x.assign(x.rbegin(), x.rend());
  r.y.assign(y.rbegin(), y.rend());
  return r;
}

SheetPath continue_y(const HyperellipticCurve& c, std::span<const cplx> polyline, cplx y_start) {
  if (polyline.size() < 2) throw Error(ErrorKind::InvalidArgument, "path needs at least two vertices");
  const double root_tol = c.tolerances().root;
  const auto& bp = c.branch_points();

  auto hits_branch = [&](cplx x, int* idx) {
    return c.branch_distance(x, idx) <= root_tol * std::max(1.0, std::abs(x));
  };

  SheetPath path;
  int idx = -1;
  if (hits_branch(polyline[0], &idx))
    throw Error(ErrorKind::PathHitsBranchPoint, "path starts at a branch point");
  const cplx f0 = c.f(polyline[0]);
  if (std::abs(y_start * y_start - f0) > 1e-6 * std::max(std::abs(f0), 1e-300))
    throw Error(ErrorKind::InvalidArgument, "y_start^2 != f(x_start)");

  cplx xc = polyline[0];
  cplx yc = c.polish_y(xc, y_start);
  path.x.push_back(xc);
  path.y.push_back(yc);

  for (std::size_t v = 1; v < polyline.size(); ++v) {
    const cplx target = polyline[v];
    int tidx = -1;
    const bool target_branch = hits_branch(target, &tidx);
    if (target_branch && v + 1 != polyline.size())
      throw Error(ErrorKind::PathHitsBranchPoint, "interior path vertex is a branch point");
    if (target_branch) {
      // Walk until the remaining leg lies inside the substitution disk of the branch point.
      double others = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < bp.size(); ++i)
        if (static_cast<int>(i) != tidx) others = std::min(others, std::abs(bp[i] - bp[tidx]));
      const double disk = 0.25 * others;
      int guard = 0;
      while (std::abs(bp[tidx] - xc) > disk) {
        const double d = c.branch_distance(xc);
        const double rem = std::abs(target - xc);
        const double step = std::min(rem - 0.5 * disk, 0.5 * d);
        const cplx xn = xc + (target - xc) * (step / rem);
        yc = c.polish_y(xn, c.continue_from(xc, yc, xn));
        xc = xn;
        path.x.push_back(xc);
        path.y.push_back(yc);
        if (++guard > 100000) throw Error(ErrorKind::PathHitsBranchPoint, "continuation did not terminate");
      }
      path.x.push_back(bp[tidx]);
      path.y.push_back(0.0);
      path.end_branch = tidx;
      return path;
    }
    int guard = 0;
    while (xc != target) {
      const double d = c.branch_distance(xc);
      if (d <= root_tol * std::max(1.0, std::abs(xc)))
        throw Error(ErrorKind::PathHitsBranchPoint, "path passes through a branch point");
      const double rem = std::abs(target - xc);
      cplx xn;
      if (rem <= 0.5 * d) {
        xn = target;
      } else {
        xn = xc + (target - xc) * (0.5 * d / rem);
      }
      yc = c.polish_y(xn, c.continue_from(xc, yc, xn));
      xc = xn;
      path.x.push_back(xc);
      path.y.push_back(yc);
      if (++guard > 100000) throw Error(ErrorKind::PathHitsBranchPoint, "path passes through a branch point");
    }
  }
  return path;
}

}  // namespace conic
