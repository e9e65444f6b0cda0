#pragma once

#include <optional>
#include <span>
#include <vector>

#include "conic/types.hpp"

namespace conic {

/// y^2 = f(x) with deg f in {2g+1, 2g+2} and simple roots.
class HyperellipticCurve {
 public:
  HyperellipticCurve() = default;

  const std::vector<cplx>& coefficients() const { return f_; }
  /// Finite branch points in lexicographic (re, im) order.
  const std::vector<cplx>& branch_points() const { return branch_; }
  int genus() const { return genus_; }
  int degree() const { return static_cast<int>(f_.size()) - 1; }
  /// Odd degree: one branch point at infinity. Even degree: two regular points there.
  bool branch_at_infinity() const { return degree() % 2 == 1; }
  const Tolerances& tolerances() const { return tol_; }

  cplx f(cplx x) const;
  cplx df(cplx x) const;
  cplx d2f(cplx x) const;
  cplx f_divided(cplx x1, cplx x2) const;
  cplx df_divided(cplx x1, cplx x2) const;
  /// (F(x1, x2) - f(x1) - f(x2)) / (x1 - x2)^2 for the symmetric Klein polynomial
  /// F = sum_k x1^k x2^k (2 f_{2k} + f_{2k+1} (x1 + x2)).
  cplx klein_remainder(cplx x1, cplx x2) const;
  /// F(x1, x2) itself, for well separated arguments.
  cplx klein_form(cplx x1, cplx x2) const;
  cplx leading() const { return f_.back(); }

  /// Distance to the nearest finite branch point and its index.
  double branch_distance(cplx x, int* index = nullptr) const;
  /// Representative size of the branch-point configuration (>= 1e-3).
  double scale() const { return scale_; }
  cplx centroid() const { return centroid_; }

  /// Fixed single-valued branch of sqrt(f) used to label sheets:
  /// sheet * sqrt(lc) * prod sqrt_principal(x - e_i).
  cplx sheet_y(cplx x, int sheet = 1) const;
  /// +1 or -1 according to which sheet label (x, y) carries.
  int sheet_of(cplx x, cplx y) const;

  /// Analytic continuation of y from (xa, ya) to x along the straight segment,
  /// valid while |x - xa| < distance from xa to every branch point.
  cplx continue_from(cplx xa, cplx ya, cplx x) const;
  /// Same, but excluding branch point `skip`: returns h with y = sqrt(x - e_skip) h near e_skip.
  cplx continue_cofactor(cplx xa, cplx ha, cplx x, int skip) const;

  /// Newton step snapping y onto y^2 = f(x).
  cplx polish_y(cplx x, cplx y) const;

 private:
  friend HyperellipticCurve validate_curve(std::span<const cplx>, const Tolerances&);

  std::vector<cplx> f_, df_, d2f_;
  std::vector<cplx> branch_;
  int genus_ = 0;
  double scale_ = 1.0;
  cplx centroid_ = 0.0;
  cplx sqrt_lc_ = 1.0;
  Tolerances tol_;
};

/// Validates the coefficient list (constant term first) and locates the branch points.
HyperellipticCurve validate_curve(std::span<const cplx> coefficients, const Tolerances& tol = {});

/// A point of the curve. Finite points carry (x, y); branch points carry y = 0
/// exactly. Points over x = infinity use the chart s = 1/x (even degree, two
/// points labelled by `sheet`) or t = x^{-1/2} (odd degree, one branch point).
struct SurfacePoint {
  cplx x{0.0};
  cplx y{0.0};
  bool at_infinity = false;
  int sheet = 1;  // only meaningful at infinity for even degree
  int branch_index = -1;  // index into branch_points() when this is a finite branch point

  bool is_branch() const { return branch_index >= 0; }
};

/// Regular finite point on the given sheet label.
SurfacePoint point_on_sheet(const HyperellipticCurve& c, cplx x, int sheet = 1);
/// Point with an explicit y; snaps onto a branch point when x is one.
SurfacePoint make_point(const HyperellipticCurve& c, cplx x, cplx y);
SurfacePoint branch_point(const HyperellipticCurve& c, int index);
SurfacePoint infinity_point(const HyperellipticCurve& c, int sheet = 1);
/// Hyperelliptic involution (x, y) -> (x, -y).
SurfacePoint involution(const HyperellipticCurve& c, const SurfacePoint& p);
bool same_point(const SurfacePoint& a, const SurfacePoint& b, double tol);

/// Polyline in the x-plane together with the continued y-values.
struct SheetPath {
  std::vector<cplx> x;
  std::vector<cplx> y;
  /// When set, the final vertex is this finite branch point (y = 0 there).
  int end_branch = -1;

  bool closed(double tol) const;
  SheetPath reversed() const;
  std::size_t size() const { return x.size(); }
};

/// Continues y along the polyline, refining so that every step is at most half
/// the distance to the nearest branch point. Only the final vertex may be a
/// branch point.
SheetPath continue_y(const HyperellipticCurve& c, std::span<const cplx> polyline, cplx y_start);

}  // namespace conic
