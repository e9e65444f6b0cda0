#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "conic/curve.hpp"
#include "conic/series.hpp"

namespace conic {

/// Base chart coordinate u at a surface point:
///   Regular      u = x - x0
///   Branch       u = t, x = e + t^2, y = t h(x), h(e) = sqrt(f'(e))
///   InfinityOdd  u = t, x = t^{-2}, y = t^{-(2g+1)} G(t), G(0) = sqrt(lc)
///   InfinityEven u = s = 1/x, y = sheet * s^{-(g+1)} G(s), G(0) = sqrt(lc)
enum class ChartKind { Regular, Branch, InfinityOdd, InfinityEven };

std::string_view to_string(ChartKind kind);
ChartKind chart_of(const HyperellipticCurve& c, const SurfacePoint& p);

/// Local parameter xi = sum_{n>=1} xi[n] u^n in the base chart at `point`.
struct FrameJet {
  SurfacePoint point;
  ChartKind chart = ChartKind::Regular;
  series::Series xi;
  series::Series inverse;  // u as a series in xi
  int branch_tag = 1;
  bool distinguished = false;

  cplx jet(std::size_t n) const { return n < xi.size() ? xi[n] : cplx(0.0); }
  /// Schwarzian {xi, u} at u = 0.
  cplx schwarzian() const;
};

inline constexpr std::size_t kFrameOrder = 24;

/// h(e) for the branch chart at branch point `index`.
cplx branch_cofactor(const HyperellipticCurve& c, int index);

FrameJet chart_frame(const HyperellipticCurve& c, const SurfacePoint& p);
FrameJet user_frame(const HyperellipticCurve& c, const SurfacePoint& p, cplx a1, cplx a2 = 0.0, cplx a3 = 0.0);
/// xi -> lambda xi.
FrameJet rescaled(const FrameJet& f, cplx lambda);
/// xi -> -xi, i.e. the other branch of sqrt(w).
FrameJet flipped(const FrameJet& f);

/// Distinguished parameter of |omega|^2 at a simple zero P of omega = q(x) dx / y
/// (q given by its raw coefficients): xi = sqrt(int_P omega).
FrameJet distinguished_frame(const HyperellipticCurve& c, std::span<const cplx> omega, const SurfacePoint& p,
                             int branch_tag = 1);

/// Zeros of omega = q(x) dx / y, lexicographic in x, sheet +1 before -1.
std::vector<SurfacePoint> omega_zeros(const HyperellipticCurve& c, std::span<const cplx> omega);

/// Point whose frame coordinate is xi (small |xi|); finite charts only.
SurfacePoint point_at(const HyperellipticCurve& c, const FrameJet& f, cplx xi);
/// dx/dxi at the point with frame coordinate xi; finite charts only.
cplx dx_dxi(const HyperellipticCurve& c, const FrameJet& f, cplx xi);

}  // namespace conic
