#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "conic/frames.hpp"
#include "conic/periods.hpp"

namespace conic {

/// Everything needed to evaluate W, B, the Schiffer kernel and projective
/// connections on one marked curve. Built once and shared read-only.
struct KernelContext {
  HyperellipticCurve curve;
  HomologyBasis basis;
  PeriodData periods;
  /// c in W = W0 + sum c_jk v_j(P) v_k(Q) (symmetrized).
  Eigen::MatrixXcd correction;
  double correction_asymmetry = 0.0;
  std::vector<SurfacePoint> probes;
  double quadrature_tolerance = 1e-13;
};

/// W0(P, Q) in the base charts of P and Q (x at regular points, t at branch points).
cplx raw_bidifferential(const HyperellipticCurve& c, const SurfacePoint& p, const SurfacePoint& q);
/// W0 between a moving regular point (x, y) in the x-frame and Q in its base chart.
cplx raw_bidifferential_x(const HyperellipticCurve& c, cplx x, cplx y, const SurfacePoint& q);

/// Probe points are drawn from a seeded sequence until the system is well conditioned.
void normalize_W(KernelContext& ctx, std::uint64_t seed = 0);

KernelContext make_kernel_context(const HyperellipticCurve& c, const HomologyBasis& basis,
                                  double tolerance = 1e-13, std::uint64_t seed = 0);

/// Normalized differentials v_j in the base chart at p.
Eigen::VectorXcd v_base(const KernelContext& ctx, const SurfacePoint& p);
Eigen::VectorXcd v_frame(const KernelContext& ctx, const FrameJet& f);

cplx W_base(const KernelContext& ctx, const SurfacePoint& p, const SurfacePoint& q);
/// W(x-frame at (x, y), base chart at q).
cplx W_x(const KernelContext& ctx, cplx x, cplx y, const SurfacePoint& q);
cplx W_frame(const KernelContext& ctx, const FrameJet& p, const FrameJet& q);

/// B(P, Q-bar) = sum (Im B)^{-1}_ij v_i(P) conj(v_j(Q)).
cplx bergman_kernel(const KernelContext& ctx, const FrameJet& p, const FrameJet& q);
cplx schiffer_kernel(const KernelContext& ctx, const FrameJet& p, const FrameJet& q);

struct ProjectiveConnection {
  cplx value{0.0};
  double error = 0.0;
  /// Richardson estimates at separations (eps, eps/2) and (eps/2, eps/4).
  cplx coarse{0.0}, fine{0.0};
};

/// S_B in the frame xi: Richardson limit in the base chart, then Schwarzian transport.
ProjectiveConnection bergman_proj_connection(const KernelContext& ctx, const FrameJet& f, double rel_eps = 1e-3);
ProjectiveConnection schiffer_proj_connection(const KernelContext& ctx, const FrameJet& f, double rel_eps = 1e-3);
/// Independent oracle: 6 lim [S(xi1, xi2) - (xi1 - xi2)^{-2}] sampled directly in the frame coordinate.
ProjectiveConnection schiffer_diagonal_limit(const KernelContext& ctx, const FrameJet& f, double rel_eps = 1e-2);

/// det[v_j(Q_k)] in the given frames (g points).
cplx special_divisor_det(const KernelContext& ctx, const std::vector<FrameJet>& frames);

struct WDiagnostics {
  double a_period = 0.0;    // max_i |int_{a_i} W(., Q)|
  double b_period = 0.0;    // max_j |int_{b_j} W(., Q) - 2 pi i v_j(Q)| / |2 pi v_j(Q)|
  double symmetry = 0.0;    // |W(P, Q) - W(Q, P)| at sample pairs
  double correction_asymmetry = 0.0;
};

WDiagnostics check_W(const KernelContext& ctx, const SurfacePoint& q);

}  // namespace conic
