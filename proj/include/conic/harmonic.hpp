#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "conic/smatrix.hpp"

namespace conic {

/// Omega_k = -W(., P_k) + 2 pi i sum M_ab Im v_b(P_k) v_a,
/// Sigma_k = -i W(., P_k) + 2 pi i sum M_ab Re v_b(P_k) v_a,
/// with W(., P_k) and v_b(P_k) in the frame xi_k; H_k = Re int Omega_k - i Re int Sigma_k.
struct HarmonicContext {
  const KernelContext* kernels = nullptr;
  ConicalDivisor divisor;
  /// v_b(P_k) in the frame at P_k (rows k, columns b).
  Eigen::MatrixXcd v_at_cones;
  SurfacePoint base;
  /// Periods over a_1..a_g, b_1..b_g (rows) of Omega_k and Sigma_k (columns k).
  Eigen::MatrixXcd omega_periods, sigma_periods;
  double max_real_period = 0.0;
  double clearance = 0.0;

  int size() const { return static_cast<int>(divisor.frames.size()); }
};

/// Builds Omega_k, Sigma_k for every k and verifies their periods are imaginary.
HarmonicContext build_harmonic(const KernelContext& ctx, const ConicalDivisor& d, double period_tol = 1e-6);

/// Integrand [W(., P_k)/dxi_k for each k, v_1..v_g] used by every H path integral.
Integrand harmonic_integrand(const HarmonicContext& hc);
/// Converts integrals of harmonic_integrand into increments of H_1..H_n.
Eigen::VectorXcd harmonic_increment(const HarmonicContext& hc, const std::vector<cplx>& raw);

/// Increments of all H_k along a continued path (checked against the cone points).
Eigen::VectorXcd integrate_H(const HarmonicContext& hc, const SheetPath& path);

/// H_k(Q), k = 1..n, integrated from the base point along `polyline` (x-plane,
/// from base.x to q.x). Without a polyline a route is chosen automatically.
Eigen::VectorXcd H_at(const HarmonicContext& hc, const SurfacePoint& q,
                      const std::optional<std::vector<cplx>>& polyline = std::nullopt);

/// Same as H_at but from an arbitrary start point whose H values are known.
Eigen::VectorXcd H_from(const HarmonicContext& hc, const SurfacePoint& start, const Eigen::VectorXcd& h_start,
                        const SurfacePoint& q);

struct ExpansionCoefficients {
  cplx a{0.0}, b{0.0}, c{0.0};
  double residual = 0.0;
  double radius = 0.0;
};

/// Fit of H_k near P_j for every k: samples on |xi_j| = r and r/2, Fourier
/// moments, extrapolation 2 X(r/2) - X(r).
struct ConeFit {
  int j = 0;
  std::vector<ExpansionCoefficients> at_r, at_half, extrapolated;
  /// |H_k| r on the circle |xi_k| = r (only meaningful for k = j).
  double pole_ratio_min = 0.0, pole_ratio_max = 0.0;
  /// Increment of H_k around the full circle (single-valuedness).
  double closure = 0.0;
};

ConeFit fit_expansion(const HarmonicContext& hc, int j, double r = 1e-2, int samples = 64,
                      double residual_tol = 1.0);

struct CrossCheckEntry {
  int k = 0, j = 0;
  std::string quantity;  // "b" (xi coefficient) or "c" (xibar coefficient)
  cplx kernel{0.0}, fitted{0.0};
  double abs_diff = 0.0, rel_diff = 0.0, tolerance = 0.0;
  bool pass = false;
};

struct CrossCheck {
  std::vector<CrossCheckEntry> entries;
  SZeroData szero;
  std::vector<ConeFit> fits;
  double scale = 0.0;
  double max_real_period = 0.0;
  bool pass = false;
};

/// Compares fitted b_kj, c_kj against -S(P_k, P_j), -S_Sch/6 and -pi B(P_k, P_j).
CrossCheck prop1_crosscheck(const KernelContext& ctx, const ConicalDivisor& d, double r = 1e-2);

}  // namespace conic
