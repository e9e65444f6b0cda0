#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "conic/harmonic.hpp"

namespace conic {

/// 1 / (2 sqrt(pi)): H_k = 2 sqrt(pi) G_{xi_k}.
inline constexpr double kGreenNormalization = 0.28209479177387814;

/// One region of the x-plane in polar-type coordinates (s, phi).
///   Outer   x = c + R s/(1-s)^2 e^{i phi}, s in [0, 1)
///   Branch  x = e + s^2 e^{i phi},        s in [0, sqrt(r)]
///   Cone    x = z + s e^{i phi},          s in [0, r]
/// Smooth cut-offs make the regions a partition of unity.
struct QuadratureRegion {
  enum class Kind { Outer, Branch, Cone } kind = Kind::Outer;
  cplx center{0.0};
  double radius = 0.0;  // x-radius of the cut-off (R for the outer region)
  int branch_index = -1;
};

struct SurfaceNode {
  SurfacePoint point;
  double weight = 0.0;  // includes |omega|^2, the Jacobian and the cut-off
  int region = 0;
  int ring = 0, angle = 0;
};

struct SurfaceQuadrature {
  std::vector<QuadratureRegion> regions;
  std::vector<SurfaceNode> nodes;  // both sheets, zero-weight positions dropped
  std::vector<cplx> omega;
  int level = 0;
  int radial_panels = 0, radial_order = 0, angles = 0;  // base counts before adaptive refinement
  std::vector<std::vector<int>> ring_angles;  // angle count of every ring, per region
  double area = 0.0;
};

/// Number of surface nodes a level would produce (before dropping zero weights).
std::size_t quadrature_size(const HyperellipticCurve& c, std::span<const cplx> omega, int level);
SurfaceQuadrature build_quadrature(const HyperellipticCurve& c, std::span<const cplx> omega, int level);
/// Largest level whose size fits the budget (at least 2); BudgetExhausted otherwise.
int level_for_budget(const HyperellipticCurve& c, std::span<const cplx> omega, std::size_t budget);

/// |omega|^2 area density at x summed over nothing: per sheet, per unit dA_x.
double omega_density(const HyperellipticCurve& c, std::span<const cplx> omega, cplx x);

struct MonteCarloArea {
  double value = 0.0, error = 0.0;
  std::size_t samples = 0;
};
/// Jittered stratified sampling of the same partition of unity.
MonteCarloArea monte_carlo_area(const HyperellipticCurve& c, std::span<const cplx> omega, std::size_t per_region,
                                std::uint64_t seed);

/// sum_nodes w v_i conj(v_j) / |omega|^2; equals Im B for normalized v.
Eigen::MatrixXcd holomorphic_gram(const KernelContext& ctx, const SurfaceQuadrature& q);

/// H_k at every node (rows nodes, columns k), built along a tree of short chords.
Eigen::MatrixXcd H_on_nodes(const HarmonicContext& hc, const SurfaceQuadrature& q, int workers = 1);

struct CalH {
  Eigen::MatrixXcd values;  // (H - mean) / (2 sqrt pi) at the nodes
  Eigen::VectorXcd mean;    // (1/A) int H_k dS
  Eigen::VectorXd residual_mean;  // |int calH_k dS| / (A ||calH_k||)
  Eigen::VectorXd l2;             // ||calH_k||_{L^2(dS)}
};

CalH calH(const SurfaceQuadrature& q, const Eigen::MatrixXcd& h);
/// T'(0)_{kj} = int calH_k conj(calH_j) dS.
Eigen::MatrixXcd t_prime(const SurfaceQuadrature& q, const CalH& ch);

struct C2Result {
  cplx C2{0.0};
  double error = 0.0;
  cplx detT0{0.0};
  double detT0_relative = 0.0;  // sigma_2 / sigma_1 of T(0)
  Eigen::MatrixXcd T, Tprime, Tprime_coarse;
  double Tprime_error = 0.0;
  double hermitian_defect = 0.0, min_eigenvalue = 0.0;
  double area = 0.0, area_error = 0.0;
  double max_mean_residual = 0.0;
  Eigen::MatrixXcd gram;  // holomorphic_gram on the fine level
  double gram_error = 0.0;  // max |gram - Im B|
  int level = 0;
  std::size_t nodes = 0;
  ConicalDivisor divisor;
};

/// Genus 2 only: C2 = T'11 T22 + T11 T'22 - T'12 T21 - T12 T'21 for the zero
/// divisor of omega with distinguished frames; error from levels L and L - 1.
C2Result universal_C2(const KernelContext& ctx, std::span<const cplx> omega, std::size_t budget, int workers = 1);

}  // namespace conic
