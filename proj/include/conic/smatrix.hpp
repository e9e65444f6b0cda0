#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "conic/kernels.hpp"

namespace conic {

enum class Holonomy { Trivial, External };

/// Cone points P_1..P_{2g-2} with a frame at each. For trivial holonomy the
/// points are the zeros of omega and the frames are its distinguished parameters.
struct ConicalDivisor {
  std::vector<SurfacePoint> points;
  std::vector<FrameJet> frames;
  Holonomy holonomy = Holonomy::External;
  std::vector<cplx> omega;
};

ConicalDivisor divisor_from_omega(const HyperellipticCurve& c, std::span<const cplx> omega,
                                  const std::vector<int>& branch_tags = {});
/// External frames; when `frames` is empty every point gets its unit chart frame.
ConicalDivisor divisor_with_frames(const HyperellipticCurve& c, const std::vector<SurfacePoint>& points,
                                   std::vector<FrameJet> frames = {});

/// S(0) blocks: S_aa(k, j) = S^{xi_k xi_j}(0), S_ah(k, j) = S^{xi_k xibar_j}(0).
struct SZeroData {
  Eigen::MatrixXcd S_aa, S_ah;
  /// Richardson error of each diagonal S_Sch evaluation.
  Eigen::VectorXd diagonal_error;
  /// T(0) = S_ah(0).
  const Eigen::MatrixXcd& T() const { return S_ah; }
  /// Conjugate blocks are derived, not stored.
  Eigen::MatrixXcd S_hh() const { return S_aa.conjugate(); }
  Eigen::MatrixXcd S_ha() const { return S_ah.conjugate(); }
};

SZeroData s_zero(const KernelContext& ctx, const ConicalDivisor& d);

struct BergmanMatrix {
  Eigen::MatrixXcd matrix;
  Eigen::VectorXd singular_values;
  int rank = 0;
  double threshold = 1e-6;
  double hermitian_defect = 0.0;
};

BergmanMatrix bergman_matrix(const KernelContext& ctx, const ConicalDivisor& d, double threshold = 1e-6);

struct CanonicalVerdict {
  bool canonical = false;
  double margin = 0.0;  // sigma_g / sigma_1
  double threshold = 1e-6;
};

CanonicalVerdict canonical_divisor_test(const BergmanMatrix& bm, int genus, double threshold = 1e-6);

/// Genus 2: P1 + P2 is canonical iff it is a fiber of the hyperelliptic map.
bool genus2_canonical_oracle(const HyperellipticCurve& c, const SurfacePoint& p1, const SurfacePoint& p2,
                             double tol = 1e-9);

}  // namespace conic
