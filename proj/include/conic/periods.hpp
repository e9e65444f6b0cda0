#pragma once

#include <Eigen/Dense>

#include "conic/homology.hpp"
#include "conic/line_integral.hpp"

namespace conic {

struct PeriodData {
  /// Integrals of x^{j-1} dx / y over each loop (loops x g).
  Eigen::MatrixXcd loop_periods;
  /// a- and b-periods of the raw differentials: A(i, j) = int_{a_i} x^{j-1} dx / y.
  Eigen::MatrixXcd A, Bm;
  /// v_j = sum_l C(l, j) x^{l-1} dx / y, so that int_{a_i} v_j = delta_ij.
  Eigen::MatrixXcd C;
  /// Riemann matrix B(i, j) = int_{b_i} v_j.
  Eigen::MatrixXcd riemann;
  /// (Im B)^{-1}.
  Eigen::MatrixXd im_inverse;
  double error = 0.0;
  double condition = 0.0;
};

/// Integral over an integer combination of loops, given per-loop values.
Eigen::VectorXcd combine_loops(const Eigen::MatrixXcd& per_loop, const Eigen::VectorXi& cycle);

PeriodData period_matrix(const HyperellipticCurve& c, const HomologyBasis& basis, double tolerance = 1e-13);

/// Rebuilds A, C, B and (Im B)^{-1} from stored loop periods.
void finish_periods(const HyperellipticCurve& c, const HomologyBasis& basis, PeriodData& pd);

/// Normalized differentials in the x-frame at a regular finite point.
Eigen::VectorXcd v_x(const PeriodData& pd, cplx x, cplx y);
/// Polynomial p_j(x) = sum_l C(l, j) x^{l-1}, so v_j = p_j(x) dx / y.
Eigen::VectorXcd v_numerators(const PeriodData& pd, cplx x);

struct PeriodDiagnostics {
  double symmetry = 0.0;  // max |B - B^T|
  double min_im_eigenvalue = 0.0;
  double normalization = 0.0;  // max |int_{a_i} v_j - delta_ij| recomputed along the cycles
};

PeriodDiagnostics check_periods(const HyperellipticCurve& c, const HomologyBasis& basis, const PeriodData& pd,
                                double tolerance = 1e-13);

}  // namespace conic
