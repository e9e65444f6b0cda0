#pragma once

#include <Eigen/Dense>
#include <vector>

#include "conic/curve.hpp"

namespace conic {

struct LoopOptions {
  /// Loop half-width as a fraction of the clearance to other branch points.
  double width = 0.4;
  /// Angle (radians) on the ellipse where each loop starts.
  double phase = 0.3;
  int vertices = 128;
};

/// Canonical basis a_1..a_g, b_1..b_g written as integer combinations of
/// closed lifted loops; loop k encircles branch points loop_pairs[k].
struct HomologyBasis {
  int genus = 0;
  std::vector<SheetPath> loops;
  std::vector<std::pair<int, int>> loop_pairs;
  Eigen::MatrixXi loop_intersection;
  std::vector<Eigen::VectorXi> a, b;
  LoopOptions options;
};

/// Closed loop around the segment [e_i, e_j], counterclockwise, lifted from sheet +1.
SheetPath pair_loop(const HyperellipticCurve& c, int i, int j, const LoopOptions& opt);

/// Algebraic intersection number of two closed lifted polylines.
int intersection_number(const HyperellipticCurve& c, const SheetPath& p, const SheetPath& q);

HomologyBasis build_homology_basis(const HyperellipticCurve& c, const LoopOptions& opt = {});

/// Applies an integer symplectic change of basis: rows of `m` (2g x 2g) give the
/// new (a_1..a_g, b_1..b_g) in terms of the old ones.
HomologyBasis transform_basis(const HomologyBasis& basis, const Eigen::MatrixXi& m);

/// A second marking: different loops and a fixed Sp(2g, Z) transform of the default basis.
HomologyBasis alternate_basis(const HyperellipticCurve& c);

/// Intersection pairing of two cycles given as loop combinations.
int cycle_pairing(const HomologyBasis& basis, const Eigen::VectorXi& u, const Eigen::VectorXi& v);

/// True iff a_i.b_j = delta_ij and a_i.a_j = b_i.b_j = 0.
bool is_canonical(const HomologyBasis& basis);

}  // namespace conic
