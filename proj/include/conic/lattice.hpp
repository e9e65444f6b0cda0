#pragma once

#include <Eigen/Sparse>
#include <string_view>
#include <vector>

#include "conic/types.hpp"

namespace conic {

struct ConeReport {
  int vertex_class = 0;
  int corners = 0;     // incident square corners
  double angle = 0.0;  // pi/2 per corner
};

/// Unit squares glued by h (right neighbour) and v (top neighbour), 0-based.
struct SquareTiledSurface {
  int N = 0;
  std::vector<int> h, v;
  int vertices = 0, edges = 0, faces = 0, genus = 0;
  std::vector<int> corner_class;  // 4 N entries: BL, BR, TL, TR of each square
  std::vector<ConeReport> cones;  // vertex classes with angle != 2 pi
  double angle_excess = 0.0;      // sum over all classes of (theta - 2 pi)
  double gauss_bonnet_defect = 0.0;
};

/// Cycle notation with 1-based labels: "(12)(34)", "(1 2)(3 4)" or "(1,2)". Labels
/// are single digits unless a cycle contains spaces or commas.
std::vector<int> parse_permutation(std::string_view cycles, int degree);
std::string permutation_cycles(const std::vector<int>& p);

SquareTiledSurface build_surface(std::vector<int> h, std::vector<int> v);
SquareTiledSurface build_surface(std::string_view h, std::string_view v, int degree);
/// Same surface with square i renamed p[i].
SquareTiledSurface relabeled(const SquareTiledSurface& s, const std::vector<int>& p);
/// Four squares, genus 2, two cone points of angle 4 pi.
SquareTiledSurface genus2_origami();

/// Vertex-to-cell D_z on the n x n refinement of every square:
/// Du = [(u_E - u_W) - i (u_N - u_S)] / (2h) with two-point averages, h = 1/n.
struct DiscreteDbar {
  int n = 0;
  double h = 0.0;
  int cells = 0, vertices = 0;
  Eigen::SparseMatrix<cplx> D;  // cells x vertices
  std::vector<int> vertex_id;   // per (square, a, b), a, b in [0, n]
  int vertex(int square, int a, int b) const { return vertex_id[(square * (n + 1) + b) * (n + 1) + a]; }
  int cell(int square, int a, int b) const { return (square * n + b) * n + a; }
};

DiscreteDbar assemble_D(const SquareTiledSurface& s, int n);

struct KernelSweep {
  double threshold = 0.0;
  int ker_D = 0, ker_Dstar = 0;
};

struct Spectra {
  std::vector<double> DstarD, DDstar;                  // all eigenvalues, ascending
  std::vector<double> nonzero_DstarD, nonzero_DDstar;  // above threshold * ||D||^2
  double norm2 = 0.0;                                  // ||D||^2
  double threshold = 1e-10;
  int ker_D = 0, ker_Dstar = 0;
  int cells = 0, vertices = 0;
  std::vector<KernelSweep> sweep;  // 1e-8 .. 1e-12
  bool same_count = false;
  double max_relative_mismatch = 0.0;
  double log_product_DstarD = 0.0, log_product_DDstar = 0.0;
  /// Index bookkeeping: ker_Dstar - ker_D against cells - vertices.
  int index_defect() const { return (ker_Dstar - ker_D) - (cells - vertices); }
};

Spectra spectra(const DiscreteDbar& d, double threshold = 1e-10);

struct ConvergenceRow {
  int index = 0;               // 1-based among nonzero eigenvalues
  std::vector<double> values;  // 4 lambda per resolution
  double limit = 0.0;          // Richardson limit from the last three
  double ratio = 0.0;          // (l0 - l1) / (l1 - l2) from the last three
  double order = 0.0;          // log2(ratio)
  bool monotone = false;
  double error = 0.0;          // |limit - finest|
};

struct ConvergenceStudy {
  std::vector<int> resolutions;
  std::vector<ConvergenceRow> rows;
  std::vector<Spectra> spectra;
};

/// First m nonzero eigenvalues of 4 D*D; needs at least three resolutions for ratios.
ConvergenceStudy convergence_study(const SquareTiledSurface& s, const std::vector<int>& resolutions, int m = 5);

}  // namespace conic
