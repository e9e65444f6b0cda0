#include "conic/smatrix.hpp"

#include <Eigen/SVD>
#include <sstream>

namespace conic {

namespace {

void check_points(const HyperellipticCurve& c, const std::vector<SurfacePoint>& pts) {
  if (static_cast<int>(pts.size()) != 2 * c.genus() - 2)
    throw Error(ErrorKind::InvalidArgument, "a conical divisor has 2g - 2 points");
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (same_point(pts[i], pts[j], 1e-12)) throw Error(ErrorKind::CoincidentPoints, "divisor points must be distinct");
}

// Reruns `fn` and tags any module error with the offending index pair.
template <class F>
cplx tagged(int k, int j, F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    std::ostringstream os;
    os << e.message() << " at (k, j) = (" << k + 1 << ", " << j + 1 << ")";
    throw Error(e.kind(), os.str());
  }
}

}  // namespace

ConicalDivisor divisor_from_omega(const HyperellipticCurve& c, std::span<const cplx> omega,
                                  const std::vector<int>& branch_tags) {
  ConicalDivisor d;
  d.holonomy = Holonomy::Trivial;
  d.omega.assign(omega.begin(), omega.end());
  d.points = omega_zeros(c, omega);
  check_points(c, d.points);
  for (std::size_t k = 0; k < d.points.size(); ++k) {
    const int tag = k < branch_tags.size() ? branch_tags[k] : 1;
    d.frames.push_back(distinguished_frame(c, omega, d.points[k], tag));
  }
  return d;
}

ConicalDivisor divisor_with_frames(const HyperellipticCurve& c, const std::vector<SurfacePoint>& points,
                                   std::vector<FrameJet> frames) {
  check_points(c, points);
  ConicalDivisor d;
  d.points = points;
  if (frames.empty())
    for (const auto& p : points) frames.push_back(chart_frame(c, p));
  if (frames.size() != points.size()) throw Error(ErrorKind::InvalidArgument, "one frame per divisor point");
  d.frames = std::move(frames);
  return d;
}

SZeroData s_zero(const KernelContext& ctx, const ConicalDivisor& d) {
  const int n = static_cast<int>(d.frames.size());
  SZeroData s;
  s.S_aa.resize(n, n);
  s.S_ah.resize(n, n);
  s.diagonal_error = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      if (k == j) {
        s.S_aa(k, k) = tagged(k, k, [&] {
          const auto pc = schiffer_proj_connection(ctx, d.frames[k]);
          s.diagonal_error(k) = pc.error / 6.0;
          return -pc.value / 6.0;
        });
      } else if (j > k) {
        s.S_aa(k, j) = tagged(k, j, [&] { return -schiffer_kernel(ctx, d.frames[k], d.frames[j]); });
        s.S_aa(j, k) = s.S_aa(k, j);
      }
      s.S_ah(k, j) = -kPi * bergman_kernel(ctx, d.frames[k], d.frames[j]);
    }
  return s;
}

BergmanMatrix bergman_matrix(const KernelContext& ctx, const ConicalDivisor& d, double threshold) {
  const int n = static_cast<int>(d.frames.size());
  BergmanMatrix bm;
  bm.threshold = threshold;
  bm.matrix.resize(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) bm.matrix(k, j) = bergman_kernel(ctx, d.frames[k], d.frames[j]);
  bm.hermitian_defect = (bm.matrix - bm.matrix.adjoint()).cwiseAbs().maxCoeff();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(bm.matrix);
  bm.singular_values = svd.singularValues();
  const double s1 = bm.singular_values.size() ? bm.singular_values(0) : 0.0;
  for (int i = 0; i < bm.singular_values.size(); ++i)
    if (s1 > 0.0 && bm.singular_values(i) >= threshold * s1) ++bm.rank;
  return bm;
}

CanonicalVerdict canonical_divisor_test(const BergmanMatrix& bm, int genus, double threshold) {
  if (!(threshold > 0.0)) throw Error(ErrorKind::InvalidArgument, "threshold must be positive");
  CanonicalVerdict v;
  v.threshold = threshold;
  const auto& s = bm.singular_values;
  if (s.size() < genus || s(0) <= 0.0) {
    v.canonical = true;
    v.margin = 0.0;
    return v;
  }
  v.margin = s(genus - 1) / s(0);
  v.canonical = v.margin < threshold;
  return v;
}

bool genus2_canonical_oracle(const HyperellipticCurve& c, const SurfacePoint& p1, const SurfacePoint& p2, double tol) {
  if (c.genus() != 2) throw Error(ErrorKind::GenusNotTwo, "the fiber criterion is specific to genus 2");
  if (p1.at_infinity || p2.at_infinity) {
    if (!(p1.at_infinity && p2.at_infinity)) return false;
    return c.branch_at_infinity() ? true : p1.sheet != p2.sheet;
  }
  const double sx = std::max(1.0, std::abs(p1.x));
  if (std::abs(p1.x - p2.x) > tol * sx) return false;
  const double sy = std::max(1.0, std::abs(p1.y));
  return std::abs(p1.y + p2.y) <= tol * sy;
}

}  // namespace conic
