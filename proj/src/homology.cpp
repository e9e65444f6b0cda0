#include "conic/homology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace conic {

namespace {

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

double segment_clearance(cplx p, cplx q, cplx z) {
  const cplx d = q - p;
  double s = std::real(std::conj(d) * (z - p)) / std::norm(d);
  s = std::clamp(s, 0.0, 1.0);
  return std::abs(z - (p + s * d));
}

}  // namespace

SheetPath pair_loop(const HyperellipticCurve& c, int i, int j, const LoopOptions& opt) {
  const auto& bp = c.branch_points();
  const cplx p = bp[i], q = bp[j];
  double clear = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < bp.size(); ++k)
    if (static_cast<int>(k) != i && static_cast<int>(k) != j) clear = std::min(clear, segment_clearance(p, q, bp[k]));
  const double half = 0.5 * std::abs(q - p);
  const double delta = opt.width * std::min(clear, half);
  const cplx mid = 0.5 * (p + q);
  const cplx dir = (q - p) / std::abs(q - p);
  const double ax = half + delta;
  const double bx = delta;

  std::vector<cplx> poly;
  poly.reserve(opt.vertices + 1);
  for (int k = 0; k <= opt.vertices; ++k) {
    const double th = opt.phase + 2.0 * kPi * k / opt.vertices;
    poly.push_back(mid + dir * cplx(ax * std::cos(th), bx * std::sin(th)));
  }
  poly.back() = poly.front();
  auto path = continue_y(c, poly, c.sheet_y(poly.front(), 1));
  return path;
}

int intersection_number(const HyperellipticCurve& c, const SheetPath& p, const SheetPath& q) {
  int total = 0;
  const std::size_t np = p.size(), nq = q.size();
  for (std::size_t i = 0; i + 1 < np; ++i) {
    const cplx p0 = p.x[i], r = p.x[i + 1] - p.x[i];
    const double pxmin = std::min(p0.real(), p.x[i + 1].real()), pxmax = std::max(p0.real(), p.x[i + 1].real());
    const double pymin = std::min(p0.imag(), p.x[i + 1].imag()), pymax = std::max(p0.imag(), p.x[i + 1].imag());
    for (std::size_t j = 0; j + 1 < nq; ++j) {
      const cplx q0 = q.x[j], w = q.x[j + 1] - q.x[j];
      if (std::max(q0.real(), q.x[j + 1].real()) < pxmin || std::min(q0.real(), q.x[j + 1].real()) > pxmax) continue;
      if (std::max(q0.imag(), q.x[j + 1].imag()) < pymin || std::min(q0.imag(), q.x[j + 1].imag()) > pymax) continue;
      const double den = cross(r, w);
      if (den == 0.0) continue;
      const double s = cross(q0 - p0, w) / den;
      const double u = cross(q0 - p0, r) / den;
      if (s < 0.0 || s >= 1.0 || u < 0.0 || u >= 1.0) continue;
      const cplx xc = p0 + s * r;
      const cplx y1 = c.continue_from(p0, p.y[i], xc);
      const cplx y2 = c.continue_from(q0, q.y[j], xc);
      if (std::abs(y1 - y2) < std::abs(y1 + y2)) total += den > 0 ? 1 : -1;
    }
  }
  return total;
}

int cycle_pairing(const HomologyBasis& basis, const Eigen::VectorXi& u, const Eigen::VectorXi& v) {
  return u.dot(basis.loop_intersection * v);
}

bool is_canonical(const HomologyBasis& basis) {
  const int g = basis.genus;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      if (cycle_pairing(basis, basis.a[i], basis.b[j]) != (i == j ? 1 : 0)) return false;
      if (cycle_pairing(basis, basis.a[i], basis.a[j]) != 0) return false;
      if (cycle_pairing(basis, basis.b[i], basis.b[j]) != 0) return false;
    }
  return true;
}

HomologyBasis build_homology_basis(const HyperellipticCurve& c, const LoopOptions& opt) {
  HomologyBasis hb;
  hb.genus = c.genus();
  hb.options = opt;
  const int g = c.genus();
  const int m = 2 * g;
  for (int k = 0; k < m; ++k) {
    hb.loops.push_back(pair_loop(c, k, k + 1, opt));
    hb.loop_pairs.emplace_back(k, k + 1);
    if (!hb.loops.back().closed(1e-12))
      throw Error(ErrorKind::NumericallyDegenerate, "pair loop does not close on its starting sheet");
  }
  hb.loop_intersection = Eigen::MatrixXi::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const int n = intersection_number(c, hb.loops[i], hb.loops[j]);
      hb.loop_intersection(i, j) = n;
      hb.loop_intersection(j, i) = -n;
    }
  const long det = std::lround(hb.loop_intersection.cast<double>().determinant());
  if (std::abs(det) != 1)
    throw Error(ErrorKind::NumericallyDegenerate, "loop intersection matrix is not unimodular");

  // Symplectic reduction over the integers.
  std::vector<Eigen::VectorXi> rest;
  for (int k = 0; k < m; ++k) rest.push_back(Eigen::VectorXi::Unit(m, k));
  auto pair = [&](const Eigen::VectorXi& u, const Eigen::VectorXi& v) { return cycle_pairing(hb, u, v); };
  while (!rest.empty()) {
    Eigen::VectorXi a = rest.front();
    std::size_t partner = 0;
    int s = 0;
    for (std::size_t k = 1; k < rest.size(); ++k) {
      const int p = pair(a, rest[k]);
      if (p == 1 || p == -1) {
        partner = k;
        s = p;
        break;
      }
    }
    if (s == 0) throw Error(ErrorKind::NumericallyDegenerate, "symplectic reduction found no dual cycle");
    Eigen::VectorXi b = s * rest[partner];
    rest.erase(rest.begin() + partner);
    rest.erase(rest.begin());
    for (auto& v : rest) {
      const int vb = pair(v, b), va = pair(v, a);
      v = v - vb * a + va * b;
    }
    hb.a.push_back(a);
    hb.b.push_back(b);
  }
  if (!is_canonical(hb)) throw Error(ErrorKind::NumericallyDegenerate, "reduced basis is not canonical");
  return hb;
}

HomologyBasis transform_basis(const HomologyBasis& basis, const Eigen::MatrixXi& m) {
  const int g = basis.genus;
  if (m.rows() != 2 * g || m.cols() != 2 * g) throw Error(ErrorKind::InvalidArgument, "transform must be 2g x 2g");
  std::vector<Eigen::VectorXi> old;
  for (const auto& v : basis.a) old.push_back(v);
  for (const auto& v : basis.b) old.push_back(v);
  HomologyBasis out = basis;
  for (int r = 0; r < 2 * g; ++r) {
    Eigen::VectorXi v = Eigen::VectorXi::Zero(old[0].size());
    for (int k = 0; k < 2 * g; ++k) v += m(r, k) * old[k];
    if (r < g)
      out.a[r] = v;
    else
      out.b[r - g] = v;
  }
  if (!is_canonical(out)) throw Error(ErrorKind::InvalidArgument, "transform is not symplectic");
  return out;
}

HomologyBasis alternate_basis(const HyperellipticCurve& c) {
  LoopOptions opt;
  opt.width = 0.25;
  opt.phase = 1.9;
  opt.vertices = 96;
  const auto base = build_homology_basis(c, opt);
  const int g = c.genus();
  Eigen::MatrixXi m = Eigen::MatrixXi::Identity(2 * g, 2 * g);
  const int a1 = 0, a2 = 1, b1 = g, b2 = g + 1;
  m.row(a1).setZero();
  m(a1, a1) = 1;
  m(a1, b1) = 1;
  m(a1, b2) = 1;
  m.row(a2).setZero();
  m(a2, b2) = 1;
  m.row(b2).setZero();
  m(b2, a2) = -1;
  m(b2, b1) = -1;
  return transform_basis(base, m);
}

}  // namespace conic
