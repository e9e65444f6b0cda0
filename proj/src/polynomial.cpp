#include "conic/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace conic::poly {

cplx eval(std::span<const cplx> c, cplx x) {
  cplx acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<cplx> derivative(std::span<const cplx> c) {
  if (c.size() <= 1) return {cplx(0.0)};
  std::vector<cplx> d(c.size() - 1);
  for (std::size_t n = 1; n < c.size(); ++n) d[n - 1] = c[n] * static_cast<double>(n);
  return d;
}

cplx divided_difference(std::span<const cplx> c, cplx x1, cplx x2) {
  // sum_n c_n h_{n-1}(x1, x2), h_m the complete homogeneous polynomial of degree m;
  // h_m = x1 h_{m-1} + x2^m.
  cplx h = 1.0;
  cplx x2pow = 1.0;
  cplx acc = 0.0;
  for (std::size_t n = 1; n < c.size(); ++n) {
    if (n > 1) {
      x2pow *= x2;
      h = x1 * h + x2pow;
    }
    acc += c[n] * h;
  }
  return acc;
}

std::vector<cplx> shift(std::span<const cplx> c, cplx x0) {
  // Repeated synthetic division.
  std::vector<cplx> a(c.begin(), c.end());
  const std::size_t n = a.size();
  for (std::size_t k = 0; k + 1 < n; ++k)
    for (std::size_t j = n - 1; j > k; --j) a[j - 1] += x0 * a[j];
  return a;
}

std::vector<cplx> trim(std::span<const cplx> c) {
  std::vector<cplx> out(c.begin(), c.end());
  while (out.size() > 1 && std::abs(out.back()) == 0.0) out.pop_back();
  return out;
}

bool lex_less(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

std::vector<cplx> roots(std::span<const cplx> coeffs, double polish_rel) {
  const auto c = trim(coeffs);
  const int deg = static_cast<int>(c.size()) - 1;
  if (deg < 1) return {};
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  std::vector<cplx> r(es.eigenvalues().data(), es.eigenvalues().data() + deg);

  const auto dc = derivative(c);
  for (auto& z : r) {
    for (int it = 0; it < 50; ++it) {
      const cplx fz = eval(c, z);
      const cplx dz = eval(dc, z);
      if (std::abs(dz) == 0.0) break;
      const cplx step = fz / dz;
      z -= step;
      if (std::abs(step) <= polish_rel * std::max(1.0, std::abs(z))) break;
    }
    // Exact zeros and purely real/imaginary roots come out with 1e-17 dust.
    if (std::abs(z.real()) < 1e-15 * std::max(1.0, std::abs(z))) z.real(0.0);
    if (std::abs(z.imag()) < 1e-15 * std::max(1.0, std::abs(z))) z.imag(0.0);
  }
  std::sort(r.begin(), r.end(), lex_less);
  return r;
}

}  // namespace conic::poly
