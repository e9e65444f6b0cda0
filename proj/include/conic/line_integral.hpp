#pragma once

#include <functional>
#include <span>
#include <vector>

#include "conic/curve.hpp"

namespace conic {

/// Vector-valued integrand: writes the coefficients of one or more
/// differentials F(x, y) dx at the point (x, y) into `out`.
using Integrand = std::function<void(cplx x, cplx y, std::span<cplx> out)>;

struct PathIntegral {
  std::vector<cplx> value;
  double error = 0.0;
  std::size_t intervals = 0;
};

struct QuadratureOptions {
  double tolerance = 1e-12;
  std::size_t max_intervals = 200000;
};

/// Adaptive Gauss-Kronrod (7/15) integration along a continued path. A final
/// leg ending at a branch point e is integrated in t = sqrt(x - e).
PathIntegral integrate_path(const HyperellipticCurve& c, const SheetPath& path, const Integrand& f,
                            int dim, const QuadratureOptions& opt = {});

struct AbelianIntegral {
  cplx value{0.0};
  double error = 0.0;
};

/// Integral of sum_j d_j x^j dx / y along the path (d in the raw basis x^{j} dx/y, j = 0..).
AbelianIntegral abelian_integral(const HyperellipticCurve& c, std::span<const cplx> differential,
                                 const SheetPath& path, double tolerance = 1e-12);

/// Integrand for the raw holomorphic differentials x^{j-1} dx / y, j = 1..g.
Integrand raw_holomorphic_integrand(int genus);

}  // namespace conic
