#pragma once

#include <span>
#include <vector>

#include "conic/types.hpp"

namespace conic::poly {

// Coefficient vectors are stored constant term first.

cplx eval(std::span<const cplx> c, cplx x);
std::vector<cplx> derivative(std::span<const cplx> c);

/// (p(x1) - p(x2)) / (x1 - x2), evaluated without cancellation; equals p'(x) on the diagonal.
cplx divided_difference(std::span<const cplx> c, cplx x1, cplx x2);

/// Coefficients of p(x0 + u) in powers of u.
std::vector<cplx> shift(std::span<const cplx> c, cplx x0);

/// Strips trailing coefficients whose magnitude is zero.
std::vector<cplx> trim(std::span<const cplx> c);

/// Roots from companion-matrix eigenvalues, each polished by Newton to
/// `polish_rel` relative accuracy. Order follows lexicographic (re, im).
std::vector<cplx> roots(std::span<const cplx> c, double polish_rel = 1e-14);

/// Lexicographic (real, imaginary) order used for branch points.
bool lex_less(cplx a, cplx b);

}  // namespace conic::poly
