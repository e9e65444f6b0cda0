#pragma once

#include <span>
#include <vector>

#include "conic/types.hpp"

/// Truncated power series in one variable; index n holds the u^n coefficient.
namespace conic::series {

using Series = std::vector<cplx>;

Series truncate(std::span<const cplx> a, std::size_t n);
Series mul(const Series& a, const Series& b, std::size_t n);
/// 1 / a, requires a[0] != 0.
Series inverse(const Series& a, std::size_t n);
/// sqrt(a) with leading coefficient s0 (s0^2 = a[0] != 0).
Series sqrt(const Series& a, cplx s0, std::size_t n);
/// Antiderivative vanishing at 0.
Series integrate(const Series& a, std::size_t n);
Series derivative(const Series& a);
/// a(b(u)) for b[0] = 0.
Series compose(const Series& a, const Series& b, std::size_t n);
/// Compositional inverse of a (a[0] = 0, a[1] != 0).
Series reversion(const Series& a, std::size_t n);
cplx eval(const Series& a, cplx u);

}  // namespace conic::series
