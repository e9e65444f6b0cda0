#include "conic/series.hpp"

#include <algorithm>

namespace conic::series {

Series truncate(std::span<const cplx> a, std::size_t n) {
  Series out(n, cplx(0.0));
  std::copy_n(a.begin(), std::min(n, a.size()), out.begin());
  return out;
}

Series mul(const Series& a, const Series& b, std::size_t n) {
  Series out(n, cplx(0.0));
  for (std::size_t i = 0; i < std::min(n, a.size()); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size() && i + j < n; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Series inverse(const Series& a, std::size_t n) {
  if (a.empty() || a[0] == 0.0) throw Error(ErrorKind::InvalidArgument, "series inverse needs a nonzero constant term");
  Series r(n, cplx(0.0));
  r[0] = 1.0 / a[0];
  for (std::size_t k = 1; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t j = 1; j <= k && j < a.size(); ++j) acc += a[j] * r[k - j];
    r[k] = -acc / a[0];
  }
  return r;
}

Series sqrt(const Series& a, cplx s0, std::size_t n) {
  Series s(n, cplx(0.0));
  s[0] = s0;
  for (std::size_t k = 1; k < n; ++k) {
    cplx acc = k < a.size() ? a[k] : cplx(0.0);
    for (std::size_t j = 1; j < k; ++j) acc -= s[j] * s[k - j];
    s[k] = acc / (2.0 * s0);
  }
  return s;
}

Series integrate(const Series& a, std::size_t n) {
  Series out(n, cplx(0.0));
  for (std::size_t k = 0; k + 1 < n && k < a.size(); ++k) out[k + 1] = a[k] / static_cast<double>(k + 1);
  return out;
}

Series derivative(const Series& a) {
  if (a.size() <= 1) return {cplx(0.0)};
  Series out(a.size() - 1);
  for (std::size_t k = 1; k < a.size(); ++k) out[k - 1] = a[k] * static_cast<double>(k);
  return out;
}

Series compose(const Series& a, const Series& b, std::size_t n) {
  // Horner in series arithmetic.
  Series out(n, cplx(0.0));
  for (std::size_t k = std::min(a.size(), n); k-- > 0;) {
    out = mul(out, b, n);
    out[0] += a[k];
  }
  return out;
}

Series reversion(const Series& a, std::size_t n) {
  if (a.size() < 2 || a[1] == 0.0) throw Error(ErrorKind::InvalidArgument, "series reversion needs a[1] != 0");
  // Fixed point u = (xi - sum_{k>=2} a_k u^k) / a_1; each pass fixes one more coefficient.
  Series u(n, cplx(0.0));
  if (n > 1) u[1] = 1.0 / a[1];
  Series higher = truncate(a, n);
  higher[0] = 0.0;
  higher[1] = 0.0;
  for (std::size_t it = 2; it < n; ++it) {
    const Series h = compose(higher, u, n);
    Series next(n, cplx(0.0));
    next[1] = 1.0 / a[1];
    for (std::size_t k = 2; k < n; ++k) next[k] = -h[k] / a[1];
    u = next;
  }
  return u;
}

cplx eval(const Series& a, cplx u) {
  cplx acc = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * u + *it;
  return acc;
}

}  // namespace conic::series
