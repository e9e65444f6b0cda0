#include "conic/lattice.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace conic {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  // Classes numbered by first appearance.
  std::vector<int> labels(int& count) {
    std::vector<int> out(parent.size());
    std::map<int, int> id;
    for (std::size_t i = 0; i < parent.size(); ++i) {
      const int r = find(static_cast<int>(i));
      const auto [it, fresh] = id.try_emplace(r, static_cast<int>(id.size()));
      out[i] = it->second;
    }
    count = static_cast<int>(id.size());
    return out;
  }
};

void check_permutation(const std::vector<int>& p, int degree, const char* name) {
  if (static_cast<int>(p.size()) != degree)
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " has the wrong degree");
  std::vector<char> seen(degree, 0);
  for (int x : p) {
    if (x < 0 || x >= degree || seen[x]) throw Error(ErrorKind::InvalidArgument, std::string(name) + " is not a permutation");
    seen[x] = 1;
  }
}

// Ascending eigenvalues of a Hermitian matrix, values only.
std::vector<double> hermitian_eigenvalues(Eigen::MatrixXcd m) {
  const auto n = static_cast<lapack_int>(m.rows());
  std::vector<double> w(n);
  if (n == 0) return w;
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, reinterpret_cast<lapack_complex_double*>(m.data()),
                                         n, w.data());
  if (info != 0) throw Error(ErrorKind::EigensolverFailure, "zheevd returned " + std::to_string(info));
  return w;
}

int count_below(const std::vector<double>& w, double cut) {
  return static_cast<int>(std::count_if(w.begin(), w.end(), [&](double x) { return x <= cut; }));
}

double log_product(const std::vector<double>& w) {
  double s = 0.0;
  for (double x : w) s += std::log(x);
  return s;
}

}  // namespace

std::vector<int> parse_permutation(std::string_view cycles, int degree) {
  if (degree < 1) throw Error(ErrorKind::InvalidArgument, "degree must be positive");
  std::vector<int> p(degree);
  std::iota(p.begin(), p.end(), 0);
  std::vector<char> used(degree, 0);
  std::size_t i = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorKind::InvalidArgument, "permutation \"" + std::string(cycles) + "\": " + why);
  };
  while (i < cycles.size()) {
    if (std::isspace(static_cast<unsigned char>(cycles[i]))) {
      ++i;
      continue;
    }
    if (cycles[i] != '(') fail("expected '('");
    const auto close = cycles.find(')', i);
    if (close == std::string_view::npos) fail("unclosed cycle");
    const std::string_view body = cycles.substr(i + 1, close - i - 1);
    i = close + 1;
    std::vector<int> cyc;
    const bool separated = body.find_first_of(" ,") != std::string_view::npos;
    if (separated) {
      std::string tok;
      std::istringstream in{std::string(body)};
      std::string chunk;
      while (in >> chunk) {
        std::replace(chunk.begin(), chunk.end(), ',', ' ');
        std::istringstream parts(chunk);
        while (parts >> tok) {
          if (!std::all_of(tok.begin(), tok.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
            fail("bad label '" + tok + "'");
          cyc.push_back(std::stoi(tok));
        }
      }
    } else {
      for (char ch : body) {
        if (!std::isdigit(static_cast<unsigned char>(ch))) fail(std::string("bad label '") + ch + "'");
        cyc.push_back(ch - '0');
      }
    }
    for (int& x : cyc) {
      if (x < 1 || x > degree) fail("label " + std::to_string(x) + " out of range");
      if (used[--x]) fail("label " + std::to_string(x + 1) + " repeated");
      used[x] = 1;
    }
    for (std::size_t k = 0; k < cyc.size(); ++k) p[cyc[k]] = cyc[(k + 1) % cyc.size()];
  }
  return p;
}

std::string permutation_cycles(const std::vector<int>& p) {
  std::string out;
  std::vector<char> seen(p.size(), 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i] || p[i] == static_cast<int>(i)) continue;
    out += '(';
    for (int j = static_cast<int>(i); !seen[j]; j = p[j]) {
      if (out.back() != '(') out += ' ';
      out += std::to_string(j + 1);
      seen[j] = 1;
    }
    out += ')';
  }
  return out.empty() ? "()" : out;
}

SquareTiledSurface build_surface(std::vector<int> h, std::vector<int> v) {
  const int N = static_cast<int>(h.size());
  if (N == 0) throw Error(ErrorKind::InvalidArgument, "no squares");
  check_permutation(h, N, "h");
  check_permutation(v, N, "v");

  std::vector<char> reached(N, 0);
  std::vector<int> stack = {0};
  reached[0] = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j : {h[i], v[i]})
      if (!reached[j]) reached[j] = 1, stack.push_back(j);
  }
  if (std::count(reached.begin(), reached.end(), 1) != N)
    throw Error(ErrorKind::NotConnected, "h and v do not act transitively");

  enum { BL, BR, TL, TR };
  UnionFind uf(4 * N);
  for (int i = 0; i < N; ++i) {
    uf.unite(4 * i + BR, 4 * h[i] + BL);
    uf.unite(4 * i + TR, 4 * h[i] + TL);
    uf.unite(4 * i + TL, 4 * v[i] + BL);
    uf.unite(4 * i + TR, 4 * v[i] + BR);
  }
  SquareTiledSurface s;
  s.N = N;
  s.h = std::move(h);
  s.v = std::move(v);
  s.corner_class = uf.labels(s.vertices);
  s.faces = N;
  s.edges = 2 * N;
  const int chi = s.vertices - s.edges + s.faces;
  s.genus = (2 - chi) / 2;

  std::vector<int> corners(s.vertices, 0);
  for (int c : s.corner_class) ++corners[c];
  for (int k = 0; k < s.vertices; ++k) {
    const double angle = 0.5 * kPi * corners[k];
    s.angle_excess += angle - 2.0 * kPi;
    if (corners[k] != 4) s.cones.push_back({k, corners[k], angle});
  }
  s.gauss_bonnet_defect = std::abs(s.angle_excess - 2.0 * kPi * (2 * s.genus - 2));
  return s;
}

SquareTiledSurface build_surface(std::string_view h, std::string_view v, int degree) {
  return build_surface(parse_permutation(h, degree), parse_permutation(v, degree));
}

SquareTiledSurface relabeled(const SquareTiledSurface& s, const std::vector<int>& p) {
  check_permutation(p, s.N, "relabeling");
  std::vector<int> h(s.N), v(s.N);
  for (int i = 0; i < s.N; ++i) {
    h[p[i]] = p[s.h[i]];
    v[p[i]] = p[s.v[i]];
  }
  return build_surface(std::move(h), std::move(v));
}

SquareTiledSurface genus2_origami() { return build_surface("(3 4)", "(1 3)(2 4)", 4); }

DiscreteDbar assemble_D(const SquareTiledSurface& s, int n) {
  if (n < 4) throw Error(ErrorKind::ResolutionTooLow, "grid resolution must be at least 4, got " + std::to_string(n));
  DiscreteDbar d;
  d.n = n;
  d.h = 1.0 / n;
  const int side = n + 1;
  UnionFind uf(s.N * side * side);
  auto slot = [&](int i, int a, int b) { return (i * side + b) * side + a; };
  for (int i = 0; i < s.N; ++i)
    for (int t = 0; t <= n; ++t) {
      uf.unite(slot(i, n, t), slot(s.h[i], 0, t));
      uf.unite(slot(i, t, n), slot(s.v[i], t, 0));
    }
  d.vertex_id = uf.labels(d.vertices);
  d.cells = s.N * n * n;

  const double k = 1.0 / (4.0 * d.h);
  const cplx sw = k * cplx(-1.0, 1.0), se = k * cplx(1.0, 1.0), nw = k * cplx(-1.0, -1.0), ne = k * cplx(1.0, -1.0);
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(4 * d.cells);
  for (int i = 0; i < s.N; ++i)
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a) {
        const int row = d.cell(i, a, b);
        trip.emplace_back(row, d.vertex(i, a, b), sw);
        trip.emplace_back(row, d.vertex(i, a + 1, b), se);
        trip.emplace_back(row, d.vertex(i, a, b + 1), nw);
        trip.emplace_back(row, d.vertex(i, a + 1, b + 1), ne);
      }
  d.D.resize(d.cells, d.vertices);
  d.D.setFromTriplets(trip.begin(), trip.end());
  d.D.makeCompressed();
  return d;
}

Spectra spectra(const DiscreteDbar& d, double threshold) {
  Spectra out;
  out.threshold = threshold;
  out.cells = d.cells;
  out.vertices = d.vertices;
  const Eigen::SparseMatrix<cplx> A = d.D.adjoint();
  out.DstarD = hermitian_eigenvalues(Eigen::MatrixXcd(A * d.D));
  out.DDstar = hermitian_eigenvalues(Eigen::MatrixXcd(d.D * A));
  out.norm2 = std::max(out.DstarD.empty() ? 0.0 : out.DstarD.back(), out.DDstar.empty() ? 0.0 : out.DDstar.back());

  const double cut = threshold * out.norm2;
  out.ker_D = count_below(out.DstarD, cut);
  out.ker_Dstar = count_below(out.DDstar, cut);
  out.nonzero_DstarD.assign(out.DstarD.begin() + out.ker_D, out.DstarD.end());
  out.nonzero_DDstar.assign(out.DDstar.begin() + out.ker_Dstar, out.DDstar.end());
  for (double t : {1e-8, 1e-9, 1e-10, 1e-11, 1e-12})
    out.sweep.push_back({t, count_below(out.DstarD, t * out.norm2), count_below(out.DDstar, t * out.norm2)});

  out.same_count = out.nonzero_DstarD.size() == out.nonzero_DDstar.size();
  const std::size_t m = std::min(out.nonzero_DstarD.size(), out.nonzero_DDstar.size());
  for (std::size_t i = 0; i < m; ++i) {
    const double a = out.nonzero_DstarD[i], b = out.nonzero_DDstar[i];
    out.max_relative_mismatch = std::max(out.max_relative_mismatch, std::abs(a - b) / std::max(a, b));
  }
  out.log_product_DstarD = log_product(out.nonzero_DstarD);
  out.log_product_DDstar = log_product(out.nonzero_DDstar);
  return out;
}

ConvergenceStudy convergence_study(const SquareTiledSurface& s, const std::vector<int>& resolutions, int m) {
  if (resolutions.size() < 3) throw Error(ErrorKind::InvalidArgument, "convergence study needs three resolutions");
  ConvergenceStudy out;
  out.resolutions = resolutions;
  for (int n : resolutions) out.spectra.push_back(spectra(assemble_D(s, n)));
  for (int i = 0; i < m; ++i) {
    ConvergenceRow row;
    row.index = i + 1;
    for (const auto& sp : out.spectra) {
      if (static_cast<int>(sp.nonzero_DstarD.size()) <= i)
        throw Error(ErrorKind::InvalidArgument, "too few nonzero eigenvalues at the coarsest resolution");
      row.values.push_back(4.0 * sp.nonzero_DstarD[i]);
    }
    const std::size_t L = row.values.size();
    const double l0 = row.values[L - 3], l1 = row.values[L - 2], l2 = row.values[L - 1];
    const double d0 = l0 - l1, d1 = l1 - l2;
    row.ratio = d1 != 0.0 ? d0 / d1 : std::numeric_limits<double>::infinity();
    row.order = std::log2(std::abs(row.ratio));
    row.monotone = d0 * d1 > 0.0;
    row.limit = row.ratio != 1.0 && std::isfinite(row.ratio) ? l2 - d1 / (row.ratio - 1.0) : l2;
    row.error = std::abs(row.limit - l2);
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace conic
