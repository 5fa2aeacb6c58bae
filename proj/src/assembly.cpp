#include "spfem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace spfem {

QuadratureRule gauss_rule(int q) {
  if (q < 1 || q > 20) throw std::invalid_argument(fmt::format("quadrature order {} outside [1, 20]", q));
  QuadratureRule rule;
  rule.points.resize(q);
  rule.weights.resize(q);
  // Newton iteration on the Legendre polynomial P_q over [-1, 1], then mapped to [0, 1].
  for (int i = 0; i < (q + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int n = 2; n <= q; ++n) {
        const double p2 = ((2.0 * n - 1.0) * z * p1 - (n - 1.0) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      if (q == 1) p0 = 1.0;
      // P_q'(z) = q (z P_q - P_{q-1}) / (z^2 - 1)
      dp = q * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.points[i] = 0.5 * (1.0 - z);
    rule.points[q - 1 - i] = 0.5 * (1.0 + z);
    rule.weights[i] = rule.weights[q - 1 - i] = 0.5 * w;
  }
  if (q % 2 == 1) rule.points[q / 2] = 0.5;
  return rule;
}

double CsrMatrix::at(std::size_t r, std::size_t c) const {
  const auto b = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]);
  const auto e = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]);
  const auto it = std::lower_bound(b, e, static_cast<std::uint32_t>(c));
  return (it != e && *it == c) ? val[static_cast<std::size_t>(it - col.begin())] : 0.0;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) s += val[p] * x[col[p]];
    y[r] = s;
  }
}

double CsrMatrix::form(std::span<const double> x, std::span<const double> y) const {
  double s = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    double row = 0.0;
    for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) row += val[p] * y[col[p]];
    s += x[r] * row;
  }
  return s;
}

std::vector<double> DofMap::restrict_to_interior(std::span<const double> global) const {
  std::vector<double> out(interior_to_global.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = global[interior_to_global[i]];
  return out;
}

std::vector<double> DofMap::extend_to_global(std::span<const double> interior) const {
  std::vector<double> out(global_to_interior.size(), 0.0);
  for (std::size_t i = 0; i < interior.size(); ++i) out[interior_to_global[i]] = interior[i];
  return out;
}

DofMap interior_dofs(const FemSpace& space) {
  DofMap m;
  m.global_to_interior.assign(space.dof_count(), -1);
  m.interior_to_global.reserve(space.interior_dof_count());
  for (std::size_t d = 0; d < space.dof_count(); ++d) {
    if (space.is_boundary(d)) continue;
    m.global_to_interior[d] = static_cast<std::int64_t>(m.interior_to_global.size());
    m.interior_to_global.push_back(d);
  }
  return m;
}

namespace {

// 1D element matrices on a cell of width h (row = test, col = trial):
// stiff = int phi_n' phi_m', mass = int phi_n phi_m,
// conv = int b phi_n' phi_m, react = int c phi_n phi_m.
struct Cell1D {
  std::vector<double> stiff, mass, conv, react;
};

struct BasisTable {
  int k;
  int q;
  std::vector<double> v;  // v[s * q + g]
  std::vector<double> d;

  BasisTable(const LagrangeBasis1D& basis, const QuadratureRule& quad)
      : k(basis.degree()), q(quad.order()) {
    v.resize(static_cast<std::size_t>(k + 1) * q);
    d.resize(v.size());
    for (int s = 0; s <= k; ++s)
      for (int g = 0; g < q; ++g) {
        v[s * q + g] = basis.value(s, quad.points[g]);
        d[s * q + g] = basis.derivative(s, quad.points[g]);
      }
  }
};

Cell1D cell_matrices(const BasisTable& T, const QuadratureRule& quad, double x0, double h,
                     const Fn1& b, const Fn1& c) {
  const int n = T.k + 1;
  Cell1D m;
  m.stiff.assign(static_cast<std::size_t>(n) * n, 0.0);
  m.mass.assign(m.stiff.size(), 0.0);
  m.conv.assign(m.stiff.size(), 0.0);
  m.react.assign(m.stiff.size(), 0.0);
  for (int g = 0; g < T.q; ++g) {
    const double w = quad.weights[g];
    const double x = x0 + h * quad.points[g];
    const double bv = b ? b(x) : 0.0;
    const double cv = c ? c(x) : 0.0;
    for (int mi = 0; mi < n; ++mi)
      for (int ni = 0; ni < n; ++ni) {
        const double vm = T.v[mi * T.q + g], vn = T.v[ni * T.q + g];
        const double dm = T.d[mi * T.q + g], dn = T.d[ni * T.q + g];
        const std::size_t idx = static_cast<std::size_t>(mi) * n + ni;
        m.stiff[idx] += w * dn * dm / h;
        m.mass[idx] += w * vn * vm * h;
        m.conv[idx] += w * bv * dn * vm;
        m.react[idx] += w * cv * vn * vm * h;
      }
  }
  return m;
}

// K[(tm, sm), (tn, sn)] = eps1 (Sx My + Mx Sy) + (eps2 Cx + Rx) My
void combine(const Cell1D& X, const Cell1D& Y, int n, const FormCoefficients& form,
             std::vector<double>& K) {
  const int nloc = n * n;
  K.assign(static_cast<std::size_t>(nloc) * nloc, 0.0);
  for (int tm = 0; tm < n; ++tm)
    for (int sm = 0; sm < n; ++sm)
      for (int tn = 0; tn < n; ++tn)
        for (int sn = 0; sn < n; ++sn) {
          const std::size_t ix = static_cast<std::size_t>(sm) * n + sn;
          const std::size_t iy = static_cast<std::size_t>(tm) * n + tn;
          const double v = form.eps1 * (X.stiff[ix] * Y.mass[iy] + X.mass[ix] * Y.stiff[iy]) +
                           (form.eps2 * X.conv[ix] + X.react[ix]) * Y.mass[iy];
          K[static_cast<std::size_t>(tm * n + sm) * nloc + (tn * n + sn)] = v;
        }
}

struct Triplet {
  std::uint32_t row;
  std::uint32_t col;
  double val;
};

}  // namespace

std::vector<double> element_matrix(const LagrangeBasis1D& basis, double x0, double hx,
                                   double hy, const FormCoefficients& form,
                                   const QuadratureRule& quad) {
  const BasisTable T(basis, quad);
  const Cell1D X = cell_matrices(T, quad, x0, hx, form.b, form.c);
  const Cell1D Y = cell_matrices(T, quad, 0.0, hy, nullptr, nullptr);
  std::vector<double> K;
  combine(X, Y, basis.degree() + 1, form, K);
  return K;
}

CsrMatrix assemble_matrix(const FemSpace& space, const FormCoefficients& form,
                          const QuadratureRule& quad, const DofMap& dofs) {
  const int k = space.degree();
  const int N = space.N();
  const int n = k + 1;
  const TensorMesh& mesh = space.mesh();
  const BasisTable T(space.basis(), quad);

  std::vector<Cell1D> xcells, ycells;
  xcells.reserve(N);
  ycells.reserve(N);
  for (int i = 0; i < N; ++i) xcells.push_back(cell_matrices(T, quad, mesh.x[i], mesh.hx[i], form.b, form.c));
  for (int j = 0; j < N; ++j) ycells.push_back(cell_matrices(T, quad, mesh.y[j], mesh.hy[j], nullptr, nullptr));

  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(N) * N * n * n * n * n);
  std::vector<double> K;
  std::vector<std::int64_t> loc(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      combine(xcells[i], ycells[j], n, form, K);
      for (int t = 0; t < n; ++t)
        for (int s = 0; s < n; ++s)
          loc[t * n + s] = dofs.global_to_interior[space.dof(i * k + s, j * k + t)];
      for (int m = 0; m < n * n; ++m) {
        if (loc[m] < 0) continue;
        for (int c = 0; c < n * n; ++c) {
          if (loc[c] < 0) continue;
          trip.push_back({static_cast<std::uint32_t>(loc[m]), static_cast<std::uint32_t>(loc[c]),
                          K[static_cast<std::size_t>(m) * n * n + c]});
        }
      }
    }
  }

  std::stable_sort(trip.begin(), trip.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  CsrMatrix A;
  A.rows = A.cols = dofs.size();
  A.row_ptr.assign(A.rows + 1, 0);
  for (std::size_t p = 0; p < trip.size();) {
    std::size_t q = p;
    double sum = 0.0;
    while (q < trip.size() && trip[q].row == trip[p].row && trip[q].col == trip[p].col) sum += trip[q++].val;
    A.col.push_back(trip[p].col);
    A.val.push_back(sum);
    ++A.row_ptr[trip[p].row + 1];
    p = q;
  }
  for (std::size_t r = 0; r < A.rows; ++r) A.row_ptr[r + 1] += A.row_ptr[r];
  return A;
}

std::vector<double> assemble_load(const FemSpace& space, const Fn2& f, const QuadratureRule& quad,
                                  const DofMap& dofs) {
  const int k = space.degree();
  const int N = space.N();
  const int n = k + 1;
  const int q = quad.order();
  const TensorMesh& mesh = space.mesh();
  const BasisTable T(space.basis(), quad);

  std::vector<double> rhs(dofs.size(), 0.0);
  std::vector<double> fq(static_cast<std::size_t>(q) * q);
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      const double hx = mesh.hx[i], hy = mesh.hy[j];
      for (int gy = 0; gy < q; ++gy)
        for (int gx = 0; gx < q; ++gx)
          fq[gy * q + gx] = f(mesh.x[i] + hx * quad.points[gx], mesh.y[j] + hy * quad.points[gy]) *
                            quad.weights[gx] * quad.weights[gy] * hx * hy;
      for (int t = 0; t < n; ++t)
        for (int s = 0; s < n; ++s) {
          const std::int64_t r = dofs.global_to_interior[space.dof(i * k + s, j * k + t)];
          if (r < 0) continue;
          double acc = 0.0;
          for (int gy = 0; gy < q; ++gy)
            for (int gx = 0; gx < q; ++gx) acc += fq[gy * q + gx] * T.v[s * q + gx] * T.v[t * q + gy];
          rhs[static_cast<std::size_t>(r)] += acc;
        }
    }
  }
  return rhs;
}

SparseSystem assemble(const FemSpace& space, const ProblemSpec& problem,
                      const QuadratureRule& quad) {
  if (quad.order() < space.degree() + 1)
    throw std::invalid_argument(fmt::format("quadrature order {} below k + 1 = {}", quad.order(),
                                            space.degree() + 1));
  SparseSystem sys;
  sys.dofs = interior_dofs(space);
  const FormCoefficients form{problem.eps1, problem.eps2, problem.b, problem.c};
  sys.matrix = assemble_matrix(space, form, quad, sys.dofs);
  sys.rhs = assemble_load(space, problem.f, quad, sys.dofs);
  return sys;
}

void write_matrix_coo(std::ostream& out, const CsrMatrix& m) {
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p)
      out << fmt::format("{} {} {:.17g}\n", r, m.col[p], m.val[p]);
}

}  // namespace spfem
