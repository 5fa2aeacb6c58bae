#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "spfem/femspace.hpp"
#include "spfem/problem.hpp"

namespace spfem {

/// Gauss-Legendre rule on [0, 1].
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;

  int order() const { return static_cast<int>(points.size()); }
};

/// q-point rule, exact for polynomials of degree 2q - 1. Requires 1 <= q <= 20.
QuadratureRule gauss_rule(int q);

/// Compressed sparse rows.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  std::size_t nnz() const { return val.size(); }
  /// Stored value at (r, c), 0 when not in the pattern.
  double at(std::size_t r, std::size_t c) const;
  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// x^T A y
  double form(std::span<const double> x, std::span<const double> y) const;
};

/// Interior (unknown) dofs of a FemSpace; boundary values are homogeneous.
struct DofMap {
  std::vector<std::size_t> interior_to_global;
  std::vector<std::int64_t> global_to_interior;  // -1 on the boundary

  std::size_t size() const { return interior_to_global.size(); }
  std::vector<double> restrict_to_interior(std::span<const double> global) const;
  std::vector<double> extend_to_global(std::span<const double> interior) const;
};

DofMap interior_dofs(const FemSpace& space);

/// eps1 (grad u, grad v) + (eps2 b u_x + c u, v). Null b or c means zero.
struct FormCoefficients {
  double eps1 = 0.0;
  double eps2 = 0.0;
  Fn1 b;
  Fn1 c;
};

/// Dense (k+1)^2 x (k+1)^2 element matrix in row-major order; row = test
/// function, column = trial function, local index t (k+1) + s.
std::vector<double> element_matrix(const LagrangeBasis1D& basis, double x0, double hx,
                                   double hy, const FormCoefficients& form,
                                   const QuadratureRule& quad);

/// Matrix of the form restricted to the interior dofs.
CsrMatrix assemble_matrix(const FemSpace& space, const FormCoefficients& form,
                          const QuadratureRule& quad, const DofMap& dofs);

/// Load vector (f, theta_m) over the interior dofs.
std::vector<double> assemble_load(const FemSpace& space, const Fn2& f, const QuadratureRule& quad,
                                  const DofMap& dofs);

struct SparseSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
  DofMap dofs;
};

/// Galerkin system with Dirichlet rows and columns eliminated. Requires
/// quad.order() >= k + 1.
SparseSystem assemble(const FemSpace& space, const ProblemSpec& problem,
                      const QuadratureRule& quad);

/// "row col value" per stored entry (0-based interior indices).
void write_matrix_coo(std::ostream& out, const CsrMatrix& m);

}  // namespace spfem
