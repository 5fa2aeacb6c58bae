#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

#include "spfem/mesh.hpp"
#include "spfem/problem.hpp"

namespace spfem {

/// Lagrange basis of degree k on [0, 1] with equidistant nodes s/k.
class LagrangeBasis1D {
 public:
  explicit LagrangeBasis1D(int k);

  int degree() const { return k_; }
  double value(int s, double xi) const;
  double derivative(int s, double xi) const;

 private:
  int k_;
  std::vector<double> nodes_;
  std::vector<double> denom_;
};

/// Continuous Q_k space over a TensorMesh.
///
/// Global nodes are (nodes_x[a], nodes_y[b]) with a, b in [0, kN]; node a = i k + s
/// sits at x_i + (s/k) h_{x,i}. Degrees of freedom are numbered
/// lexicographically with x running fastest: dof = b (kN + 1) + a.
class FemSpace {
 public:
  FemSpace(TensorMesh mesh, int k);

  const TensorMesh& mesh() const { return mesh_; }
  int degree() const { return k_; }
  int N() const { return mesh_.N; }
  /// Nodes per direction, kN + 1.
  int nodes_per_axis() const { return n_; }
  std::size_t dof_count() const { return static_cast<std::size_t>(n_) * n_; }
  std::size_t interior_dof_count() const { return static_cast<std::size_t>(n_ - 2) * (n_ - 2); }

  std::span<const double> nodes_x() const { return nodes_x_; }
  std::span<const double> nodes_y() const { return nodes_y_; }

  std::size_t dof(int a, int b) const { return static_cast<std::size_t>(b) * n_ + a; }
  int node_a(std::size_t dof) const { return static_cast<int>(dof % n_); }
  int node_b(std::size_t dof) const { return static_cast<int>(dof / n_); }
  bool is_boundary(std::size_t dof) const;

  /// Element index owning coordinate t: the cell [x_i, x_{i+1}) with x = 1
  /// assigned to the last cell. Throws std::out_of_range outside [0, 1].
  int element_x(double x) const;
  int element_y(double y) const;

  const LagrangeBasis1D& basis() const { return basis_; }

 private:
  TensorMesh mesh_;
  int k_;
  int n_;
  std::vector<double> nodes_x_;
  std::vector<double> nodes_y_;
  LagrangeBasis1D basis_;
};

/// Nodal coefficient vector over a FemSpace (same dof ordering).
struct GridFunction {
  std::shared_ptr<const FemSpace> space;
  std::vector<double> coeffs;

  explicit GridFunction(std::shared_ptr<const FemSpace> s)
      : space(std::move(s)), coeffs(space->dof_count(), 0.0) {}
  GridFunction(std::shared_ptr<const FemSpace> s, std::vector<double> c)
      : space(std::move(s)), coeffs(std::move(c)) {}
};

struct PointValue {
  double value = 0.0;
  double dx = 0.0;
  double dy = 0.0;
};

/// Value and gradient of the piecewise Q_k function at (x, y). Derivatives
/// are taken from the owning element (right/upper neighbour on mesh lines).
PointValue eval(const GridFunction& gf, double x, double y);

/// Lagrange interpolant: coefficients are v at the nodes.
GridFunction interpolate(std::shared_ptr<const FemSpace> space, const Fn2& v);

/// Nodal values of v on the column x_{3N/4}^s, s = 1..k (all rows), zero elsewhere.
GridFunction project_column(std::shared_ptr<const FemSpace> space, const Fn2& v);

/// Nodal values of v at (x_{3N/4}^s, y_0) and (x_{3N/4}^s, y_N), s = 1..k, zero elsewhere.
GridFunction corner_correction(std::shared_ptr<const FemSpace> space, const Fn2& v);

/// True for the kinds whose interpolant is corrected near x = 1 - sigma_x1
/// (E11, E32, E33).
bool is_corrected_kind(LayerKind kind);

/// Sum over components of interpolate(E) - [corrected] (P E - Theta E).
GridFunction corrected_interpolant(std::shared_ptr<const FemSpace> space,
                                   std::span<const SolutionComponent> decomposition);

/// Header describing coefficient layout: N, k, ordering, dof_count.
nlohmann::json gridfunction_header(const GridFunction& gf);
/// One line per dof: "a,b,x,y,value".
void write_gridfunction_csv(std::ostream& out, const GridFunction& gf);
/// Raw little-endian doubles, dof order.
void write_gridfunction_binary(std::ostream& out, const GridFunction& gf);

}  // namespace spfem
