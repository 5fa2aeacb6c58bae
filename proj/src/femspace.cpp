#include "spfem/femspace.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace spfem {

LagrangeBasis1D::LagrangeBasis1D(int k) : k_(k) {
  if (k < 1) throw std::invalid_argument("polynomial degree must be >= 1");
  nodes_.resize(static_cast<std::size_t>(k) + 1);
  denom_.resize(nodes_.size());
  for (int s = 0; s <= k; ++s) nodes_[s] = static_cast<double>(s) / k;
  for (int s = 0; s <= k; ++s) {
    double d = 1.0;
    for (int r = 0; r <= k; ++r)
      if (r != s) d *= nodes_[s] - nodes_[r];
    denom_[s] = d;
  }
}

double LagrangeBasis1D::value(int s, double xi) const {
  double num = 1.0;
  for (int r = 0; r <= k_; ++r)
    if (r != s) num *= xi - nodes_[r];
  return num / denom_[s];
}

double LagrangeBasis1D::derivative(int s, double xi) const {
  double sum = 0.0;
  for (int m = 0; m <= k_; ++m) {
    if (m == s) continue;
    double prod = 1.0;
    for (int r = 0; r <= k_; ++r)
      if (r != s && r != m) prod *= xi - nodes_[r];
    sum += prod;
  }
  return sum / denom_[s];
}

namespace {

std::vector<double> refine_nodes(const std::vector<double>& pts, int k) {
  const std::size_t N = pts.size() - 1;
  std::vector<double> nodes(N * k + 1);
  for (std::size_t i = 0; i < N; ++i) {
    const double h = pts[i + 1] - pts[i];
    nodes[i * k] = pts[i];
    for (int s = 1; s < k; ++s) nodes[i * k + s] = pts[i] + (static_cast<double>(s) / k) * h;
  }
  nodes[N * k] = pts[N];
  return nodes;
}

int owning_cell(const std::vector<double>& pts, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::out_of_range(fmt::format("coordinate {} outside [0, 1]", t));
  const auto it = std::upper_bound(pts.begin(), pts.end(), t);
  const int cells = static_cast<int>(pts.size()) - 1;
  return std::min(static_cast<int>(it - pts.begin()) - 1, cells - 1);
}

}  // namespace

FemSpace::FemSpace(TensorMesh mesh, int k)
    : mesh_(std::move(mesh)), k_(k), n_(k * mesh_.N + 1), basis_(k) {
  nodes_x_ = refine_nodes(mesh_.x, k);
  nodes_y_ = refine_nodes(mesh_.y, k);
}

bool FemSpace::is_boundary(std::size_t d) const {
  const int a = node_a(d), b = node_b(d);
  return a == 0 || b == 0 || a == n_ - 1 || b == n_ - 1;
}

int FemSpace::element_x(double x) const { return owning_cell(mesh_.x, x); }
int FemSpace::element_y(double y) const { return owning_cell(mesh_.y, y); }

PointValue eval(const GridFunction& gf, double x, double y) {
  const FemSpace& V = *gf.space;
  const int i = V.element_x(x);
  const int j = V.element_y(y);
  const int k = V.degree();
  const double hx = V.mesh().hx[i], hy = V.mesh().hy[j];
  const double xi = (x - V.mesh().x[i]) / hx;
  const double eta = (y - V.mesh().y[j]) / hy;
  const LagrangeBasis1D& B = V.basis();

  PointValue out;
  for (int t = 0; t <= k; ++t) {
    const double vy = B.value(t, eta), dy = B.derivative(t, eta) / hy;
    for (int s = 0; s <= k; ++s) {
      const double c = gf.coeffs[V.dof(i * k + s, j * k + t)];
      const double vx = B.value(s, xi), dx = B.derivative(s, xi) / hx;
      out.value += c * vx * vy;
      out.dx += c * dx * vy;
      out.dy += c * vx * dy;
    }
  }
  return out;
}

GridFunction interpolate(std::shared_ptr<const FemSpace> space, const Fn2& v) {
  GridFunction gf(space);
  const auto nx = space->nodes_x();
  const auto ny = space->nodes_y();
  for (int b = 0; b < space->nodes_per_axis(); ++b)
    for (int a = 0; a < space->nodes_per_axis(); ++a) gf.coeffs[space->dof(a, b)] = v(nx[a], ny[b]);
  return gf;
}

GridFunction project_column(std::shared_ptr<const FemSpace> space, const Fn2& v) {
  GridFunction gf(space);
  const int k = space->degree();
  const int a0 = (3 * space->N() / 4) * k;
  const auto nx = space->nodes_x();
  const auto ny = space->nodes_y();
  for (int b = 0; b < space->nodes_per_axis(); ++b)
    for (int s = 1; s <= k; ++s) gf.coeffs[space->dof(a0 + s, b)] = v(nx[a0 + s], ny[b]);
  return gf;
}

GridFunction corner_correction(std::shared_ptr<const FemSpace> space, const Fn2& v) {
  GridFunction gf(space);
  const int k = space->degree();
  const int a0 = (3 * space->N() / 4) * k;
  const int top = space->nodes_per_axis() - 1;
  const auto nx = space->nodes_x();
  const auto ny = space->nodes_y();
  for (int b : {0, top})
    for (int s = 1; s <= k; ++s) gf.coeffs[space->dof(a0 + s, b)] = v(nx[a0 + s], ny[b]);
  return gf;
}

bool is_corrected_kind(LayerKind kind) {
  return kind == LayerKind::E11 || kind == LayerKind::E32 || kind == LayerKind::E33;
}

GridFunction corrected_interpolant(std::shared_ptr<const FemSpace> space,
                                   std::span<const SolutionComponent> decomposition) {
  GridFunction out(space);
  for (const SolutionComponent& comp : decomposition) {
    const auto term = comp.term;
    const Fn2 fn = [term](double x, double y) { return term(x, y); };
    const GridFunction interp = interpolate(space, fn);
    for (std::size_t d = 0; d < out.coeffs.size(); ++d) out.coeffs[d] += interp.coeffs[d];
    if (!is_corrected_kind(comp.kind)) continue;
    const GridFunction P = project_column(space, fn);
    const GridFunction Theta = corner_correction(space, fn);
    for (std::size_t d = 0; d < out.coeffs.size(); ++d)
      out.coeffs[d] -= P.coeffs[d] - Theta.coeffs[d];
  }
  return out;
}

nlohmann::json gridfunction_header(const GridFunction& gf) {
  const FemSpace& V = *gf.space;
  return {{"N", V.N()},
          {"k", V.degree()},
          {"nodes_per_axis", V.nodes_per_axis()},
          {"dof_count", V.dof_count()},
          {"ordering", "lexicographic, x fastest: dof = b * (kN + 1) + a"}};
}

void write_gridfunction_csv(std::ostream& out, const GridFunction& gf) {
  const FemSpace& V = *gf.space;
  out << "a,b,x,y,value\n";
  for (std::size_t d = 0; d < gf.coeffs.size(); ++d) {
    const int a = V.node_a(d), b = V.node_b(d);
    out << fmt::format("{},{},{:.17g},{:.17g},{:.17g}\n", a, b, V.nodes_x()[a], V.nodes_y()[b],
                       gf.coeffs[d]);
  }
}

void write_gridfunction_binary(std::ostream& out, const GridFunction& gf) {
  for (double v : gf.coeffs) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) {
      std::uint64_t swapped = 0;
      for (int i = 0; i < 8; ++i) swapped |= ((bits >> (8 * i)) & 0xffu) << (8 * (7 - i));
      bits = swapped;
    }
    char buf[8];
    std::memcpy(buf, &bits, 8);
    out.write(buf, 8);
  }
}

}  // namespace spfem
