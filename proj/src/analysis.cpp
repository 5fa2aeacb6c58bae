#include "spfem/analysis.hpp"

#include <cmath>

#include <fmt/format.h>

namespace spfem {

ErrorNorms difference_norms(const GridFunction& gf, const Fn2& u, const Fn2& u_x, const Fn2& u_y,
                            double eps1, const QuadratureRule& quad) {
  const FemSpace& V = *gf.space;
  const TensorMesh& mesh = V.mesh();
  const int k = V.degree();
  const int n = k + 1;
  const int q = quad.order();
  const LagrangeBasis1D& B = V.basis();

  std::vector<double> bv(static_cast<std::size_t>(n) * q), bd(bv.size());
  for (int s = 0; s < n; ++s)
    for (int g = 0; g < q; ++g) {
      bv[s * q + g] = B.value(s, quad.points[g]);
      bd[s * q + g] = B.derivative(s, quad.points[g]);
    }

  double l2 = 0.0, h1 = 0.0;
  std::vector<double> c(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < V.N(); ++j) {
    const double hy = mesh.hy[j];
    for (int i = 0; i < V.N(); ++i) {
      const double hx = mesh.hx[i];
      for (int t = 0; t < n; ++t)
        for (int s = 0; s < n; ++s) c[t * n + s] = gf.coeffs[V.dof(i * k + s, j * k + t)];
      double el2 = 0.0, eh1 = 0.0;
      for (int gy = 0; gy < q; ++gy) {
        const double y = mesh.y[j] + hy * quad.points[gy];
        for (int gx = 0; gx < q; ++gx) {
          const double x = mesh.x[i] + hx * quad.points[gx];
          double v = 0.0, dx = 0.0, dy = 0.0;
          for (int t = 0; t < n; ++t) {
            const double vy = bv[t * q + gy], dvy = bd[t * q + gy];
            for (int s = 0; s < n; ++s) {
              const double cc = c[t * n + s];
              v += cc * bv[s * q + gx] * vy;
              dx += cc * bd[s * q + gx] * vy;
              dy += cc * bv[s * q + gx] * dvy;
            }
          }
          dx /= hx;
          dy /= hy;
          const double ev = (u ? u(x, y) : 0.0) - v;
          const double ex = (u_x ? u_x(x, y) : 0.0) - dx;
          const double ey = (u_y ? u_y(x, y) : 0.0) - dy;
          const double w = quad.weights[gx] * quad.weights[gy];
          el2 += w * ev * ev;
          eh1 += w * (ex * ex + ey * ey);
        }
      }
      l2 += el2 * hx * hy;
      h1 += eh1 * hx * hy;
    }
  }
  ErrorNorms out;
  out.l2 = std::sqrt(l2);
  out.h1 = std::sqrt(h1);
  out.energy = std::sqrt(eps1 * out.h1 * out.h1 + out.l2 * out.l2);
  return out;
}

ErrorNorms energy_error(const GridFunction& gf, const ExactSolution& exact, double eps1,
                        const QuadratureRule& quad) {
  return difference_norms(gf, exact.u, exact.u_x, exact.u_y, eps1, quad);
}

double rate(double e_N, double e_2N) { return rate_between(e_N, e_2N, 1, 2); }

double rate_between(double e_a, double e_b, int N_a, int N_b) {
  if (!(e_a > 0.0) || !(e_b > 0.0)) throw std::domain_error("rate: errors must be positive");
  return std::log(e_a / e_b) / std::log(static_cast<double>(N_b) / N_a);
}

MeshParams mesh_params_for(const ProblemSpec& problem, const CaseParams& params) {
  const CharacteristicRoots mu = problem.mu();
  MeshParams mp;
  mp.N = params.N;
  mp.tau = params.tau;
  mp.p = params.p;
  mp.delta = params.delta;
  mp.mu0 = mu.mu0;
  mp.mu1 = mu.mu1;
  mp.eps1 = problem.eps1;
  mp.fallback = params.fallback;
  return mp;
}

ErrorReport run_case(const ProblemSpec& problem, const CaseParams& params,
                     const SolverConfig& solver) {
  return run_case(problem, params, solver, nullptr);
}

ErrorReport run_case(const ProblemSpec& problem, const CaseParams& params,
                     const SolverConfig& solver, std::optional<GridFunction>* solution) {
  ErrorReport rep;
  rep.N = params.N;
  rep.k = params.k;
  rep.eps1 = problem.eps1;
  rep.eps2 = problem.eps2;
  rep.tau = params.tau;
  rep.p = params.p;
  rep.delta = params.delta;

  try {
    if (!problem.exact) throw std::invalid_argument("problem has no exact solution");
    TensorMesh mesh = build_mesh(mesh_params_for(problem, params));
    rep.warnings = mesh.warnings;
    auto space = std::make_shared<const FemSpace>(std::move(mesh), params.k);
    const QuadratureRule assembly_quad =
        gauss_rule(params.quad_order > 0 ? params.quad_order : params.k + 2);
    const SparseSystem sys = assemble(*space, problem, assembly_quad);
    LinearSolution sol = solve(sys, solver);
    rep.solve = sol.report;
    GridFunction uh(space, std::move(sol.x));
    const QuadratureRule error_quad =
        gauss_rule(params.error_quad > 0 ? params.error_quad : params.k + 3);
    const ErrorNorms e = energy_error(uh, *problem.exact, problem.eps1, error_quad);
    rep.e_energy = e.energy;
    rep.e_l2 = e.l2;
    rep.e_h1 = e.h1;
    if (solution) *solution = std::move(uh);
  } catch (const std::exception& ex) {
    throw CaseError(fmt::format("case N={} k={} eps1={:g} eps2={:g} tau={:g}: {}", params.N,
                                params.k, problem.eps1, problem.eps2, params.tau, ex.what()));
  }
  return rep;
}

}  // namespace spfem
