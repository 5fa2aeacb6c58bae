#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spfem/assembly.hpp"
#include "spfem/femspace.hpp"
#include "spfem/linsolve.hpp"
#include "spfem/mesh.hpp"
#include "spfem/problem.hpp"

namespace spfem {

struct ErrorNorms {
  double energy = 0.0;  // sqrt(eps1 h1^2 + l2^2)
  double l2 = 0.0;
  double h1 = 0.0;  // seminorm
};

/// Norms of gf - u; any empty callable counts as zero, so passing three
/// empty functions measures gf itself.
ErrorNorms difference_norms(const GridFunction& gf, const Fn2& u, const Fn2& u_x, const Fn2& u_y,
                            double eps1, const QuadratureRule& quad);

/// Element-wise tensor quadrature of u - u^N and its gradient.
ErrorNorms energy_error(const GridFunction& gf, const ExactSolution& exact, double eps1,
                        const QuadratureRule& quad);

/// log2(e_N / e_2N). Throws std::domain_error unless both are positive.
double rate(double e_N, double e_2N);
/// ln(e_a / e_b) / ln(N_b / N_a) for arbitrary refinement ratios.
double rate_between(double e_a, double e_b, int N_a, int N_b);

struct CaseParams {
  int N = 8;
  int k = 1;
  double tau = 2.0;
  double p = 0.5;
  double delta = 0.25;
  int quad_order = 0;   // assembly; 0 means k + 2
  int error_quad = 0;   // error norms; 0 means k + 3
  GradingFallback fallback = GradingFallback::Uniform;
};

struct ErrorReport {
  int N = 0;
  int k = 0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double tau = 0.0;
  double p = 0.0;
  double delta = 0.0;
  double e_energy = 0.0;
  double e_l2 = 0.0;
  double e_h1 = 0.0;
  std::optional<double> rate_energy;
  SolveReport solve;
  std::vector<MeshWarning> warnings;
  /// Non-empty when the case failed; error fields are then meaningless.
  std::string error;

  bool failed() const { return !error.empty(); }
};

/// Failure inside run_case, prefixed with the case parameters.
class CaseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

MeshParams mesh_params_for(const ProblemSpec& problem, const CaseParams& params);

/// mesh -> space -> assemble -> solve -> error norms. Throws CaseError.
ErrorReport run_case(const ProblemSpec& problem, const CaseParams& params,
                     const SolverConfig& solver = {});

/// Same pipeline, also handing back the discrete solution.
ErrorReport run_case(const ProblemSpec& problem, const CaseParams& params,
                     const SolverConfig& solver, std::optional<GridFunction>* solution);

}  // namespace spfem
