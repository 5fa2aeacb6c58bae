#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spfem/assembly.hpp"

namespace spfem {

enum class SolverMethod {
  Auto,      // banded LU for narrow bands, sparse LU otherwise
  BandedLU,  // partial pivoting on the lexicographic band
  SparseLU,  // supernodal sparse LU with COLAMD ordering
  GmresIlu,  // restarted GMRES, right ILU(0) preconditioning
};

std::string_view to_string(SolverMethod m);
/// "auto", "banded-lu", "sparse-lu", "gmres-ilu"; throws std::invalid_argument.
SolverMethod solver_method_from_string(std::string_view name);

struct SolverConfig {
  SolverMethod method = SolverMethod::Auto;
  double tol = 1e-10;
  int restart = 50;
  int max_iterations = 2000;
  /// Auto switches to sparse LU above either limit.
  std::size_t band_memory_limit = std::size_t{768} << 20;
  std::size_t band_width_limit = 96;
  /// Refinement sweeps allowed after a direct factorization.
  int refinement_steps = 3;
};

struct SolveReport {
  std::string method;
  int iterations = 0;  // 0 for direct solves without refinement
  double residual = 0.0;  // ||Ax - b|| / ||b||
  double elapsed = 0.0;  // seconds
};

class SolveError : public std::runtime_error {
 public:
  enum class Kind { Singular, NotConverged };
  SolveError(Kind kind, double residual, const std::string& what)
      : std::runtime_error(what), kind_(kind), residual_(residual) {}

  Kind kind() const { return kind_; }
  double residual() const { return residual_; }

 private:
  Kind kind_;
  double residual_;
};

struct LinearSolution {
  std::vector<double> x;
  SolveReport report;
};

/// Solves A x = b for a square CSR matrix. Throws SolveError.
LinearSolution solve_linear(const CsrMatrix& A, std::span<const double> b,
                            const SolverConfig& config = {});

/// Solves an assembled system; the returned vector holds all dofs with zero
/// boundary values.
LinearSolution solve(const SparseSystem& system, const SolverConfig& config = {});

/// Lower and upper bandwidth of the stored pattern.
std::pair<std::size_t, std::size_t> bandwidths(const CsrMatrix& A);

double relative_residual(const CsrMatrix& A, std::span<const double> x, std::span<const double> b);

}  // namespace spfem
