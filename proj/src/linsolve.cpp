#include "spfem/linsolve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <fmt/format.h>

namespace spfem {

std::string_view to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::Auto: return "auto";
    case SolverMethod::BandedLU: return "banded-lu";
    case SolverMethod::SparseLU: return "sparse-lu";
    case SolverMethod::GmresIlu: return "gmres-ilu";
  }
  return "unknown";
}

SolverMethod solver_method_from_string(std::string_view name) {
  for (SolverMethod m : {SolverMethod::Auto, SolverMethod::BandedLU, SolverMethod::SparseLU,
                         SolverMethod::GmresIlu})
    if (to_string(m) == name) return m;
  throw std::invalid_argument(fmt::format("unknown solver '{}'", name));
}

std::pair<std::size_t, std::size_t> bandwidths(const CsrMatrix& A) {
  std::size_t kl = 0, ku = 0;
  for (std::size_t r = 0; r < A.rows; ++r)
    for (std::size_t p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p) {
      const std::size_t c = A.col[p];
      if (c < r) kl = std::max(kl, r - c);
      else ku = std::max(ku, c - r);
    }
  return {kl, ku};
}

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> residual_vector(const CsrMatrix& A, std::span<const double> x,
                                    std::span<const double> b) {
  std::vector<double> r(A.rows);
  A.multiply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return r;
}

// LU with partial pivoting in band storage. Row r keeps columns
// [r - kl, r + kl + ku]; the extra kl columns absorb fill from row swaps.
class BandedLU {
 public:
  explicit BandedLU(const CsrMatrix& A) : n_(A.rows) {
    std::tie(kl_, ku_) = bandwidths(A);
    w_ = 2 * kl_ + ku_ + 1;
    a_.assign(n_ * w_, 0.0);
    piv_.resize(n_);
    for (std::size_t r = 0; r < n_; ++r)
      for (std::size_t p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p) at(r, A.col[p]) = A.val[p];
    factor();
  }

  static std::size_t storage_bytes(const CsrMatrix& A) {
    const auto [kl, ku] = bandwidths(A);
    return A.rows * (2 * kl + ku + 1) * sizeof(double);
  }

  void solve(std::span<double> x) const {
    for (std::size_t k = 0; k < n_; ++k) {
      if (piv_[k] != k) std::swap(x[k], x[piv_[k]]);
      const std::size_t last = std::min(n_ - 1, k + kl_);
      const double xk = x[k];
      if (xk == 0.0) continue;
      for (std::size_t i = k + 1; i <= last; ++i) x[i] -= at(i, k) * xk;
    }
    for (std::size_t k = n_; k-- > 0;) {
      const std::size_t last = std::min(n_ - 1, k + kl_ + ku_);
      const double* row = &at(k, k);
      double s = x[k];
      for (std::size_t c = k + 1; c <= last; ++c) s -= row[c - k] * x[c];
      x[k] = s / row[0];
    }
  }

 private:
  double& at(std::size_t r, std::size_t c) { return a_[r * w_ + (c + kl_ - r)]; }
  const double& at(std::size_t r, std::size_t c) const { return a_[r * w_ + (c + kl_ - r)]; }

  void factor() {
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t last = std::min(n_ - 1, k + kl_);
      const std::size_t ulast = std::min(n_ - 1, k + kl_ + ku_);
      std::size_t p = k;
      double best = std::abs(at(k, k));
      for (std::size_t i = k + 1; i <= last; ++i)
        if (std::abs(at(i, k)) > best) {
          best = std::abs(at(i, k));
          p = i;
        }
      if (!(best >= 1e-300))
        throw SolveError(SolveError::Kind::Singular, NAN,
                         fmt::format("banded LU: zero pivot at row {}", k));
      piv_[k] = p;
      if (p != k)
        for (std::size_t c = k; c <= ulast; ++c) std::swap(at(k, c), at(p, c));

      const double* rk = &at(k, k);
      const double inv = 1.0 / rk[0];
      const std::size_t len = ulast - k;
      for (std::size_t i = k + 1; i <= last; ++i) {
        double* ri = &at(i, k);
        const double l = ri[0] * inv;
        ri[0] = l;
        if (l == 0.0) continue;
        for (std::size_t c = 1; c <= len; ++c) ri[c] -= l * rk[c];
      }
    }
  }

  std::size_t n_;
  std::size_t kl_ = 0, ku_ = 0, w_ = 0;
  std::vector<double> a_;
  std::vector<std::size_t> piv_;
};

class SparseLUFactor {
 public:
  explicit SparseLUFactor(const CsrMatrix& A) {
    std::vector<Eigen::Triplet<double, int>> trip;
    trip.reserve(A.nnz());
    for (std::size_t r = 0; r < A.rows; ++r)
      for (std::size_t p = A.row_ptr[r]; p < A.row_ptr[r + 1]; ++p)
        trip.emplace_back(static_cast<int>(r), static_cast<int>(A.col[p]), A.val[p]);
    Eigen::SparseMatrix<double> M(static_cast<int>(A.rows), static_cast<int>(A.cols));
    M.setFromTriplets(trip.begin(), trip.end());
    M.makeCompressed();
    lu_.analyzePattern(M);
    lu_.factorize(M);
    if (lu_.info() != Eigen::Success)
      throw SolveError(SolveError::Kind::Singular, NAN,
                       fmt::format("sparse LU factorization failed: {}", lu_.lastErrorMessage()));
  }

  void solve(std::span<double> x) const {
    Eigen::Map<Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::VectorXd sol = lu_.solve(v);
    v = sol;
  }

 private:
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

// Direct solve followed by a few sweeps of iterative refinement.
template <class Factor>
LinearSolution direct_solve(const Factor& F, const CsrMatrix& A, std::span<const double> b,
                            const SolverConfig& cfg, std::string method) {
  LinearSolution out;
  out.x.assign(b.begin(), b.end());
  F.solve(out.x);
  const double bn = norm2(b);
  double res = relative_residual(A, out.x, b);
  int sweeps = 0;
  while (!(res <= cfg.tol) && sweeps < cfg.refinement_steps && std::isfinite(res)) {
    std::vector<double> r = residual_vector(A, out.x, b);
    F.solve(r);
    for (std::size_t i = 0; i < r.size(); ++i) out.x[i] += r[i];
    res = relative_residual(A, out.x, b);
    ++sweeps;
  }
  out.report = {std::move(method), sweeps, res, 0.0};
  if (!(res <= cfg.tol))
    throw SolveError(SolveError::Kind::NotConverged, res,
                     fmt::format("{}: residual {:.3e} above tolerance {:.1e} (||b|| = {:.3e})",
                                 out.report.method, res, cfg.tol, bn));
  return out;
}

// ILU(0) on the CSR pattern of A.
class Ilu0 {
 public:
  explicit Ilu0(const CsrMatrix& A) : M_(A), diag_(A.rows) {
    const std::size_t n = A.rows;
    for (std::size_t r = 0; r < n; ++r) {
      const auto b = M_.col.begin() + static_cast<std::ptrdiff_t>(M_.row_ptr[r]);
      const auto e = M_.col.begin() + static_cast<std::ptrdiff_t>(M_.row_ptr[r + 1]);
      const auto it = std::lower_bound(b, e, static_cast<std::uint32_t>(r));
      if (it == e || *it != r)
        throw SolveError(SolveError::Kind::Singular, NAN, "ILU(0): missing diagonal entry");
      diag_[r] = static_cast<std::size_t>(it - M_.col.begin());
    }
    std::vector<std::int64_t> pos(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t p = M_.row_ptr[i]; p < M_.row_ptr[i + 1]; ++p) pos[M_.col[p]] = static_cast<std::int64_t>(p);
      for (std::size_t p = M_.row_ptr[i]; p < diag_[i]; ++p) {
        const std::size_t k = M_.col[p];
        const double piv = M_.val[diag_[k]];
        if (std::abs(piv) < 1e-300)
          throw SolveError(SolveError::Kind::Singular, NAN, "ILU(0): zero pivot");
        const double l = M_.val[p] / piv;
        M_.val[p] = l;
        for (std::size_t q = diag_[k] + 1; q < M_.row_ptr[k + 1]; ++q) {
          const std::int64_t t = pos[M_.col[q]];
          if (t >= 0) M_.val[static_cast<std::size_t>(t)] -= l * M_.val[q];
        }
      }
      for (std::size_t p = M_.row_ptr[i]; p < M_.row_ptr[i + 1]; ++p) pos[M_.col[p]] = -1;
    }
  }

  void apply(std::span<double> x) const {
    const std::size_t n = M_.rows;
    for (std::size_t i = 0; i < n; ++i) {
      double s = x[i];
      for (std::size_t p = M_.row_ptr[i]; p < diag_[i]; ++p) s -= M_.val[p] * x[M_.col[p]];
      x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = x[i];
      for (std::size_t p = diag_[i] + 1; p < M_.row_ptr[i + 1]; ++p) s -= M_.val[p] * x[M_.col[p]];
      x[i] = s / M_.val[diag_[i]];
    }
  }

 private:
  CsrMatrix M_;
  std::vector<std::size_t> diag_;
};

LinearSolution gmres_ilu(const CsrMatrix& A, std::span<const double> b, const SolverConfig& cfg) {
  const std::size_t n = A.rows;
  const int m = std::max(1, cfg.restart);
  const Ilu0 M(A);
  const double bn = norm2(b);

  LinearSolution out;
  out.x.assign(n, 0.0);
  out.report.method = std::string(to_string(SolverMethod::GmresIlu));

  std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
  std::vector<double> H(static_cast<std::size_t>(m + 1) * m), cs(m), sn(m), g(m + 1);
  std::vector<double> w(n), z(n);
  auto h = [&](int i, int j) -> double& { return H[static_cast<std::size_t>(i) * m + j]; };

  int total = 0;
  double res = norm2(residual_vector(A, out.x, b)) / bn;
  while (res > cfg.tol && total < cfg.max_iterations) {
    std::vector<double> r = residual_vector(A, out.x, b);
    const double beta = norm2(r);
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int j = 0;
    for (; j < m && total < cfg.max_iterations; ++j, ++total) {
      std::copy(V[j].begin(), V[j].end(), z.begin());
      M.apply(z);
      A.multiply(z, w);
      for (int i = 0; i <= j; ++i) {
        double d = 0.0;
        for (std::size_t t = 0; t < n; ++t) d += w[t] * V[i][t];
        h(i, j) = d;
        for (std::size_t t = 0; t < n; ++t) w[t] -= d * V[i][t];
      }
      const double wn = norm2(w);
      h(j + 1, j) = wn;
      if (wn > 0.0)
        for (std::size_t t = 0; t < n; ++t) V[j + 1][t] = w[t] / wn;
      for (int i = 0; i < j; ++i) {
        const double a = h(i, j), c = h(i + 1, j);
        h(i, j) = cs[i] * a + sn[i] * c;
        h(i + 1, j) = -sn[i] * a + cs[i] * c;
      }
      const double den = std::hypot(h(j, j), h(j + 1, j));
      if (den == 0.0)
        throw SolveError(SolveError::Kind::NotConverged, res, "GMRES breakdown");
      cs[j] = h(j, j) / den;
      sn[j] = h(j + 1, j) / den;
      h(j, j) = den;
      h(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      if (std::abs(g[j + 1]) <= cfg.tol * bn || wn == 0.0) {
        ++j;
        ++total;
        break;
      }
    }
    std::vector<double> y(j);
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int c = i + 1; c < j; ++c) s -= h(i, c) * y[c];
      y[i] = s / h(i, i);
    }
    std::fill(z.begin(), z.end(), 0.0);
    for (int i = 0; i < j; ++i)
      for (std::size_t t = 0; t < n; ++t) z[t] += y[i] * V[i][t];
    M.apply(z);
    for (std::size_t t = 0; t < n; ++t) out.x[t] += z[t];
    res = relative_residual(A, out.x, b);
  }
  out.report.iterations = total;
  out.report.residual = res;
  if (!(res <= cfg.tol))
    throw SolveError(SolveError::Kind::NotConverged, res,
                     fmt::format("GMRES: residual {:.3e} after {} iterations", res, total));
  return out;
}

}  // namespace

double relative_residual(const CsrMatrix& A, std::span<const double> x, std::span<const double> b) {
  const double bn = norm2(b);
  const double rn = norm2(residual_vector(A, x, b));
  return bn > 0.0 ? rn / bn : rn;
}

LinearSolution solve_linear(const CsrMatrix& A, std::span<const double> b, const SolverConfig& cfg) {
  if (A.rows != A.cols || A.rows == 0 || b.size() != A.rows)
    throw std::invalid_argument("solve_linear: need a nonempty square system");
  const auto start = std::chrono::steady_clock::now();

  LinearSolution out;
  if (norm2(b) == 0.0) {
    out.x.assign(A.rows, 0.0);
    out.report = {"trivial", 0, 0.0, 0.0};
  } else {
    SolverMethod method = cfg.method;
    if (method == SolverMethod::Auto) {
      const auto [kl, ku] = bandwidths(A);
      const bool narrow = std::max(kl, ku) <= cfg.band_width_limit &&
                          BandedLU::storage_bytes(A) <= cfg.band_memory_limit;
      method = narrow ? SolverMethod::BandedLU : SolverMethod::SparseLU;
    }
    switch (method) {
      case SolverMethod::BandedLU:
        out = direct_solve(BandedLU(A), A, b, cfg, std::string(to_string(method)));
        break;
      case SolverMethod::SparseLU:
        out = direct_solve(SparseLUFactor(A), A, b, cfg, std::string(to_string(method)));
        break;
      default:
        out = gmres_ilu(A, b, cfg);
        break;
    }
  }
  out.report.elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

LinearSolution solve(const SparseSystem& system, const SolverConfig& config) {
  LinearSolution s = solve_linear(system.matrix, system.rhs, config);
  s.x = system.dofs.extend_to_global(s.x);
  return s;
}

}  // namespace spfem
