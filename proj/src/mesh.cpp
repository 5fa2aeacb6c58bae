#include "spfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <ostream>

namespace spfem {

namespace {

// Graded end of an axis: point(t) = scale * (-ln(1 - 4 (1 - r) t)), t in [0, 1/4].
// At t = 1/4 this equals scale * ln(1/r) = sigma.
struct GradingLaw {
  double scale = 0.0;
  double r = 0.0;

  double operator()(double t) const { return -scale * std::log1p(-4.0 * (1.0 - r) * t); }
  double sigma() const { return -scale * std::log(r); }
};

GradingLaw x_left_law(const MeshParams& p) { return {p.tau / (p.p * p.mu0), 1.0 / p.mu0}; }
GradingLaw x_right_law(const MeshParams& p) { return {p.tau / (p.p * p.mu1), 1.0 / p.mu1}; }
GradingLaw y_law(const MeshParams& p) {
  const double s = std::sqrt(p.eps1);
  return {p.tau * s / p.delta, s};
}

bool sigma_in_range(double sigma) { return std::isfinite(sigma) && sigma > 0.0 && sigma <= 0.25; }

// Fills N+1 coordinates. x[N/4] and x[3N/4] take the transition points verbatim.
std::vector<double> build_axis(int N, const GradingLaw& left_law, AxisSide left,
                               const GradingLaw& right_law, AxisSide right) {
  std::vector<double> pts(static_cast<std::size_t>(N) + 1);
  const int q1 = N / 4;
  const int q3 = 3 * N / 4;
  const double dN = static_cast<double>(N);
  const double span = 1.0 - left.sigma - right.sigma;
  for (int i = 0; i <= N; ++i) {
    const double t = i / dN;
    double v;
    if (i < q1) {
      v = left.graded ? left_law(t) : t;
    } else if (i == q1) {
      v = left.sigma;
    } else if (i < q3) {
      v = left.sigma + 2.0 * (t - 0.25) * span;
    } else if (i == q3) {
      v = 1.0 - right.sigma;
    } else if (i < N) {
      v = 1.0 - (right.graded ? right_law(1.0 - t) : 1.0 - t);
    } else {
      v = 1.0;
    }
    pts[static_cast<std::size_t>(i)] = v;
  }
  pts.front() = 0.0;
  return pts;
}

std::vector<double> widths(const std::vector<double>& pts) {
  std::vector<double> h(pts.size() - 1);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) h[i] = pts[i + 1] - pts[i];
  return h;
}

AxisSide resolve_side(const char* name, double sigma, GradingFallback fallback,
                      std::vector<MeshWarning>& warnings) {
  if (sigma_in_range(sigma)) return {sigma, true};
  if (fallback == GradingFallback::Strict) {
    throw MeshError(fmt::format("transition point {} = {:.6g} is outside (0, 1/4]; the graded "
                                "formula would not produce a monotone mesh",
                                name, sigma));
  }
  warnings.push_back({"sigma",
                      fmt::format("transition point {} = {:.6g} outside (0, 1/4]; using a "
                                  "uniform quarter instead",
                                  name, sigma)});
  return {0.25, false};
}

}  // namespace

CharacteristicRoots compute_mu(double eps1, double eps2, double b_star, double lambda,
                               double beta) {
  if (!(eps1 > 0.0)) throw std::domain_error("compute_mu: eps1 must be positive");
  if (!(eps2 >= 0.0)) throw std::domain_error("compute_mu: eps2 must be nonnegative");
  if (!(beta > 0.0)) throw std::domain_error("compute_mu: beta must be positive");
  if (!(lambda > 0.0) || !(b_star >= lambda))
    throw std::domain_error("compute_mu: need b_star >= lambda > 0");

  const double cb = eps2 * b_star;
  const double cl = eps2 * lambda;
  // mu0 written without the cancellation of -cb + sqrt(cb^2 + 4 eps1 beta).
  const double mu0 = 2.0 * beta / (cb + std::sqrt(cb * cb + 4.0 * eps1 * beta));
  const double mu1 = (cl + std::sqrt(cl * cl + 4.0 * eps1 * beta)) / (2.0 * eps1);
  return {mu0, mu1};
}

double MeshParams::sigma_x0() const { return x_left_law(*this).sigma(); }
double MeshParams::sigma_x1() const { return x_right_law(*this).sigma(); }
double MeshParams::sigma_y() const { return y_law(*this).sigma(); }

bool MeshParams::mu_ok() const {
  return 1.0 / mu1 <= 1.0 / mu0 && 1.0 / mu0 <= 1.0 / static_cast<double>(N);
}

bool MeshParams::sigma_ok() const {
  return sigma_in_range(sigma_x0()) && sigma_in_range(sigma_x1()) && sigma_in_range(sigma_y());
}

void MeshParams::validate() const {
  if (N < 8 || N % 4 != 0) throw MeshError(fmt::format("N = {} must be >= 8 and divisible by 4", N));
  if (!(tau >= 1.0)) throw MeshError(fmt::format("tau = {} must be >= 1", tau));
  if (!(p > 0.0 && p < 1.0)) throw MeshError(fmt::format("p = {} must lie in (0, 1)", p));
  if (!(delta > 0.0)) throw MeshError(fmt::format("delta = {} must be positive", delta));
  if (!(mu0 > 0.0) || !(mu1 > 0.0) || !std::isfinite(mu0) || !std::isfinite(mu1))
    throw MeshError("mu0 and mu1 must be positive and finite");
  if (!(eps1 > 0.0 && eps1 <= 1.0)) throw MeshError(fmt::format("eps1 = {} must lie in (0, 1]", eps1));
}

TensorMesh build_mesh(const MeshParams& params) {
  params.validate();

  TensorMesh mesh;
  mesh.N = params.N;
  if (!params.mu_ok()) {
    mesh.warnings.push_back(
        {"mu", fmt::format("mu0 = {:.6g}, mu1 = {:.6g} violate mu1^-1 <= mu0^-1 <= N^-1 (N = {})",
                           params.mu0, params.mu1, params.N)});
  }

  const GradingLaw xl = x_left_law(params);
  const GradingLaw xr = x_right_law(params);
  const GradingLaw yl = y_law(params);

  mesh.x_sides[0] = resolve_side("sigma_x0", xl.sigma(), params.fallback, mesh.warnings);
  mesh.x_sides[1] = resolve_side("sigma_x1", xr.sigma(), params.fallback, mesh.warnings);
  const AxisSide ys = resolve_side("sigma_y", yl.sigma(), params.fallback, mesh.warnings);
  mesh.y_sides = {ys, ys};

  mesh.x = build_axis(params.N, xl, mesh.x_sides[0], xr, mesh.x_sides[1]);
  mesh.y = build_axis(params.N, yl, ys, yl, ys);
  mesh.hx = widths(mesh.x);
  mesh.hy = widths(mesh.y);
  return mesh;
}

namespace {

struct LayerScales {
  double length;  // L
  double rate;    // rho
};

// left: max_{0<=i<=N/4-2} (h_i N / L)^m exp(-rho pts[i])
// right: max_{3N/4+1<=i<=N-1} (h_i N / L)^m exp(-rho (1 - pts[i+1]))
AxisLemmaReport axis_report(int N, const std::vector<double>& pts, const std::vector<double>& h,
                            const std::array<AxisSide, 2>& sides, LayerScales left,
                            LayerScales right, int m_max, double eta, double tau,
                            double grading_rate) {
  AxisLemmaReport r;
  const int q1 = N / 4;
  const int q3 = 3 * N / 4;
  const double inv_n = 1.0 / static_cast<double>(N);

  r.uniform_h_min = *std::min_element(h.begin() + q1, h.begin() + q3);
  r.uniform_h_max = *std::max_element(h.begin() + q1, h.begin() + q3);
  r.uniform_bounds_ok = r.uniform_h_min >= inv_n && r.uniform_h_max <= 2.0 * inv_n;

  r.left_graded = sides[0].graded;
  r.right_graded = sides[1].graded;
  r.left_monotone = true;
  for (int i = 0; i + 1 <= q1 - 2; ++i) r.left_monotone &= h[i] <= h[i + 1];
  r.right_monotone = true;
  for (int i = q3 + 1; i + 1 <= N - 1; ++i) r.right_monotone &= h[i] >= h[i + 1];

  r.left_decay_ratio.assign(static_cast<std::size_t>(m_max) + 1, 0.0);
  r.right_decay_ratio.assign(static_cast<std::size_t>(m_max) + 1, 0.0);
  for (int m = 0; m <= m_max; ++m) {
    double lmax = 0.0;
    for (int i = 0; i <= q1 - 2; ++i) {
      const double v = std::pow(h[i] * N / left.length, m) * std::exp(-left.rate * pts[i]);
      lmax = std::max(lmax, v);
    }
    double rmax = 0.0;
    for (int i = q3 + 1; i <= N - 1; ++i) {
      const double v =
          std::pow(h[i] * N / right.length, m) * std::exp(-right.rate * (1.0 - pts[i + 1]));
      rmax = std::max(rmax, v);
    }
    r.left_decay_ratio[static_cast<std::size_t>(m)] = lmax;
    r.right_decay_ratio[static_cast<std::size_t>(m)] = rmax;
  }

  r.transition_ratio = h[q3] * std::pow(right.length, eta - 1.0) * std::pow(N, eta);
  r.transition_bound = tau * std::pow(5.0, eta) / (grading_rate * eta);
  return r;
}

}  // namespace

LemmaReport verify_mesh_lemmas(const TensorMesh& mesh, const MeshParams& params, double eta) {
  LemmaReport report;
  report.eta = eta;
  const int m_max = static_cast<int>(std::floor(params.tau));
  const double se = std::sqrt(params.eps1);
  report.x = axis_report(mesh.N, mesh.x, mesh.hx, mesh.x_sides,
                         {1.0 / params.mu0, params.p * params.mu0},
                         {1.0 / params.mu1, params.p * params.mu1}, m_max, eta, params.tau,
                         params.p);
  report.y = axis_report(mesh.N, mesh.y, mesh.hy, mesh.y_sides, {se, params.delta / se},
                         {se, params.delta / se}, m_max, eta, params.tau, params.delta);
  return report;
}

void write_axis_text(std::ostream& out, std::span<const double> coords) {
  for (std::size_t i = 0; i < coords.size(); ++i) out << fmt::format("{} {:.17g}\n", i, coords[i]);
}

nlohmann::json mesh_to_json(const TensorMesh& mesh) {
  return nlohmann::json{{"N", mesh.N}, {"x", mesh.x}, {"y", mesh.y}};
}

}  // namespace spfem
