#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace spfem {

/// Raised when mesh parameters are inconsistent or a transition point is out of range.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How build_mesh reacts to a transition point outside (0, 1/4].
///
/// Strict rejects the parameters. Uniform replaces the offending graded
/// quarter by equidistant points (transition point pinned to 1/4); this is
/// what parameter sweeps outside the layer-adapted regime use, for instance
/// when the x = 0 layer disappears (mu0 <= 1) because convection dominates.
enum class GradingFallback { Strict, Uniform };

/// Rates of the two exponential layers at x = 0 and x = 1.
struct CharacteristicRoots {
  double mu0 = 0.0;
  double mu1 = 0.0;
};

/// Roots of -eps1 g^2 + eps2 b g + c = 0 bounding the exponential layers,
/// using b_star = max b for the x = 0 layer and lambda = min b for x = 1.
CharacteristicRoots compute_mu(double eps1, double eps2, double b_star, double lambda,
                               double beta);

struct MeshParams {
  int N = 8;
  double tau = 2.0;
  double p = 0.5;
  double delta = 0.25;
  double mu0 = 1.0;
  double mu1 = 1.0;
  double eps1 = 1.0;
  GradingFallback fallback = GradingFallback::Strict;

  double sigma_x0() const;
  double sigma_x1() const;
  double sigma_y() const;

  /// mu1^-1 <= mu0^-1 <= N^-1
  bool mu_ok() const;
  /// All three transition points lie in (0, 1/4].
  bool sigma_ok() const;

  /// Throws MeshError for violated structural invariants (N, tau, p, ...).
  void validate() const;
};

struct MeshWarning {
  std::string code;
  std::string message;
};

/// One end of an axis: either log-graded up to its transition point or
/// a uniform quarter when the fallback kicked in.
struct AxisSide {
  double sigma = 0.25;
  bool graded = false;
};

/// Tensor-product grid. Immutable after build_mesh.
struct TensorMesh {
  int N = 0;
  std::vector<double> x, y;
  std::vector<double> hx, hy;
  std::array<AxisSide, 2> x_sides{};  // x = 0, x = 1
  std::array<AxisSide, 2> y_sides{};  // y = 0, y = 1
  std::vector<MeshWarning> warnings;
};

TensorMesh build_mesh(const MeshParams& params);

/// Per-axis diagnostics for the mesh-width estimates.
struct AxisLemmaReport {
  /// N^-1 <= h_i <= 2 N^-1 on N/4 <= i <= 3N/4 - 1, compared without tolerance.
  bool uniform_bounds_ok = false;
  double uniform_h_min = 0.0;
  double uniform_h_max = 0.0;
  /// h_0 <= ... <= h_{N/4-2} and h_{3N/4+1} >= ... >= h_{N-1}.
  bool left_monotone = false;
  bool right_monotone = false;
  bool left_graded = false;
  bool right_graded = false;
  /// Entry m: max over the graded cells of (h_i N / L)^m e^{-rho dist_i}, where
  /// L is the layer length scale and rho the decay rate of the layer template.
  std::vector<double> left_decay_ratio;
  std::vector<double> right_decay_ratio;
  /// h_{3N/4} L^{eta-1} N^eta with L the length scale of the far layer
  /// (mu1^-1 in x, sqrt(eps1) in y).
  double transition_ratio = 0.0;
  /// tau 5^eta / (rate eta), which bounds transition_ratio whenever mu_ok holds.
  double transition_bound = 0.0;
};

struct LemmaReport {
  AxisLemmaReport x;
  AxisLemmaReport y;
  double eta = 0.5;
};

/// Diagnostic quantities behind the mesh-width lemmas. Never throws.
LemmaReport verify_mesh_lemmas(const TensorMesh& mesh, const MeshParams& params,
                               double eta = 0.5);

/// "index coordinate" per line, full round-trip precision.
void write_axis_text(std::ostream& out, std::span<const double> coords);
nlohmann::json mesh_to_json(const TensorMesh& mesh);

}  // namespace spfem
