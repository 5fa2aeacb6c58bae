#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spfem/mesh.hpp"

namespace spfem {

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

/// Closed-form solution with the derivatives needed for the forcing and the error norms.
struct ExactSolution {
  Fn2 u, u_x, u_y, u_xx, u_yy;
};

/// exp(-alpha t - beta (1 - t)) with alpha, beta >= 0. Covers layers at both
/// ends of [0, 1] and their products without cancellation in the exponent.
struct ExpFactor {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Polynomial sum_i coeffs[i] t^i.
struct PolyFactor {
  std::vector<double> coeffs;
};

/// One-dimensional factor of a separable function, differentiable to any order.
class Factor1D {
 public:
  Factor1D() : impl_(ExpFactor{}) {}
  Factor1D(ExpFactor e) : impl_(e) {}
  Factor1D(PolyFactor p) : impl_(std::move(p)) {}

  double derivative(int order, double t) const;
  double operator()(double t) const { return derivative(0, t); }

 private:
  std::variant<ExpFactor, PolyFactor> impl_;
};

/// coeff * fx(x) * fy(y)
struct SeparableTerm {
  double coeff = 1.0;
  Factor1D fx;
  Factor1D fy;

  double operator()(double x, double y) const { return coeff * fx(x) * fy(y); }
  /// d^{i+j} / dx^i dy^j
  double derivative(int i, int j, double x, double y) const {
    return coeff * fx.derivative(i, x) * fy.derivative(j, y);
  }
};

/// Smooth part S, exponential layers E10/E11 (x = 0 / x = 1), parabolic layers
/// E20/E21 (y = 0 / y = 1) and the four corner layers E31..E34.
enum class LayerKind { S, E10, E11, E20, E21, E31, E32, E33, E34 };

std::string_view to_string(LayerKind kind);
/// Throws std::invalid_argument for an unknown name.
LayerKind layer_kind_from_string(std::string_view name);

inline constexpr LayerKind kAllLayerKinds[] = {LayerKind::S,   LayerKind::E10, LayerKind::E11,
                                               LayerKind::E20, LayerKind::E21, LayerKind::E31,
                                               LayerKind::E32, LayerKind::E33, LayerKind::E34};

struct LayerParams {
  double mu0 = 1.0;
  double mu1 = 1.0;
  double eps1 = 1.0;
  double p = 0.5;
  double delta = 0.25;
};

struct LayerTemplate {
  LayerKind kind = LayerKind::S;
  SeparableTerm term;

  double operator()(double x, double y) const { return term(x, y); }
  double derivative(int i, int j, double x, double y) const { return term.derivative(i, j, x, y); }
};

/// Canonical representative of each layer kind, e.g. E10 = exp(-p mu0 x),
/// E32 = exp(-p mu1 (1 - x)) exp(-delta y / sqrt(eps1)), S = x^2 y (1 - y).
LayerTemplate layer_template(LayerKind kind, const LayerParams& params);

/// A named piece of a solution decomposition; a kind may hold several terms.
struct SolutionComponent {
  LayerKind kind = LayerKind::S;
  SeparableTerm term;
};

struct ProblemSpec {
  std::string name;
  double eps1 = 1.0;
  double eps2 = 0.0;
  Fn1 b, db, c;
  Fn2 f;
  double lambda = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  double b_star = 1.0;
  /// Set when the problem prescribes its own layer rates.
  std::optional<CharacteristicRoots> mu_override;
  std::optional<ExactSolution> exact;
  /// Exact solution split into layer kinds; empty when unknown.
  std::vector<SolutionComponent> decomposition;

  CharacteristicRoots mu() const;
};

struct ConditionReport {
  double min_b = 0.0;
  double min_c = 0.0;
  double min_coercivity = 0.0;  // min of c - eps2 b' / 2
  double max_corner_f = 0.0;
  bool b_ok = false;
  bool c_ok = false;
  bool coercivity_ok = false;
  bool corners_ok = false;

  bool ok() const { return b_ok && c_ok && coercivity_ok && corners_ok; }
};

/// Samples b, c on 1001 points of [0, 1] against lambda, beta, gamma and
/// checks f at the four corners to 1e-10.
ConditionReport check_conditions(const ProblemSpec& problem);

/// -eps1 Lap u + eps2 (2 - x) u_x + u = f with
/// u = 1/4 (1 - e^{-mu0 x})(1 - e^{-mu1 (1-x)})(1 - e^{-y/sqrt(eps1)})(1 - e^{-(1-y)/sqrt(eps1)}).
ProblemSpec test_problem(double eps1, double eps2);

/// Registry lookup by name ("layer-product"). Throws std::invalid_argument.
ProblemSpec make_problem(std::string_view name, double eps1, double eps2);
std::vector<std::string> problem_names();

}  // namespace spfem
