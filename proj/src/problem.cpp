#include "spfem/problem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace spfem {

double Factor1D::derivative(int order, double t) const {
  if (const auto* e = std::get_if<ExpFactor>(&impl_)) {
    const double v = std::exp(-e->alpha * t - e->beta * (1.0 - t));
    return order == 0 ? v : std::pow(e->beta - e->alpha, order) * v;
  }
  const auto& c = std::get<PolyFactor>(impl_).coeffs;
  double sum = 0.0;
  // Horner over the differentiated coefficients.
  for (int i = static_cast<int>(c.size()) - 1; i >= order; --i) {
    double falling = 1.0;
    for (int k = 0; k < order; ++k) falling *= static_cast<double>(i - k);
    sum = sum * t + falling * c[static_cast<std::size_t>(i)];
  }
  return sum;
}

namespace {

constexpr std::array<std::string_view, 9> kKindNames = {"S",   "E10", "E11", "E20", "E21",
                                                        "E31", "E32", "E33", "E34"};

}  // namespace

std::string_view to_string(LayerKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

LayerKind layer_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == name) return static_cast<LayerKind>(i);
  throw std::invalid_argument(fmt::format("unknown layer kind '{}'", name));
}

LayerTemplate layer_template(LayerKind kind, const LayerParams& lp) {
  const ExpFactor x0{lp.p * lp.mu0, 0.0};
  const ExpFactor x1{0.0, lp.p * lp.mu1};
  const double ry = lp.delta / std::sqrt(lp.eps1);
  const ExpFactor y0{ry, 0.0};
  const ExpFactor y1{0.0, ry};
  const ExpFactor one{};

  SeparableTerm t;
  switch (kind) {
    case LayerKind::S:
      t = {1.0, PolyFactor{{0.0, 0.0, 1.0}}, PolyFactor{{0.0, 1.0, -1.0}}};
      break;
    case LayerKind::E10: t = {1.0, x0, one}; break;
    case LayerKind::E11: t = {1.0, x1, one}; break;
    case LayerKind::E20: t = {1.0, one, y0}; break;
    case LayerKind::E21: t = {1.0, one, y1}; break;
    case LayerKind::E31: t = {1.0, x0, y0}; break;
    case LayerKind::E32: t = {1.0, x1, y0}; break;
    case LayerKind::E33: t = {1.0, x1, y1}; break;
    case LayerKind::E34: t = {1.0, x0, y1}; break;
    default: throw std::invalid_argument("unknown layer kind");
  }
  return {kind, t};
}

CharacteristicRoots ProblemSpec::mu() const {
  if (mu_override) return *mu_override;
  return compute_mu(eps1, eps2, b_star, lambda, beta);
}

ConditionReport check_conditions(const ProblemSpec& pr) {
  ConditionReport r;
  r.min_b = r.min_c = r.min_coercivity = std::numeric_limits<double>::infinity();
  constexpr int kSamples = 1001;
  for (int i = 0; i < kSamples; ++i) {
    const double x = static_cast<double>(i) / (kSamples - 1);
    const double c = pr.c(x);
    r.min_b = std::min(r.min_b, pr.b(x));
    r.min_c = std::min(r.min_c, c);
    r.min_coercivity = std::min(r.min_coercivity, c - 0.5 * pr.eps2 * pr.db(x));
  }
  for (auto [x, y] : {std::pair{0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {1.0, 0.0}})
    r.max_corner_f = std::max(r.max_corner_f, std::abs(pr.f(x, y)));
  r.b_ok = r.min_b >= pr.lambda && pr.lambda > 0.0;
  r.c_ok = r.min_c >= pr.beta && pr.beta > 0.0;
  r.coercivity_ok = r.min_coercivity >= pr.gamma && pr.gamma > 0.0;
  r.corners_ok = r.max_corner_f <= 1e-10;
  return r;
}

ProblemSpec test_problem(double eps1, double eps2) {
  if (!(eps1 > 0.0)) throw std::domain_error("test_problem: eps1 must be positive");
  if (!(eps2 >= 0.0)) throw std::domain_error("test_problem: eps2 must be nonnegative");

  ProblemSpec pr;
  pr.name = "layer-product";
  pr.eps1 = eps1;
  pr.eps2 = eps2;
  pr.b = [](double x) { return 2.0 - x; };
  pr.db = [](double) { return -1.0; };
  pr.c = [](double) { return 1.0; };
  pr.lambda = 1.0;
  pr.beta = 1.0;
  pr.b_star = 2.0;
  pr.gamma = 1.0;

  // Same roots as compute_mu with b* = 2, lambda = beta = 1.
  const double mu0 = 1.0 / (eps2 + std::sqrt(eps2 * eps2 + eps1));
  const double mu1 = (eps2 + std::sqrt(eps2 * eps2 + 4.0 * eps1)) / (2.0 * eps1);
  const double ry = 1.0 / std::sqrt(eps1);
  pr.mu_override = CharacteristicRoots{mu0, mu1};

  // u = X(x) Y(y) / 4 with X = (1 - a)(1 - b), Y = (1 - c)(1 - d).
  struct Profile {
    double m0, m1;  // decay rates towards t = 0 and t = 1
    double v(double t) const {
      return -std::expm1(-m0 * t) * -std::expm1(-m1 * (1.0 - t));
    }
    double d1(double t) const {
      const double a = std::exp(-m0 * t), b = std::exp(-m1 * (1.0 - t));
      return m0 * a * -std::expm1(-m1 * (1.0 - t)) - m1 * b * -std::expm1(-m0 * t);
    }
    double d2(double t) const {
      const double a = std::exp(-m0 * t), b = std::exp(-m1 * (1.0 - t));
      const double one_a = -std::expm1(-m0 * t), one_b = -std::expm1(-m1 * (1.0 - t));
      return -m0 * m0 * a * one_b - 2.0 * m0 * m1 * a * b - m1 * m1 * b * one_a;
    }
  };
  const Profile X{mu0, mu1};
  const Profile Y{ry, ry};

  ExactSolution ex;
  ex.u = [X, Y](double x, double y) { return 0.25 * X.v(x) * Y.v(y); };
  ex.u_x = [X, Y](double x, double y) { return 0.25 * X.d1(x) * Y.v(y); };
  ex.u_y = [X, Y](double x, double y) { return 0.25 * X.v(x) * Y.d1(y); };
  ex.u_xx = [X, Y](double x, double y) { return 0.25 * X.d2(x) * Y.v(y); };
  ex.u_yy = [X, Y](double x, double y) { return 0.25 * X.v(x) * Y.d2(y); };
  pr.f = [X, Y, eps1, eps2](double x, double y) {
    const double xv = X.v(x), yv = Y.v(y);
    return 0.25 * (-eps1 * (X.d2(x) * yv + xv * Y.d2(y)) + eps2 * (2.0 - x) * X.d1(x) * yv +
                   xv * yv);
  };
  pr.exact = std::move(ex);

  // 16-term expansion of the product, each term binned by the boundaries it
  // decays away from; a factor touching x = 1 takes precedence over x = 0,
  // y = 0 over y = 1.
  for (int mask = 0; mask < 16; ++mask) {
    const bool a = mask & 1, b = mask & 2, c = mask & 4, d = mask & 8;
    const int terms = a + b + c + d;
    SeparableTerm t{(terms % 2 ? -0.25 : 0.25), ExpFactor{a ? mu0 : 0.0, b ? mu1 : 0.0},
                    ExpFactor{c ? ry : 0.0, d ? ry : 0.0}};
    const int xs = b ? 2 : (a ? 1 : 0);
    const int ys = c ? 1 : (d ? 2 : 0);
    static constexpr LayerKind kTable[3][3] = {
        {LayerKind::S, LayerKind::E20, LayerKind::E21},
        {LayerKind::E10, LayerKind::E31, LayerKind::E34},
        {LayerKind::E11, LayerKind::E32, LayerKind::E33}};
    pr.decomposition.push_back({kTable[xs][ys], t});
  }
  return pr;
}

std::vector<std::string> problem_names() { return {"layer-product"}; }

ProblemSpec make_problem(std::string_view name, double eps1, double eps2) {
  if (name == "layer-product") return test_problem(eps1, eps2);
  throw std::invalid_argument(fmt::format("unknown problem '{}'", name));
}

}  // namespace spfem
