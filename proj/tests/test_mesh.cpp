#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spfem/analysis.hpp"
#include "spfem/mesh.hpp"

using namespace spfem;

namespace {

MeshParams params_for(double eps1, double eps2, int N, double tau = 2.0, double delta = 0.25,
                      GradingFallback fb = GradingFallback::Strict) {
  CaseParams cp;
  cp.N = N;
  cp.tau = tau;
  cp.delta = delta;
  cp.fallback = fb;
  return mesh_params_for(test_problem(eps1, eps2), cp);
}

void expect_valid_axis(const std::vector<double>& x, const std::vector<double>& h) {
  const std::size_t N = h.size();
  ASSERT_EQ(x.size(), N + 1);
  EXPECT_EQ(x.front(), 0.0);
  EXPECT_EQ(x.back(), 1.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    EXPECT_LT(x[i], x[i + 1]) << "i = " << i;
    EXPECT_EQ(h[i], x[i + 1] - x[i]);
    sum += h[i];
  }
  EXPECT_NEAR(sum, 1.0, 8.0 * N * std::numeric_limits<double>::epsilon());
}

}  // namespace

TEST(ComputeMu, UnitParameters) {
  const auto mu = compute_mu(1.0, 1.0, 2.0, 1.0, 1.0);
  EXPECT_NEAR(mu.mu0, std::sqrt(2.0) - 1.0, 1e-15);
  EXPECT_NEAR(mu.mu1, (1.0 + std::sqrt(5.0)) / 2.0, 1e-15);
  // eps1 g^2 + eps2 b* g - beta = 0 and eps1 g^2 - eps2 lambda g - beta = 0
  EXPECT_NEAR(mu.mu0 * mu.mu0 + 2.0 * mu.mu0 - 1.0, 0.0, 1e-12);
  EXPECT_NEAR(mu.mu1 * mu.mu1 - mu.mu1 - 1.0, 0.0, 1e-12);
}

TEST(ComputeMu, SmallParametersMatchExtendedPrecision) {
  const auto mu = compute_mu(1e-4, 1e-4, 2.0, 1.0, 1.0);
  EXPECT_NEAR(mu.mu0, 99.00499987500624961, 1e-12 * 99.0);
  EXPECT_NEAR(mu.mu1, 100.50124999218759765, 1e-12 * 100.5);
  EXPECT_NEAR(1e-4 * mu.mu0 * mu.mu0 + 2e-4 * mu.mu0 - 1.0, 0.0, 1e-9);
  EXPECT_NEAR(1e-4 * mu.mu1 * mu.mu1 - 1e-4 * mu.mu1 - 1.0, 0.0, 1e-9);
}

TEST(ComputeMu, OrderedAcrossParameterGrid) {
  for (double e1 : {1.0, 1e-2, 1e-4, 1e-6, 1e-8, 1e-10})
    for (double e2 : {0.0, 1e-8, 1e-4, 1.0}) {
      const auto mu = compute_mu(e1, e2, 2.0, 1.0, 1.0);
      EXPECT_LE(mu.mu0, mu.mu1) << e1 << ' ' << e2;
      EXPECT_GT(mu.mu0, 0.0);
    }
}

TEST(ComputeMu, RejectsBadInput) {
  EXPECT_THROW(compute_mu(0.0, 1.0, 2.0, 1.0, 1.0), std::domain_error);
  EXPECT_THROW(compute_mu(-1.0, 1.0, 2.0, 1.0, 1.0), std::domain_error);
  EXPECT_THROW(compute_mu(1.0, 1.0, 1.0, 1.0, 0.0), std::domain_error);
  EXPECT_THROW(compute_mu(1.0, -1.0, 1.0, 1.0, 1.0), std::domain_error);
}

TEST(BuildMesh, PointValuesMatchClosedForm) {
  // Frozen from a 40-digit evaluation of the grading formulas.
  const MeshParams mp = params_for(1e-4, 1e-4, 8, 2.0, 0.25, GradingFallback::Uniform);
  const TensorMesh m = build_mesh(mp);
  EXPECT_NEAR(mp.sigma_x0(), 0.18565407235790750673, 1e-12 * 0.19);
  EXPECT_NEAR(m.x[1], 0.027598499089191687082, 1e-12 * 0.028);
  EXPECT_NEAR(m.x[7], 0.97280645834084362874, 1e-12);
  EXPECT_NEAR(mp.sigma_x1(), 0.18348707764384467358, 1e-12 * 0.18);
  EXPECT_NEAR(mp.sigma_y(), 0.36841361487904730944, 1e-12 * 0.37);
}

TEST(BuildMesh, TransitionPointsAreExact) {
  for (int N : {8, 16, 64}) {
    const MeshParams mp = params_for(1e-8, 1e-4, N);
    const TensorMesh m = build_mesh(mp);
    EXPECT_EQ(m.x[N / 4], mp.sigma_x0());
    EXPECT_EQ(m.x[3 * N / 4], 1.0 - mp.sigma_x1());
    EXPECT_EQ(m.y[N / 4], mp.sigma_y());
    EXPECT_EQ(m.y[3 * N / 4], 1.0 - mp.sigma_y());
    EXPECT_TRUE(m.warnings.empty());
  }
}

TEST(BuildMesh, AxesAreValidOverExperimentGrid) {
  for (double e1 : {1.0, 1e-2, 1e-4, 1e-6, 1e-8, 1e-10})
    for (double e2 : {1.0, 1e-4, 1e-8})
      for (int N : {8, 32, 512}) {
        SCOPED_TRACE(testing::Message() << e1 << ' ' << e2 << ' ' << N);
        const TensorMesh m = build_mesh(params_for(e1, e2, N, 2.0, 0.25, GradingFallback::Uniform));
        expect_valid_axis(m.x, m.hx);
        expect_valid_axis(m.y, m.hy);
      }
}

TEST(BuildMesh, SymmetricWhenRatesAgree) {
  MeshParams mp;
  mp.N = 32;
  mp.mu0 = mp.mu1 = 1e4;
  mp.eps1 = 1e-8;
  const TensorMesh m = build_mesh(mp);
  for (int i = 0; i <= mp.N; ++i) EXPECT_NEAR(m.x[i], 1.0 - m.x[mp.N - i], 1e-12);
}

TEST(BuildMesh, StrictModeRejectsWideTransition) {
  // sigma_y = 8 * 0.01 * ln(100) > 1/4
  const MeshParams mp = params_for(1e-4, 1e-4, 8, 2.0, 0.25, GradingFallback::Strict);
  try {
    build_mesh(mp);
    FAIL() << "expected MeshError";
  } catch (const MeshError& e) {
    EXPECT_NE(std::string(e.what()).find("sigma_y"), std::string::npos) << e.what();
  }
}

TEST(BuildMesh, UniformFallbackReplacesQuarter) {
  const MeshParams mp = params_for(1e-4, 1e-4, 8, 2.0, 0.25, GradingFallback::Uniform);
  const TensorMesh m = build_mesh(mp);
  EXPECT_FALSE(m.y_sides[0].graded);
  EXPECT_FALSE(m.y_sides[1].graded);
  EXPECT_TRUE(m.x_sides[0].graded);
  for (int j = 0; j <= 8; ++j) EXPECT_NEAR(m.y[j], j / 8.0, 1e-15);
  ASSERT_EQ(m.warnings.size(), 1u);
  EXPECT_EQ(m.warnings[0].code, "sigma");
}

TEST(BuildMesh, MuViolationIsOnlyAWarning) {
  // mu0 ~ 99 < N = 128
  const MeshParams mp = params_for(1e-4, 1e-4, 128, 2.0, 0.5);
  EXPECT_FALSE(mp.mu_ok());
  const TensorMesh m = build_mesh(mp);
  ASSERT_EQ(m.warnings.size(), 1u);
  EXPECT_EQ(m.warnings[0].code, "mu");
  EXPECT_TRUE(params_for(1e-4, 1e-4, 64, 2.0, 0.5).mu_ok());
}

TEST(BuildMesh, WarningsTrackAssumptionRegion) {
  // Over the full N range a (eps1, eps2) pair draws a warning exactly when it
  // lies outside eps1 <= 1e-6, eps2 <= 1e-3.
  for (double e1 : {1.0, 1e-2, 1e-4, 1e-6, 1e-8, 1e-10})
    for (double e2 : {1.0, 1e-4, 1e-8}) {
      bool warned = false;
      for (int N = 8; N <= 512; N *= 2) {
        const MeshParams mp = params_for(e1, e2, N, 2.0, 0.25, GradingFallback::Uniform);
        const TensorMesh m = build_mesh(mp);
        EXPECT_EQ(m.warnings.empty(), mp.mu_ok() && mp.sigma_ok());
        warned = warned || !m.warnings.empty();
      }
      EXPECT_EQ(warned, !(e1 <= 1e-6 && e2 <= 1e-3)) << e1 << ' ' << e2;
    }
}

TEST(MeshParams, ValidateRejectsBadStructure) {
  MeshParams mp;
  mp.N = 6;
  EXPECT_THROW(mp.validate(), MeshError);
  mp.N = 10;
  EXPECT_THROW(mp.validate(), MeshError);
  mp.N = 8;
  mp.tau = 0.5;
  EXPECT_THROW(mp.validate(), MeshError);
  mp.tau = 2.0;
  mp.p = 1.0;
  EXPECT_THROW(mp.validate(), MeshError);
  mp.p = 0.5;
  mp.eps1 = 0.0;
  EXPECT_THROW(mp.validate(), MeshError);
  mp.eps1 = 1e-8;
  mp.mu0 = 1e4;
  mp.mu1 = 1e4;
  EXPECT_NO_THROW(mp.validate());
}

TEST(MeshLemmas, UniformRegionBoundsAndUnitZeroOrderRatio) {
  const MeshParams mp = params_for(1e-8, 1e-4, 32);
  const LemmaReport r = verify_mesh_lemmas(build_mesh(mp), mp);
  EXPECT_TRUE(r.x.uniform_bounds_ok);
  EXPECT_TRUE(r.y.uniform_bounds_ok);
  EXPECT_GE(r.x.uniform_h_min, 1.0 / 32);
  EXPECT_LE(r.x.uniform_h_max, 2.0 / 32);
  EXPECT_TRUE(r.x.left_monotone && r.x.right_monotone);
  EXPECT_TRUE(r.y.left_monotone && r.y.right_monotone);
  ASSERT_EQ(r.x.left_decay_ratio.size(), 3u);
  EXPECT_EQ(r.x.left_decay_ratio[0], 1.0);
  EXPECT_EQ(r.x.right_decay_ratio[0], 1.0);
  EXPECT_EQ(r.y.left_decay_ratio[0], 1.0);
}

TEST(MeshLemmas, RatiosStayBoundedAlongSweep) {
  std::vector<LemmaReport> reps;
  for (int N : {8, 16, 32, 64}) {
    const MeshParams mp = params_for(1e-6, 1e-4, N);
    reps.push_back(verify_mesh_lemmas(build_mesh(mp), mp));
  }
  for (std::size_t m = 0; m < reps[0].x.left_decay_ratio.size(); ++m) {
    for (const auto& r : reps) {
      EXPECT_LE(r.x.left_decay_ratio[m], 2.0 * reps[0].x.left_decay_ratio[m]);
      EXPECT_LE(r.x.right_decay_ratio[m], 2.0 * reps[0].x.right_decay_ratio[m]);
      EXPECT_LE(r.y.left_decay_ratio[m], 2.0 * reps[0].y.left_decay_ratio[m]);
    }
  }
  for (const auto& r : reps) {
    EXPECT_LE(r.x.transition_ratio, r.x.transition_bound);
    EXPECT_LE(r.y.transition_ratio, r.y.transition_bound);
  }
}

TEST(MeshExport, TextAndJson) {
  const TensorMesh m = build_mesh(params_for(1e-8, 1e-4, 8));
  std::ostringstream os;
  write_axis_text(os, m.x);
  std::istringstream is(os.str());
  int idx = -1;
  double v = 0.0;
  int lines = 0;
  while (is >> idx >> v) {
    EXPECT_EQ(idx, lines);
    EXPECT_EQ(v, m.x[lines]);  // full round-trip precision
    ++lines;
  }
  EXPECT_EQ(lines, 9);
  const auto j = mesh_to_json(m);
  EXPECT_EQ(j.at("N").get<int>(), 8);
  EXPECT_EQ(j.at("y").get<std::vector<double>>(), m.y);
}
