#include "spfem/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <ostream>
#include <thread>

#include <fmt/format.h>

namespace spfem {

std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Markdown: return "markdown";
    case OutputFormat::Json: return "json";
  }
  return "?";
}

OutputFormat output_format_from_string(std::string_view name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "markdown" || name == "md") return OutputFormat::Markdown;
  if (name == "json") return OutputFormat::Json;
  throw ConfigError(fmt::format("unknown output format '{}'", name));
}

void StudyConfig::validate() const {
  if (k.empty() || N.empty() || eps1.empty() || eps2.empty())
    throw ConfigError("k, N, eps1 and eps2 lists must all be nonempty");
  const auto names = problem_names();
  if (std::find(names.begin(), names.end(), problem) == names.end())
    throw ConfigError(fmt::format("unknown problem '{}'", problem));
  for (int kk : k)
    if (kk < 1 || kk > 8) throw ConfigError(fmt::format("degree k = {} must lie in [1, 8]", kk));
  for (int n : N)
    if (n < 8 || n % 4 != 0) throw ConfigError(fmt::format("N = {} must be >= 8 and divisible by 4", n));
  for (double e : eps1)
    if (!(e > 0.0 && e <= 1.0)) throw ConfigError(fmt::format("eps1 = {:g} must lie in (0, 1]", e));
  for (double e : eps2)
    if (!(e >= 0.0 && std::isfinite(e))) throw ConfigError(fmt::format("eps2 = {:g} must be >= 0", e));
  if (tau && !(*tau >= 1.0)) throw ConfigError(fmt::format("tau = {:g} must be >= 1", *tau));
  if (!(p > 0.0 && p < 1.0)) throw ConfigError(fmt::format("p = {:g} must lie in (0, 1)", p));
  if (!(delta > 0.0)) throw ConfigError(fmt::format("delta = {:g} must be positive", delta));
  if (quad_order < 0 || quad_order > 20 || error_quad < 0 || error_quad > 20)
    throw ConfigError("quadrature orders must lie in [1, 20] (0 selects the default)");
  if (!(solver.tol > 0.0)) throw ConfigError("solver tolerance must be positive");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

std::size_t StudyResult::index(std::size_t ik, std::size_t ie2, std::size_t ie1,
                               std::size_t iN) const {
  const auto& c = config;
  return ((ik * c.eps2.size() + ie2) * c.eps1.size() + ie1) * c.N.size() + iN;
}

bool StudyResult::any_failed() const {
  return std::any_of(reports.begin(), reports.end(), [](const ErrorReport& r) { return r.failed(); });
}

namespace {

struct CaseKey {
  int k;
  double eps1, eps2;
  int N;
};

ErrorReport run_one(const StudyConfig& cfg, const CaseKey& key) {
  CaseParams cp;
  cp.N = key.N;
  cp.k = key.k;
  cp.tau = cfg.tau_for(key.k);
  cp.p = cfg.p;
  cp.delta = cfg.delta;
  cp.quad_order = cfg.quad_order;
  cp.error_quad = cfg.error_quad;
  cp.fallback = cfg.fallback;
  try {
    return run_case(make_problem(cfg.problem, key.eps1, key.eps2), cp, cfg.solver);
  } catch (const std::exception& ex) {
    ErrorReport r;
    r.N = key.N;
    r.k = key.k;
    r.eps1 = key.eps1;
    r.eps2 = key.eps2;
    r.tau = cp.tau;
    r.p = cp.p;
    r.delta = cp.delta;
    r.error = ex.what();
    return r;
  }
}

}  // namespace

StudyResult run_study(const StudyConfig& config) {
  config.validate();
  StudyResult result;
  result.config = config;

  std::vector<CaseKey> keys;
  for (int k : config.k)
    for (double e2 : config.eps2)
      for (double e1 : config.eps1)
        for (int n : config.N) keys.push_back({k, e1, e2, n});
  result.reports.resize(keys.size());

  // Each worker claims the next unstarted case; results land in their own
  // slot, so output order never depends on scheduling.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < keys.size(); i = next++)
      result.reports[i] = run_one(config, keys[i]);
  };
  const std::size_t nthreads = std::min<std::size_t>(config.jobs, keys.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  compute_rates(result);
  return result;
}

void compute_rates(StudyResult& result) {
  const auto& c = result.config;
  for (std::size_t ik = 0; ik < c.k.size(); ++ik)
    for (std::size_t ie2 = 0; ie2 < c.eps2.size(); ++ie2)
      for (std::size_t ie1 = 0; ie1 < c.eps1.size(); ++ie1)
        for (std::size_t iN = 0; iN < c.N.size(); ++iN) {
          ErrorReport& r = result.reports[result.index(ik, ie2, ie1, iN)];
          r.rate_energy.reset();
          if (iN + 1 == c.N.size()) continue;
          const ErrorReport& next = result.reports[result.index(ik, ie2, ie1, iN + 1)];
          if (r.failed() || next.failed() || !(r.e_energy > 0.0) || !(next.e_energy > 0.0))
            continue;
          r.rate_energy = rate_between(r.e_energy, next.e_energy, r.N, next.N);
        }
}

std::string format_table_value(double v) {
  if (!std::isfinite(v)) return "nan";
  if (v == 0.0) return "0.00E0";
  const double a = std::abs(v);
  int e = static_cast<int>(std::floor(std::log10(a))) + 1;
  long digits = std::lround(a / std::pow(10.0, e - 2));
  if (digits >= 100) {
    digits = std::lround(static_cast<double>(digits) / 10.0);
    ++e;
  } else if (digits < 10) {  // log10 landed just below an integer
    digits = std::lround(a / std::pow(10.0, e - 3));
    --e;
  }
  return fmt::format("{}0.{:02d}E{}", v < 0 ? "-" : "", digits, e);
}

void write_csv(std::ostream& out, const StudyResult& result, bool timings) {
  out << "N,k,eps1,eps2,tau,p,delta,e_energy,e_l2,e_h1,rate_energy,solver_iters,residual,elapsed\n";
  for (const ErrorReport& r : result.reports) {
    out << fmt::format("{},{},{:g},{:g},{:g},{:g},{:g},", r.N, r.k, r.eps1, r.eps2, r.tau, r.p,
                       r.delta);
    if (r.failed()) {
      out << "error,,,,,,\n";
      continue;
    }
    out << fmt::format("{:.8e},{:.8e},{:.8e},", r.e_energy, r.e_l2, r.e_h1);
    if (r.rate_energy) out << fmt::format("{:.4f}", *r.rate_energy);
    out << fmt::format(",{},{:.3e},", r.solve.iterations, r.solve.residual);
    if (timings) out << fmt::format("{:.3f}", r.solve.elapsed);
    out << '\n';
  }
}

void write_markdown(std::ostream& out, const StudyResult& result) {
  const auto& c = result.config;
  for (std::size_t ik = 0; ik < c.k.size(); ++ik)
    for (std::size_t ie2 = 0; ie2 < c.eps2.size(); ++ie2) {
      out << fmt::format("### Energy error, k = {}, eps2 = {:g}\n\n", c.k[ik], c.eps2[ie2]);
      out << "| eps1 | |";
      for (int n : c.N) out << fmt::format(" N={} |", n);
      out << "\n|---|---|";
      for (std::size_t i = 0; i < c.N.size(); ++i) out << "---|";
      out << '\n';
      for (std::size_t ie1 = 0; ie1 < c.eps1.size(); ++ie1) {
        out << fmt::format("| {:g} | e |", c.eps1[ie1]);
        for (std::size_t iN = 0; iN < c.N.size(); ++iN) {
          const ErrorReport& r = result.at(ik, ie2, ie1, iN);
          out << ' ' << (r.failed() ? std::string("error") : format_table_value(r.e_energy)) << " |";
        }
        out << "\n| | rate |";
        for (std::size_t iN = 0; iN < c.N.size(); ++iN) {
          const ErrorReport& r = result.at(ik, ie2, ie1, iN);
          out << ' ' << (r.rate_energy ? fmt::format("{:.2f}", *r.rate_energy) : std::string("--"))
              << " |";
        }
        out << '\n';
      }
      out << '\n';
    }
}

nlohmann::json to_json(const StudyResult& result, bool timings) {
  using nlohmann::json;
  const auto& c = result.config;
  json cfg = {{"problem", c.problem},
              {"k", c.k},
              {"N", c.N},
              {"eps1", c.eps1},
              {"eps2", c.eps2},
              {"p", c.p},
              {"delta", c.delta},
              {"quad_order", c.quad_order},
              {"error_quad", c.error_quad},
              {"fallback", c.fallback == GradingFallback::Strict ? "strict" : "uniform"},
              {"solver", std::string(to_string(c.solver.method))},
              {"tol", c.solver.tol}};
  cfg["tau"] = c.tau ? json(*c.tau) : json(nullptr);

  json cases = json::array();
  for (const ErrorReport& r : result.reports) {
    json j = {{"N", r.N},     {"k", r.k},         {"eps1", r.eps1},
              {"eps2", r.eps2}, {"tau", r.tau},   {"p", r.p},
              {"delta", r.delta}};
    json warnings = json::array();
    for (const MeshWarning& w : r.warnings) warnings.push_back({{"code", w.code}, {"message", w.message}});
    j["warnings"] = std::move(warnings);
    if (r.failed()) {
      j["error"] = r.error;
    } else {
      j["e_energy"] = r.e_energy;
      j["e_l2"] = r.e_l2;
      j["e_h1"] = r.e_h1;
      j["rate_energy"] = r.rate_energy ? json(*r.rate_energy) : json(nullptr);
      j["solver"] = {{"method", r.solve.method},
                     {"iterations", r.solve.iterations},
                     {"residual", r.solve.residual}};
      if (timings) j["solver"]["elapsed"] = r.solve.elapsed;
    }
    cases.push_back(std::move(j));
  }
  return {{"config", std::move(cfg)}, {"cases", std::move(cases)}};
}

void emit(std::ostream& out, const StudyResult& result, OutputFormat format, bool timings) {
  switch (format) {
    case OutputFormat::Csv: write_csv(out, result, timings); break;
    case OutputFormat::Markdown: write_markdown(out, result); break;
    case OutputFormat::Json: out << to_json(result, timings).dump(2) << '\n'; break;
  }
}

std::vector<std::filesystem::path> write_plot_data(const std::filesystem::path& dir,
                                                   const StudyResult& result) {
  std::filesystem::create_directories(dir);
  const auto& c = result.config;
  std::vector<std::filesystem::path> written;
  for (std::size_t ik = 0; ik < c.k.size(); ++ik)
    for (std::size_t ie2 = 0; ie2 < c.eps2.size(); ++ie2) {
      const auto path = dir / fmt::format("energy_k{}_eps2_{:g}.csv", c.k[ik], c.eps2[ie2]);
      std::ofstream f(path);
      if (!f) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
      f << "eps1,N,e_energy\n";
      for (std::size_t ie1 = 0; ie1 < c.eps1.size(); ++ie1)
        for (std::size_t iN = 0; iN < c.N.size(); ++iN) {
          const ErrorReport& r = result.at(ik, ie2, ie1, iN);
          if (!r.failed()) f << fmt::format("{:g},{},{:.8e}\n", r.eps1, r.N, r.e_energy);
        }
      written.push_back(path);
    }
  return written;
}

}  // namespace spfem
