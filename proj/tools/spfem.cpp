// Command-line driver: convergence studies, mesh export and mesh diagnostics.

#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "spfem/study.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitCaseFailed = 2;

spfem::GradingFallback fallback_from_string(const std::string& s) {
  if (s == "strict") return spfem::GradingFallback::Strict;
  if (s == "uniform") return spfem::GradingFallback::Uniform;
  throw spfem::ConfigError(fmt::format("unknown fallback '{}'", s));
}

struct Options {
  spfem::StudyConfig study;
  double tau = 0.0;
  std::string solver = "auto";
  std::string format = "csv";
  std::string out = "-";
  std::string plot_dir;
  std::string fallback = "uniform";
  bool timings = false;
};

// Output stream for "-" or a file path; throws when the file cannot be opened.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

spfem::MeshParams mesh_params(const Options& o, int N, double eps1, double eps2) {
  const spfem::ProblemSpec pr = spfem::make_problem(o.study.problem, eps1, eps2);
  spfem::CaseParams cp;
  cp.N = N;
  cp.k = o.study.k.front();
  cp.tau = o.study.tau_for(cp.k);
  cp.p = o.study.p;
  cp.delta = o.study.delta;
  cp.fallback = o.study.fallback;
  return spfem::mesh_params_for(pr, cp);
}

int run_mesh(const Options& o) {
  const auto& s = o.study;
  if (s.N.size() != 1 || s.eps1.size() != 1 || s.eps2.size() != 1)
    throw spfem::ConfigError("mesh export takes exactly one N, eps1 and eps2");
  const spfem::TensorMesh mesh = spfem::build_mesh(mesh_params(o, s.N[0], s.eps1[0], s.eps2[0]));
  for (const auto& w : mesh.warnings) std::cerr << "warning [" << w.code << "]: " << w.message << '\n';

  Sink sink(o.out);
  if (o.format == "json") {
    sink.stream() << spfem::mesh_to_json(mesh).dump(2) << '\n';
  } else if (o.format == "text") {
    sink.stream() << "# x\n";
    spfem::write_axis_text(sink.stream(), mesh.x);
    sink.stream() << "# y\n";
    spfem::write_axis_text(sink.stream(), mesh.y);
  } else {
    throw spfem::ConfigError(fmt::format("mesh export supports json or text, not '{}'", o.format));
  }
  return kExitOk;
}

nlohmann::json axis_json(const spfem::AxisLemmaReport& a) {
  return {{"uniform_bounds_ok", a.uniform_bounds_ok},
          {"uniform_h_min", a.uniform_h_min},
          {"uniform_h_max", a.uniform_h_max},
          {"left_monotone", a.left_monotone},
          {"right_monotone", a.right_monotone},
          {"left_graded", a.left_graded},
          {"right_graded", a.right_graded},
          {"left_decay_ratio", a.left_decay_ratio},
          {"right_decay_ratio", a.right_decay_ratio},
          {"transition_ratio", a.transition_ratio},
          {"transition_bound", a.transition_bound}};
}

int run_lemmas(const Options& o) {
  const auto& s = o.study;
  nlohmann::json rows = nlohmann::json::array();
  for (double e2 : s.eps2)
    for (double e1 : s.eps1)
      for (int N : s.N) {
        const spfem::MeshParams mp = mesh_params(o, N, e1, e2);
        const spfem::TensorMesh mesh = spfem::build_mesh(mp);
        const spfem::LemmaReport rep = spfem::verify_mesh_lemmas(mesh, mp);
        rows.push_back({{"N", N},
                        {"eps1", e1},
                        {"eps2", e2},
                        {"mu_ok", mp.mu_ok()},
                        {"sigma_ok", mp.sigma_ok()},
                        {"eta", rep.eta},
                        {"x", axis_json(rep.x)},
                        {"y", axis_json(rep.y)}});
      }
  Sink sink(o.out);
  sink.stream() << rows.dump(2) << '\n';
  return kExitOk;
}

int run_sweep(const Options& o) {
  const spfem::OutputFormat format = spfem::output_format_from_string(o.format);
  const spfem::StudyResult result = spfem::run_study(o.study);
  {
    Sink sink(o.out);
    spfem::emit(sink.stream(), result, format, o.timings);
  }
  if (!o.plot_dir.empty()) spfem::write_plot_data(o.plot_dir, result);
  for (const auto& r : result.reports)
    if (r.failed()) std::cerr << "case failed: " << r.error << '\n';
  return result.any_failed() ? kExitCaseFailed : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  auto& s = o.study;

  CLI::App app{"Finite element convergence studies for two-parameter singularly perturbed problems"};
  app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");
  app.add_option("--problem", s.problem, "Problem name")->capture_default_str();
  app.add_option("--k", s.k, "Polynomial degrees")->delimiter(',')->capture_default_str();
  app.add_option("--N", s.N, "Elements per direction")->delimiter(',')->capture_default_str();
  app.add_option("--eps1", s.eps1, "Diffusion parameters")->delimiter(',')->capture_default_str();
  app.add_option("--eps2", s.eps2, "Convection parameters")->delimiter(',')->capture_default_str();
  auto* tau_opt = app.add_option("--tau", o.tau, "Grading parameter (default k+1)");
  app.add_option("--p", s.p, "Exponential layer parameter")->capture_default_str();
  app.add_option("--delta", s.delta, "Parabolic layer parameter")->capture_default_str();
  app.add_option("--quad", s.quad_order, "Assembly Gauss points per direction (0: k+2)");
  app.add_option("--error-quad", s.error_quad, "Error Gauss points per direction (0: k+3)");
  app.add_option("--solver", o.solver, "auto, banded-lu, sparse-lu or gmres-ilu")->capture_default_str();
  app.add_option("--tol", s.solver.tol, "Iterative solver tolerance")->capture_default_str();
  app.add_option("--fallback", o.fallback, "strict or uniform")->capture_default_str();
  app.add_option("--format", o.format, "csv, markdown or json (mesh: json or text)")
      ->capture_default_str();
  app.add_option("--out", o.out, "Output file, - for stdout")->capture_default_str();
  app.add_option("--jobs", s.jobs, "Worker threads")->capture_default_str();
  app.add_flag("--timings", o.timings, "Include solver wall times in the output");
  app.add_option("--plot-dir", o.plot_dir, "Directory for per-figure (eps1, N, e_energy) csv files");

  auto* mesh_cmd = app.add_subcommand("mesh", "Write the mesh points for one (N, eps1, eps2)");
  auto* lemma_cmd = app.add_subcommand("lemmas", "Mesh-width diagnostics as JSON");
  mesh_cmd->fallthrough();
  lemma_cmd->fallthrough();
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (tau_opt->count() > 0) s.tau = o.tau;
    s.solver.method = spfem::solver_method_from_string(o.solver);
    s.fallback = fallback_from_string(o.fallback);
    if (*mesh_cmd) {
      if (app.count("--format") == 0) o.format = "json";
      return run_mesh(o);
    }
    if (*lemma_cmd) return run_lemmas(o);
    return run_sweep(o);
  } catch (const spfem::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
