#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spfem/analysis.hpp"

namespace spfem {

/// Invalid sweep configuration (empty lists, bad N, unknown names).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Markdown, Json };

std::string_view to_string(OutputFormat f);
/// "csv", "markdown" (or "md"), "json"; throws ConfigError.
OutputFormat output_format_from_string(std::string_view name);

struct StudyConfig {
  std::string problem = "layer-product";
  std::vector<int> k{1};
  std::vector<int> N{8, 16, 32, 64, 128, 256, 512};
  std::vector<double> eps1{1.0, 1e-2, 1e-4, 1e-6, 1e-8, 1e-10};
  std::vector<double> eps2{1.0};
  /// Unset means k + 1 for each degree.
  std::optional<double> tau;
  double p = 0.5;
  double delta = 0.25;
  int quad_order = 0;
  int error_quad = 0;
  GradingFallback fallback = GradingFallback::Uniform;
  SolverConfig solver;
  int jobs = 1;

  /// Throws ConfigError.
  void validate() const;
  double tau_for(int k) const { return tau ? *tau : k + 1.0; }
};

/// Reports in sweep order: k, then eps2, then eps1 (table rows), then N (columns).
struct StudyResult {
  StudyConfig config;
  std::vector<ErrorReport> reports;

  std::size_t index(std::size_t ik, std::size_t ie2, std::size_t ie1, std::size_t iN) const;
  const ErrorReport& at(std::size_t ik, std::size_t ie2, std::size_t ie1, std::size_t iN) const {
    return reports[index(ik, ie2, ie1, iN)];
  }
  bool any_failed() const;
};

/// Runs every (k, eps2, eps1, N) case on config.jobs threads. A failing case
/// is recorded in its report; the sweep itself only throws ConfigError.
StudyResult run_study(const StudyConfig& config);

/// Fills rate_energy along each N row from neighbouring successful cases.
void compute_rates(StudyResult& result);

/// Two significant digits as 0.dd E e, e.g. 0.046 -> "0.46E-1".
std::string format_table_value(double v);

/// One row per case. The elapsed column stays empty unless timings is set,
/// which keeps reruns byte-identical.
void write_csv(std::ostream& out, const StudyResult& result, bool timings = false);
/// One table per (k, eps2): an error row and a rate row per eps1.
void write_markdown(std::ostream& out, const StudyResult& result);
nlohmann::json to_json(const StudyResult& result, bool timings = false);

void emit(std::ostream& out, const StudyResult& result, OutputFormat format,
          bool timings = false);

/// Writes one "eps1,N,e_energy" file per (k, eps2) into dir and returns the paths.
std::vector<std::filesystem::path> write_plot_data(const std::filesystem::path& dir,
                                                   const StudyResult& result);

}  // namespace spfem
