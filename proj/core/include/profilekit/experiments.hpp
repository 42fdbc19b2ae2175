#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "profilekit/distribution.hpp"

namespace profilekit {

/// A distribution family written as "kind:param:param...":
///   uniform:K  powerlaw:ALPHA:K|inf  gaussian:SIGMA[:MU]  laplace:SCALE
///   exponential:RATE  gmix:S1,S2,...  histlb:T  adversarial:D  probs:P1,P2,...
struct FamilySpec {
  std::string text;
  std::string kind;
  std::vector<std::string> params;
};

/// Throws std::invalid_argument for unknown kinds or malformed parameters.
FamilySpec parse_family(const std::string& text);

/// Instantiates the family. histlb and adversarial depend on n; adversarial
/// draws its coin flips from `seed`.
DiscreteDistribution make_family(const FamilySpec& family, std::uint64_t n, std::uint64_t seed = 0);

struct ExperimentConfig {
  std::string suite;
  std::vector<std::string> families;
  std::vector<std::uint64_t> n_grid;
  std::uint64_t trials = 100;
  std::uint64_t seed = 0x5EED;
  std::map<std::string, double> tolerances;
  std::string output_json;
  std::string output_csv;
  bool include_timing = false;

  double tolerance(const std::string& key, double fallback) const;
  /// Throws std::invalid_argument when trials == 0 or the n grid is not ascending.
  void validate() const;
};

void from_json(const nlohmann::json& j, ExperimentConfig& config);
void to_json(nlohmann::json& j, const ExperimentConfig& config);

/// Default families and n grid for a suite name.
ExperimentConfig default_config(const std::string& suite);

struct SuiteRecord {
  std::string tag;  // the result this record checks
  std::string family;
  std::uint64_t n = 0;
  std::string statistic;
  double value = 0.0;
  std::string relation = "<=";  // value <relation> bound (+/- margin)
  double bound = 0.0;
  double margin = 0.0;  // Monte Carlo allowance added to the bound (0 for exact checks)
  bool pass = false;
  std::string note;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<SuiteRecord> records;
  double wall_clock_seconds = 0.0;
  bool include_timing = false;

  std::size_t passed() const noexcept;
  double pass_rate() const noexcept;
};

SuiteReport run_concentration_suite(const ExperimentConfig& config);
SuiteReport run_proxy_suite(const ExperimentConfig& config);
SuiteReport run_family_suite(const ExperimentConfig& config);
SuiteReport run_compression_suite(const ExperimentConfig& config);
SuiteReport run_inference_suite(const ExperimentConfig& config);

/// Dispatches on config.suite: concentration, proxy, family, compression, inference.
SuiteReport run_suite(const ExperimentConfig& config);

enum class ReportFormat { json, csv };

/// CSV columns: suite,tag,family,n,statistic,value,relation,bound,margin,pass,note.
std::string emit_report(const SuiteReport& report, ReportFormat format);

/// Writes emit_report output to `path`; throws std::runtime_error on I/O failure.
void write_report(const SuiteReport& report, const std::string& path, ReportFormat format);

/// 3 * sqrt(f (1 - f) / trials).
double frequency_margin(double frequency, std::uint64_t trials) noexcept;

}  // namespace profilekit
