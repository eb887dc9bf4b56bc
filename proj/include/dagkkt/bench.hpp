#pragma once

#include "dagkkt/auglag.hpp"
#include "dagkkt/kkts.hpp"
#include "dagkkt/simgen.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dagkkt {

/// One stage of a pipeline such as "notears@eps=1e-5->kkts@reverse=0".
struct PipelineStage {
  enum class Kind { Notears, Abs, Kkts };
  Kind kind = Kind::Notears;
  AugLagConfig auglag;
  KktsConfig kkts;
};

struct Pipeline {
  std::string label;
  std::vector<PipelineStage> stages;
};

/// Stages separated by "->"; options after '@' as key=value pairs separated by
/// ','. notears/abs accept eps, omega, rho_max, max_outer; kkts accepts omega,
/// eps, reduce, reverse. A leading kkts stage starts from the unconstrained
/// lasso. Throws std::invalid_argument on malformed input.
Pipeline parse_pipeline(const std::string& text);

struct PipelineOutput {
  SolveResult result;
  std::optional<KktsCounters> kkts;
};

/// Runs each stage on `score`, feeding the raw output of one stage to the next.
/// `init` (if given) seeds a leading kkts stage.
PipelineOutput run_pipeline(const Pipeline& p, const ScoreConfig& score,
                            const std::optional<WeightMatrix>& init = std::nullopt);

struct ExperimentConfig {
  GraphFamily graph = GraphFamily::ER;
  int k = 2;
  std::vector<int> d_values{10};
  NoiseFamily noise = NoiseFamily::Gaussian;
  /// Sample count; 0 means 2*d.
  int n = 1000;
  int trials = 1;
  std::uint64_t seed = 0;
  bool subtract_mean = true;
  double tau = kDefaultTau;
  std::vector<std::string> algorithms{"notears"};
  /// Record wall time; off gives reproducible files.
  bool timing = true;
  std::filesystem::path output;
  std::filesystem::path summary;

  /// Reads the JSON form; unknown keys are errors.
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::filesystem::path& path);
  void validate() const;
};

struct TrialRecord {
  std::string algo;
  std::string graph;
  std::string noise;
  int d = 0;
  int n = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  /// -1 marks a failed run.
  int shd = -1;
  int nnz = -1;
  double h_final = 0.0;
  double time_s = 0.0;
  std::string error;

  bool failed() const { return shd < 0; }
};

struct AggregateCell {
  std::string algo;
  int d = 0;
  int count = 0;
  int failures = 0;
  double shd_mean = 0.0, shd_se = 0.0;
  double nnz_mean = 0.0, nnz_se = 0.0;
  double time_mean = 0.0, time_se = 0.0;
};

struct BenchmarkResult {
  std::vector<TrialRecord> rows;
  std::vector<AggregateCell> cells;
};

/// Worker count from DAGKKT_WORKERS (default 1).
int benchmark_workers();

BenchmarkResult run_benchmark(const ExperimentConfig& cfg, int workers = benchmark_workers());

std::vector<AggregateCell> aggregate(const std::vector<TrialRecord>& rows);

void write_results_csv(std::ostream& out, const std::vector<TrialRecord>& rows);
std::string summary_json(const std::vector<AggregateCell>& cells);

}  // namespace dagkkt
