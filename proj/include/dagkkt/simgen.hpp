#pragma once

#include "dagkkt/acyclicity.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace dagkkt {

enum class GraphFamily { ER, SF };
enum class NoiseFamily { Gaussian, Gumbel, Exponential };

std::string to_string(GraphFamily f);
std::string to_string(NoiseFamily f);
GraphFamily parse_graph_family(std::string_view s);
NoiseFamily parse_noise_family(std::string_view s);

struct GraphConfig {
  GraphFamily family = GraphFamily::ER;
  int d = 10;
  /// Average node degree: about k*d/2 edges.
  int k = 2;
  std::uint64_t seed = 0;
  double weight_low = 0.5;
  double weight_high = 2.0;
};

struct SemConfig {
  NoiseFamily noise = NoiseFamily::Gaussian;
  int n = 1000;
  bool subtract_mean = true;
};

struct Dataset {
  Eigen::MatrixXd samples;  ///< n x d
  WeightMatrix true_weights;
  GraphConfig graph;
  SemConfig sem;
  std::uint64_t sem_seed = 0;
};

/// Random DAG with weights drawn uniformly from +-[weight_low, weight_high].
/// ER includes each pair independently with probability k/(d-1), oriented by
/// a random node order; SF is preferential attachment with k/2 parents per new
/// node, relabeled by a random permutation.
WeightMatrix generate_dag(const GraphConfig& cfg);

/// n i.i.d. samples of X_j = W_{.j}^T X + z_j with unit-scale noise.
Dataset sample_sem(const WeightMatrix& w_true, const SemConfig& cfg, std::uint64_t seed);

/// Convenience: generate_dag followed by sample_sem with a derived seed.
Dataset simulate(const GraphConfig& graph, const SemConfig& sem);

/// Writes <prefix>_X.csv, <prefix>_W.csv and <prefix>.json.
void save_dataset(const Dataset& data, const std::filesystem::path& prefix);

/// SplitMix64 finalizer; used to derive independent seeds from (base, tags).
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t tag);

}  // namespace dagkkt
