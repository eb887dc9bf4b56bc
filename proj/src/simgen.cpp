#include "dagkkt/simgen.hpp"
#include "dagkkt/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace dagkkt {

std::string to_string(GraphFamily f) { return f == GraphFamily::ER ? "ER" : "SF"; }

std::string to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::Gaussian: return "gaussian";
    case NoiseFamily::Gumbel: return "gumbel";
    case NoiseFamily::Exponential: return "exponential";
  }
  return "?";
}

GraphFamily parse_graph_family(std::string_view s) {
  if (s == "ER" || s == "er") return GraphFamily::ER;
  if (s == "SF" || s == "sf") return GraphFamily::SF;
  throw std::invalid_argument("unknown graph family: " + std::string(s));
}

NoiseFamily parse_noise_family(std::string_view s) {
  if (s == "gaussian" || s == "gauss") return NoiseFamily::Gaussian;
  if (s == "gumbel") return NoiseFamily::Gumbel;
  if (s == "exponential" || s == "exp") return NoiseFamily::Exponential;
  throw std::invalid_argument("unknown noise family: " + std::string(s));
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t tag) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

void validate(const GraphConfig& cfg) {
  if (cfg.d < 2) throw std::invalid_argument("generate_dag: d must be >= 2");
  if (cfg.k < 1) throw std::invalid_argument("generate_dag: k must be >= 1");
  if (!(cfg.weight_low > 0.0) || !(cfg.weight_low < cfg.weight_high))
    throw std::invalid_argument("generate_dag: need 0 < weight_low < weight_high");
}

// Binary support as (parent, child) pairs on nodes 0..d-1 in construction order.
std::vector<std::pair<int, int>> er_edges(const GraphConfig& cfg, std::mt19937_64& rng) {
  const double p = static_cast<double>(cfg.k) / (cfg.d - 1);
  if (p > 1.0)
    throw std::invalid_argument("generate_dag: k too large for d (edge probability > 1)");
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < cfg.d; ++a)
    for (int b = a + 1; b < cfg.d; ++b)
      if (coin(rng)) edges.emplace_back(a, b);
  return edges;
}

std::vector<std::pair<int, int>> sf_edges(const GraphConfig& cfg, std::mt19937_64& rng) {
  const int per_node = std::max(1, cfg.k / 2);
  if (per_node >= cfg.d)
    throw std::invalid_argument("generate_dag: k too large for d (scale-free)");
  std::vector<double> degree(cfg.d, 0.0);
  std::vector<std::pair<int, int>> edges;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int node = 1; node < cfg.d; ++node) {
    const int parents = std::min(per_node, node);
    std::vector<bool> taken(node, false);
    for (int m = 0; m < parents; ++m) {
      // Preferential attachment with unit zero-appeal, without replacement.
      double total = 0.0;
      for (int old = 0; old < node; ++old)
        if (!taken[old]) total += degree[old] + 1.0;
      double r = unif(rng) * total;
      int pick = -1;
      for (int old = 0; old < node; ++old) {
        if (taken[old]) continue;
        pick = old;
        r -= degree[old] + 1.0;
        if (r < 0.0) break;
      }
      taken[pick] = true;
      edges.emplace_back(pick, node);
    }
    for (int old = 0; old < node; ++old)
      if (taken[old]) degree[old] += 1.0;
    degree[node] += parents;
  }
  return edges;
}

}  // namespace

WeightMatrix generate_dag(const GraphConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed);
  const auto edges = cfg.family == GraphFamily::ER ? er_edges(cfg, rng) : sf_edges(cfg, rng);

  std::vector<int> perm(cfg.d);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);

  std::uniform_real_distribution<double> magnitude(cfg.weight_low, cfg.weight_high);
  std::bernoulli_distribution negative(0.5);
  WeightMatrix w = WeightMatrix::Zero(cfg.d, cfg.d);
  for (const auto& [from, to] : edges) {
    const double mag = magnitude(rng);
    w(perm[from], perm[to]) = negative(rng) ? -mag : mag;
  }
  return w;
}

Dataset sample_sem(const WeightMatrix& w_true, const SemConfig& cfg, std::uint64_t seed) {
  if (cfg.n < 1) throw std::invalid_argument("sample_sem: n must be >= 1");
  if (w_true.rows() != w_true.cols()) throw std::invalid_argument("sample_sem: W must be square");
  const auto d = w_true.rows();

  // Kahn order; failure to visit every node means a cycle.
  std::vector<int> indegree(d, 0);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      if (w_true(i, j) != 0.0) ++indegree[j];
  std::vector<Eigen::Index> order, ready;
  for (Eigen::Index j = 0; j < d; ++j)
    if (indegree[j] == 0) ready.push_back(j);
  while (!ready.empty()) {
    std::sort(ready.begin(), ready.end(), std::greater<>());
    const auto i = ready.back();
    ready.pop_back();
    order.push_back(i);
    for (Eigen::Index j = 0; j < d; ++j)
      if (w_true(i, j) != 0.0 && --indegree[j] == 0) ready.push_back(j);
  }
  if (static_cast<Eigen::Index>(order.size()) != d)
    throw std::invalid_argument("sample_sem: W_true support is cyclic");

  std::mt19937_64 rng(seed);
  Eigen::MatrixXd noise(cfg.n, d);
  // Column-major fill keeps the draw order independent of the topological order.
  switch (cfg.noise) {
    case NoiseFamily::Gaussian: {
      std::normal_distribution<double> dist(0.0, 1.0);
      for (Eigen::Index k = 0; k < noise.size(); ++k) noise.data()[k] = dist(rng);
      break;
    }
    case NoiseFamily::Gumbel: {
      std::extreme_value_distribution<double> dist(0.0, 1.0);
      for (Eigen::Index k = 0; k < noise.size(); ++k) noise.data()[k] = dist(rng);
      break;
    }
    case NoiseFamily::Exponential: {
      std::exponential_distribution<double> dist(1.0);
      for (Eigen::Index k = 0; k < noise.size(); ++k) noise.data()[k] = dist(rng);
      break;
    }
  }

  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(cfg.n, d);
  for (const auto j : order) x.col(j) = x * w_true.col(j) + noise.col(j);
  if (cfg.subtract_mean) x.rowwise() -= x.colwise().mean();

  Dataset out;
  out.samples = std::move(x);
  out.true_weights = w_true;
  out.sem = cfg;
  out.sem_seed = seed;
  return out;
}

Dataset simulate(const GraphConfig& graph, const SemConfig& sem) {
  Dataset out = sample_sem(generate_dag(graph), sem, mix_seed(graph.seed, 1));
  out.graph = graph;
  return out;
}

void save_dataset(const Dataset& data, const std::filesystem::path& prefix) {
  const auto base = prefix.string();
  write_csv_matrix(base + "_X.csv", data.samples);
  write_csv_matrix(base + "_W.csv", data.true_weights);
  nlohmann::json meta = {
      {"graph",
       {{"family", to_string(data.graph.family)},
        {"d", data.graph.d},
        {"k", data.graph.k},
        {"seed", data.graph.seed},
        {"weight_low", data.graph.weight_low},
        {"weight_high", data.graph.weight_high}}},
      {"sem",
       {{"noise", to_string(data.sem.noise)},
        {"n", data.sem.n},
        {"subtract_mean", data.sem.subtract_mean},
        {"seed", data.sem_seed}}},
      {"files", {{"samples", base + "_X.csv"}, {"true_weights", base + "_W.csv"}}}};
  std::ofstream out(base + ".json");
  if (!out) throw std::runtime_error("cannot write " + base + ".json");
  out << meta.dump(2) << '\n';
}

}  // namespace dagkkt
