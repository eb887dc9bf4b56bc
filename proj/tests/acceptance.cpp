// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "dagkkt/acyclicity.hpp"
#include "dagkkt/auglag.hpp"
#include "dagkkt/bench.hpp"
#include "dagkkt/kktcheck.hpp"
#include "dagkkt/kkts.hpp"
#include "dagkkt/lars.hpp"
#include "dagkkt/metrics.hpp"
#include "dagkkt/simgen.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace dagkkt;

namespace {

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

int failures = 0;
std::map<int, std::string> lines;
std::string info, info6;

// Lines are printed in criterion order at the end; stderr shows progress.
void report(int id, bool pass, const std::string& what) {
  lines[id] = std::string(pass ? "PASS" : "FAIL") + " criterion " + (id < 10 ? " " : "") +
              std::to_string(id) + ": " + what;
  std::fprintf(stderr, "%s\n", lines[id].c_str());
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

Dataset make_data(GraphFamily family, int k, int d, NoiseFamily noise, int n, std::uint64_t seed) {
  GraphConfig g;
  g.family = family;
  g.k = k;
  g.d = d;
  g.seed = seed;
  SemConfig s;
  s.noise = noise;
  s.n = n;
  return simulate(g, s);
}

// Every KKTS output in the run feeds criteria 6 and 7.
struct KktsLedger {
  int runs = 0;
  int kkt_pass = 0;
  int restores = 0;
  int restore_failures = 0;
  double worst_h_after_restore = 0.0;
  std::string first_failure;

  int ablation_runs = 0;
  int ablation_pass = 0;

  // Runs without the reduce phase keep unnecessary constraints, so the
  // certificate is only expected for full runs; ablations are tallied apart.
  void record(const KktsResult& r, const ScoreConfig& score, const std::string& tag,
              bool full_run = true) {
    const KktReport rep = verify_kkt(r.solve.W_raw, score, AcyclicitySpec::binomial(score.dimension()));
    restores += r.counters.restores;
    restore_failures += r.counters.restore_feasibility_failures;
    worst_h_after_restore = std::max(worst_h_after_restore, r.counters.max_h_after_restore);
    if (!full_run) {
      ++ablation_runs;
      ablation_pass += rep.pass;
      return;
    }
    ++runs;
    if (rep.pass) {
      ++kkt_pass;
    } else if (first_failure.empty()) {
      std::ostringstream m;
      m << tag << " h=" << rep.h << " stationarity=" << rep.max_stationarity
        << " violations=" << rep.violations.size();
      first_failure = m.str();
    }
  }
};

KktsLedger ledger;

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  long checked = 0, mismatches = 0;
  auto check = [&](const Eigen::MatrixXd& a) {
    const int d = static_cast<int>(a.rows());
    const auto spec = AcyclicitySpec::binomial(d);
    const AdjacencyMatrix adj(a);
    const bool truth = oracle::acyclic_by_peeling(a);
    const bool by_support = is_acyclic_support(a);
    const bool by_h = h_value(adj, spec) <= 1e-12 * d;
    const bool by_hadamard = hadamard_acyclicity(adj, spec);
    const bool by_power = oracle::power(a, d).cwiseAbs().maxCoeff() <= 1e-12;
    ++checked;
    if (!(truth == by_support && truth == by_h && truth == by_hadamard && truth == by_power))
      ++mismatches;
  };
  for (int d = 1; d <= 4; ++d) {
    const int bits = d * d;
    for (long mask = 0; mask < (1L << bits); ++mask) {
      Eigen::MatrixXd a(d, d);
      for (int b = 0; b < bits; ++b) a(b / d, b % d) = (mask >> b) & 1;
      check(a);
    }
  }
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> dim(2, 8);
  std::bernoulli_distribution coin(0.5);
  const double densities[] = {0.05, 0.1, 0.2, 0.35};
  for (int rep = 0; rep < 1000; ++rep) {
    const int d = dim(rng);
    Eigen::MatrixXd a = oracle::random_digraph(d, densities[rep % 4], 0.5, 1.0, rng, rep % 10 == 0);
    if (coin(rng)) {
      // Orient along a random order, sometimes adding one back edge.
      std::vector<int> order(d);
      for (int i = 0; i < d; ++i) order[i] = i;
      std::shuffle(order.begin(), order.end(), rng);
      for (int x = 0; x < d; ++x)
        for (int y = 0; y <= x; ++y) a(order[x], order[y]) = 0.0;
      if (coin(rng)) a(order[d - 1], order[0]) = 0.75;
    }
    check(a);
  }
  const double secs = seconds_since(t0);
  report(1, mismatches == 0 && secs < 10.0,
         fmt("acyclicity tests agree: %.0f mismatches over %.0f matrices in %.2f s (limit 10 s)",
             mismatches, checked, secs));
}

double binomial_h(const Eigen::MatrixXd& a) {
  const auto d = a.rows();
  return oracle::power(Eigen::MatrixXd::Identity(d, d) + a / static_cast<double>(d),
                       static_cast<int>(d)).trace() - static_cast<double>(d);
}

void criterion2() {
  std::mt19937_64 rng(202);
  double worst_h = 0.0, worst_loss = 0.0;
  const int dims[] = {3, 5, 10};
  for (int rep = 0; rep < 100; ++rep) {
    const int d = dims[rep % 3];
    const Eigen::MatrixXd a = oracle::random_digraph(d, 0.5, 0.0, 1.0, rng, true);
    const auto spec = AcyclicitySpec::binomial(d);
    const Eigen::MatrixXd g = h_grad(AdjacencyMatrix(a), spec);
    const double eps = 1e-6;
    double err = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Eigen::MatrixXd up = a, down = a;
        up(i, j) += eps;
        down(i, j) -= eps;
        // Dense binomial trace; defined off the nonnegative orthant too.
        const double fd = (binomial_h(up) - binomial_h(down)) / (2.0 * eps);
        err = std::max(err, std::abs(fd - g(i, j)) / std::max(1.0, std::abs(g(i, j))));
      }
    worst_h = std::max(worst_h, err);

    const ScoreConfig score(oracle::random_samples(50, d, rng));
    const Eigen::MatrixXd w = oracle::random_digraph(d, 0.5, -1.0, 1.0, rng);
    const Eigen::MatrixXd lg = loss_grad(w, score);
    double lerr = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Eigen::MatrixXd up = w, down = w;
        up(i, j) += 1e-5;
        down(i, j) -= 1e-5;
        const double fd = (loss(up, score) - loss(down, score)) / 2e-5;
        lerr = std::max(lerr, std::abs(fd - lg(i, j)) / std::max(1.0, std::abs(lg(i, j))));
      }
    worst_loss = std::max(worst_loss, lerr);
  }
  report(2, worst_h < 1e-6 && worst_loss < 1e-7,
         fmt("gradients vs central differences: h rel err %.2e (< 1e-6), loss rel err %.2e (< 1e-7)",
             worst_h, worst_loss));
}

void criterion3() {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> dim(2, 8);
  long pairs = 0, mismatches = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const int d = dim(rng);
    const Eigen::MatrixXd a = oracle::random_digraph(d, 0.1 + 0.05 * (rep % 6), 0.1, 1.0, rng);
    const auto spec = AcyclicitySpec::binomial(d);
    const Eigen::MatrixXd g = h_grad(AdjacencyMatrix(a), spec);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        if (i == j) continue;
        ++pairs;
        const bool walk = oracle::reachable(a, j, i);
        if ((g(i, j) > 0.0) != walk) ++mismatches;
        if (has_directed_walk(AdjacencyMatrix(a), j, i, spec) != walk) ++mismatches;
      }
  }
  report(3, mismatches == 0,
         fmt("gradient support equals BFS reachability: %.0f mismatches over %.0f pairs", mismatches,
             pairs));
}

ConstraintSet random_z(int d, double density, std::mt19937_64& rng) {
  ConstraintSet z(d);
  std::bernoulli_distribution pick(density);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j && pick(rng)) z.insert(i, j);
  return z;
}

void criterion4() {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> dim(2, 10);
  std::uniform_real_distribution<double> tau_dist(0.01, 0.3);
  double worst = 0.0;
  int add_checked = 0, relax_checked = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const int d = dim(rng);
    const ScoreConfig score(oracle::random_samples(200, d, rng), tau_dist(rng));
    const ConstraintSet z = random_z(d, 0.25, rng);
    const int j = std::uniform_int_distribution<int>(0, d - 1)(rng);
    const Eigen::VectorXd w = solve_column_lasso(j, z, score);
    worst = std::max(worst, (w - oracle::column_lasso(score, j, z)).cwiseAbs().maxCoeff());

    std::vector<int> active, constrained;
    for (int i = 0; i < d; ++i) {
      if (i == j) continue;
      if (z.contains(i, j)) constrained.push_back(i);
      else if (w[i] != 0.0) active.push_back(i);
    }
    if (!active.empty()) {
      const int i0 = active[rep % active.size()];
      ConstraintSet bigger = z;
      bigger.insert(i0, j);
      const ColumnPathResult r = path_add_constraint(w, j, i0, z, score);
      worst = std::max(worst, (r.w - oracle::column_lasso(score, j, bigger)).cwiseAbs().maxCoeff());
      ++add_checked;
    }
    if (!constrained.empty()) {
      const int i0 = constrained[rep % constrained.size()];
      ConstraintSet smaller = z;
      smaller.erase(i0, j);
      const ColumnPathResult r = path_relax_constraint(w, j, i0, z, score);
      worst = std::max(worst, (r.w - oracle::column_lasso(score, j, smaller)).cwiseAbs().maxCoeff());
      ++relax_checked;
    }
  }

  int compared = 0, agreed = 0;
  std::uniform_int_distribution<int> small_dim(3, 5);
  while (compared < 50) {
    const int d = small_dim(rng);
    const ScoreConfig score(oracle::random_samples(200, d, rng), 0.1);
    const ConstraintSet z = random_z(d, compared % 2 ? 0.15 : 0.0, rng);
    WeightMatrix w(d, d);
    for (int c = 0; c < d; ++c) w.col(c) = solve_column_lasso(c, z, score);
    const auto spec = AcyclicitySpec::binomial(d);
    if (h_value(AdjacencyMatrix::abs_of(w), spec) <= 1e-8) continue;
    const Eigen::MatrixXd p = h_grad(AdjacencyMatrix::abs_of(w), spec);
    const WeightedRemovalResult r = path_weighted_removal(w, z, p, score);
    const auto grid = oracle::grid_removal(score, z, w, p);
    ++compared;
    if (grid && grid->first == r.row && grid->second == r.column) ++agreed;
  }
  const double rate = static_cast<double>(agreed) / compared;
  report(4, worst < 1e-8 && rate >= 0.95,
         fmt("path endpoints vs coordinate descent: max diff %.2e (< 1e-8; %.0f add, %.0f relax); "
             "weighted removal vs grid path: %.0f%% agreement (>= 95%%)",
             worst, add_checked, relax_checked, 100.0 * rate));
}

double min_norm_subgradient(const WeightMatrix& w, const ScoreConfig& score) {
  const Eigen::MatrixXd g = loss_grad(w, score);
  const double tau = score.tau();
  double worst = 0.0;
  for (int i = 0; i < w.rows(); ++i)
    for (int j = 0; j < w.cols(); ++j) {
      if (i == j) continue;
      const double v = w(i, j) != 0.0 ? std::abs(g(i, j) + (w(i, j) > 0 ? tau : -tau))
                                      : std::max(std::abs(g(i, j)) - tau, 0.0);
      worst = std::max(worst, v);
    }
  return worst;
}

void criterion5() {
  int applicable = 0, ok = 0;
  double h_min = INFINITY, h_max = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const Dataset data = make_data(GraphFamily::ER, 2, 10, NoiseFamily::Gaussian, 1000, trial);
    const ScoreConfig score(data.samples);
    const SolveResult r = solve_quadratic(score, AugLagConfig{});
    if (min_norm_subgradient(r.W_raw, score) <= 1e-6) continue;
    ++applicable;
    h_min = std::min(h_min, r.h_final);
    h_max = std::max(h_max, r.h_final);
    if (r.h_final > 0.0 && r.h_final <= 1e-10) ++ok;
  }
  report(5, applicable > 0 && ok == applicable,
         fmt("quadratic mode ends with 0 < h <= 1e-10 in %.0f/%.0f non-stationary trials "
             "(h range %.2e..%.2e)",
             ok, applicable, h_min, h_max));
}

struct BandResult {
  std::vector<double> base, refined;
};

void criterion8() {
  const Pipeline notears = parse_pipeline("notears");
  const Pipeline early = parse_pipeline("notears@eps=1e-5");
  const KktsConfig kcfg;
  BandResult res;
  const auto t0 = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 50; ++trial) {
    const Dataset data = make_data(GraphFamily::ER, 2, 10, NoiseFamily::Gaussian, 1000, trial);
    const ScoreConfig score(data.samples);
    res.base.push_back(shd(run_pipeline(notears, score).result.W, data.true_weights).shd);
    const KktsResult k = run_kkts(run_pipeline(early, score).result.W_raw, kcfg, score);
    ledger.record(k, score, "ER2 d=10 notears-kkts trial " + std::to_string(trial));
    res.refined.push_back(shd(k.solve.W, data.true_weights).shd);
  }
  const double b = mean(res.base), r = mean(res.refined);
  report(8, b >= 0.3 && b <= 1.5 && r < b,
         fmt("ER2 Gaussian d=10, 50 trials: NOTEARS mean SHD %.2f (band [0.3, 1.5]), "
             "NOTEARS-KKTS %.2f (must be lower) [%.0f s]",
             b, r, seconds_since(t0)));
}

void criterion9() {
  const KktsConfig kcfg;
  AugLagConfig abs_cfg;
  abs_cfg.mode = AugLagConfig::Mode::AbsSplit;
  const AugLagConfig early = AugLagConfig::warm_start_preset();
  std::vector<double> abs_shd, abs_kkts, nt, nt_kkts, abs_time;
  const auto t0 = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 30; ++trial) {
    const Dataset data = make_data(GraphFamily::ER, 4, 30, NoiseFamily::Gaussian, 1000, trial);
    const ScoreConfig score(data.samples);
    const SolveResult a = solve_abs(score, abs_cfg);
    abs_time.push_back(a.time_s);
    abs_shd.push_back(shd(a.W, data.true_weights).shd);
    const KktsResult ak = run_kkts(a.W_raw, kcfg, score);
    ledger.record(ak, score, "ER4 d=30 abs-kkts trial " + std::to_string(trial));
    abs_kkts.push_back(shd(ak.solve.W, data.true_weights).shd);

    nt.push_back(shd(solve_quadratic(score, AugLagConfig{}).W, data.true_weights).shd);
    const KktsResult nk = run_kkts(solve_quadratic(score, early).W_raw, kcfg, score);
    ledger.record(nk, score, "ER4 d=30 notears-kkts trial " + std::to_string(trial));
    nt_kkts.push_back(shd(nk.solve.W, data.true_weights).shd);
  }
  const double ma = mean(abs_shd), mak = mean(abs_kkts), mn = mean(nt), mnk = mean(nt_kkts);
  report(9, mak <= 0.6 * ma && mnk <= 0.8 * mn,
         fmt("ER4 Gaussian d=30, 30 trials: Abs %.2f -> Abs-KKTS %.2f (ratio %.2f <= 0.6); ", ma, mak,
             mak / ma) +
             fmt("NOTEARS %.2f -> NOTEARS-KKTS %.2f (ratio %.2f <= 0.8) [%.0f s]", mn, mnk, mnk / mn,
                 seconds_since(t0)));
  info = fmt("info: Abs mean solve time at ER4 d=30 is %.2f s (informational bound 98 s)",
             mean(abs_time));
}

void criterion10() {
  AugLagConfig abs_cfg;
  abs_cfg.mode = AugLagConfig::Mode::AbsSplit;
  KktsConfig full, no_reduce, no_reverse;
  no_reduce.enable_reduce = false;
  no_reverse.enable_reverse = false;
  std::vector<double> s_full, s_nored, s_norev;
  const auto t0 = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 30; ++trial) {
    const Dataset data = make_data(GraphFamily::ER, 4, 30, NoiseFamily::Gumbel, 1000, trial);
    const ScoreConfig score(data.samples);
    const SolveResult a = solve_abs(score, abs_cfg);
    const std::string tag = " trial " + std::to_string(trial);
    const KktsResult f = run_kkts(a.W_raw, full, score);
    ledger.record(f, score, "gumbel abs-kkts" + tag);
    s_full.push_back(shd(f.solve.W, data.true_weights).shd);
    const KktsResult nr = run_kkts(a.W_raw, no_reduce, score);
    ledger.record(nr, score, "gumbel abs-kkts-noreduce" + tag, false);
    s_nored.push_back(shd(nr.solve.W, data.true_weights).shd);
    const KktsResult nv = run_kkts(a.W_raw, no_reverse, score);
    ledger.record(nv, score, "gumbel abs-kkts-noreverse" + tag);
    s_norev.push_back(shd(nv.solve.W, data.true_weights).shd);
  }
  const double f = mean(s_full), nr = mean(s_nored), nv = mean(s_norev);
  report(10, f <= nr && f <= nv,
         fmt("ER4 Gumbel d=30, 30 trials: Abs-KKTS %.2f <= noReduce %.2f and <= noReverse %.2f "
             "[%.0f s]",
             f, nr, nv, seconds_since(t0)));
}

// Cheap mixed runs that widen the criterion 6 sample.
void mixed_kkts_runs(int count) {
  const GraphFamily families[] = {GraphFamily::ER, GraphFamily::SF};
  const NoiseFamily noises[] = {NoiseFamily::Gaussian, NoiseFamily::Gumbel, NoiseFamily::Exponential};
  AugLagConfig abs_cfg = AugLagConfig::warm_start_preset(AugLagConfig::Mode::AbsSplit);
  for (int t = 0; t < count; ++t) {
    const int k = t % 4 < 2 ? 2 : 4;
    const int n = t % 5 == 0 ? 20 : 1000;
    const Dataset data = make_data(families[t % 2], k, 10, noises[t % 3], n, 7000 + t);
    const ScoreConfig score(data.samples);
    KktsConfig cfg;
    cfg.enable_reverse = t % 11 != 5;
    KktsResult r;
    switch (t % 3) {
      case 0: r = run_kkts_unconstrained(cfg, score); break;
      case 1: r = run_kkts(solve_quadratic(score, AugLagConfig::warm_start_preset()).W_raw, cfg, score); break;
      default: r = run_kkts(solve_abs(score, abs_cfg).W_raw, cfg, score); break;
    }
    ledger.record(r, score, "mixed run " + std::to_string(t));
  }
}

void criterion6() {
  const bool ok = ledger.runs >= 300 && ledger.kkt_pass == ledger.runs;
  std::string what = fmt("verify_kkt passes on %.0f/%.0f full KKTS outputs (need 100%% of >= 300)",
                         ledger.kkt_pass, ledger.runs);
  info6 = fmt("info: no-reduce ablation outputs passing verify_kkt: %.0f/%.0f", ledger.ablation_pass,
              ledger.ablation_runs);
  if (!ledger.first_failure.empty()) what += "; first failure: " + ledger.first_failure;
  report(6, ok, what);
}

void criterion7() {
  report(7, ledger.restore_failures == 0 && ledger.worst_h_after_restore <= 1e-10,
         fmt("h(|W|) <= 1e-10 after every restore: %.0f failures over %.0f restores "
             "(worst h %.2e)",
             ledger.restore_failures, ledger.restores, ledger.worst_h_after_restore));
}

void criterion11() {
  ExperimentConfig cfg;
  cfg.d_values = {10};
  cfg.trials = 3;
  cfg.seed = 42;
  cfg.algorithms = {"notears", "abs->kkts", "notears@eps=1e-5->kkts@reverse=0"};
  cfg.timing = false;
  const std::filesystem::path a = "acceptance_bench_a.csv", b = "acceptance_bench_b.csv";
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  cfg.output = a;
  run_benchmark(cfg, 1);
  cfg.output = b;
  run_benchmark(cfg, 1);
  const std::string first = slurp(a), second = slurp(b);
  report(11, !first.empty() && first == second,
         fmt("bench rerun with identical config gives identical CSV (%.0f bytes)",
             static_cast<double>(first.size())));
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  // 6 and 7 aggregate the KKTS runs made by 8-10 plus the mixed batch.
  criterion8();
  criterion9();
  criterion10();
  mixed_kkts_runs(150);
  criterion6();
  criterion7();
  criterion11();
  for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
  for (const auto* extra : {&info6, &info})
    if (!extra->empty()) std::printf("%s\n", extra->c_str());
  std::printf("%s: %d criterion failure(s)\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
