#include "dagkkt/bench.hpp"
#include "dagkkt/csv.hpp"
#include "dagkkt/kktcheck.hpp"
#include "dagkkt/kkts.hpp"
#include "dagkkt/metrics.hpp"
#include "dagkkt/simgen.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

using namespace dagkkt;
using nlohmann::json;

namespace {

void emit(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

json solve_summary(const SolveResult& r) {
  return {{"h_final", r.h_final},
          {"iterations", r.iterations},
          {"inner_evaluations", r.inner_evaluations},
          {"time_s", r.time_s},
          {"nnz", (r.W.array() != 0.0).count()}};
}

json counters_json(const KktsCounters& c) {
  return {{"removals", c.removals},
          {"restores", c.restores},
          {"reversals_attempted", c.reversals_attempted},
          {"reversals_accepted", c.reversals_accepted},
          {"restore_feasibility_failures", c.restore_feasibility_failures},
          {"max_h_after_restore", c.max_h_after_restore}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DAG structure learning with KKT-informed local search"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a random DAG and SEM samples");
  std::string graph = "ER", noise = "gaussian", prefix;
  int d = 10, k = 2, n = 1000;
  std::uint64_t seed = 0;
  bool keep_mean = false;
  sim->add_option("--graph", graph, "ER or SF")->capture_default_str();
  sim->add_option("--k", k, "Average degree")->capture_default_str();
  sim->add_option("--d", d, "Node count")->capture_default_str();
  sim->add_option("--n", n, "Sample count")->capture_default_str();
  sim->add_option("--noise", noise, "gaussian, gumbel or exponential")->capture_default_str();
  sim->add_option("--seed", seed)->capture_default_str();
  sim->add_flag("--keep-mean", keep_mean, "Do not center the samples");
  sim->add_option("--out", prefix, "Output prefix")->required();

  // learn
  auto* learn = app.add_subcommand("learn", "Run an algorithm or pipeline on a data matrix");
  std::string data_path, algo = "notears", out_path, raw_path, summary_path, init_path;
  double tau = kDefaultTau;
  learn->add_option("--data", data_path, "Samples CSV (n x d)")->required();
  learn->add_option("--algo", algo, "e.g. notears, abs, notears@eps=1e-5->kkts")->capture_default_str();
  learn->add_option("--tau", tau)->capture_default_str();
  learn->add_option("--init", init_path, "Initial W CSV for a leading kkts stage");
  learn->add_option("--out", out_path, "Thresholded W CSV")->required();
  learn->add_option("--raw", raw_path, "Raw W CSV");
  learn->add_option("--summary", summary_path, "JSON summary (default stdout)");

  // refine
  auto* refine = app.add_subcommand("refine", "KKT-informed local search from an initial matrix");
  KktsConfig kcfg;
  bool no_reduce = false, no_reverse = false;
  refine->add_option("--data", data_path)->required();
  refine->add_option("--init", init_path, "Initial W CSV; omitted means unconstrained lasso");
  refine->add_option("--omega", kcfg.omega)->capture_default_str();
  refine->add_option("--tau", tau)->capture_default_str();
  refine->add_option("--eps", kcfg.eps)->capture_default_str();
  refine->add_flag("--no-reduce", no_reduce);
  refine->add_flag("--no-reverse", no_reverse);
  refine->add_option("--out", out_path)->required();
  refine->add_option("--raw", raw_path);
  refine->add_option("--summary", summary_path);

  // check-kkt
  auto* check = app.add_subcommand("check-kkt", "Verify first-order optimality of W");
  std::string w_path;
  KktTolerances ktol;
  check->add_option("--data", data_path)->required();
  check->add_option("--weights", w_path)->required();
  check->add_option("--tau", tau)->capture_default_str();
  check->add_option("--eps", ktol.eps)->capture_default_str();
  check->add_option("--tol", ktol.stationarity)->capture_default_str();
  check->add_option("--out", out_path, "JSON report (default stdout)");

  // metrics
  auto* met = app.add_subcommand("metrics", "Structural Hamming distance between two matrices");
  std::string est_path, true_path;
  double threshold = 0.0;
  met->add_option("--est", est_path)->required();
  met->add_option("--true", true_path)->required();
  met->add_option("--threshold", threshold)->capture_default_str();

  // bench
  auto* bench = app.add_subcommand("bench", "Batch experiment from a JSON config");
  std::string config_path, bench_out, bench_summary;
  int trials = 0, workers = 0;
  bool no_timing = false;
  bench->add_option("--config", config_path)->required();
  bench->add_option("--output", bench_out, "Results CSV (overrides config)");
  bench->add_option("--summary", bench_summary, "Aggregate JSON (overrides config)");
  bench->add_option("--trials", trials, "Override trial count");
  bench->add_option("--workers", workers, "Override DAGKKT_WORKERS");
  bench->add_flag("--no-timing", no_timing, "Write time_s = 0 for reproducible output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      GraphConfig g;
      g.family = parse_graph_family(graph);
      g.d = d;
      g.k = k;
      g.seed = seed;
      SemConfig s;
      s.noise = parse_noise_family(noise);
      s.n = n;
      s.subtract_mean = !keep_mean;
      save_dataset(simulate(g, s), prefix);
    } else if (*learn) {
      const ScoreConfig score(read_csv_matrix(data_path), tau);
      std::optional<WeightMatrix> init;
      if (!init_path.empty()) init = read_csv_matrix(init_path);
      const PipelineOutput out = run_pipeline(parse_pipeline(algo), score, init);
      write_csv_matrix(out_path, out.result.W);
      if (!raw_path.empty()) write_csv_matrix(raw_path, out.result.W_raw);
      json j = solve_summary(out.result);
      j["algo"] = algo;
      if (out.kkts) j["kkts"] = counters_json(*out.kkts);
      emit(j, summary_path);
    } else if (*refine) {
      const ScoreConfig score(read_csv_matrix(data_path), tau);
      kcfg.enable_reduce = !no_reduce;
      kcfg.enable_reverse = !no_reverse;
      const KktsResult r = init_path.empty() ? run_kkts_unconstrained(kcfg, score)
                                             : run_kkts(read_csv_matrix(init_path), kcfg, score);
      write_csv_matrix(out_path, r.solve.W);
      if (!raw_path.empty()) write_csv_matrix(raw_path, r.solve.W_raw);
      json j = solve_summary(r.solve);
      j["kkts"] = counters_json(r.counters);
      j["constraints"] = r.constraint_count;
      emit(j, summary_path);
    } else if (*check) {
      const ScoreConfig score(read_csv_matrix(data_path), tau);
      const WeightMatrix w = read_csv_matrix(w_path);
      const KktReport rep = verify_kkt(w, score, AcyclicitySpec::binomial(score.dimension()), ktol);
      json viol = json::array();
      for (const auto& v : rep.violations)
        viol.push_back({{"row", v.row}, {"column", v.column}, {"magnitude", v.magnitude}, {"reason", v.reason}});
      emit({{"pass", rep.pass},
            {"feasible", rep.feasible},
            {"h", rep.h},
            {"lambda", rep.lambda},
            {"max_stationarity", rep.max_stationarity},
            {"max_complementarity", rep.max_complementarity},
            {"violations", viol}},
           out_path);
      return rep.pass ? 0 : 2;
    } else if (*met) {
      const StructureMetrics m = shd(read_csv_matrix(est_path), read_csv_matrix(true_path), threshold);
      emit({{"shd", m.shd}, {"nnz", m.nnz}, {"extra", m.extra}, {"missing", m.missing}, {"reversed", m.reversed}}, "");
    } else if (*bench) {
      ExperimentConfig cfg = ExperimentConfig::from_json_file(config_path);
      if (!bench_out.empty()) cfg.output = bench_out;
      if (!bench_summary.empty()) cfg.summary = bench_summary;
      if (trials > 0) cfg.trials = trials;
      if (no_timing) cfg.timing = false;
      const BenchmarkResult res = run_benchmark(cfg, workers > 0 ? workers : benchmark_workers());
      if (cfg.output.empty()) write_results_csv(std::cout, res.rows);
      if (cfg.summary.empty()) std::cerr << summary_json(res.cells) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "dagkkt: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
