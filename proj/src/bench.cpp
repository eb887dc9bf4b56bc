#include "dagkkt/bench.hpp"

#include "dagkkt/metrics.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dagkkt {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size())
    throw std::invalid_argument("pipeline: bad value '" + value + "' for " + key);
  return x;
}

bool parse_flag(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "on") return true;
  if (value == "0" || value == "false" || value == "off") return false;
  throw std::invalid_argument("pipeline: bad boolean '" + value + "' for " + key);
}

PipelineStage parse_stage(const std::string& text) {
  const auto at = text.find('@');
  const std::string name = trim(text.substr(0, at));
  PipelineStage st;
  if (name == "notears") {
    st.kind = PipelineStage::Kind::Notears;
    st.auglag.mode = AugLagConfig::Mode::Quadratic;
  } else if (name == "abs") {
    st.kind = PipelineStage::Kind::Abs;
    st.auglag.mode = AugLagConfig::Mode::AbsSplit;
  } else if (name == "kkts") {
    st.kind = PipelineStage::Kind::Kkts;
  } else {
    throw std::invalid_argument("pipeline: unknown stage '" + name + "'");
  }
  if (at == std::string::npos) return st;

  std::stringstream opts(text.substr(at + 1));
  std::string item;
  while (std::getline(opts, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("pipeline: expected key=value in '" + item + "'");
    const std::string key = trim(item.substr(0, eq)), value = trim(item.substr(eq + 1));
    if (st.kind == PipelineStage::Kind::Kkts) {
      if (key == "omega") st.kkts.omega = parse_number(key, value);
      else if (key == "eps") st.kkts.eps = parse_number(key, value);
      else if (key == "reduce") st.kkts.enable_reduce = parse_flag(key, value);
      else if (key == "reverse") st.kkts.enable_reverse = parse_flag(key, value);
      else throw std::invalid_argument("pipeline: unknown kkts option '" + key + "'");
    } else {
      if (key == "eps") st.auglag.eps = parse_number(key, value);
      else if (key == "omega") st.auglag.omega = parse_number(key, value);
      else if (key == "rho_max") st.auglag.rho_max = parse_number(key, value);
      else if (key == "max_outer") st.auglag.max_outer_iterations = static_cast<int>(parse_number(key, value));
      else throw std::invalid_argument("pipeline: unknown " + name + " option '" + key + "'");
    }
  }
  st.auglag.validate();
  st.kkts.validate();
  return st;
}

}  // namespace

Pipeline parse_pipeline(const std::string& text) {
  Pipeline p;
  p.label = trim(text);
  std::size_t pos = 0;
  while (true) {
    const auto arrow = p.label.find("->", pos);
    p.stages.push_back(parse_stage(p.label.substr(pos, arrow == std::string::npos ? arrow : arrow - pos)));
    if (arrow == std::string::npos) break;
    pos = arrow + 2;
  }
  for (std::size_t k = 1; k < p.stages.size(); ++k)
    if (p.stages[k].kind != PipelineStage::Kind::Kkts)
      throw std::invalid_argument("pipeline: only kkts can follow another stage");
  return p;
}

PipelineOutput run_pipeline(const Pipeline& p, const ScoreConfig& score,
                            const std::optional<WeightMatrix>& init) {
  PipelineOutput out;
  std::optional<WeightMatrix> current = init;
  double total = 0.0;
  for (const auto& st : p.stages) {
    if (st.kind == PipelineStage::Kind::Kkts) {
      KktsResult r = current ? run_kkts(*current, st.kkts, score)
                             : run_kkts_unconstrained(st.kkts, score);
      out.result = std::move(r.solve);
      out.kkts = r.counters;
    } else {
      out.result = solve_auglag(score, st.auglag);
    }
    total += out.result.time_s;
    current = out.result.W_raw;
  }
  out.result.time_s = total;
  return out;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  ExperimentConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "graph") c.graph = parse_graph_family(v.get<std::string>());
    else if (key == "k") c.k = v.get<int>();
    else if (key == "d") c.d_values = v.is_array() ? v.get<std::vector<int>>() : std::vector<int>{v.get<int>()};
    else if (key == "noise") c.noise = parse_noise_family(v.get<std::string>());
    else if (key == "n") {
      if (v.is_string()) {
        if (v.get<std::string>() != "2d") throw std::invalid_argument("config: n must be an integer or \"2d\"");
        c.n = 0;
      } else {
        c.n = v.get<int>();
      }
    }
    else if (key == "trials") c.trials = v.get<int>();
    else if (key == "seed") c.seed = v.get<std::uint64_t>();
    else if (key == "subtract_mean") c.subtract_mean = v.get<bool>();
    else if (key == "tau") c.tau = v.get<double>();
    else if (key == "algorithms") c.algorithms = v.get<std::vector<std::string>>();
    else if (key == "timing") c.timing = v.get<bool>();
    else if (key == "output") c.output = v.get<std::string>();
    else if (key == "summary") c.summary = v.get<std::string>();
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (algorithms.empty()) throw std::invalid_argument("config: algorithms must be nonempty");
  if (d_values.empty()) throw std::invalid_argument("config: d must be nonempty");
  for (int d : d_values)
    if (d < 2) throw std::invalid_argument("config: d must be >= 2");
  if (n < 0) throw std::invalid_argument("config: n must be positive or \"2d\"");
  if (!(tau >= 0.0)) throw std::invalid_argument("config: tau must be >= 0");
  for (const auto& a : algorithms) parse_pipeline(a);
}

int benchmark_workers() {
  const char* env = std::getenv("DAGKKT_WORKERS");
  if (!env || !*env) return 1;
  const int w = std::atoi(env);
  return w > 0 ? w : 1;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

void write_row(std::ostream& out, const TrialRecord& r) {
  out << csv_field(r.algo) << ',' << r.graph << ',' << r.noise << ',' << r.d << ',' << r.n << ','
      << r.trial << ',' << r.seed << ',' << r.shd << ',' << r.nnz << ','
      << (r.failed() ? std::string("nan") : fmt("%.17g", r.h_final)) << ','
      << fmt("%.6f", r.time_s) << '\n';
}

std::vector<TrialRecord> run_task(const ExperimentConfig& cfg, const std::vector<Pipeline>& pipes,
                                  int d, int trial) {
  GraphConfig g;
  g.family = cfg.graph;
  g.d = d;
  g.k = cfg.k;
  g.seed = cfg.seed + static_cast<std::uint64_t>(trial);
  SemConfig sem;
  sem.noise = cfg.noise;
  sem.n = cfg.n > 0 ? cfg.n : 2 * d;
  sem.subtract_mean = cfg.subtract_mean;

  TrialRecord base;
  base.graph = to_string(cfg.graph) + std::to_string(cfg.k);
  base.noise = to_string(cfg.noise);
  base.d = d;
  base.n = sem.n;
  base.trial = trial;
  base.seed = g.seed;

  std::vector<TrialRecord> rows;
  std::optional<Dataset> data;
  std::string data_error;
  try {
    data = simulate(g, sem);
  } catch (const std::exception& e) {
    data_error = e.what();
  }
  for (const auto& p : pipes) {
    TrialRecord r = base;
    r.algo = p.label;
    try {
      if (!data) throw std::runtime_error(data_error);
      const ScoreConfig score(data->samples, cfg.tau);
      const PipelineOutput out = run_pipeline(p, score);
      const StructureMetrics m = shd(out.result.W, data->true_weights);
      r.shd = m.shd;
      r.nnz = m.nnz;
      r.h_final = out.result.h_final;
      r.time_s = cfg.timing ? out.result.time_s : 0.0;
    } catch (const std::exception& e) {
      r.shd = -1;
      r.nnz = -1;
      r.h_final = std::nan("");
      r.time_s = 0.0;
      r.error = e.what();
      std::cerr << "bench: " << p.label << " d=" << d << " trial=" << trial
                << " failed: " << e.what() << '\n';
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

void write_results_csv(std::ostream& out, const std::vector<TrialRecord>& rows) {
  out << "algo,graph,noise,d,n,trial,seed,shd,nnz,h_final,time_s\n";
  for (const auto& r : rows) write_row(out, r);
}

BenchmarkResult run_benchmark(const ExperimentConfig& cfg, int workers) {
  cfg.validate();
  std::vector<Pipeline> pipes;
  for (const auto& a : cfg.algorithms) pipes.push_back(parse_pipeline(a));

  struct Task {
    int d, trial;
  };
  std::vector<Task> tasks;
  for (int d : cfg.d_values)
    for (int t = 0; t < cfg.trials; ++t) tasks.push_back({d, t});

  std::ofstream csv;
  if (!cfg.output.empty()) {
    csv.open(cfg.output);
    if (!csv) throw std::runtime_error("bench: cannot write " + cfg.output.string());
    csv << "algo,graph,noise,d,n,trial,seed,shd,nnz,h_final,time_s\n";
  }

  std::vector<std::vector<TrialRecord>> done(tasks.size());
  std::vector<char> ready(tasks.size(), 0);
  std::size_t next_write = 0;
  std::mutex writer;
  std::atomic<std::size_t> next_task{0};

  auto worker = [&] {
    while (true) {
      const std::size_t t = next_task.fetch_add(1);
      if (t >= tasks.size()) return;
      auto rows = run_task(cfg, pipes, tasks[t].d, tasks[t].trial);
      std::lock_guard<std::mutex> lock(writer);
      done[t] = std::move(rows);
      ready[t] = 1;
      // Rows leave in task order regardless of completion order.
      while (next_write < tasks.size() && ready[next_write]) {
        if (csv.is_open()) {
          for (const auto& r : done[next_write]) write_row(csv, r);
          csv.flush();
        }
        ++next_write;
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(workers, static_cast<int>(tasks.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < nthreads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  BenchmarkResult res;
  for (auto& rows : done)
    for (auto& r : rows) res.rows.push_back(std::move(r));
  res.cells = aggregate(res.rows);
  if (!cfg.summary.empty()) {
    std::ofstream js(cfg.summary);
    if (!js) throw std::runtime_error("bench: cannot write " + cfg.summary.string());
    js << summary_json(res.cells) << '\n';
  }
  return res;
}

std::vector<AggregateCell> aggregate(const std::vector<TrialRecord>& rows) {
  std::vector<AggregateCell> cells;
  std::map<std::pair<std::string, int>, std::size_t> index;
  struct Acc {
    std::vector<double> shd, nnz, time;
  };
  std::vector<Acc> acc;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.algo, r.d);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, cells.size()).first;
      AggregateCell c;
      c.algo = r.algo;
      c.d = r.d;
      cells.push_back(c);
      acc.emplace_back();
    }
    auto& c = cells[it->second];
    if (r.failed()) {
      ++c.failures;
      continue;
    }
    ++c.count;
    acc[it->second].shd.push_back(r.shd);
    acc[it->second].nnz.push_back(r.nnz);
    acc[it->second].time.push_back(r.time_s);
  }
  auto mean_se = [](const std::vector<double>& x, double& mean, double& se) {
    mean = se = 0.0;
    if (x.empty()) return;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    if (x.size() < 2) return;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    se = std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
  };
  for (std::size_t k = 0; k < cells.size(); ++k) {
    mean_se(acc[k].shd, cells[k].shd_mean, cells[k].shd_se);
    mean_se(acc[k].nnz, cells[k].nnz_mean, cells[k].nnz_se);
    mean_se(acc[k].time, cells[k].time_mean, cells[k].time_se);
  }
  return cells;
}

std::string summary_json(const std::vector<AggregateCell>& cells) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cells)
    arr.push_back({{"algo", c.algo},
                   {"d", c.d},
                   {"count", c.count},
                   {"failures", c.failures},
                   {"shd", {{"mean", c.shd_mean}, {"se", c.shd_se}}},
                   {"nnz", {{"mean", c.nnz_mean}, {"se", c.nnz_se}}},
                   {"time_s", {{"mean", c.time_mean}, {"se", c.time_se}}}});
  return arr.dump(2);
}

}  // namespace dagkkt
