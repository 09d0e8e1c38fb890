#include "casl/runner.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "casl/error.hpp"
#include "casl/svg.hpp"

namespace casl {

namespace fs = std::filesystem;

namespace {

constexpr const char* kExperimentHeader =
    "run_id,strategy,iteration,cumulative_samples,precision,recall,f1,"
    "t_contrastive_s,t_proxy_s,t_sampling_s";

int log_level() {
  const char* v = std::getenv("CASL_LOG");
  if (!v) return 1;
  const std::string s(v);
  if (s == "0" || s == "quiet") return 0;
  if (s == "2" || s == "debug") return 2;
  return 1;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << msg << "\n";
}

void write_experiment_csv(const fs::path& path, const std::string& run_id,
                          const std::string& strategy,
                          const std::vector<ExperimentRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("run: cannot open for writing: " + path.string());
  out << kExperimentHeader << "\n";
  for (const ExperimentRecord& r : records) {
    out << run_id << "," << strategy << "," << r.iteration << ","
        << r.cumulative_samples << "," << csv_double(r.metrics.precision) << ","
        << csv_double(r.metrics.recall) << "," << csv_double(r.metrics.f1) << ","
        << csv_double(r.t_contrastive_s) << "," << csv_double(r.t_proxy_s) << ","
        << csv_double(r.t_sampling_s) << "\n";
  }
  if (!out) throw IoError("run: write failed: " + path.string());
}

void write_loss_csv(const fs::path& path, const std::string& run_id,
                    const std::vector<std::vector<double>>& traces) {
  std::ofstream out(path);
  if (!out) throw IoError("run: cannot open for writing: " + path.string());
  out << "run_id,iteration,epoch,loss\n";
  for (std::size_t t = 0; t < traces.size(); ++t)
    for (std::size_t e = 0; e < traces[t].size(); ++e)
      out << run_id << "," << t << "," << e << "," << csv_double(traces[t][e]) << "\n";
}

void write_selected_csv(const fs::path& path, const std::string& strategy,
                        const std::vector<std::vector<int>>& selected) {
  std::ofstream out(path);
  if (!out) throw IoError("run: cannot open for writing: " + path.string());
  // Batch k is trained from iteration k on; the final batch (k == T) is the
  // loop's last selection and never enters training.
  out << "iteration,strategy,ids\n";
  for (std::size_t k = 0; k < selected.size(); ++k) {
    out << k << "," << strategy << ",";
    for (std::size_t i = 0; i < selected[k].size(); ++i) {
      if (i) out << ";";
      out << selected[k][i];
    }
    out << "\n";
  }
}

struct RunTask {
  std::string run_id;
  SamplerKind kind;
  std::uint64_t seed;
  bool benchmark = false;
};

void execute_task(const RunConfig& cfg, const RunTask& task, const Dataset& ds,
                  const Pools& pools) {
  const fs::path dir(cfg.output_dir);
  if (task.benchmark) {
    LoopResult res = run_benchmark(loop_config(cfg, task.kind, task.seed),
                                   cfg.benchmark, ds, pools);
    write_experiment_csv(dir / (task.run_id + ".csv"), task.run_id, "benchmark",
                         res.records);
    write_loss_csv(dir / (task.run_id + "_loss.csv"), task.run_id, res.loss_traces);
    if (cfg.checkpoints)
      save_encoder(res.encoder, (dir / (task.run_id + ".encoder")).string());
    return;
  }

  std::function<void(int, const EncoderParams&)> hook;
  if (cfg.checkpoints) {
    hook = [&dir, &task](int t, const EncoderParams& enc) {
      save_encoder(enc,
                   (dir / (task.run_id + "_iter" + std::to_string(t) + ".encoder"))
                       .string());
    };
  }
  LoopResult res =
      run_active_loop(loop_config(cfg, task.kind, task.seed), ds, pools, hook);
  const std::string strategy = sampler_name(task.kind);
  write_experiment_csv(dir / (task.run_id + ".csv"), task.run_id, strategy,
                       res.records);
  write_loss_csv(dir / (task.run_id + "_loss.csv"), task.run_id, res.loss_traces);
  write_selected_csv(dir / (task.run_id + "_selected.csv"), strategy, res.selected);
  if (res.truncated) log_info("run: " + task.run_id + ": pool exhausted early");
}

}  // namespace

std::string csv_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw ContractError("csv: cannot format double");
  return std::string(buf, p);
}

Dataset prepare_dataset(const RunConfig& cfg) {
  if (!cfg.dataset_path.empty()) return load_dataset(cfg.dataset_path);
  DatasetSpec spec = cfg.dataset;
  spec.seed = cfg.seed;
  return generate_dataset(spec);
}

void cmd_gen_data(const RunConfig& cfg, const std::string& out_path,
                  const std::string& csv_path) {
  Dataset ds = prepare_dataset(cfg);
  const fs::path out(out_path);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_dataset(ds, out_path);
  log_info("gen-data: wrote " + std::to_string(ds.patches.size()) + " patches to " +
           out_path);
  if (!csv_path.empty()) {
    export_dataset_csv(ds, csv_path);
    log_info("gen-data: wrote CSV view to " + csv_path);
  }
}

void cmd_run(const RunConfig& cfg) {
  validate(cfg);
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  {
    std::ofstream echo(dir / "config.txt");
    if (!echo) throw IoError("run: cannot write config echo");
    echo << emit_config(cfg);
  }

  const Dataset ds = prepare_dataset(cfg);
  const Pools pools = split_pools(ds, cfg.labeled_size, cfg.test_size, cfg.seed,
                                  cfg.stratify_labeled);
  log_info("run: dataset " + std::to_string(ds.patches.size()) + " patches, pool " +
           std::to_string(pools.unlabeled_ids.size()) + ", labeled " +
           std::to_string(pools.labeled.ids.size()) + ", test " +
           std::to_string(pools.test.ids.size()));

  std::vector<RunTask> tasks;
  for (SamplerKind kind : cfg.strategies)
    for (int rep = 0; rep < cfg.repetitions; ++rep)
      tasks.push_back(RunTask{sampler_name(kind) + "_rep" + std::to_string(rep),
                              kind, derive_seed(cfg.seed, "rep", rep), false});
  if (cfg.with_benchmark)
    tasks.push_back(
        RunTask{"benchmark", SamplerKind::kRandom, derive_seed(cfg.seed, "rep", 0), true});

  // Runs are independent (own seed streams, own output files; dataset and
  // pools shared read-only), so a failure of one must not discard the rest:
  // partial results stay on disk and the first error is rethrown at the end.
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::exception_ptr first_error;
  for (std::size_t base = 0; base < tasks.size(); base += workers) {
    const std::size_t end = std::min(tasks.size(), base + workers);
    std::vector<std::future<void>> wave;
    for (std::size_t i = base; i < end; ++i) {
      log_info("run: starting " + tasks[i].run_id);
      wave.push_back(std::async(std::launch::async, [&cfg, &tasks, i, &ds, &pools]() {
        execute_task(cfg, tasks[i], ds, pools);
      }));
    }
    for (std::size_t i = base; i < end; ++i) {
      try {
        wave[i - base].get();
        log_info("run: finished " + tasks[i].run_id);
      } catch (...) {
        if (!first_error) first_error = std::current_exception();
        log_info("run: failed " + tasks[i].run_id);
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

struct RunLog {
  std::string run_id;
  std::string strategy;
  std::vector<ExperimentRecord> records;
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

double parse_csv_double(const std::string& s, const fs::path& file) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ValidationError("report: malformed number '" + s + "' in " + file.string());
  return v;
}

std::vector<RunLog> read_logs(const std::string& log_dir) {
  if (!fs::is_directory(log_dir))
    throw IoError("report: not a directory: " + log_dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(log_dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::vector<RunLog> logs;
  for (const fs::path& file : files) {
    std::ifstream in(file);
    if (!in) throw IoError("report: cannot open: " + file.string());
    std::string line;
    if (!std::getline(in, line)) continue;
    if (line != kExperimentHeader) continue;  // companion or foreign CSV

    RunLog log;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const std::vector<std::string> f = split_csv_line(line);
      if (f.size() != 10)
        throw ValidationError("report: malformed row (want 10 columns) in " +
                              file.string());
      if (log.records.empty()) {
        log.run_id = f[0];
        log.strategy = f[1];
      } else if (log.run_id != f[0] || log.strategy != f[1]) {
        throw ValidationError("report: mixed run ids within " + file.string());
      }
      ExperimentRecord r;
      r.iteration = static_cast<int>(parse_csv_double(f[2], file));
      r.cumulative_samples = static_cast<long>(parse_csv_double(f[3], file));
      r.metrics.precision = parse_csv_double(f[4], file);
      r.metrics.recall = parse_csv_double(f[5], file);
      r.metrics.f1 = parse_csv_double(f[6], file);
      r.t_contrastive_s = parse_csv_double(f[7], file);
      r.t_proxy_s = parse_csv_double(f[8], file);
      r.t_sampling_s = parse_csv_double(f[9], file);
      log.records.push_back(r);
    }
    if (!log.records.empty()) logs.push_back(std::move(log));
  }
  if (logs.empty())
    throw ValidationError("report: no experiment logs found in " + log_dir);
  return logs;
}

}  // namespace

void cmd_report(const std::string& log_dir, const std::string& out_dir) {
  const std::vector<RunLog> logs = read_logs(log_dir);

  std::map<std::string, std::vector<const RunLog*>> by_strategy;
  std::vector<const RunLog*> benchmarks;
  for (const RunLog& log : logs) {
    if (log.strategy == "benchmark") benchmarks.push_back(&log);
    else by_strategy[log.strategy].push_back(&log);
  }

  // Mean-over-repetitions curve per strategy; the iteration grid must agree
  // across repetitions of one strategy.
  std::map<std::string, std::vector<ExperimentRecord>> mean_curves;
  for (const auto& [strategy, runs] : by_strategy) {
    const std::size_t n = runs.front()->records.size();
    for (const RunLog* run : runs)
      if (run->records.size() != n)
        throw ValidationError("report: repetitions of '" + strategy +
                              "' disagree on record count");
    std::vector<ExperimentRecord> mean(n);
    for (std::size_t i = 0; i < n; ++i) {
      const ExperimentRecord& first = runs.front()->records[i];
      mean[i].iteration = first.iteration;
      mean[i].cumulative_samples = first.cumulative_samples;
      for (const RunLog* run : runs) {
        const ExperimentRecord& r = run->records[i];
        if (r.iteration != first.iteration ||
            r.cumulative_samples != first.cumulative_samples)
          throw ValidationError("report: repetitions of '" + strategy +
                                "' disagree on the iteration grid");
        mean[i].metrics.precision += r.metrics.precision;
        mean[i].metrics.recall += r.metrics.recall;
        mean[i].metrics.f1 += r.metrics.f1;
        mean[i].t_contrastive_s += r.t_contrastive_s;
        mean[i].t_proxy_s += r.t_proxy_s;
        mean[i].t_sampling_s += r.t_sampling_s;
      }
      const double k = static_cast<double>(runs.size());
      mean[i].metrics.precision /= k;
      mean[i].metrics.recall /= k;
      mean[i].metrics.f1 /= k;
      mean[i].t_contrastive_s /= k;
      mean[i].t_proxy_s /= k;
      mean[i].t_sampling_s /= k;
    }
    mean_curves[strategy] = std::move(mean);
  }

  fs::create_directories(out_dir);
  const fs::path out(out_dir);

  // Deterministic summary: means only, no wall times.
  {
    std::ofstream s(out / "summary.csv");
    if (!s) throw IoError("report: cannot write summary.csv");
    s << "strategy,iteration,cumulative_samples,mean_precision,mean_recall,mean_f1,"
         "repetitions\n";
    for (const auto& [strategy, curve] : mean_curves)
      for (const ExperimentRecord& r : curve)
        s << strategy << "," << r.iteration << "," << r.cumulative_samples << ","
          << csv_double(r.metrics.precision) << "," << csv_double(r.metrics.recall)
          << "," << csv_double(r.metrics.f1) << "," << by_strategy[strategy].size()
          << "\n";
  }

  // Runtime table. Reductions need a benchmark reference; without one the
  // columns stay empty.
  {
    std::ofstream s(out / "runtime.csv");
    if (!s) throw IoError("report: cannot write runtime.csv");
    s << "strategy,avg_runtime_s,best_f1,sample_reduction_pct,time_reduction_pct,"
         "reached_benchmark_f1\n";
    const std::vector<ExperimentRecord>* bench = nullptr;
    if (!benchmarks.empty()) bench = &benchmarks.front()->records;
    for (const auto& [strategy, curve] : mean_curves) {
      double total = 0.0, best = 0.0;
      for (const ExperimentRecord& r : curve) {
        total += r.t_contrastive_s + r.t_proxy_s + r.t_sampling_s;
        best = std::max(best, r.metrics.f1);
      }
      s << strategy << "," << csv_double(total) << "," << csv_double(best);
      if (bench) {
        const ReductionReport rep = reduction_report(
            *bench, curve, bench->front().cumulative_samples);
        if (rep.reached)
          s << "," << csv_double(100.0 * rep.sample_reduction) << ","
            << csv_double(100.0 * rep.time_reduction) << ",yes";
        else
          s << ",,"
            << ",no (best " << csv_double(rep.closest_f1) << " vs target "
            << csv_double(rep.target_f1) << ")";
      } else {
        s << ",,,";
      }
      s << "\n";
    }
    if (bench) {
      double total = 0.0, best = 0.0;
      for (const ExperimentRecord& r : *bench) {
        total += r.t_contrastive_s + r.t_proxy_s + r.t_sampling_s;
        best = std::max(best, r.metrics.f1);
      }
      s << "benchmark," << csv_double(total) << "," << csv_double(best) << ",,,\n";
    }
  }

  // Fig-4-shaped chart: F1 vs cumulative samples, benchmark as a reference line.
  SvgChart chart;
  chart.title = "F1 vs selected samples (mean over repetitions)";
  chart.x_label = "cumulative selected samples";
  chart.y_label = "test F1";
  const std::map<std::string, std::string> palette = {
      {"random", "#7f7f7f"}, {"uncertainty", "#d62728"}, {"coreset", "#1f77b4"}};
  for (const auto& [strategy, curve] : mean_curves) {
    SvgSeries series;
    series.label = strategy;
    const auto it = palette.find(strategy);
    series.color = it != palette.end() ? it->second : "#9467bd";
    for (const ExperimentRecord& r : curve)
      series.points.emplace_back(static_cast<double>(r.cumulative_samples),
                                 r.metrics.f1);
    chart.series.push_back(std::move(series));
  }
  if (!benchmarks.empty()) {
    double best = 0.0;
    for (const ExperimentRecord& r : benchmarks.front()->records)
      best = std::max(best, r.metrics.f1);
    chart.hline = best;
    chart.hline_label = "benchmark best F1";
  }
  write_line_chart(chart, (out / "fig_f1_vs_samples.svg").string());
  log_info("report: wrote summary.csv, runtime.csv, fig_f1_vs_samples.svg to " +
           out_dir);
}

}  // namespace casl
