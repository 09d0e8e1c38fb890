#include <filesystem>
#include <fstream>
#include <sstream>

#include "casl/error.hpp"
#include "casl/runner.hpp"
#include "casl/svg.hpp"
#include "doctest.h"

using namespace casl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kHeader =
    "run_id,strategy,iteration,cumulative_samples,precision,recall,f1,"
    "t_contrastive_s,t_proxy_s,t_sampling_s\n";

}  // namespace

TEST_CASE("csv_double round-trips doubles compactly") {
  CHECK(csv_double(0.5) == "0.5");
  CHECK(csv_double(0.0) == "0");
  CHECK(csv_double(1.0 / 3.0) == "0.3333333333333333");
  // Shortest form must parse back to the identical bits.
  const double v = 0.14317;
  CHECK(std::stod(csv_double(v)) == v);
}

TEST_CASE("report averages repetitions and reports reductions") {
  TempDir logs("casl_report_in");
  TempDir out("casl_report_out");

  write_file(logs.path / "uncertainty_rep0.csv",
             std::string(kHeader) +
                 "uncertainty_rep0,uncertainty,0,100,0.5,0.5,0.5,1,1,0\n"
                 "uncertainty_rep0,uncertainty,1,200,0.8,0.8,0.8,1,1,0\n");
  write_file(logs.path / "uncertainty_rep1.csv",
             std::string(kHeader) +
                 "uncertainty_rep1,uncertainty,0,100,0.7,0.7,0.7,1,1,0\n"
                 "uncertainty_rep1,uncertainty,1,200,1,1,1,1,1,0\n");
  write_file(logs.path / "benchmark.csv",
             std::string(kHeader) + "benchmark,benchmark,20,1000,0.9,0.8,0.85,10,2,0\n");
  // Companion files must be skipped by header sniffing.
  write_file(logs.path / "uncertainty_rep0_loss.csv", "run_id,iteration,epoch,loss\n");
  write_file(logs.path / "notes.csv", "a,b\n1,2\n");

  cmd_report(logs.path.string(), out.path.string());

  const std::string summary = read_file(out.path / "summary.csv");
  CHECK(summary.find("strategy,iteration,cumulative_samples,mean_precision,"
                     "mean_recall,mean_f1,repetitions") != std::string::npos);
  CHECK(summary.find("uncertainty,0,100,0.6,0.6,0.6,2") != std::string::npos);
  CHECK(summary.find("uncertainty,1,200,0.9,0.9,0.9,2") != std::string::npos);

  const std::string runtime = read_file(out.path / "runtime.csv");
  // Mean curve reaches 0.9 >= benchmark best 0.85 at 200 of 1000 samples:
  // an 80% sample reduction. Benchmark total is 12s, strategy total 4s.
  CHECK(runtime.find("uncertainty,4,0.9,80,") != std::string::npos);
  CHECK(runtime.find("yes") != std::string::npos);
  CHECK(runtime.find("benchmark,12,0.85") != std::string::npos);

  const std::string svg = read_file(out.path / "fig_f1_vs_samples.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("uncertainty") != std::string::npos);
  CHECK(svg.find("benchmark best F1") != std::string::npos);

  SUBCASE("summary output is byte-stable across invocations") {
    TempDir out2("casl_report_out2");
    cmd_report(logs.path.string(), out2.path.string());
    CHECK(read_file(out2.path / "summary.csv") == summary);
    CHECK(read_file(out2.path / "fig_f1_vs_samples.svg") == svg);
  }
}

TEST_CASE("report requires consistent grids within a strategy") {
  TempDir logs("casl_report_grid");
  TempDir out("casl_report_grid_out");
  write_file(logs.path / "random_rep0.csv",
             std::string(kHeader) + "random_rep0,random,0,100,0.5,0.5,0.5,1,1,0\n");
  write_file(logs.path / "random_rep1.csv",
             std::string(kHeader) + "random_rep1,random,0,150,0.5,0.5,0.5,1,1,0\n");
  CHECK_THROWS_AS(cmd_report(logs.path.string(), out.path.string()), ValidationError);
}

TEST_CASE("report errors on empty or missing directories") {
  TempDir logs("casl_report_empty");
  TempDir out("casl_report_empty_out");
  CHECK_THROWS_AS(cmd_report(logs.path.string(), out.path.string()), ValidationError);
  CHECK_THROWS_AS(cmd_report((logs.path / "nope").string(), out.path.string()), IoError);
}

TEST_CASE("report works without a benchmark") {
  TempDir logs("casl_report_nobench");
  TempDir out("casl_report_nobench_out");
  write_file(logs.path / "random_rep0.csv",
             std::string(kHeader) + "random_rep0,random,0,100,0.5,0.5,0.5,1,1,0\n");
  cmd_report(logs.path.string(), out.path.string());
  const std::string runtime = read_file(out.path / "runtime.csv");
  CHECK(runtime.find("random,2,0.5,,,") != std::string::npos);
}

TEST_CASE("svg renderer smoke") {
  SvgChart chart;
  chart.title = "t";
  chart.x_label = "x";
  chart.y_label = "y";
  SvgSeries s;
  s.label = "series one";
  s.color = "#d62728";
  s.points = {{0.0, 0.1}, {100.0, 0.5}, {200.0, 0.4}};
  chart.series.push_back(s);
  chart.hline = 0.45;
  chart.hline_label = "ref";

  const std::string svg = render_line_chart(chart);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("series one") != std::string::npos);
  CHECK(svg.find("ref") != std::string::npos);
  CHECK(svg.rfind("</svg>") != std::string::npos);
  CHECK(render_line_chart(chart) == svg);

  SvgChart empty;
  CHECK_THROWS_AS(render_line_chart(empty), ValidationError);
}
