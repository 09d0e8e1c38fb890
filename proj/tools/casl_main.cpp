// Command line front end. Talks to the library strictly through the C API so
// it doubles as a smoke test for external bindings.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "casl.h"

namespace {

struct ConfigDeleter {
  void operator()(casl_config* c) const { casl_config_destroy(c); }
};
using ConfigHandle = std::unique_ptr<casl_config, ConfigDeleter>;

// 0 ok, 1 usage or validation, 2 runtime (I/O and everything else).
int exit_code_for(casl_status s) {
  switch (s) {
    case CASL_OK:
      return 0;
    case CASL_ERROR_INVALID_ARGUMENT:
    case CASL_ERROR_VALIDATION:
      return 1;
    default:
      return 2;
  }
}

int check(casl_status s) {
  if (s != CASL_OK) std::fprintf(stderr, "error: %s\n", casl_last_error());
  return exit_code_for(s);
}

struct CommonOpts {
  std::string profile = "desk";
  std::string config_path;
  std::vector<std::string> sets;
  std::string seed;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--profile", opts.profile, "Base profile: desk or paper")
      ->capture_default_str();
  cmd->add_option("--config", opts.config_path, "Config file with key = value lines");
  cmd->add_option("--set", opts.sets, "Override, repeatable: --set loop.budget=50");
  cmd->add_option("--seed", opts.seed, "Master seed (shorthand for --set seed=...)");
  cmd->add_option("--out", opts.out, "Output directory (shorthand for output_dir)");
}

// Builds the handle in CLI order: profile, then config file, then overrides.
int build_config(const CommonOpts& opts, ConfigHandle& out) {
  casl_config* raw = nullptr;
  if (int rc = check(casl_config_create(opts.profile.c_str(), &raw))) return rc;
  out.reset(raw);
  if (!opts.config_path.empty())
    if (int rc = check(casl_config_load(out.get(), opts.config_path.c_str()))) return rc;
  for (const std::string& kv : opts.sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      return 1;
    }
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    if (int rc = check(casl_config_set(out.get(), key.c_str(), value.c_str())))
      return rc;
  }
  if (!opts.seed.empty())
    if (int rc = check(casl_config_set(out.get(), "seed", opts.seed.c_str()))) return rc;
  if (!opts.out.empty())
    if (int rc = check(casl_config_set(out.get(), "output_dir", opts.out.c_str())))
      return rc;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contrastive representation learning with active sample selection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(casl_version()));

  CommonOpts gen_opts;
  std::string data_out = "dataset.bin";
  std::string csv_out;
  CLI::App* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  add_common(gen, gen_opts);
  gen->add_option("--data-out", data_out, "Dataset file to write")
      ->capture_default_str();
  gen->add_option("--csv-out", csv_out, "Optional CSV view of the patches");

  CommonOpts run_opts;
  CLI::App* run = app.add_subcommand("run", "Run the sampling experiments");
  add_common(run, run_opts);

  std::string logs_dir = "out";
  std::string report_dir = "report";
  CLI::App* report = app.add_subcommand("report", "Aggregate experiment logs");
  report->add_option("--logs", logs_dir, "Directory with experiment CSVs")
      ->capture_default_str();
  report->add_option("--out", report_dir, "Directory for tables and charts")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 1 : 0;
  }

  if (gen->parsed()) {
    ConfigHandle cfg;
    if (int rc = build_config(gen_opts, cfg)) return rc;
    return check(casl_gen_data(cfg.get(), data_out.c_str(),
                               csv_out.empty() ? nullptr : csv_out.c_str()));
  }
  if (run->parsed()) {
    ConfigHandle cfg;
    if (int rc = build_config(run_opts, cfg)) return rc;
    return check(casl_run(cfg.get()));
  }
  return check(casl_report(logs_dir.c_str(), report_dir.c_str()));
}
