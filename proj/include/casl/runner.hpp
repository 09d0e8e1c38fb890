#pragma once

#include <string>

#include "casl/config.hpp"

namespace casl {

// Formats a double with the shortest representation that parses back to the
// same value, shared by every CSV writer so logs are reproducible.
std::string csv_double(double v);

// Generates (or loads) the dataset for this config. The generator seed is
// the master seed, so data is shared across strategies and repetitions.
Dataset prepare_dataset(const RunConfig& cfg);

// Writes the dataset (and optionally a CSV view) to disk.
void cmd_gen_data(const RunConfig& cfg, const std::string& out_path,
                  const std::string& csv_path);

// Runs every strategy x repetition plus the benchmark, writing one
// experiment CSV per run, companion loss/selection CSVs, and a config echo
// into cfg.output_dir. Verbosity via the CASL_LOG environment variable.
void cmd_run(const RunConfig& cfg);

// Aggregates experiment CSVs in log_dir into summary.csv, runtime.csv and
// fig_f1_vs_samples.svg under out_dir.
void cmd_report(const std::string& log_dir, const std::string& out_dir);

}  // namespace casl
