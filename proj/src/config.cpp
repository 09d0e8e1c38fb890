#include "casl/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "casl/error.hpp"

namespace casl {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& want,
                            const std::string& got) {
  throw ValidationError("config: " + key + ": expected " + want + ", got '" + got + "'");
}

long long parse_ll(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, "an integer", v);
  return out;
}

int parse_int(const std::string& key, const std::string& v) {
  return static_cast<int>(parse_ll(key, v));
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    bad_value(key, "an unsigned integer", v);
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, "a number", v);
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, "a boolean (true/false)", v);
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) bad_value(key, "a comma-separated integer list", v);
    out.push_back(parse_int(key, item));
  }
  if (out.empty()) bad_value(key, "a comma-separated integer list", v);
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw ContractError("config: cannot format double");
  return std::string(buf, p);
}

std::string fmt_int_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

std::string fmt_strategies(const std::vector<SamplerKind>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += sampler_name(v[i]);
  }
  return out;
}

}  // namespace

RunConfig default_config(const std::string& profile) {
  RunConfig cfg;
  cfg.profile = profile;
  if (profile == "desk") {
    // Fields already carry the desk defaults.
  } else if (profile == "paper") {
    cfg.dataset.pool_size = 107180;  // 99000 pool + 1000 labeled + 7180 test
    cfg.labeled_size = 1000;
    cfg.test_size = 7180;
    cfg.budget = 1000;
    cfg.iterations = 20;
    cfg.contrastive.batch_size = 128;
    cfg.contrastive.epochs = 100;
    cfg.benchmark.contrastive_epochs = 100;
  } else {
    throw ValidationError("config: unknown profile '" + profile +
                          "' (expected desk or paper)");
  }
  return cfg;
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "seed") cfg.seed = parse_u64(key, value);
  else if (key == "output_dir") cfg.output_dir = value;
  else if (key == "repetitions") {
    cfg.repetitions = parse_int(key, value);
    if (cfg.repetitions < 1)
      throw ValidationError("config: repetitions: must be >= 1, got " + value);
  }
  else if (key == "run_benchmark") cfg.with_benchmark = parse_bool(key, value);
  else if (key == "checkpoints") cfg.checkpoints = parse_bool(key, value);
  else if (key == "strategies") {
    std::vector<SamplerKind> kinds;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) kinds.push_back(sampler_from_name(trim(item)));
    if (kinds.empty()) bad_value(key, "a comma-separated strategy list", value);
    cfg.strategies = std::move(kinds);
  }
  else if (key == "dataset.path") cfg.dataset_path = value;
  else if (key == "dataset.pool_size") cfg.dataset.pool_size = parse_int(key, value);
  else if (key == "dataset.positive_fraction")
    cfg.dataset.positive_fraction = parse_double(key, value);
  else if (key == "dataset.negative_subclusters")
    cfg.dataset.negative_subclusters = parse_int(key, value);
  else if (key == "dataset.patch_side") cfg.dataset.patch_side = parse_int(key, value);
  else if (key == "dataset.cluster_separation")
    cfg.dataset.cluster_separation = parse_double(key, value);
  else if (key == "dataset.noise_scale") cfg.dataset.noise_scale = parse_double(key, value);
  else if (key == "split.labeled_size") cfg.labeled_size = parse_int(key, value);
  else if (key == "split.test_size") cfg.test_size = parse_int(key, value);
  else if (key == "split.stratify_labeled")
    cfg.stratify_labeled = parse_bool(key, value);
  else if (key == "augment.noise_sigma") cfg.augment.noise_sigma = parse_double(key, value);
  else if (key == "augment.max_shift") cfg.augment.max_shift = parse_int(key, value);
  else if (key == "augment.flip_horizontal")
    cfg.augment.flip_horizontal = parse_bool(key, value);
  else if (key == "augment.flip_vertical")
    cfg.augment.flip_vertical = parse_bool(key, value);
  else if (key == "augment.rotate_90") cfg.augment.rotate_90 = parse_bool(key, value);
  else if (key == "augment.intensity_jitter")
    cfg.augment.intensity_jitter = parse_double(key, value);
  else if (key == "encoder.hidden_dims")
    cfg.encoder.hidden_dims = parse_int_list(key, value);
  else if (key == "encoder.feature_dim") cfg.encoder.feature_dim = parse_int(key, value);
  else if (key == "encoder.head_dims") cfg.encoder.head_dims = parse_int_list(key, value);
  else if (key == "contrastive.temperature")
    cfg.contrastive.temperature = parse_double(key, value);
  else if (key == "contrastive.batch_size")
    cfg.contrastive.batch_size = parse_int(key, value);
  else if (key == "contrastive.epochs") cfg.contrastive.epochs = parse_int(key, value);
  else if (key == "contrastive.lr") cfg.contrastive.lr = parse_double(key, value);
  else if (key == "proxy.lr") cfg.proxy.lr = parse_double(key, value);
  else if (key == "proxy.epochs") cfg.proxy.epochs = parse_int(key, value);
  else if (key == "proxy.batch_size") cfg.proxy.batch_size = parse_int(key, value);
  else if (key == "loop.budget") cfg.budget = parse_int(key, value);
  else if (key == "loop.iterations") cfg.iterations = parse_int(key, value);
  else if (key == "loop.candidate_cap") cfg.candidate_cap = parse_int(key, value);
  else if (key == "loop.eval_threshold") {
    cfg.eval_threshold = parse_double(key, value);
    if (cfg.eval_threshold < 0.0 || cfg.eval_threshold > 1.0)
      throw ValidationError("config: loop.eval_threshold: outside [0, 1], got " +
                            value);
  }
  else if (key == "benchmark.contrastive_epochs")
    cfg.benchmark.contrastive_epochs = parse_int(key, value);
  else if (key == "benchmark.proxy_epochs")
    cfg.benchmark.proxy_epochs = parse_int(key, value);
  else if (key == "benchmark.eval_interval")
    cfg.benchmark.eval_interval = parse_int(key, value);
  else
    throw ValidationError("config: unknown key '" + key + "'");
}

RunConfig parse_config_text(const std::string& text, const std::string& profile) {
  RunConfig cfg = default_config(profile);
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config: line " + std::to_string(lineno) +
                            ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "profile") {
      if (value != profile) cfg = default_config(value);
      continue;
    }
    apply_override(cfg, key, value);
  }
  validate(cfg);
  return cfg;
}

RunConfig parse_config_file(const std::string& path, const std::string& profile) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), profile);
}

std::string emit_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "profile = " << cfg.profile << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "output_dir = " << cfg.output_dir << "\n";
  out << "strategies = " << fmt_strategies(cfg.strategies) << "\n";
  out << "repetitions = " << cfg.repetitions << "\n";
  out << "run_benchmark = " << (cfg.with_benchmark ? "true" : "false") << "\n";
  out << "checkpoints = " << (cfg.checkpoints ? "true" : "false") << "\n";
  if (!cfg.dataset_path.empty()) out << "dataset.path = " << cfg.dataset_path << "\n";
  out << "dataset.pool_size = " << cfg.dataset.pool_size << "\n";
  out << "dataset.positive_fraction = " << fmt_double(cfg.dataset.positive_fraction) << "\n";
  out << "dataset.negative_subclusters = " << cfg.dataset.negative_subclusters << "\n";
  out << "dataset.patch_side = " << cfg.dataset.patch_side << "\n";
  out << "dataset.cluster_separation = " << fmt_double(cfg.dataset.cluster_separation) << "\n";
  out << "dataset.noise_scale = " << fmt_double(cfg.dataset.noise_scale) << "\n";
  out << "split.labeled_size = " << cfg.labeled_size << "\n";
  out << "split.test_size = " << cfg.test_size << "\n";
  out << "split.stratify_labeled = " << (cfg.stratify_labeled ? "true" : "false") << "\n";
  out << "augment.noise_sigma = " << fmt_double(cfg.augment.noise_sigma) << "\n";
  out << "augment.max_shift = " << cfg.augment.max_shift << "\n";
  out << "augment.flip_horizontal = " << (cfg.augment.flip_horizontal ? "true" : "false") << "\n";
  out << "augment.flip_vertical = " << (cfg.augment.flip_vertical ? "true" : "false") << "\n";
  out << "augment.rotate_90 = " << (cfg.augment.rotate_90 ? "true" : "false") << "\n";
  out << "augment.intensity_jitter = " << fmt_double(cfg.augment.intensity_jitter) << "\n";
  out << "encoder.hidden_dims = " << fmt_int_list(cfg.encoder.hidden_dims) << "\n";
  out << "encoder.feature_dim = " << cfg.encoder.feature_dim << "\n";
  out << "encoder.head_dims = " << fmt_int_list(cfg.encoder.head_dims) << "\n";
  out << "contrastive.temperature = " << fmt_double(cfg.contrastive.temperature) << "\n";
  out << "contrastive.batch_size = " << cfg.contrastive.batch_size << "\n";
  out << "contrastive.epochs = " << cfg.contrastive.epochs << "\n";
  out << "contrastive.lr = " << fmt_double(cfg.contrastive.lr) << "\n";
  out << "proxy.lr = " << fmt_double(cfg.proxy.lr) << "\n";
  out << "proxy.epochs = " << cfg.proxy.epochs << "\n";
  out << "proxy.batch_size = " << cfg.proxy.batch_size << "\n";
  out << "loop.budget = " << cfg.budget << "\n";
  out << "loop.iterations = " << cfg.iterations << "\n";
  out << "loop.candidate_cap = " << cfg.candidate_cap << "\n";
  out << "loop.eval_threshold = " << fmt_double(cfg.eval_threshold) << "\n";
  out << "benchmark.contrastive_epochs = " << cfg.benchmark.contrastive_epochs << "\n";
  out << "benchmark.proxy_epochs = " << cfg.benchmark.proxy_epochs << "\n";
  out << "benchmark.eval_interval = " << cfg.benchmark.eval_interval << "\n";
  return out.str();
}

void validate(const RunConfig& cfg) {
  if (cfg.strategies.empty())
    throw ValidationError("config: strategies: at least one strategy required");
  if (cfg.repetitions < 1)
    throw ValidationError("config: repetitions: must be >= 1");
  if (cfg.output_dir.empty())
    throw ValidationError("config: output_dir: must not be empty");
  if (cfg.labeled_size < 1) throw ValidationError("config: split.labeled_size: must be >= 1");
  if (cfg.test_size < 1) throw ValidationError("config: split.test_size: must be >= 1");
  // Deep validation (ranges, consistency) reuses the module validators on a
  // synthesized LoopConfig so every error message names the same rules.
  LoopConfig probe = loop_config(cfg, cfg.strategies.front(), 0);
  const long pool = cfg.dataset.pool_size - cfg.labeled_size - cfg.test_size;
  if (pool < 1)
    throw ValidationError("config: split sizes leave no unlabeled pool");
  validate(probe, static_cast<std::size_t>(pool));
  validate(probe.augment, cfg.dataset.patch_side);
  if (cfg.benchmark.eval_interval < 1 ||
      cfg.benchmark.proxy_epochs < cfg.benchmark.eval_interval ||
      cfg.benchmark.proxy_epochs % cfg.benchmark.eval_interval != 0)
    throw ValidationError(
        "config: benchmark.proxy_epochs must be a positive multiple of benchmark.eval_interval");
  if (cfg.benchmark.contrastive_epochs < 0)
    throw ValidationError("config: benchmark.contrastive_epochs: must be >= 0");
}

LoopConfig loop_config(const RunConfig& cfg, SamplerKind kind, std::uint64_t run_seed) {
  LoopConfig lc;
  lc.budget = cfg.budget;
  lc.iterations = cfg.iterations;
  lc.sampler = kind;
  lc.candidate_cap = cfg.candidate_cap;
  lc.eval_threshold = cfg.eval_threshold;
  lc.encoder = cfg.encoder;
  lc.encoder.input_dim = cfg.dataset.patch_side * cfg.dataset.patch_side;
  lc.contrastive = cfg.contrastive;
  lc.proxy = cfg.proxy;
  lc.augment = cfg.augment;
  lc.seed = run_seed;
  return lc;
}

}  // namespace casl
