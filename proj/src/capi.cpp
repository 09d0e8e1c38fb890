#include "casl.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "casl/config.hpp"
#include "casl/error.hpp"
#include "casl/runner.hpp"

struct casl_config {
  casl::RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

casl_status fail(casl_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

casl_status ok() {
  g_last_error.clear();
  return CASL_OK;
}

// Maps the C++ error hierarchy onto status codes; every entry point funnels
// through here so no exception crosses the C boundary.
template <typename Fn>
casl_status guarded(Fn&& fn) {
  try {
    fn();
    return ok();
  } catch (const casl::IoError& e) {
    return fail(CASL_ERROR_IO, e.what());
  } catch (const casl::ValidationError& e) {
    return fail(CASL_ERROR_VALIDATION, e.what());
  } catch (const std::exception& e) {
    return fail(CASL_ERROR_INTERNAL, e.what());
  } catch (...) {
    return fail(CASL_ERROR_INTERNAL, "unknown error");
  }
}

}  // namespace

extern "C" {

const char* casl_version(void) { return "0.1.0"; }

const char* casl_last_error(void) { return g_last_error.c_str(); }

casl_status casl_config_create(const char* profile, casl_config** out) {
  if (!out) return fail(CASL_ERROR_INVALID_ARGUMENT, "out is null");
  *out = nullptr;
  return guarded([&]() {
    auto handle = new casl_config{casl::default_config(profile ? profile : "desk")};
    *out = handle;
  });
}

casl_status casl_config_load(casl_config* cfg, const char* path) {
  if (!cfg) return fail(CASL_ERROR_INVALID_ARGUMENT, "config is null");
  if (!path) return fail(CASL_ERROR_INVALID_ARGUMENT, "path is null");
  return guarded([&]() { cfg->cfg = casl::parse_config_file(path, cfg->cfg.profile); });
}

casl_status casl_config_set(casl_config* cfg, const char* key, const char* value) {
  if (!cfg) return fail(CASL_ERROR_INVALID_ARGUMENT, "config is null");
  if (!key || !value) return fail(CASL_ERROR_INVALID_ARGUMENT, "key or value is null");
  return guarded([&]() { casl::apply_override(cfg->cfg, key, value); });
}

casl_status casl_config_emit(const casl_config* cfg, char** out) {
  if (!cfg) return fail(CASL_ERROR_INVALID_ARGUMENT, "config is null");
  if (!out) return fail(CASL_ERROR_INVALID_ARGUMENT, "out is null");
  *out = nullptr;
  return guarded([&]() {
    const std::string text = casl::emit_config(cfg->cfg);
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

void casl_string_free(char* s) { std::free(s); }

void casl_config_destroy(casl_config* cfg) { delete cfg; }

casl_status casl_gen_data(const casl_config* cfg, const char* out_path,
                          const char* csv_path) {
  if (!cfg) return fail(CASL_ERROR_INVALID_ARGUMENT, "config is null");
  if (!out_path) return fail(CASL_ERROR_INVALID_ARGUMENT, "out_path is null");
  return guarded([&]() {
    casl::cmd_gen_data(cfg->cfg, out_path, csv_path ? csv_path : "");
  });
}

casl_status casl_run(const casl_config* cfg) {
  if (!cfg) return fail(CASL_ERROR_INVALID_ARGUMENT, "config is null");
  return guarded([&]() { casl::cmd_run(cfg->cfg); });
}

casl_status casl_report(const char* log_dir, const char* out_dir) {
  if (!log_dir || !out_dir)
    return fail(CASL_ERROR_INVALID_ARGUMENT, "log_dir or out_dir is null");
  return guarded([&]() { casl::cmd_report(log_dir, out_dir); });
}

}  // extern "C"
