#include "longlab/longlab.h"

#include <exception>
#include <string>

#include "common.hpp"
#include "experiment.hpp"
#include "mingraph.hpp"

struct ll_report {
  longlab::RunReport r;
};

struct ll_graph {
  longlab::MinimalGraph g;
};

namespace {

thread_local std::string t_last_error;

ll_status status_of(longlab::Err kind) {
  using longlab::Err;
  switch (kind) {
    case Err::ConfigError:
      return LL_ERR_CONFIG;
    case Err::IoError:
      return LL_ERR_IO;
    case Err::InvalidArgument:
    case Err::InvalidRange:
    case Err::InvalidDimension:
      return LL_ERR_INVALID_ARGUMENT;
    case Err::SingularSystem:
    case Err::NonConvergence:
    case Err::NewtonDiverged:
      return LL_ERR_NUMERIC;
    default:
      return LL_ERR_DOMAIN;
  }
}

ll_status fail_invalid(const char* msg) {
  t_last_error = msg;
  return LL_ERR_INVALID_ARGUMENT;
}

template <typename Fn>
ll_status guarded(Fn&& fn) {
  try {
    fn();
    return LL_OK;
  } catch (const longlab::Error& e) {
    t_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return LL_ERR_UNKNOWN;
  } catch (...) {
    t_last_error = "unidentified failure";
    return LL_ERR_UNKNOWN;
  }
}

ll_status run_config(longlab::ExperimentConfig cfg, int64_t seed_override, double tolerance_scale,
                     ll_report** out) {
  return guarded([&] {
    if (seed_override >= 0) cfg.seed = std::uint64_t(seed_override);
    if (tolerance_scale > 0.0) cfg.tolerance_scale = tolerance_scale;
    *out = new ll_report{longlab::run_experiment(cfg)};
  });
}

}  // namespace

extern "C" {

const char* ll_version(void) { return "0.1.0"; }

const char* ll_last_error(void) { return t_last_error.c_str(); }

ll_status ll_run_config_file(const char* path, int64_t seed_override, double tolerance_scale,
                             ll_report** out) {
  if (!path || !out) return fail_invalid("ll_run_config_file: null argument");
  *out = nullptr;
  longlab::ExperimentConfig cfg;
  ll_status st = guarded([&] { cfg = longlab::load_config(path); });
  if (st != LL_OK) return st;
  return run_config(std::move(cfg), seed_override, tolerance_scale, out);
}

ll_status ll_run_config_text(const char* text, int64_t seed_override, double tolerance_scale,
                             ll_report** out) {
  if (!text || !out) return fail_invalid("ll_run_config_text: null argument");
  *out = nullptr;
  longlab::ExperimentConfig cfg;
  ll_status st = guarded([&] { cfg = longlab::parse_config_text(text); });
  if (st != LL_OK) return st;
  return run_config(std::move(cfg), seed_override, tolerance_scale, out);
}

ll_status ll_report_load(const char* json_path, ll_report** out) {
  if (!json_path || !out) return fail_invalid("ll_report_load: null argument");
  *out = nullptr;
  return guarded([&] { *out = new ll_report{longlab::load_report(json_path)}; });
}

ll_status ll_report_write(const ll_report* r, const char* out_dir) {
  if (!r || !out_dir) return fail_invalid("ll_report_write: null argument");
  return guarded([&] { longlab::write_report_files(r->r, out_dir); });
}

ll_status ll_report_plots(const ll_report* r, const char* out_dir, int* files_written) {
  if (!r || !out_dir) return fail_invalid("ll_report_plots: null argument");
  return guarded([&] {
    int n = longlab::write_plot_files(r->r, out_dir);
    if (files_written) *files_written = n;
  });
}

const char* ll_report_kind(const ll_report* r) { return r ? r->r.kind.c_str() : nullptr; }

const char* ll_report_config_hash(const ll_report* r) {
  return r ? r->r.config_hash.c_str() : nullptr;
}

int ll_report_all_pass(const ll_report* r) { return r ? (r->r.all_pass() ? 1 : 0) : -1; }

size_t ll_report_record_count(const ll_report* r) { return r ? r->r.records.size() : 0; }

const char* ll_report_record_name(const ll_report* r, size_t i) {
  if (!r || i >= r->r.records.size()) return nullptr;
  return r->r.records[i].name.c_str();
}

int ll_report_record_values(const ll_report* r, size_t i, double* measured, double* reference,
                            double* tolerance) {
  if (!r || i >= r->r.records.size()) return -1;
  const longlab::RunRecord& rec = r->r.records[i];
  if (measured) *measured = rec.measured;
  if (reference) *reference = rec.reference;
  if (tolerance) *tolerance = rec.tolerance;
  return rec.pass ? 1 : 0;
}

void ll_report_free(ll_report* r) { delete r; }

ll_status ll_graph_load(const char* path, ll_graph** out) {
  if (!path || !out) return fail_invalid("ll_graph_load: null argument");
  *out = nullptr;
  return guarded([&] { *out = new ll_graph{longlab::load_minimal_graph(path)}; });
}

ll_status ll_graph_save(const ll_graph* g, const char* path) {
  if (!g || !path) return fail_invalid("ll_graph_save: null argument");
  return guarded([&] { longlab::save_minimal_graph(g->g, path); });
}

int64_t ll_graph_node_count(const ll_graph* g) {
  if (!g) return -1;
  int64_t n = 0;
  for (char a : g->g.dom.active) n += a ? 1 : 0;
  return n;
}

double ll_graph_residual(const ll_graph* g) { return g ? g->g.residual : -1.0; }

void ll_graph_free(ll_graph* g) { delete g; }

}  // extern "C"
