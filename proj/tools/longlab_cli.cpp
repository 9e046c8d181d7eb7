#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "longlab/longlab.h"

namespace {

int report_error(const char* action, ll_status st) {
  std::fprintf(stderr, "error: %s failed (status %d): %s\n", action, int(st), ll_last_error());
  return 2;
}

int print_records(const ll_report* rep) {
  size_t n = ll_report_record_count(rep);
  size_t passed = 0;
  for (size_t i = 0; i < n; ++i) {
    double measured = 0.0, reference = 0.0, tolerance = 0.0;
    int pass = ll_report_record_values(rep, i, &measured, &reference, &tolerance);
    if (pass == 1) ++passed;
    std::printf("[%s] %-48s measured %.10g  reference %.10g  tol %.3g\n",
                pass == 1 ? "PASS" : "FAIL", ll_report_record_name(rep, i), measured, reference,
                tolerance);
  }
  std::printf("%zu/%zu checks passed  kind=%s  config=%s\n", passed, n, ll_report_kind(rep),
              ll_report_config_hash(rep));
  return passed == n ? 0 : 1;
}

int cmd_run(const std::string& config, const std::string& out_dir, std::int64_t seed,
            double tol_scale) {
  ll_report* rep = nullptr;
  ll_status st = ll_run_config_file(config.c_str(), seed, tol_scale, &rep);
  if (st != LL_OK) return report_error("run", st);
  int rc = print_records(rep);
  if (!out_dir.empty()) {
    st = ll_report_write(rep, out_dir.c_str());
    if (st != LL_OK) {
      ll_report_free(rep);
      return report_error("report write", st);
    }
    int files = 0;
    st = ll_report_plots(rep, out_dir.c_str(), &files);
    if (st != LL_OK) {
      ll_report_free(rep);
      return report_error("plot write", st);
    }
    std::printf("wrote report.json, report.csv, and %d plot file%s to %s\n", files,
                files == 1 ? "" : "s", out_dir.c_str());
  }
  ll_report_free(rep);
  return rc;
}

int cmd_plot(const std::string& report_path, const std::string& out_dir) {
  ll_report* rep = nullptr;
  ll_status st = ll_report_load(report_path.c_str(), &rep);
  if (st != LL_OK) return report_error("report load", st);
  int files = 0;
  st = ll_report_plots(rep, out_dir.c_str(), &files);
  ll_report_free(rep);
  if (st != LL_OK) return report_error("plot", st);
  std::printf("wrote %d plot file%s to %s\n", files, files == 1 ? "" : "s", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"longitude laboratory experiment runner"};
  app.require_subcommand(1);

  std::string config, out_dir, report_path, plot_dir = ".";
  std::int64_t seed = -1;
  double tol_scale = 0.0;

  CLI::App* run = app.add_subcommand("run", "run an experiment config and print its checks");
  run->add_option("--config", config, "experiment config file")->required();
  run->add_option("--out", out_dir, "directory for report.json and report.csv");
  run->add_option("--seed", seed, "override the config seed (nonnegative)");
  run->add_option("--tolerance-scale", tol_scale, "override the config tolerance scale");

  CLI::App* plot = app.add_subcommand("plot", "render SVG plots from a saved report");
  plot->add_option("--report", report_path, "path to a report.json")->required();
  plot->add_option("--out", plot_dir, "directory for the SVG files");

  CLI::App* version = app.add_subcommand("version", "print the library version");

  CLI11_PARSE(app, argc, argv);

  if (version->parsed()) {
    std::printf("%s\n", ll_version());
    return 0;
  }
  if (run->parsed()) return cmd_run(config, out_dir, seed, tol_scale);
  return cmd_plot(report_path, plot_dir);
}
