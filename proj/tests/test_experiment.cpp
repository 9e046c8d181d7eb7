#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "experiment.hpp"

using namespace longlab;

namespace {

struct Thrown {
  Err kind;
  std::string what;
};

Thrown thrown(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return {e.kind(), e.what()};
  }
  FAIL("expected an Error");
  return {Err::InvalidArgument, ""};
}

const RunRecord& record(const RunReport& rep, const std::string& name) {
  for (const RunRecord& r : rep.records)
    if (r.name == name) return r;
  FAIL("missing record ", name);
  return rep.records.front();
}

std::filesystem::path fresh_dir(const char* tag) {
  auto p = std::filesystem::temp_directory_path() / (std::string("longlab_test_") + tag);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing accepts comments, blanks, and key-value lines") {
  ExperimentConfig cfg = parse_config_text(
      "# header comment\n"
      "\n"
      "kind = hessians\n"
      "  seed = 42  \n"
      "tolerance_scale = 2.5\n"
      "samples = 10\n"
      "fd_step = 0.001\n");
  CHECK(cfg.kind == "hessians");
  CHECK(cfg.seed == 42);
  CHECK(cfg.tolerance_scale == 2.5);
  CHECK(cfg.numbers.at("samples") == 10.0);
  CHECK(cfg.numbers.at("fd_step") == 0.001);
  CHECK(cfg.lists.empty());
}

TEST_CASE("list-valued keys keep every entry, even a single one") {
  ExperimentConfig cfg = parse_config_text("kind = harnack-sweep\nL = 1 4 16\n");
  CHECK(cfg.lists.at("L") == std::vector<double>{1.0, 4.0, 16.0});
  ExperimentConfig one = parse_config_text("kind = minimal-graph\nh = 0.05 0.025\nt_samples = 31\n");
  CHECK(one.lists.at("t_samples") == std::vector<double>{31.0});
}

TEST_CASE("config errors carry the offending field path") {
  Thrown t = thrown([] { parse_config_text("seed = 1\n"); });
  CHECK(t.kind == Err::ConfigError);
  CHECK(t.what.find("kind") != std::string::npos);

  t = thrown([] { parse_config_text("kind = nonsense\n"); });
  CHECK(t.kind == Err::ConfigError);
  CHECK(t.what.find("nonsense") != std::string::npos);

  // a key that belongs to a different experiment is rejected with a path
  t = thrown([] { parse_config_text("kind = hessians\ngrid = 4\n"); });
  CHECK(t.kind == Err::ConfigError);
  CHECK(t.what.find("hessians.grid") != std::string::npos);

  // under kind=all the union of keys is legal, inventions are not
  CHECK_NOTHROW(parse_config_text("kind = all\ngrid = 32\n"));
  t = thrown([] { parse_config_text("kind = all\nbogus = 1\n"); });
  CHECK(t.what.find("all.bogus") != std::string::npos);

  t = thrown([] { parse_config_text("kind = hessians\nsamples\n"); });
  CHECK(t.what.find("line 2") != std::string::npos);

  t = thrown([] { parse_config_text("kind = hessians\nsamples = ten\n"); });
  CHECK(t.what.find("samples") != std::string::npos);

  t = thrown([] { parse_config_text("kind = hessians\nseed = -3\n"); });
  CHECK(t.what.find("seed") != std::string::npos);

  t = thrown([] { parse_config_text("kind = hessians\nsamples = 1\nsamples = 2\n"); });
  CHECK(t.what.find("duplicate") != std::string::npos);

  t = thrown([] { parse_config_text("kind = hessians\nfd_step = 1 2\n"); });
  CHECK(t.what.find("single") != std::string::npos);

  t = thrown([] { parse_config_text("kind = hessians\ntolerance_scale = 0\n"); });
  CHECK(t.what.find("tolerance_scale") != std::string::npos);
}

TEST_CASE("canonical text is sorted and the hash is stable") {
  ExperimentConfig a = parse_config_text("kind = hessians\nsamples = 10\nfd_step = 0.001\n");
  ExperimentConfig b = parse_config_text("fd_step = 0.001\nkind = hessians\nsamples = 10\n");
  CHECK(canonical_config_text(a) == canonical_config_text(b));
  CHECK(canonical_config_text(a) ==
        "kind = hessians\nseed = 1\ntolerance_scale = 1\nfd_step = 0.001\nsamples = 10\n");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);

  // frozen digest so canonicalization cannot drift silently
  ExperimentConfig c = parse_config_text("kind = shrink-chain\nseed = 1\n");
  CHECK(config_hash(c) == "eafa27edbec6db4c");

  ExperimentConfig d = parse_config_text("kind = shrink-chain\nseed = 2\n");
  CHECK(config_hash(d) != config_hash(c));
}

TEST_CASE("shrink-chain experiment reproduces the worked radius ratio") {
  RunReport rep = run_experiment(parse_config_text("kind = shrink-chain\n"));
  CHECK(rep.all_pass());
  CHECK(rep.records.size() == 3);
  CHECK(record(rep, "shrink-chain.radius-ratio").measured ==
        doctest::Approx(0.06309468015).epsilon(1e-9));
  CHECK(record(rep, "shrink-chain.grid-monotone-violations").measured == 0.0);
  REQUIRE(rep.series.size() == 1);
  CHECK(rep.series[0].points.size() == 10);
}

TEST_CASE("bernstein-audit experiment separates slow from fast growth") {
  RunReport rep = run_experiment(parse_config_text("kind = bernstein-audit\n"));
  CHECK(rep.all_pass());
  CHECK(record(rep, "bernstein-audit.partial-integral").measured ==
        doctest::Approx(2.0).epsilon(1e-6));
  CHECK(record(rep, "bernstein-audit.slow-verdict").measured == 1.0);
  CHECK(record(rep, "bernstein-audit.fast-verdict").measured == 1.0);
  CHECK(record(rep, "bernstein-audit.constant-verdict").measured == 1.0);
  CHECK(rep.series.size() == 2);
}

TEST_CASE("hessian experiment passes its oracle records at desk scale") {
  RunReport rep =
      run_experiment(parse_config_text("kind = hessians\nsamples = 50\ncap_points = 50\n"));
  CHECK(rep.all_pass());
  CHECK(rep.records.size() == 11);
  CHECK(record(rep, "hessians.cap-convexity").measured ==
        doctest::Approx(0.771525301).epsilon(1e-8));
  CHECK(record(rep, "hessians.level-closed-S2").tolerance == 1e-12);
  CHECK(record(rep, "hessians.angular-S4").tolerance == 1e-6);

  // a different seed moves the measurements but not the verdicts
  RunReport other =
      run_experiment(parse_config_text("kind = hessians\nsamples = 50\ncap_points = 50\nseed = 9\n"));
  CHECK(other.all_pass());
  CHECK(other.records[0].measured != rep.records[0].measured);
}

TEST_CASE("harnack sweep fits the square-root exponent and halves oscillation") {
  RunReport rep = run_experiment(parse_config_text("kind = harnack-sweep\ngrid = 32\nL = 1 16\n"));
  CHECK(rep.all_pass());
  CHECK(record(rep, "harnack-sweep.exponent").measured ==
        doctest::Approx(0.4425662093).epsilon(1e-8));
  CHECK(record(rep, "harnack-sweep.linear-decay").measured ==
        doctest::Approx(0.4666666667).epsilon(1e-8));
  CHECK(record(rep, "harnack-sweep.decay-L1").measured < 1.0);
  CHECK(record(rep, "harnack-sweep.decay-L16").measured < 1.0);
  REQUIRE(rep.series.size() == 2);
  CHECK(rep.series[0].name == "oscillation-decay");
  CHECK(rep.series[0].points.size() == 4);
  CHECK(rep.series[1].name == "harnack-ratio");
  CHECK(rep.series[1].points.size() == 2);
}

TEST_CASE("harmonic map experiment satisfies the weak identity within bound") {
  RunReport rep = run_experiment(
      parse_config_text("kind = harmonic-map\ngrid = 16\ntest_functions = 10\nflow_tol = 1e-8\n"));
  CHECK(rep.all_pass());
  CHECK(record(rep, "harmonic-map.final-displacement").measured <= 1e-8);
  CHECK(record(rep, "harmonic-map.energy-monotone-violations").measured == 0.0);
  CHECK(record(rep, "harmonic-map.weak-residual-over-bound").measured ==
        doctest::Approx(0.2205248198).epsilon(1e-6));
  REQUIRE(rep.series.size() == 1);
  CHECK(rep.series[0].name == "flow-energy");
  CHECK(rep.series[0].points.size() >= 2);
}

TEST_CASE("minimal graph experiment normalizes order by the spacing ratio") {
  RunReport rep = run_experiment(
      parse_config_text("kind = minimal-graph\nh = 0.05 0.0125\nt_samples = 31 61\n"));
  CHECK(rep.all_pass());
  CHECK(record(rep, "minimal-graph.convergence-order").measured ==
        doctest::Approx(1.850483859).epsilon(1e-8));
  CHECK(record(rep, "minimal-graph.waist-curvature").measured ==
        doctest::Approx(0.5003303988).epsilon(1e-8));
  CHECK(record(rep, "minimal-graph.waist-curvature").tolerance == doctest::Approx(0.0625));
  CHECK(record(rep, "minimal-graph.simons-order").measured ==
        doctest::Approx(1.961855574).epsilon(1e-8));
  CHECK(record(rep, "minimal-graph.affine-height").measured <= 1e-12);
  CHECK(rep.series.size() == 2);

  Thrown t = thrown(
      [] { run_experiment(parse_config_text("kind = minimal-graph\nh = 0.05 0.03\n")); });
  CHECK(t.kind == Err::ConfigError);
  CHECK(t.what.find("minimal-graph.h") != std::string::npos);
}

TEST_CASE("geodesic experiment hits the blocking arcs for every sample") {
  RunReport rep = run_experiment(parse_config_text("kind = appendix-geodesics\ncircles = 5000\n"));
  CHECK(rep.all_pass());
  CHECK(record(rep, "appendix-geodesics.hit-rate").measured == 1.0);
  CHECK(rep.series.empty());
}

TEST_CASE("tolerance scale stretches the recorded slack") {
  RunReport rep =
      run_experiment(parse_config_text("kind = bernstein-audit\ntolerance_scale = 1000\n"));
  CHECK(record(rep, "bernstein-audit.partial-integral").tolerance == doctest::Approx(1.0));
}

TEST_CASE("identical configs reproduce identical report bytes") {
  ExperimentConfig cfg = parse_config_text("kind = harnack-sweep\ngrid = 24\nL = 1 4\nseed = 3\n");
  RunReport a = run_experiment(cfg);
  RunReport b = run_experiment(cfg);
  CHECK(report_to_json(a) == report_to_json(b));
  CHECK(report_to_csv(a) == report_to_csv(b));
  CHECK(a.config_hash == config_hash(cfg));
}

TEST_CASE("reports survive the json round trip byte for byte") {
  RunReport rep = run_experiment(parse_config_text("kind = shrink-chain\n"));
  std::string json = report_to_json(rep);
  RunReport back = report_from_json(json);
  CHECK(report_to_json(back) == json);
  CHECK(back.kind == rep.kind);
  CHECK(back.records.size() == rep.records.size());
  CHECK(back.series.size() == rep.series.size());

  Thrown t = thrown([] { report_from_json("{ not json"); });
  CHECK(t.kind == Err::IoError);
  t = thrown([] { report_from_json("{\"kind\": \"x\"}"); });
  CHECK(t.kind == Err::IoError);
}

TEST_CASE("report and plot files land in the output directory") {
  auto dir = fresh_dir("reports");
  RunReport rep = run_experiment(parse_config_text("kind = harnack-sweep\ngrid = 24\nL = 1 4\n"));
  write_report_files(rep, dir.string());
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "report.csv"));

  RunReport loaded = load_report((dir / "report.json").string());
  CHECK(report_to_json(loaded) == report_to_json(rep));

  std::ifstream csv(dir / "report.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "record,measured,reference,tolerance,pass");

  CHECK(write_plot_files(rep, (dir / "plots").string()) == 2);
  CHECK(std::filesystem::exists(dir / "plots" / "harnack-sweep-oscillation-decay.svg"));
  CHECK(std::filesystem::exists(dir / "plots" / "harnack-sweep-harnack-ratio.svg"));

  // a report with no series warns and writes nothing
  RunReport bare = run_experiment(parse_config_text("kind = appendix-geodesics\ncircles = 10\n"));
  CHECK(write_plot_files(bare, (dir / "plots").string()) == 0);

  Thrown t = thrown([&] { load_report((dir / "missing.json").string()); });
  CHECK(t.kind == Err::IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("the merged run covers every experiment in name order") {
  ExperimentConfig cfg = parse_config_text(
      "kind = all\nseed = 5\ncircles = 200\nsamples = 10\ncap_points = 10\ngrid = 16\n"
      "L = 1 4\ntest_functions = 3\nflow_tol = 1e-7\nh = 0.05 0.025\nt_samples = 31\n"
      "grid_steps = 4\npanels = 64\n");
  RunReport rep = run_experiment(cfg);
  CHECK(rep.kind == "all");
  size_t seen = 0;
  std::string prev;
  for (const char* kind : kExperimentKinds) {
    bool found = false;
    for (const RunRecord& r : rep.records)
      if (r.name.rfind(std::string(kind) + ".", 0) == 0) found = true;
    CHECK(found);
    if (found) ++seen;
    if (!prev.empty()) CHECK(prev < kind);
    prev = kind;
  }
  CHECK(seen == 7);
  // records arrive grouped by experiment, in experiment name order
  std::string last_kind;
  for (const RunRecord& r : rep.records) {
    std::string k = r.name.substr(0, r.name.find('.'));
    if (k != last_kind) {
      CHECK(last_kind < k);
      last_kind = k;
    }
  }
}
