#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "longlab/longlab.h"

namespace {

// 4x4 flat lattice carrying an affine height field, in the library text
// format; affine data is reproduced exactly so the residual is roundoff.
const char* kGraphFixture =
    "minimal-graph 1\n"
    "m 2\n"
    "shape 4 4\n"
    "origin 0 0\n"
    "h 0.5\n"
    "mask\n"
    "1111\n"
    "1111\n"
    "1111\n"
    "1111\n"
    "heights\n"
    "0\n0.25\n0.5\n0.75\n"
    "0.125\n0.375\n0.625\n0.875\n"
    "0.25\n0.5\n0.75000000000000033\n1\n"
    "0.375\n0.625\n0.875\n1.125\n";

std::filesystem::path fresh_dir(const char* tag) {
  auto p = std::filesystem::temp_directory_path() / (std::string("longlab_capi_") + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("version string is present") {
  REQUIRE(ll_version() != nullptr);
  CHECK(std::strlen(ll_version()) > 0);
}

TEST_CASE("running a config from text exposes records through the handle") {
  ll_report* rep = nullptr;
  REQUIRE(ll_run_config_text("kind = shrink-chain\n", -1, 0.0, &rep) == LL_OK);
  REQUIRE(rep != nullptr);
  CHECK(ll_report_all_pass(rep) == 1);
  CHECK(std::string(ll_report_kind(rep)) == "shrink-chain");
  CHECK(std::strlen(ll_report_config_hash(rep)) == 16);

  size_t n = ll_report_record_count(rep);
  REQUIRE(n == 3);
  bool saw_ratio = false;
  for (size_t i = 0; i < n; ++i) {
    double measured = 0.0, reference = 0.0, tolerance = 0.0;
    int pass = ll_report_record_values(rep, i, &measured, &reference, &tolerance);
    CHECK(pass == 1);
    if (std::string(ll_report_record_name(rep, i)) == "shrink-chain.radius-ratio") {
      saw_ratio = true;
      CHECK(measured == doctest::Approx(0.0631).epsilon(2e-3));
      CHECK(reference == 0.0631);
      CHECK(tolerance == 1e-4);
    }
  }
  CHECK(saw_ratio);

  // out-of-range access is a soft failure, not a crash
  CHECK(ll_report_record_name(rep, n) == nullptr);
  CHECK(ll_report_record_values(rep, n, nullptr, nullptr, nullptr) == -1);
  ll_report_free(rep);
}

TEST_CASE("seed and tolerance overrides land in the effective config") {
  const char* cfg = "kind = bernstein-audit\nseed = 1\n";
  ll_report* a = nullptr;
  ll_report* b = nullptr;
  REQUIRE(ll_run_config_text(cfg, -1, 0.0, &a) == LL_OK);
  REQUIRE(ll_run_config_text(cfg, 99, 0.0, &b) == LL_OK);
  CHECK(std::string(ll_report_config_hash(a)) != std::string(ll_report_config_hash(b)));
  ll_report_free(a);
  ll_report_free(b);

  ll_report* scaled = nullptr;
  REQUIRE(ll_run_config_text(cfg, -1, 1000.0, &scaled) == LL_OK);
  double tolerance = 0.0;
  bool found = false;
  for (size_t i = 0; i < ll_report_record_count(scaled); ++i)
    if (std::string(ll_report_record_name(scaled, i)) == "bernstein-audit.partial-integral") {
      ll_report_record_values(scaled, i, nullptr, nullptr, &tolerance);
      found = true;
    }
  CHECK(found);
  CHECK(tolerance == doctest::Approx(1.0));
  ll_report_free(scaled);
}

TEST_CASE("failures return status codes and keep a message") {
  ll_report* rep = nullptr;
  CHECK(ll_run_config_text("kind = nonsense\n", -1, 0.0, &rep) == LL_ERR_CONFIG);
  CHECK(rep == nullptr);
  CHECK(std::string(ll_last_error()).find("nonsense") != std::string::npos);

  CHECK(ll_run_config_text(nullptr, -1, 0.0, &rep) == LL_ERR_INVALID_ARGUMENT);
  CHECK(ll_run_config_text("kind = hessians\n", -1, 0.0, nullptr) == LL_ERR_INVALID_ARGUMENT);

  CHECK(ll_run_config_file("/nowhere/none.cfg", -1, 0.0, &rep) == LL_ERR_IO);
  CHECK(std::strlen(ll_last_error()) > 0);

  CHECK(ll_report_load("/nowhere/none.json", &rep) == LL_ERR_IO);

  // accessors tolerate null handles
  CHECK(ll_report_all_pass(nullptr) == -1);
  CHECK(ll_report_record_count(nullptr) == 0);
  CHECK(ll_graph_node_count(nullptr) == -1);
}

TEST_CASE("reports written through the api load back and plot") {
  auto dir = fresh_dir("report");
  ll_report* rep = nullptr;
  REQUIRE(ll_run_config_text("kind = harnack-sweep\ngrid = 24\nL = 1 4\n", -1, 0.0, &rep) == LL_OK);
  REQUIRE(ll_report_write(rep, dir.string().c_str()) == LL_OK);
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "report.csv"));

  ll_report* loaded = nullptr;
  REQUIRE(ll_report_load((dir / "report.json").string().c_str(), &loaded) == LL_OK);
  CHECK(ll_report_record_count(loaded) == ll_report_record_count(rep));
  CHECK(std::string(ll_report_config_hash(loaded)) == ll_report_config_hash(rep));

  int files = 0;
  REQUIRE(ll_report_plots(loaded, (dir / "plots").string().c_str(), &files) == LL_OK);
  CHECK(files == 2);

  ll_report_free(loaded);
  ll_report_free(rep);
  std::filesystem::remove_all(dir);
}

TEST_CASE("graph handles load, inspect, and save the text format") {
  auto dir = fresh_dir("graph");
  {
    std::ofstream out(dir / "g.txt", std::ios::binary);
    out << kGraphFixture;
  }
  ll_graph* g = nullptr;
  REQUIRE(ll_graph_load((dir / "g.txt").string().c_str(), &g) == LL_OK);
  REQUIRE(g != nullptr);
  CHECK(ll_graph_node_count(g) == 16);
  CHECK(ll_graph_residual(g) >= 0.0);
  CHECK(ll_graph_residual(g) <= 1e-12);

  REQUIRE(ll_graph_save(g, (dir / "copy.txt").string().c_str()) == LL_OK);
  ll_graph* copy = nullptr;
  REQUIRE(ll_graph_load((dir / "copy.txt").string().c_str(), &copy) == LL_OK);
  CHECK(ll_graph_node_count(copy) == 16);
  ll_graph_free(copy);
  ll_graph_free(g);

  CHECK(ll_graph_load((dir / "absent.txt").string().c_str(), &g) == LL_ERR_IO);
  CHECK(ll_graph_save(nullptr, "x") == LL_ERR_INVALID_ARGUMENT);
  std::filesystem::remove_all(dir);
}
