#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "doctest.h"
#include "elliptic.hpp"
#include "graph.hpp"
#include "shrink.hpp"

using namespace longlab;

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(x.size());
  my /= double(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// per-edge multipliers realizing the operator div(diag(1, L) grad .) on a grid
CoefficientField axis_field(const WeightedGraph& g, double L) {
  std::vector<double> vals(g.edges.size());
  for (size_t k = 0; k < g.edges.size(); ++k) {
    const auto& e = g.edges[k];
    Vec d = g.positions.col(e.i) - g.positions.col(e.j);
    vals[k] = (std::abs(d[0]) > std::abs(d[1])) ? 1.0 : L;
  }
  return CoefficientField::edge_scalar(vals);
}

std::map<int, double> sample_boundary(const GridGraph& gg,
                                      const std::function<double(double, double)>& f) {
  std::map<int, double> b;
  for (int id : gg.boundary_ids()) {
    Vec p = gg.g.positions.col(id);
    b[id] = f(p[0], p[1]);
  }
  return b;
}

// the fixed sharpness geometry: unit-width strip, center on a vertex
GridGraph sharpness_grid() { return grid_graph(129, 257, 0.0, 1.0, -1.0, 1.0); }

}  // namespace

TEST_CASE("graph text round trip is exact") {
  Rng rng(77);
  WeightedGraph g;
  g.positions = Mat(3, 6);
  g.measures = Vec(6);
  for (int v = 0; v < 6; ++v) {
    for (int d = 0; d < 3; ++d) g.positions(d, v) = rng.uniform(-2.0, 2.0);
    g.measures[v] = rng.uniform_pos();
  }
  g.edges = {{0, 1, 1.0 / 3.0}, {1, 2, 0.1}, {2, 3, kPi}, {3, 4, 7e-11}, {4, 5, 2.5}, {5, 0, 1.0}};
  g.base = 4;
  WeightedGraph h = graph_from_text(graph_to_text(g));
  REQUIRE(h.vertex_count() == 6);
  CHECK(h.base == 4);
  for (int v = 0; v < 6; ++v) {
    CHECK(h.measures[v] == g.measures[v]);
    for (int d = 0; d < 3; ++d) CHECK(h.positions(d, v) == g.positions(d, v));
  }
  REQUIRE(h.edges.size() == 6);
  for (size_t k = 0; k < 6; ++k) {
    CHECK(h.edges[k].i == g.edges[k].i);
    CHECK(h.edges[k].j == g.edges[k].j);
    CHECK(h.edges[k].c == g.edges[k].c);
  }
  CHECK_THROWS_AS(graph_from_text("dim 2\nv 0 0 0 nonsense\n"), Error);
}

TEST_CASE("path interpolation and constant data") {
  WeightedGraph g = path_graph(11);
  auto A = CoefficientField::identity();
  Vec f = solve_divergence(g, A, {{0, 0.0}, {10, 1.0}});
  for (int v = 0; v <= 10; ++v) CHECK(std::abs(f[v] - 0.1 * v) < 1e-10);
  Vec c = solve_divergence(g, A, {{0, 2.5}, {10, 2.5}});
  for (int v = 0; v <= 10; ++v) CHECK(std::abs(c[v] - 2.5) < 1e-10);
  CHECK(divergence_residual(g, A, f, {{0, 0.0}, {10, 1.0}}) < 1e-10);
}

TEST_CASE("anisotropic rectangle matches the closed solution at second order") {
  const double L = 9.0;
  auto exact = [&](double x, double y) { return std::exp(std::sqrt(L) * x) * std::cos(y); };
  double errs[2];
  int sizes[2][2] = {{17, 33}, {33, 65}};
  for (int s = 0; s < 2; ++s) {
    GridGraph gg = grid_graph(sizes[s][0], sizes[s][1], 0.0, 1.0, -1.0, 1.0);
    auto A = axis_field(gg.g, L);
    Vec f = solve_divergence(gg.g, A, sample_boundary(gg, exact));
    double worst = 0.0, scale = 0.0;
    for (int id : gg.interior_ids()) {
      Vec p = gg.g.positions.col(id);
      worst = std::max(worst, std::abs(f[id] - exact(p[0], p[1])));
      scale = std::max(scale, std::abs(exact(p[0], p[1])));
    }
    errs[s] = worst / scale;
  }
  CHECK(errs[0] / errs[1] > 3.0);  // halving h divides the error by ~4
  CHECK(errs[0] / errs[1] < 5.2);
  CHECK(errs[1] < 2e-3);
}

TEST_CASE("solver is linear within tolerance on small graphs") {
  WeightedGraph p = path_graph(9);
  GridGraph gg = grid_graph(7, 7, 0.0, 1.0, 0.0, 1.0);
  Rng rng(5);
  Vec vertex_vals(49);
  for (int i = 0; i < 49; ++i) vertex_vals[i] = 0.5 + rng.uniform_pos();
  struct Case {
    const WeightedGraph* g;
    CoefficientField A;
    std::vector<int> bverts;
  };
  std::vector<Case> cases;
  cases.push_back({&p, CoefficientField::identity(), {0, 8}});
  cases.push_back({&gg.g, CoefficientField::vertex_scalar(vertex_vals), gg.boundary_ids()});
  for (auto& cs : cases) {
    std::map<int, double> bu, bv, bw;
    for (int v : cs.bverts) {
      bu[v] = rng.uniform(-1.0, 1.0);
      bv[v] = rng.uniform(-1.0, 1.0);
      bw[v] = 0.7 * bu[v] - 1.3 * bv[v];
    }
    Vec fu = solve_divergence(*cs.g, cs.A, bu);
    Vec fv = solve_divergence(*cs.g, cs.A, bv);
    Vec fw = solve_divergence(*cs.g, cs.A, bw);
    CHECK((fw - (0.7 * fu - 1.3 * fv)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("maximum principle with rough positive coefficients") {
  Rng rng(11);
  GridGraph gg = grid_graph(9, 9, 0.0, 1.0, 0.0, 1.0);
  for (int rep = 0; rep < 3; ++rep) {
    Vec vals(81);
    for (int i = 0; i < 81; ++i) vals[i] = 0.1 + 5.0 * rng.uniform_pos();
    auto A = CoefficientField::vertex_scalar(vals, CoefficientField::MeanRule::Geometric);
    std::map<int, double> b;
    double lo = 1e300, hi = -1e300;
    for (int v : gg.boundary_ids()) {
      b[v] = rng.uniform(-3.0, 3.0);
      lo = std::min(lo, b[v]);
      hi = std::max(hi, b[v]);
    }
    Vec f = solve_divergence(gg.g, A, b);
    for (int v : gg.interior_ids()) {
      CHECK(f[v] >= lo - 1e-10);
      CHECK(f[v] <= hi + 1e-10);
    }
    CHECK(divergence_residual(gg.g, A, f, b) < 1e-10);
  }
}

TEST_CASE("degenerate systems are rejected") {
  WeightedGraph g;
  g.positions = Mat(2, 4);
  g.positions << 0, 1, 3, 4, 0, 0, 0, 0;
  g.measures = Vec::Ones(4);
  g.edges = {{0, 1, 1.0}, {2, 3, 1.0}};  // two components
  CHECK_THROWS_AS(solve_divergence(g, CoefficientField::identity(), {{0, 1.0}}), Error);
  try {
    solve_divergence(g, CoefficientField::identity(), {{0, 1.0}});
  } catch (const Error& e) {
    CHECK(e.kind() == Err::SingularSystem);
  }
  WeightedGraph p = path_graph(5);
  CHECK_THROWS_AS(
      solve_divergence(p, CoefficientField::edge_scalar({1.0, 0.0, 1.0, 1.0}), {{0, 0.0}, {4, 1.0}}),
      Error);
  CHECK_THROWS_AS(solve_divergence(p, CoefficientField::identity(), {}), Error);
}

TEST_CASE("coefficient bounds over balls") {
  WeightedGraph p = path_graph(21);
  auto cb = coefficient_bounds(p, CoefficientField::identity(), 0.4);
  CHECK(cb.lambda1 == 1.0);
  CHECK(cb.lambda2 == 1.0);
  CHECK(cb.L == 1.0);

  GridGraph gg = grid_graph(9, 9, 0.0, 1.0, 0.0, 1.0);
  Mat D = Mat::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 4.0;
  std::vector<Mat> mats(size_t(gg.g.vertex_count()), D);
  auto cb2 = coefficient_bounds(gg.g, CoefficientField::vertex_matrix(mats), 0.3);
  CHECK(cb2.lambda1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cb2.lambda2 == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(cb2.L == doctest::Approx(4.0).epsilon(1e-12));

  // multiplier (r^2 of a sphere-valued map): the contrast is bounded by the
  // reciprocal of the smallest squared distance to the rotation axis
  Rng rng(23);
  int n = gg.g.vertex_count();
  Vec r2(n);
  double rmin = 1.0;
  for (int v = 0; v < n; ++v) {
    Vec u = rng.gaussian_vec(3).normalized();
    double r = std::hypot(u[0], u[1]);
    if (r < 0.3) {
      u[0] += 0.4;
      u = u.normalized();
      r = std::hypot(u[0], u[1]);
    }
    r2[v] = r * r;
    rmin = std::min(rmin, r);
  }
  auto cb3 = coefficient_bounds(gg.g, CoefficientField::vertex_scalar(r2), 0.4);
  CHECK(cb3.L <= 1.0 / (rmin * rmin) + 1e-12);
  CHECK_THROWS_AS(coefficient_bounds(gg.g, CoefficientField::identity(), 0.0), Error);
}

TEST_CASE("volume doubling ratios") {
  GridGraph gg = grid_graph(41, 41, 0.0, 1.0, 0.0, 1.0);
  double d2 = doubling_constant(gg.g, 0.3);
  CHECK(d2 >= 3.5);
  CHECK(d2 <= 4.5);
  CHECK(doubling_constant(gg.g, 0.02) == doctest::Approx(1.0));  // below the lattice spacing
  WeightedGraph p = path_graph(401);
  double d1 = doubling_constant(p, 0.25);
  CHECK(d1 >= 1.9);
  CHECK(d1 <= 2.1);
  CHECK_THROWS_AS(doubling_constant(p, 0.0), Error);
}

TEST_CASE("Neumann eigenvalue of the discretized interval") {
  WeightedGraph p = path_graph(400);
  NeumannPoincare np = neumann_poincare_constant(p, 0.9);
  CHECK(int(np.ball.size()) == 400);
  // exact discrete eigenvalue of this pencil: (2/h^2)(1 - cos(pi h))
  CHECK(np.mu2 == doctest::Approx(9.869553412677341).epsilon(1e-9));
  CHECK(std::abs(np.mu2 - kPi * kPi) / (kPi * kPi) < 0.01);
  CHECK(np.K3_estimate == doctest::Approx(1.0 / (0.81 * np.mu2)).epsilon(1e-12));
  CHECK(np.rayleigh_residual < 1e-8);

  // reported eigenvalue is the Rayleigh quotient of the returned vector
  const Vec& v = np.eigenvector;
  double dirichlet = 0.0;
  std::vector<int> local(p.vertex_count(), -1);
  for (size_t i = 0; i < np.ball.size(); ++i) local[np.ball[i]] = int(i);
  for (const auto& e : p.edges) {
    if (local[e.i] < 0 || local[e.j] < 0) continue;
    double d = v[local[e.i]] - v[local[e.j]];
    dirichlet += e.c * d * d;
  }
  double mass = 0.0, mean = 0.0, vol = 0.0;
  for (size_t i = 0; i < np.ball.size(); ++i) {
    mean += p.measures[np.ball[i]] * v[int(i)];
    vol += p.measures[np.ball[i]];
  }
  mean /= vol;
  for (size_t i = 0; i < np.ball.size(); ++i) {
    double d = v[int(i)] - mean;
    mass += p.measures[np.ball[i]] * d * d;
  }
  CHECK(dirichlet / mass == doctest::Approx(np.mu2).epsilon(1e-10));
  // equality case of the variance inequality
  CHECK(std::abs(mass * np.mu2 - dirichlet) <= 1e-8 * dirichlet);

  // random fields satisfy the variance inequality with the reported constant
  Rng rng(99);
  for (int t = 0; t < 100; ++t) {
    Vec w(np.ball.size());
    for (int i = 0; i < w.size(); ++i) w[i] = rng.uniform(-1.0, 1.0);
    double dir = 0.0;
    for (const auto& e : p.edges) {
      if (local[e.i] < 0 || local[e.j] < 0) continue;
      double d = w[local[e.i]] - w[local[e.j]];
      dir += e.c * d * d;
    }
    double mn = 0.0;
    for (size_t i = 0; i < np.ball.size(); ++i) mn += p.measures[np.ball[i]] * w[int(i)];
    mn /= vol;
    double var = 0.0;
    for (size_t i = 0; i < np.ball.size(); ++i) {
      double d = w[int(i)] - mn;
      var += p.measures[np.ball[i]] * d * d;
    }
    CHECK(var * np.mu2 <= dir * (1.0 + 1e-8));
  }
}

TEST_CASE("complete graph spectral gap equals the vertex count") {
  for (int k : {5, 11}) {
    WeightedGraph g;
    g.positions = Mat(2, k);
    for (int v = 0; v < k; ++v) {
      g.positions(0, v) = std::cos(kTwoPi * v / k);
      g.positions(1, v) = std::sin(kTwoPi * v / k);
    }
    g.measures = Vec::Ones(k);
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) g.edges.push_back({i, j, 1.0});
    std::vector<int> all(k);
    for (int v = 0; v < k; ++v) all[v] = v;
    double mu2 = mu2_on_vertex_set(g, all, nullptr, nullptr);
    CHECK(mu2 == doctest::Approx(double(k)).epsilon(1e-10));
    NeumannPoincare np = neumann_poincare_constant(g, 4.0);
    CHECK(np.mu2 == doctest::Approx(double(k)).epsilon(1e-10));
  }
}

TEST_CASE("large sets use the iterative eigensolver") {
  WeightedGraph p = path_graph(700);
  std::vector<int> all(700);
  for (int v = 0; v < 700; ++v) all[v] = v;
  double residual = 0.0;
  double mu2 = mu2_on_vertex_set(p, all, nullptr, &residual);
  double h = 1.0 / 699.0;
  double exact = 2.0 / (h * h) * (1.0 - std::cos(kPi * h));
  CHECK(mu2 == doctest::Approx(exact).epsilon(1e-8));
  CHECK(residual < 1e-6);
}

TEST_CASE("disconnected or too-small eigenvalue domains are rejected") {
  WeightedGraph g;
  g.positions = Mat(2, 4);
  g.positions << 0, 0.1, 0.2, 0.3, 0, 0, 0, 0;
  g.measures = Vec::Ones(4);
  g.edges = {{0, 1, 1.0}, {2, 3, 1.0}};
  std::vector<int> all = {0, 1, 2, 3};
  CHECK_THROWS_AS(mu2_on_vertex_set(g, all, nullptr, nullptr), Error);
  try {
    mu2_on_vertex_set(g, all, nullptr, nullptr);
  } catch (const Error& e) {
    CHECK(e.kind() == Err::DisconnectedBall);
  }
  CHECK_THROWS_AS(mu2_on_vertex_set(g, {0}, nullptr, nullptr), Error);
}

TEST_CASE("Harnack ratios across the anisotropy sweep") {
  GridGraph gg = sharpness_grid();
  auto boundary_of = [&](double L) {
    return sample_boundary(gg, [&](double x, double y) {
      return std::exp(std::sqrt(L) * x) * std::cos(y);
    });
  };
  std::vector<double> Ls = {1.0, 4.0, 16.0, 64.0};
  std::vector<double> logL, logRatio, ratios;
  for (double L : Ls) {
    Vec f = solve_divergence(gg.g, axis_field(gg.g, L), boundary_of(L));
    CHECK(f.minCoeff() > 0.0);  // positivity survives the solve
    double ratio = harnack_ratio(f, gg.g, 0.5);
    CHECK(ratio >= 0.0);
    CHECK(std::isfinite(ratio));
    ratios.push_back(ratio);
    logL.push_back(std::log(L));
    logRatio.push_back(std::log(ratio));
  }
  for (size_t i = 1; i < ratios.size(); ++i) CHECK(ratios[i] >= ratios[i - 1]);
  double slope = fit_slope(logL, logRatio);
  CHECK(slope >= 0.40);
  CHECK(slope <= 0.60);

  Vec constant = Vec::Ones(gg.g.vertex_count());
  CHECK(harnack_ratio(constant, gg.g, 0.5) == 0.0);
  Vec bad = constant;
  bad[gg.g.base] = 0.0;
  CHECK_THROWS_AS(harnack_ratio(bad, gg.g, 0.5), Error);
}

TEST_CASE("oscillation decay of the linear solution is one half") {
  GridGraph gg = grid_graph(128, 128, 0.0, 1.0, 0.0, 1.0);
  auto A = CoefficientField::identity();
  Vec f = solve_divergence(gg.g, A,
                           sample_boundary(gg, [](double x, double) { return x; }));
  OscillationDecay od = oscillation_decay(f, gg.g, 0.3);
  CHECK(std::abs(od.factor - 0.5) <= 2.0 / 128.0);
  CHECK(od.factor >= 0.0);
  CHECK(od.factor <= 1.0);

  Vec c = Vec::Constant(gg.g.vertex_count(), 3.0);
  CHECK(oscillation_decay(c, gg.g, 0.3).factor == 0.0);
}

TEST_CASE("oscillation decay drifts up with anisotropy at fixed data") {
  // data carried on the lids: the vertical smoothing strengthens with L,
  // pulling the lid oscillation pattern into the ball
  GridGraph gg = sharpness_grid();
  auto data = sample_boundary(gg, [](double x, double y) { return std::sin(kPi * x) * y * y; });
  double prev = -1.0;
  for (double L : {1.0, 4.0, 16.0}) {
    Vec f = solve_divergence(gg.g, axis_field(gg.g, L), data);
    OscillationDecay od = oscillation_decay(f, gg.g, 0.5);
    CHECK(od.factor >= 0.0);
    CHECK(od.factor < 1.0);
    CHECK(od.factor >= prev - 2e-3);
    prev = od.factor;
  }
}

TEST_CASE("Sobolev probe yields positive nondecreasing lower bounds") {
  GridGraph gg = grid_graph(21, 21, 0.0, 1.0, 0.0, 1.0);
  const double r = 0.4, nu = 4.0;

  // direct evaluation for the spike at the base vertex
  Vec spike = Vec::Zero(gg.g.vertex_count());
  spike[gg.g.base] = 1.0;
  double ratio = sobolev_ratio(gg.g, r, nu, spike);
  std::vector<int> ball = ball_vertices(gg.g, r);
  double vol = ball_volume(gg.g, ball);
  double num = std::pow(gg.g.measures[gg.g.base] / vol, 1.0 / (2.0 * nu));
  double den = r * std::sqrt(4.0 / vol);  // four unit-conductance edges at the spike
  CHECK(ratio == doctest::Approx(num / den).epsilon(1e-12));
  CHECK(ratio > 0.0);

  double b10 = sobolev_constant_probe(gg.g, r, nu, 10, 2024);
  double b30 = sobolev_constant_probe(gg.g, r, nu, 30, 2024);
  CHECK(b10 > 0.0);
  CHECK(b30 >= b10);
}

TEST_CASE("shrink chain reproduces the closed-form radius") {
  auto Mconst = [](double) { return 1.0; };
  ShrinkChain sc = shrink_chain(Mconst, 1.0, 1.0, kTwoPi);
  CHECK(sc.c1 == 1.0);
  CHECK(sc.C1 == doctest::Approx(0.76150001041880899).epsilon(1e-12));
  CHECK(sc.R1 == doctest::Approx(0.063094680148563273).epsilon(1e-12));
  CHECK(std::abs(sc.R1 - 0.0631) < 1e-4);
  CHECK(sc.depth == 3);
  REQUIRE(sc.ledger.size() == 3);
  for (const auto& step : sc.ledger)
    CHECK(step.log_factor == doctest::Approx(-0.45867514538708193).epsilon(1e-12));
  CHECK(sc.ledger_sum == doctest::Approx(-1.3760254361612458).epsilon(1e-12));
  CHECK(sc.bound == doctest::Approx(-1.0986122886681098).epsilon(1e-12));
  CHECK(sc.ledger_sum <= sc.bound);
  CHECK(sc.verified);

  // oscillation already below the target: the chain stops after one halving
  ShrinkChain flat = shrink_chain(Mconst, 2.0, 1.0, kTwoPi / 3.0);
  CHECK(flat.C1 == 0.0);
  CHECK(flat.R1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(flat.depth == 1);
  CHECK(flat.verified);
}

TEST_CASE("shrink chain monotonicity and ledger guarantee") {
  auto Mk = [](double v) { return [v](double) { return v; }; };
  ShrinkChain a = shrink_chain(Mk(1.0), 1.0, 1.0, kTwoPi);
  ShrinkChain b = shrink_chain(Mk(2.0), 1.0, 1.0, kTwoPi);
  CHECK(b.R1 < a.R1);
  ShrinkChain c = shrink_chain(Mk(1.0), 1.0, 2.0, kTwoPi);
  CHECK(c.R1 < a.R1);

  Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    double c2 = rng.uniform(1e-3, kTwoPi);
    double C0 = rng.uniform(0.05, 1.5);
    double m = rng.uniform(1.0, 3.0);
    ShrinkChain sc = shrink_chain(Mk(m), 1.0, C0, c2);
    CHECK(sc.R1 <= 0.5);
    CHECK(int(sc.ledger.size()) == sc.depth);
    CHECK(sc.ledger_sum <= sc.bound + 1e-12);
    CHECK(sc.verified);
  }

  // a genuinely varying nondecreasing M is accepted; the later (smaller
  // radius) steps carry the stronger per-step contraction
  auto Mvar = [](double R) { return 1.0 + R; };
  ShrinkChain v = shrink_chain(Mvar, 1.0, 1.0, kTwoPi);
  CHECK(v.verified);
  CHECK(v.ledger.front().log_factor >= v.ledger.back().log_factor);

  CHECK_THROWS_AS(shrink_chain(Mk(1.0), 1.0, 0.0, kTwoPi), Error);
  CHECK_THROWS_AS(shrink_chain(Mk(1.0), 1.0, 1.0, 0.0), Error);
  auto Mbad = [](double R) { return 1.0 / R; };  // increases as the radius shrinks
  CHECK_THROWS_AS(shrink_chain(Mbad, 1.0, 1.0, kTwoPi), Error);
  CHECK_THROWS_AS(shrink_chain(Mk(5.0), 1.0, 3.0, kTwoPi), Error);  // depth guard
}

TEST_CASE("dimension constants") {
  GeometryConstants g2 = dsvp_constants(2, 1.0, 1.0);
  CHECK(g2.nu == 4.0);
  CHECK(g2.K1 == doctest::Approx(7.0898154036220635).epsilon(1e-12));
  CHECK(g2.K2 == 4.0);
  CHECK(g2.K3 == doctest::Approx(9.0 / 16.0).epsilon(1e-15));
  CHECK(g2.omega_m == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(g2.sobolev_placeholder);

  GeometryConstants g2b = dsvp_constants(2, 1.0, 1.0, 0.5);
  CHECK_FALSE(g2b.sobolev_placeholder);
  CHECK(g2b.K1 == doctest::Approx(0.5 * g2.K1).epsilon(1e-12));

  GeometryConstants g4 = dsvp_constants(4, 2.0, 3.0);
  CHECK(g4.nu == 2.0);
  CHECK(g4.K2 == 32.0);
  CHECK(g4.K3 == doctest::Approx(27.0 / 16.0).epsilon(1e-15));
  CHECK(g4.omega_m == doctest::Approx(kPi * kPi / 2.0).epsilon(1e-14));

  CHECK(dsvp_constants(3, 1.0, 1.0).nu == 3.0);
  CHECK(unit_ball_volume(3) == doctest::Approx(4.1887902047863905).epsilon(1e-14));
  CHECK_THROWS_AS(dsvp_constants(1, 1.0, 1.0), Error);
  CHECK_THROWS_AS(dsvp_constants(3, 0.5, 1.0), Error);
}
