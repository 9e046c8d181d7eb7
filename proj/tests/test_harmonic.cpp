#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "harmonic.hpp"

using namespace longlab;

namespace {

Vec equator3(double angle) {
  Vec v(3);
  v << std::cos(angle), std::sin(angle), 0.0;
  return v;
}

Vec meridian3(double theta, double z) {
  double r = std::sqrt(1.0 - z * z);
  Vec v(3);
  v << r * std::cos(theta), r * std::sin(theta), z;
  return v;
}

void check_energy_monotone(const std::vector<double>& energy) {
  double slack = 1e-12 * std::max(1.0, energy.front());
  for (size_t k = 1; k < energy.size(); ++k) CHECK(energy[k] <= energy[k - 1] + slack);
}

void check_unit(const SphereField& u) {
  for (int v = 0; v < u.count(); ++v) CHECK(std::abs(u.value(v).norm() - 1.0) <= 1e-12);
}

SphereField constant_field(int n, const Vec& x) {
  SphereField u;
  u.values.resize(x.size(), n);
  for (int v = 0; v < n; ++v) u.values.col(v) = x;
  return u;
}

}  // namespace

TEST_CASE("sphere field text round trip is exact") {
  Rng rng(3);
  SphereField u;
  u.values.resize(4, 5);
  for (int v = 0; v < 5; ++v) u.values.col(v) = rng.gaussian_vec(4).normalized();
  SphereField w = sphere_field_from_text(sphere_field_to_text(u));
  REQUIRE(w.count() == 5);
  REQUIRE(w.ambient() == 4);
  for (int v = 0; v < 5; ++v)
    for (int d = 0; d < 4; ++d) CHECK(w.values(d, v) == u.values(d, v));
  CHECK_THROWS_AS(sphere_field_from_text("0 1 0 0\n1 0 1\n"), Error);
  CHECK_THROWS_AS(sphere_field_from_text("# empty\n"), Error);
}

TEST_CASE("constant boundary gives the constant map") {
  GridGraph gg = grid_graph(8, 8, 0.0, 1.0, 0.0, 1.0);
  Vec x0(3);
  x0 << 0.0, 0.6, 0.8;
  std::map<int, Vec> b;
  for (int v : gg.boundary_ids()) b[v] = x0;
  FlowResult fr = harmonic_flow(gg.g, b);
  for (int v = 0; v < gg.g.vertex_count(); ++v)
    CHECK((fr.u.value(v) - x0).norm() <= 1e-12);
  CHECK(fr.tension <= 1e-12);
  check_energy_monotone(fr.energy);
}

TEST_CASE("geodesic interpolation on a path is equally spaced in angle") {
  WeightedGraph p = path_graph(11);
  const double gap = 2.0 * kPi / 5.0;
  std::map<int, Vec> b = {{0, equator3(0.0)}, {10, equator3(gap)}};
  FlowOptions opt;
  opt.tol = 1e-12;
  FlowResult fr = harmonic_flow(p, b, opt);
  check_unit(fr.u);
  check_energy_monotone(fr.energy);
  CHECK(fr.final_displacement <= opt.tol);
  CHECK(fr.tension <= 10.0 * opt.tol);
  for (int k = 0; k <= 10; ++k) {
    double want = gap * k / 10.0;
    double got = std::atan2(fr.u.values(1, k), fr.u.values(0, k));
    CHECK(std::abs(got - want) <= 1e-9);
    CHECK(std::abs(fr.u.values(2, k)) <= 1e-9);  // stays on the equator
  }
}

TEST_CASE("antipodal endpoints break the average") {
  WeightedGraph p = path_graph(3);
  Vec e1(3), m1(3);
  e1 << 1, 0, 0;
  m1 << -1, 0, 0;
  CHECK_THROWS_AS(harmonic_flow(p, {{0, e1}, {2, m1}}), Error);
  try {
    harmonic_flow(p, {{0, e1}, {2, m1}});
  } catch (const Error& e) {
    CHECK(e.kind() == Err::ZeroAverage);
  }
}

TEST_CASE("hemisphere data stays in the hemisphere") {
  GridGraph gg = grid_graph(12, 12, 0.0, 1.0, 0.0, 1.0);
  Rng rng(9);
  std::map<int, Vec> b;
  for (int v : gg.boundary_ids()) {
    Vec gvec = rng.gaussian_vec(3);
    gvec[2] = 0.25 + std::abs(gvec[2]);
    b[v] = gvec.normalized();
  }
  FlowResult fr = harmonic_flow(gg.g, b);
  check_unit(fr.u);
  check_energy_monotone(fr.energy);
  for (int v = 0; v < gg.g.vertex_count(); ++v) CHECK(fr.u.values(2, v) >= -1e-12);
  CHECK(fr.tension <= 10.0 * 1e-10);
}

TEST_CASE("iteration cap raises nonconvergence") {
  GridGraph gg = grid_graph(32, 32, 0.0, 1.0, 0.0, 1.0);
  std::map<int, Vec> b;
  for (int v : gg.boundary_ids()) {
    Vec p = gg.g.positions.col(v);
    b[v] = equator3(1.0 + 0.8 * p[0] + 0.5 * p[1]);
  }
  FlowOptions opt;
  opt.max_iterations = 5;
  CHECK_THROWS_AS(harmonic_flow(gg.g, b, opt), Error);
  try {
    harmonic_flow(gg.g, b, opt);
  } catch (const Error& e) {
    CHECK(e.kind() == Err::NonConvergence);
  }
}

TEST_CASE("composed longitude fields and the running sup table") {
  WeightedGraph p = path_graph(7);
  LongitudeChart chart = LongitudeChart::standard_cut();

  SphereField north = constant_field(7, equator3(kPi / 2.0));
  ComposedFields cf = compose_fields(p, north, chart);
  for (int v = 0; v < 7; ++v) {
    CHECK(cf.theta[v] == doctest::Approx(kPi / 2.0).epsilon(1e-14));
    CHECK(cf.r[v] == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(cf.M.eval(0.4) == doctest::Approx(1.0).epsilon(1e-14));

  // meridian-valued: constant longitude, varying height; min r = 1/2 exactly
  SphereField mer;
  mer.values.resize(3, 7);
  double zs[7] = {0.0, 0.3, -0.3, 0.6, -0.6, std::sqrt(3.0) / 2.0, 0.1};
  for (int v = 0; v < 7; ++v) mer.values.col(v) = meridian3(1.0, zs[v]);
  ComposedFields cm = compose_fields(p, mer, chart);
  for (int v = 0; v < 7; ++v) CHECK(std::abs(cm.theta[v] - 1.0) <= 1e-12);
  CHECK(cm.M.eval(2.0) == doctest::Approx(2.0).epsilon(1e-12));
  for (size_t k = 1; k < cm.M.sup_inv_r.size(); ++k)
    CHECK(cm.M.sup_inv_r[k] >= cm.M.sup_inv_r[k - 1]);

  // chart failures carry the offending vertex id
  SphereField cut = north;
  cut.values.col(2) = equator3(0.0);  // on the branch cut
  try {
    compose_fields(p, cut, chart);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == Err::OnBranchCut);
    CHECK(std::string(e.what()).find("vertex 2") != std::string::npos);
  }
  SphereField axis = north;
  Vec pole(3);
  pole << 0, 0, 1;
  axis.values.col(4) = pole;
  try {
    compose_fields(p, axis, chart);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == Err::OnAxis);
    CHECK(std::string(e.what()).find("vertex 4") != std::string::npos);
  }
}

TEST_CASE("longitude oscillation never exceeds the branch range") {
  WeightedGraph p = path_graph(64);
  LongitudeChart chart = LongitudeChart::standard_cut();
  Rng rng(13);
  SphereField u;
  u.values.resize(3, 64);
  for (int v = 0; v < 64; ++v) {
    Vec x = rng.gaussian_vec(3).normalized();
    while (std::hypot(x[0], x[1]) < 1e-6 || (x[0] > 0 && std::abs(x[1]) < 1e-6))
      x = rng.gaussian_vec(3).normalized();
    u.values.col(v) = x;
  }
  ComposedFields cf = compose_fields(p, u, chart);
  CHECK(cf.theta.maxCoeff() - cf.theta.minCoeff() < kTwoPi);
}

TEST_CASE("weak longitude residual") {
  LongitudeChart chart = LongitudeChart::standard_cut();
  WeightedGraph p = path_graph(11);
  std::vector<int> pb = {0, 10};

  // meridian-valued: the longitude is constant, the residual vanishes
  SphereField mer;
  mer.values.resize(3, 11);
  for (int v = 0; v < 11; ++v) mer.values.col(v) = meridian3(0.7, 0.1 * v - 0.5);
  Vec phi = Vec::Zero(11);
  phi[4] = 1.0;
  phi[5] = -0.3;
  WeakResidual wr = weak_longitude_residual(p, mer, phi, pb, chart, 1e-10);
  CHECK(std::abs(wr.residual) <= 1e-12);

  // zero test function: identically zero residual
  SphereField eq;
  eq.values.resize(3, 11);
  for (int v = 0; v < 11; ++v) eq.values.col(v) = equator3(0.3 + 0.2 * v);
  WeakResidual zr = weak_longitude_residual(p, eq, Vec::Zero(11), pb, chart, 1e-10);
  CHECK(zr.residual == 0.0);

  // equally spaced equator angles solve the discrete equation
  Rng rng(21);
  for (int t = 0; t < 5; ++t) {
    Vec ph = Vec::Zero(11);
    for (int v = 1; v < 10; ++v) ph[v] = rng.uniform(-1.0, 1.0);
    WeakResidual er = weak_longitude_residual(p, eq, ph, pb, chart, 1e-10);
    CHECK(std::abs(er.residual) <= 1e-10);
  }

  Vec bad = Vec::Zero(11);
  bad[0] = 0.5;
  CHECK_THROWS_AS(weak_longitude_residual(p, eq, bad, pb, chart, 1e-10), Error);

  // converged flow output keeps the residual under the reported bound
  GridGraph gg = grid_graph(16, 16, 0.0, 1.0, 0.0, 1.0);
  std::map<int, Vec> b;
  for (int v : gg.boundary_ids()) {
    Vec pos = gg.g.positions.col(v);
    Vec val(4);
    double ang = 1.0 + 0.8 * pos[0] + 0.5 * pos[1];
    val << std::cos(ang), std::sin(ang), 0.0, 0.0;
    b[v] = val;
  }
  FlowResult fr = harmonic_flow(gg.g, b);
  std::vector<int> gb = gg.boundary_ids();
  for (int t = 0; t < 20; ++t) {
    Vec ph = Vec::Zero(gg.g.vertex_count());
    for (int v : gg.interior_ids()) ph[v] = rng.uniform(-1.0, 1.0);
    double gn = 0.0;
    for (const auto& e : gg.g.edges) {
      double d = ph[e.i] - ph[e.j];
      gn += e.c * d * d;
    }
    ph /= std::sqrt(gn);
    WeakResidual fres = weak_longitude_residual(gg.g, fr.u, ph, gb, chart, 1e-10);
    CHECK(std::abs(fres.residual) <= fres.bound);
    CHECK(fres.bound == doctest::Approx(100.0 * 1e-10).epsilon(1e-9));
  }
}

TEST_CASE("image shrink on benign maps") {
  LongitudeChart chart = LongitudeChart::standard_cut();
  WeightedGraph p = path_graph(41);

  // constant map: the chain degenerates to one halving
  SphereField cu = constant_field(41, meridian3(1.2, 0.6));
  ShrinkReport rc = image_shrink_check(p, cu, 0.4, 1.0, chart);
  CHECK(rc.R1 == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(rc.osc_R0 <= 1e-12);
  CHECK(rc.theta0 == doctest::Approx(1.2).epsilon(1e-12));
  double r_val = std::sqrt(1.0 - 0.36);
  CHECK(rc.M_R1 == doctest::Approx(1.0 / r_val).epsilon(1e-12));
  CHECK(rc.radius == doctest::Approx(std::acos(0.5 * r_val)).epsilon(1e-12));
  CHECK(rc.radius < kPi / 2.0);

  // meridian-valued: zero oscillation of the longitude
  SphereField mer;
  mer.values.resize(3, 41);
  for (int v = 0; v < 41; ++v) mer.values.col(v) = meridian3(2.0, -0.5 + 0.02 * v);
  ShrinkReport rm = image_shrink_check(p, mer, 0.4, 1.0, chart);
  CHECK(rm.osc_R1 <= 1e-12);
  CHECK(rm.radius < kPi / 2.0);

  // equator arc spanning exactly 2*pi/3 across the full ball
  SphereField arc;
  arc.values.resize(3, 41);
  for (int v = 0; v < 41; ++v) arc.values.col(v) = equator3(0.5 + (kTwoPi / 3.0) * v / 40.0);
  ShrinkReport ra = image_shrink_check(p, arc, 0.6, 1.0, chart);
  CHECK(ra.chain.C1 == 0.0);
  CHECK(ra.R1 == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(ra.M_R1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ra.osc_R1 <= kTwoPi / 3.0);
  CHECK(ra.min_alignment >= 0.5);
  // eleven lattice steps on each side of the base remain inside B_{0.3}
  double half_span = (kTwoPi / 3.0) * 11.0 / 40.0;
  CHECK(ra.min_alignment == doctest::Approx(std::cos(half_span)).epsilon(1e-9));
  CHECK(ra.radius == doctest::Approx(std::acos(0.5)).epsilon(1e-12));
  CHECK(ra.radius < kPi / 2.0);
}

TEST_CASE("wild oscillation trips the shrink verdict") {
  LongitudeChart chart = LongitudeChart::standard_cut();
  WeightedGraph p = path_graph(41);
  SphereField u;
  u.values.resize(3, 41);
  for (int v = 0; v < 41; ++v) u.values.col(v) = equator3((v % 2 == 0) ? 0.2 : 0.2 + 1.9 * kPi);
  CHECK_THROWS_AS(image_shrink_check(p, u, 0.6, 1.0, chart), Error);
  try {
    image_shrink_check(p, u, 0.6, 1.0, chart);
  } catch (const Error& e) {
    CHECK(e.kind() == Err::ShrinkViolated);
  }
}
