#include "harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace longlab {

void SphereField::validate() const {
  if (ambient() < 3) fail(Err::InvalidDimension, "sphere field needs ambient dimension >= 3");
  for (int v = 0; v < count(); ++v)
    if (std::abs(values.col(v).norm() - 1.0) > 1e-12)
      fail(Err::InvalidArgument, "vertex " + std::to_string(v) + " is not unit");
}

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::string sphere_field_to_text(const SphereField& u) {
  std::ostringstream out;
  out << "# sphere field: vertex id then " << u.ambient() << " coordinates\n";
  for (int v = 0; v < u.count(); ++v) {
    out << v;
    for (int d = 0; d < u.ambient(); ++d) out << ' ' << fmt17(u.values(d, v));
    out << '\n';
  }
  return out.str();
}

SphereField sphere_field_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    long long id = -1;
    if (!(ls >> id) || id != (long long)rows.size())
      fail(Err::IoError, "line " + std::to_string(lineno) + ": expected vertex id " +
                             std::to_string(rows.size()));
    std::vector<double> coords;
    double x = 0.0;
    while (ls >> x) coords.push_back(x);
    if (coords.size() < 3) fail(Err::IoError, "line " + std::to_string(lineno) + ": too few coordinates");
    if (!rows.empty() && coords.size() != rows.front().size())
      fail(Err::IoError, "line " + std::to_string(lineno) + ": inconsistent width");
    rows.push_back(std::move(coords));
  }
  if (rows.empty()) fail(Err::IoError, "no vertex lines");
  SphereField u;
  u.values.resize(int(rows.front().size()), int(rows.size()));
  for (size_t v = 0; v < rows.size(); ++v)
    for (size_t d = 0; d < rows[v].size(); ++d) u.values(int(d), int(v)) = rows[v][d];
  u.validate();
  return u;
}

void save_sphere_field(const SphereField& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Err::IoError, "cannot open " + path + " for writing");
  out << sphere_field_to_text(u);
}

SphereField load_sphere_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return sphere_field_from_text(buf.str());
}

double dirichlet_energy(const WeightedGraph& g, const SphereField& u) {
  double e = 0.0;
  for (const auto& ed : g.edges) e += ed.c * (u.values.col(ed.i) - u.values.col(ed.j)).squaredNorm();
  return e;
}

double max_tension(const WeightedGraph& g, const SphereField& u, const std::vector<int>& verts) {
  Adjacency adj = build_adjacency(g);
  double worst = 0.0;
  for (int v : verts) {
    Vec s = Vec::Zero(u.ambient());
    double d = 0.0;
    for (auto [w, c] : adj[v]) {
      s += c * u.values.col(w);
      d += c;
    }
    if (d <= 0.0) continue;
    Vec uv = u.values.col(v);
    Vec tang = s - (s.dot(uv)) * uv;
    worst = std::max(worst, tang.norm() / d);
  }
  return worst;
}

FlowResult harmonic_flow(const WeightedGraph& g, const std::map<int, Vec>& boundary,
                         const FlowOptions& opt) {
  g.validate();
  if (boundary.empty()) fail(Err::InvalidArgument, "Dirichlet data must be nonempty");
  const int n = g.vertex_count();
  int ambient = int(boundary.begin()->second.size());
  if (ambient < 3) fail(Err::InvalidDimension, "boundary values need ambient dimension >= 3");

  FlowResult res;
  res.u.values.resize(ambient, n);
  std::vector<char> fixed(n, 0);
  Vec avg = Vec::Zero(ambient);
  for (const auto& [v, val] : boundary) {
    if (v < 0 || v >= n) fail(Err::InvalidArgument, "boundary vertex out of range");
    if (int(val.size()) != ambient) fail(Err::InvalidArgument, "mixed ambient dimensions");
    if (std::abs(val.norm() - 1.0) > 1e-12)
      fail(Err::InvalidArgument, "boundary value at vertex " + std::to_string(v) + " is not unit");
    fixed[v] = 1;
    res.u.values.col(v) = val;
    avg += val;
  }
  Vec seed = (avg.norm() > 1e-12) ? Vec(avg.normalized()) : boundary.begin()->second;
  std::vector<int> interior;
  for (int v = 0; v < n; ++v)
    if (!fixed[v]) {
      interior.push_back(v);
      res.u.values.col(v) = seed;
    }

  Adjacency adj = build_adjacency(g);
  for (int v : interior)
    if (adj[v].empty())
      fail(Err::InvalidArgument, "free vertex " + std::to_string(v) + " has no edges");

  res.energy.push_back(dirichlet_energy(g, res.u));
  if (interior.empty()) {
    res.tension = 0.0;
    return res;
  }

  Mat next = res.u.values;
  double d_prev = 0.0;
  double ratios[3] = {0.0, 0.0, 0.0};
  int nratio = 0;
  const double floor_disp = 1e-15;
  bool converged = false;

  for (long long it = 0; it < opt.max_iterations; ++it) {
    double disp = 0.0;
    for (int v : interior) {
      Vec s = Vec::Zero(ambient);
      double d = 0.0;
      for (auto [w, c] : adj[v]) {
        s += c * res.u.values.col(w);
        d += c;
      }
      if (s.norm() < 1e-14 * d)
        fail(Err::ZeroAverage, "neighbor average vanished at vertex " + std::to_string(v));
      Vec cand = s + d * res.u.values.col(v);  // self weight: keeps sweeps energy-monotone
      double cn = cand.norm();
      if (cn < 1e-14 * d)
        fail(Err::ZeroAverage, "degenerate update at vertex " + std::to_string(v));
      cand /= cn;
      disp = std::max(disp, (cand - res.u.values.col(v)).norm());
      next.col(v) = cand;
    }
    for (int v : interior) res.u.values.col(v) = next.col(v);
    res.energy.push_back(dirichlet_energy(g, res.u));
    res.iterations = it + 1;
    res.final_displacement = disp;

    if (d_prev > 0.0 && disp > 0.0) {
      ratios[nratio % 3] = disp / d_prev;
      ++nratio;
    }
    d_prev = disp;

    if (disp <= floor_disp) {
      res.estimated_error = disp;
      converged = true;
      break;
    }
    if (disp <= opt.tol && nratio >= 3) {
      double rho = std::max({ratios[0], ratios[1], ratios[2]});
      rho = std::min(rho, 0.999999);
      double est = disp * rho / (1.0 - rho);
      if (est <= 0.25 * opt.tol) {
        res.estimated_error = est;
        converged = true;
        break;
      }
    }
  }
  if (!converged) fail(Err::NonConvergence, "flow missed tolerance at the iteration cap");
  res.tension = max_tension(g, res.u, interior);
  return res;
}

double MTable::eval(double R) const {
  // sup over vertices with distance strictly below R; the base vertex sits
  // at distance zero, so any positive radius sees at least one entry
  if (!(R > 0.0)) fail(Err::InvalidRange, "radius must be positive");
  auto it = std::lower_bound(radii.begin(), radii.end(), R);
  if (it == radii.begin()) fail(Err::EmptyBall, "no vertices below this radius");
  size_t k = size_t(it - radii.begin()) - 1;
  return sup_inv_r[k];
}

ComposedFields compose_fields(const WeightedGraph& g, const SphereField& u,
                              const LongitudeChart& chart) {
  if (u.count() != g.vertex_count()) fail(Err::InvalidArgument, "field size mismatch");
  const int n = g.vertex_count();
  ComposedFields out;
  out.theta.resize(n);
  out.r.resize(n);
  for (int v = 0; v < n; ++v) {
    try {
      PolarLift pl = chart.lift(SpherePoint::make(u.value(v)));
      out.theta[v] = pl.theta;
      out.r[v] = pl.r;
    } catch (const Error& e) {
      fail(e.kind(), "vertex " + std::to_string(v) + ": " + e.what());
    }
  }
  // distances from the base, sorted, with the running sup of 1/r
  std::vector<std::pair<double, double>> by_dist(n);
  Vec base = g.base_position();
  for (int v = 0; v < n; ++v)
    by_dist[v] = {(g.positions.col(v) - base).norm(), 1.0 / out.r[v]};
  std::sort(by_dist.begin(), by_dist.end());
  out.M.radii.resize(n);
  out.M.sup_inv_r.resize(n);
  double run = 0.0;
  for (int k = 0; k < n; ++k) {
    run = std::max(run, by_dist[k].second);
    out.M.radii[k] = by_dist[k].first;
    out.M.sup_inv_r[k] = run;
  }
  return out;
}

WeakResidual weak_longitude_residual(const WeightedGraph& g, const SphereField& u, const Vec& phi,
                                     const std::vector<int>& boundary, const LongitudeChart& chart,
                                     double tol) {
  if (int(phi.size()) != g.vertex_count()) fail(Err::InvalidArgument, "test function size mismatch");
  for (int v : boundary)
    if (phi[v] != 0.0)
      fail(Err::NotCompactlySupported,
           "test function does not vanish at boundary vertex " + std::to_string(v));
  ComposedFields cf = compose_fields(g, u, chart);
  WeakResidual out;
  double grad2 = 0.0;
  for (const auto& e : g.edges) {
    double r2e = 0.5 * (cf.r[e.i] * cf.r[e.i] + cf.r[e.j] * cf.r[e.j]);
    double dth = cf.theta[e.i] - cf.theta[e.j];
    double dph = phi[e.i] - phi[e.j];
    out.residual += e.c * r2e * dth * dph;
    grad2 += e.c * dph * dph;
  }
  out.bound = 100.0 * tol * std::sqrt(grad2);
  return out;
}

ShrinkReport image_shrink_check(const WeightedGraph& g, const SphereField& u, double R0, double C0,
                                const LongitudeChart& chart) {
  ComposedFields cf = compose_fields(g, u, chart);
  auto osc_on = [&](double R) {
    std::vector<int> ball = ball_vertices(g, R);
    if (ball.empty()) fail(Err::EmptyBall, "empty ball in the shrink check");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int v : ball) {
      lo = std::min(lo, cf.theta[v]);
      hi = std::max(hi, cf.theta[v]);
    }
    return std::pair<double, double>(hi - lo, 0.5 * (hi + lo));
  };

  ShrinkReport rep;
  rep.osc_R0 = osc_on(R0).first;
  // the chain needs a positive target; oscillation below 2*pi/3 already
  // meets the theorem's conclusion and maps to the clamped C1 = 0 branch
  double c2_eff = std::max(rep.osc_R0, kTwoPi / 3.0);
  rep.chain = shrink_chain([&](double R) { return cf.M.eval(R); }, R0, C0, c2_eff);
  rep.R1 = rep.chain.R1;

  auto [osc1, mid1] = osc_on(rep.R1);
  rep.osc_R1 = osc1;
  if (osc1 > kTwoPi / 3.0 + 1e-12) {
    std::vector<int> ball = ball_vertices(g, rep.R1);
    int worst = ball.front();
    for (int v : ball)
      if (std::abs(cf.theta[v] - mid1) > std::abs(cf.theta[worst] - mid1)) worst = v;
    fail(Err::ShrinkViolated, "longitude oscillation " + std::to_string(osc1) +
                                  " on the shrunk ball exceeds 2*pi/3 at vertex " +
                                  std::to_string(worst));
  }
  rep.theta0 = mid1;
  rep.M_R1 = cf.M.eval(rep.R1);

  rep.x0 = Vec::Zero(u.ambient());
  rep.x0[chart.plane_p()] = std::cos(rep.theta0);
  rep.x0[chart.plane_q()] = std::sin(rep.theta0);

  double need = 0.5 / rep.M_R1;
  rep.min_alignment = 1.0;
  for (int v : ball_vertices(g, rep.R1)) {
    double a = u.value(v).dot(rep.x0);
    rep.min_alignment = std::min(rep.min_alignment, a);
    if (a < need - 1e-12)
      fail(Err::ShrinkViolated, "image point at vertex " + std::to_string(v) +
                                    " falls outside the geodesic ball");
  }
  rep.radius = std::acos(need);
  return rep;
}

}  // namespace longlab
