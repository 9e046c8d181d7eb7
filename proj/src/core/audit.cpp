#include "audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "chart.hpp"
#include "elliptic.hpp"
#include "shrink.hpp"
#include "sphere.hpp"

namespace longlab {

namespace {

double product_of(const std::vector<double>& v) {
  double p = 1.0;
  for (double x : v) p *= x;
  return p;
}

}  // namespace

SurfaceCells graph_surface_cells(const MinimalGraph& mg) {
  const LatticeDomain& d = mg.dom;
  d.validate();
  int m = d.m;
  int corners = 1 << m;
  SurfaceCells out;
  out.m = m;
  out.adim = m + 1;
  double hm = std::pow(d.h, m);

  std::vector<int> base(m, 0), corner(m);
  bool done = false;
  while (!done) {
    bool ok = true;
    std::vector<long long> ids(static_cast<size_t>(corners));
    for (int s = 0; s < corners && ok; ++s) {
      for (int k = 0; k < m; ++k) corner[k] = base[k] + ((s >> k) & 1);
      ids[size_t(s)] = d.index(corner);
      if (!d.active[size_t(ids[size_t(s)])]) ok = false;
    }
    if (ok) {
      Mat C(m + 1, corners);
      for (int s = 0; s < corners; ++s) {
        Vec x = d.position(ids[size_t(s)]);
        for (int k = 0; k < m; ++k) C(k, s) = x[k];
        C(m, s) = mg.f[ids[size_t(s)]];
      }
      // Center gradient of the multilinear interpolant: average the edge
      // slopes along each axis.
      Vec p = Vec::Zero(m);
      for (int k = 0; k < m; ++k) {
        double acc = 0.0;
        int pairs = 0;
        for (int s = 0; s < corners; ++s)
          if (!((s >> k) & 1)) {
            acc += (mg.f[ids[size_t(s | (1 << k))]] - mg.f[ids[size_t(s)]]) / d.h;
            ++pairs;
          }
        p[k] = acc / pairs;
      }
      out.corners.push_back(std::move(C));
      out.volume.push_back(std::sqrt(1.0 + p.squaredNorm()) * hm);
    }
    int k = m - 1;
    while (k >= 0) {
      if (++base[k] <= d.shape[k] - 2) break;
      base[k] = 0;
      --k;
    }
    if (k < 0) done = true;
  }
  return out;
}

namespace {

// Geometry with edge fallback: FD patches clamp the evaluation point one
// sample inward on non-periodic axes.
SampleGeometry clamped_geometry(const ImmersedPatch& p, long long idx) {
  if (p.has_jet) return patch_geometry(p, idx);
  auto c = p.coords(idx);
  for (int k = 0; k < p.pdim; ++k)
    if (!p.periodic[size_t(k)])
      c[size_t(k)] = std::clamp(c[size_t(k)], 1, p.shape[size_t(k)] - 2);
  return patch_geometry(p, p.index(c));
}

}  // namespace

SurfaceCells patch_surface_cells(const ImmersedPatch& p) {
  p.validate();
  int m = p.pdim;
  int corners = 1 << m;
  SurfaceCells out;
  out.m = m;
  out.adim = p.adim;
  double hm = product_of(p.h);

  std::vector<double> sg(size_t(p.sample_count()));
  for (long long i = 0; i < p.sample_count(); ++i) sg[size_t(i)] = clamped_geometry(p, i).sqrtg;

  std::vector<int> base(m, 0), corner(m);
  bool done = false;
  while (!done) {
    bool ok = true;
    std::vector<long long> ids(static_cast<size_t>(corners));
    for (int s = 0; s < corners && ok; ++s) {
      for (int k = 0; k < m; ++k) {
        int v = base[k] + ((s >> k) & 1);
        if (v >= p.shape[size_t(k)]) {
          if (p.periodic[size_t(k)])
            v = 0;
          else
            ok = false;
        }
        corner[k] = v;
      }
      if (ok) ids[size_t(s)] = p.index(corner);
    }
    if (ok) {
      Mat C(p.adim, corners);
      double vol = 0.0;
      for (int s = 0; s < corners; ++s) {
        C.col(s) = p.X.col(ids[size_t(s)]);
        vol += sg[size_t(ids[size_t(s)])];
      }
      out.corners.push_back(std::move(C));
      out.volume.push_back(vol / corners * hm);
    }
    int k = m - 1;
    while (k >= 0) {
      int limit = p.periodic[size_t(k)] ? p.shape[size_t(k)] - 1 : p.shape[size_t(k)] - 2;
      if (++base[k] <= limit) break;
      base[k] = 0;
      --k;
    }
    if (k < 0) done = true;
  }
  return out;
}

namespace {

// Area of {alpha + b.x <= 0} inside the unit square, by polygon clipping.
double unit_square_halfplane_area(double alpha, double bx, double by) {
  std::vector<Eigen::Vector2d> poly = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::vector<Eigen::Vector2d> kept;
  auto phi = [&](const Eigen::Vector2d& q) { return alpha + bx * q.x() + by * q.y(); };
  for (size_t i = 0; i < poly.size(); ++i) {
    Eigen::Vector2d A = poly[i], B = poly[(i + 1) % poly.size()];
    double fa = phi(A), fb = phi(B);
    if (fa <= 0.0) kept.push_back(A);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0))
      kept.push_back(A + (fa / (fa - fb)) * (B - A));
  }
  if (kept.size() < 3) return 0.0;
  double area = 0.0;
  for (size_t i = 0; i < kept.size(); ++i) {
    const auto& P = kept[i];
    const auto& Q = kept[(i + 1) % kept.size()];
    area += P.x() * Q.y() - Q.x() * P.y();
  }
  return std::abs(area) / 2.0;
}

double cell_fraction_inside(const Vec& phi, int m) {
  // Affine least-squares fit of the corner values on the reference cube.
  int corners = 1 << m;
  Mat Adm(corners, m + 1);
  for (int s = 0; s < corners; ++s) {
    Adm(s, 0) = 1.0;
    for (int k = 0; k < m; ++k) Adm(s, k + 1) = double((s >> k) & 1);
  }
  Vec coef = (Adm.transpose() * Adm).ldlt().solve(Adm.transpose() * phi);
  if (m == 2) return unit_square_halfplane_area(coef[0], coef[1], coef[2]);
  // Higher dimensions: midpoint lattice fraction of the affine fit.
  int n = 5;
  long long cells_total = 1;
  for (int k = 0; k < m; ++k) cells_total *= n;
  long long inside = 0;
  for (long long it = 0; it < cells_total; ++it) {
    double val = coef[0];
    long long t = it;
    for (int k = 0; k < m; ++k) {
      val += coef[k + 1] * ((t % n) + 0.5) / n;
      t /= n;
    }
    if (val <= 0.0) ++inside;
  }
  return double(inside) / double(cells_total);
}

}  // namespace

double clipped_ball_volume(const SurfaceCells& cells, const Vec& y0, double R) {
  if (!(R > 0.0)) fail(Err::InvalidRange, "ball radius must be positive");
  double total = 0.0;
  int corners = 1 << cells.m;
  Vec phi(corners);
  for (size_t c = 0; c < cells.corners.size(); ++c) {
    const Mat& C = cells.corners[c];
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int s = 0; s < corners; ++s) {
      phi[s] = (C.col(s) - y0).norm() - R;
      lo = std::min(lo, phi[s]);
      hi = std::max(hi, phi[s]);
    }
    if (hi <= 0.0)
      total += cells.volume[c];
    else if (lo < 0.0)
      total += cells.volume[c] * cell_fraction_inside(phi, cells.m);
  }
  return total;
}

WeightedGraph induced_metric_graph(const MinimalGraph& mg) {
  const LatticeDomain& d = mg.dom;
  d.validate();
  int m = d.m;
  long long n = d.node_count();
  std::vector<long long> compact(size_t(n), -1);
  std::vector<long long> nodes;
  for (long long v = 0; v < n; ++v)
    if (d.active[size_t(v)]) {
      compact[size_t(v)] = static_cast<long long>(nodes.size());
      nodes.push_back(v);
    }

  // Slope estimate everywhere: central where both neighbors are active,
  // one-sided at the rim.
  auto slope_est = [&](long long v) {
    auto c = d.coords(v);
    Vec s = Vec::Zero(m);
    for (int k = 0; k < m; ++k) {
      auto cp = c, cm = c;
      cp[size_t(k)] += 1;
      cm[size_t(k)] -= 1;
      bool hp = d.in_shape(cp) && d.active[size_t(d.index(cp))];
      bool hm = d.in_shape(cm) && d.active[size_t(d.index(cm))];
      if (hp && hm)
        s[k] = (mg.f[d.index(cp)] - mg.f[d.index(cm)]) / (2.0 * d.h);
      else if (hp)
        s[k] = (mg.f[d.index(cp)] - mg.f[v]) / d.h;
      else if (hm)
        s[k] = (mg.f[v] - mg.f[d.index(cm)]) / d.h;
    }
    return s;
  };

  WeightedGraph g;
  g.positions = Mat(m + 1, static_cast<long long>(nodes.size()));
  g.measures = Vec(static_cast<long long>(nodes.size()));
  std::vector<Vec> coefs(nodes.size());
  double hm = std::pow(d.h, m);
  for (size_t i = 0; i < nodes.size(); ++i) {
    long long v = nodes[i];
    Vec x = d.position(v);
    for (int k = 0; k < m; ++k) g.positions(k, static_cast<long long>(i)) = x[k];
    g.positions(m, static_cast<long long>(i)) = mg.f[v];
    Vec s = slope_est(v);
    double W = std::sqrt(1.0 + s.squaredNorm());
    g.measures[static_cast<long long>(i)] = W * hm;
    Vec ck(m);
    for (int k = 0; k < m; ++k) ck[k] = W * (1.0 - s[k] * s[k] / (W * W));
    coefs[i] = ck;
  }
  double edge_scale = std::pow(d.h, m - 2);
  for (size_t i = 0; i < nodes.size(); ++i) {
    auto c = d.coords(nodes[i]);
    for (int k = 0; k < m; ++k) {
      auto cp = c;
      cp[size_t(k)] += 1;
      if (!d.in_shape(cp)) continue;
      long long w = d.index(cp);
      if (compact[size_t(w)] < 0) continue;
      double cond = 0.5 * (coefs[i][k] + coefs[size_t(compact[size_t(w)])][k]) * edge_scale;
      g.edges.push_back({int(i), int(compact[size_t(w)]), cond});
    }
  }
  g.base = 0;
  g.validate();
  return g;
}

WeightedGraph induced_metric_graph(const ImmersedPatch& p) {
  p.validate();
  long long n = p.sample_count();
  int m = p.pdim;
  double hm = 1.0;
  for (double hh : p.h) hm *= hh;

  WeightedGraph g;
  g.positions = p.X;
  g.measures = Vec(n);
  std::vector<Vec> coefs(static_cast<size_t>(n));
  for (long long i = 0; i < n; ++i) {
    SampleGeometry geo = clamped_geometry(p, i);
    g.measures[i] = geo.sqrtg * hm;
    Vec ck(m);
    for (int a = 0; a < m; ++a)
      ck[a] = geo.sqrtg * geo.ginv(a, a) * hm / (p.h[size_t(a)] * p.h[size_t(a)]);
    coefs[size_t(i)] = ck;
  }
  for (long long i = 0; i < n; ++i) {
    auto c = p.coords(i);
    for (int a = 0; a < m; ++a) {
      if (c[size_t(a)] + 1 >= p.shape[size_t(a)] && !p.periodic[size_t(a)]) continue;
      long long j = patch_shift(p, i, a, 1);
      g.edges.push_back({int(i), int(j), 0.5 * (coefs[size_t(i)][a] + coefs[size_t(j)][a])});
    }
  }
  g.base = 0;
  g.validate();
  return g;
}

DensityReport volume_density_and_lambda(const SurfaceCells& cells, const WeightedGraph& g,
                                        const Vec& y0, double R0, int levels) {
  if (!(R0 > 0.0) || !std::isfinite(R0)) fail(Err::InvalidRange, "outer radius must be positive");
  if (levels < 2) fail(Err::InvalidArgument, "need at least two radius levels");
  if (cells.corners.empty()) fail(Err::InvalidArgument, "surface has no cells");

  DensityReport out;
  double omega = unit_ball_volume(cells.m);
  std::vector<double> V(static_cast<size_t>(levels));
  for (int j = 0; j < levels; ++j) {
    double R = R0 * std::ldexp(1.0, j - (levels - 1));
    out.radii.push_back(R);
    V[size_t(j)] = clipped_ball_volume(cells, y0, R);
    out.D_raw.push_back(V[size_t(j)] / (omega * std::pow(R, cells.m)));
  }
  if (!(V.back() > 0.0)) fail(Err::EmptyBall, "outer ball misses the surface");

  out.D_iso = out.D_raw;
  for (size_t j = 1; j < out.D_iso.size(); ++j)
    out.D_iso[j] = std::max(out.D_iso[j], out.D_iso[j - 1]);

  // Doubling along the dyadic grid against the outer density.
  double D_R0 = out.D_iso.back();
  double two_m = std::ldexp(1.0, cells.m);
  for (size_t j = 1; j < V.size(); ++j) {
    if (!(V[j - 1] > 0.0)) continue;
    double ratio = V[j] / (two_m * D_R0 * V[j - 1]);
    out.doubling_worst = std::max(out.doubling_worst, ratio);
  }
  out.doubling_ok = out.doubling_worst <= 1.0 + kDensityTol;

  for (size_t j = 1; j < out.D_raw.size(); ++j)
    if (out.D_raw[j - 1] > 0.0) {
      double drop = (out.D_raw[j - 1] - out.D_raw[j]) / out.D_raw[j - 1];
      out.monotone_worst_drop = std::max(out.monotone_worst_drop, drop);
    }
  out.monotone_ok = out.monotone_worst_drop <= kDensityTol;

  // Spectral part: nearest vertex to y0 becomes the base; the Neumann
  // operator restricts to three quarters of the radius it is handed.
  WeightedGraph gb = g;
  int nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int v = 0; v < gb.vertex_count(); ++v) {
    double dist = (gb.positions.col(v) - y0).norm();
    if (dist < best) {
      best = dist;
      nearest = v;
    }
  }
  gb.base = nearest;
  for (double R : out.radii) {
    auto ball = ball_vertices(gb, R);
    if (ball.size() < 8) continue;
    try {
      NeumannPoincare np = neumann_poincare_constant(gb, 4.0 * R / 3.0);
      if (np.mu2 > 0.0) out.lambda = std::max(out.lambda, 1.0 / (R * R * np.mu2));
    } catch (const Error&) {
      // Level skipped: disconnected or too small a ball at this scale.
    }
  }
  return out;
}

AuditReport curvature_estimate_audit(const MinimalGraph& mg, long long y0_node, double R0,
                                     int levels) {
  if (y0_node < 0 || y0_node >= mg.dom.node_count() || !mg.interior[size_t(y0_node)])
    fail(Err::BoundaryNode, "audit base node must be interior");
  if (!(R0 > 0.0)) fail(Err::InvalidRange, "outer radius must be positive");

  int m = mg.dom.m;
  AuditReport out;
  out.R0 = R0;
  out.B_at_base = std::sqrt(std::max(graph_B2(mg, y0_node), 0.0));
  out.scale_invariant_product = out.B_at_base * R0;
  out.chain_p = std::max(3, m - 1);

  Vec y0(m + 1);
  {
    Vec x = mg.dom.position(y0_node);
    for (int k = 0; k < m; ++k) y0[k] = x[k];
    y0[m] = mg.f[y0_node];
  }

  SurfaceCells cells = graph_surface_cells(mg);
  WeightedGraph igraph = induced_metric_graph(mg);
  out.density = volume_density_and_lambda(cells, igraph, y0, R0, levels);
  out.Lambda = out.density.lambda;

  // Gauss image chart table: the chart plane is the last two ambient
  // coordinates, so the image of a graph normal stays clear of the cut.
  LongitudeChart chart = LongitudeChart::standard_cut(m - 1, m);
  auto inter = mg.interior_nodes();
  std::vector<Vec> lifted(inter.size());
  std::vector<double> inv_r(inter.size());
  for (size_t i = 0; i < inter.size(); ++i) {
    Vec x = mg.dom.position(inter[i]);
    Vec pos(m + 1);
    for (int k = 0; k < m; ++k) pos[k] = x[k];
    pos[m] = mg.f[inter[i]];
    lifted[i] = pos;
    Vec gamma = gauss_map(mg, inter[i]);
    SpherePoint pt = SpherePoint::normalized(gamma);
    try {
      chart.lift(pt);
    } catch (const Error&) {
      fail(Err::GaussImageOutOfChart, "Gauss image touches the chart cut");
    }
    inv_r[i] = 1.0 / chart.radius(pt);
  }
  for (double R : out.density.radii) {
    double sup = 0.0;
    bool any = false;
    for (size_t i = 0; i < inter.size(); ++i)
      if ((lifted[i] - y0).norm() < R) {
        sup = std::max(sup, inv_r[i]);
        any = true;
      }
    if (any) {
      out.M_table.emplace_back(R, sup);
      if (R > std::exp(1.0)) out.growth_curve.emplace_back(R, sup / std::log(std::log(R)));
    }
  }

  // Mean-value chain check at half the audit radius, h = 1 / (gauss, up).
  double Rchk = R0 / 2.0;
  double sup_h = 0.0, mean_num = 0.0, mean_den = 0.0;
  int p2 = 2 * out.chain_p;
  for (size_t i = 0; i < inter.size(); ++i) {
    double dist = (lifted[i] - y0).norm();
    Vec s = graph_slope(mg, inter[i]);
    double W = std::sqrt(1.0 + s.squaredNorm());
    if (dist < Rchk) sup_h = std::max(sup_h, W);
    if (dist < Rchk / 2.0) {
      double Bv = std::sqrt(std::max(graph_B2(mg, inter[i]), 0.0));
      double weight = W * std::pow(mg.dom.h, m);
      mean_num += weight * std::pow(Bv * W, p2);
      mean_den += weight;
    }
  }
  if (mean_den > 0.0) out.chain_mean = mean_num / mean_den;
  out.chain_ref = std::pow(Rchk, -p2) * std::pow(sup_h, p2);
  if (out.chain_ref > 0.0) out.chain_fitted_C = out.chain_mean / out.chain_ref;
  return out;
}

namespace {

GrowthAudit growth_core(const std::function<double(double)>& M, const std::vector<double>& radii,
                        double eps, double C0, double R_minus, int panels) {
  if (radii.size() < 4) fail(Err::InsufficientScales, "growth audit needs at least four radii");
  if (!(eps > 0.0) || !(C0 > 0.0)) fail(Err::InvalidArgument, "eps and C0 must be positive");
  double e1 = std::exp(1.0);
  for (size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > e1)) fail(Err::InvalidRange, "growth radii must exceed e");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      fail(Err::InvalidRange, "growth radii must increase");
  }
  if (!(R_minus >= e1 * (1.0 - 1e-12)) || !(R_minus <= radii.back()))
    fail(Err::InvalidRange, "integration start must sit in [e, max radius]");

  GrowthAudit out;
  out.eps = eps;
  out.delta = eps / 2.0;
  bool nonincreasing = true;
  double prev = 0.0;
  for (size_t i = 0; i < radii.size(); ++i) {
    double ratio = M(radii[i]) / std::log(std::log(radii[i]));
    out.ratios.emplace_back(radii[i], ratio);
    if (i > 0 && ratio > prev * (1.0 + 1e-9) + 1e-15) nonincreasing = false;
    prev = ratio;
  }
  out.last_ratio = out.ratios.back().second;
  out.verdict = (nonincreasing && out.last_ratio <= eps * (1.0 + 1e-12))
                    ? GrowthVerdict::Satisfied
                    : GrowthVerdict::Violated;

  // Simpson in s = log t of exp(-C0 M(e^s)).
  if (panels < 2) panels = 2;
  if (panels % 2) ++panels;
  double a = std::log(R_minus), b = std::log(radii.back());
  double hstep = (b - a) / panels;
  double acc = 0.0;
  for (int i = 0; i <= panels; ++i) {
    double s = a + hstep * i;
    double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * std::exp(-C0 * M(std::exp(s)));
  }
  out.partial_integral = acc * hstep / 3.0;
  return out;
}

}  // namespace

GrowthAudit bernstein_growth_audit(const std::function<double(double)>& M,
                                   const std::vector<double>& radii, double eps, double C0,
                                   double R_minus, int panels) {
  return growth_core(M, radii, eps, C0, R_minus, panels);
}

GrowthAudit bernstein_growth_audit(const std::vector<std::pair<double, double>>& M_samples,
                                   double eps, double C0, double R_minus, int panels) {
  if (M_samples.size() < 4) fail(Err::InsufficientScales, "growth audit needs at least four radii");
  std::vector<double> radii;
  for (const auto& s : M_samples) radii.push_back(s.first);
  auto interp = [M_samples](double t) {
    double s = std::log(t);
    size_t n = M_samples.size();
    if (s <= std::log(M_samples.front().first)) return M_samples.front().second;
    if (s >= std::log(M_samples.back().first)) return M_samples.back().second;
    for (size_t i = 1; i < n; ++i) {
      double s1 = std::log(M_samples[i].first);
      if (s <= s1) {
        double s0 = std::log(M_samples[i - 1].first);
        double w = (s - s0) / (s1 - s0);
        return (1.0 - w) * M_samples[i - 1].second + w * M_samples[i].second;
      }
    }
    return M_samples.back().second;
  };
  return growth_core(interp, radii, eps, C0, R_minus, panels);
}

}  // namespace longlab
