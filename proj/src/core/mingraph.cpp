#include "mingraph.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace longlab {

namespace {

std::vector<long long> strides_of(const std::vector<int>& shape) {
  int m = int(shape.size());
  std::vector<long long> s(m, 1);
  for (int k = m - 2; k >= 0; --k) s[k] = s[k + 1] * shape[k + 1];
  return s;
}

}  // namespace

long long LatticeDomain::node_count() const {
  long long n = 1;
  for (int s : shape) n *= s;
  return n;
}

long long LatticeDomain::index(const std::vector<int>& c) const {
  auto st = strides_of(shape);
  long long idx = 0;
  for (int k = 0; k < m; ++k) idx += st[k] * c[k];
  return idx;
}

std::vector<int> LatticeDomain::coords(long long idx) const {
  auto st = strides_of(shape);
  std::vector<int> c(m);
  for (int k = 0; k < m; ++k) {
    c[k] = int(idx / st[k]);
    idx %= st[k];
  }
  return c;
}

Vec LatticeDomain::position(long long idx) const {
  auto c = coords(idx);
  Vec x(m);
  for (int k = 0; k < m; ++k) x[k] = origin[k] + h * c[k];
  return x;
}

bool LatticeDomain::in_shape(const std::vector<int>& c) const {
  for (int k = 0; k < m; ++k)
    if (c[k] < 0 || c[k] >= shape[k]) return false;
  return true;
}

void LatticeDomain::validate() const {
  if (m < 1 || int(shape.size()) != m || int(origin.size()) != m)
    fail(Err::InvalidArgument, "lattice domain shape mismatch");
  for (int s : shape)
    if (s < 2) fail(Err::InvalidArgument, "lattice axis needs at least two nodes");
  if (!(h > 0.0) || !std::isfinite(h)) fail(Err::InvalidArgument, "lattice spacing must be positive");
  if (static_cast<long long>(active.size()) != node_count())
    fail(Err::InvalidArgument, "activity mask size mismatch");
}

LatticeDomain box_domain(int m, std::vector<int> shape, std::vector<double> origin, double h) {
  LatticeDomain d;
  d.m = m;
  d.shape = std::move(shape);
  d.origin = std::move(origin);
  d.h = h;
  if (int(d.shape.size()) != m || int(d.origin.size()) != m)
    fail(Err::InvalidArgument, "lattice domain shape mismatch");
  d.active.assign(size_t(d.node_count()), 1);
  d.validate();
  return d;
}

LatticeDomain masked_domain(int m, std::vector<int> shape, std::vector<double> origin, double h,
                            const std::function<bool(const Vec&)>& keep) {
  LatticeDomain d = box_domain(m, std::move(shape), std::move(origin), h);
  for (long long i = 0; i < d.node_count(); ++i)
    d.active[size_t(i)] = keep(d.position(i)) ? 1 : 0;
  return d;
}

void classify_nodes(MinimalGraph& mg) {
  const LatticeDomain& d = mg.dom;
  d.validate();
  long long n = d.node_count();
  mg.interior.assign(size_t(n), 0);
  mg.boundary.assign(size_t(n), 0);
  int m = d.m;
  int corners = 1 << m;
  for (long long v = 0; v < n; ++v) {
    if (!d.active[size_t(v)]) continue;
    auto c = d.coords(v);
    // Interior means every one of the 2^m incident cells exists and has all
    // corners active.
    bool inter = true;
    std::vector<int> base(m), corner(m);
    for (int cell = 0; cell < corners && inter; ++cell) {
      for (int k = 0; k < m; ++k) base[k] = c[k] - ((cell >> k) & 1);
      bool ok = true;
      for (int k = 0; k < m; ++k)
        if (base[k] < 0 || base[k] + 1 >= d.shape[k]) ok = false;
      if (!ok) {
        inter = false;
        break;
      }
      for (int s = 0; s < corners && ok; ++s) {
        for (int k = 0; k < m; ++k) corner[k] = base[k] + ((s >> k) & 1);
        if (!d.active[size_t(d.index(corner))]) ok = false;
      }
      if (!ok) inter = false;
    }
    if (inter)
      mg.interior[size_t(v)] = 1;
    else
      mg.boundary[size_t(v)] = 1;
  }
}

std::vector<long long> MinimalGraph::interior_nodes() const {
  std::vector<long long> out;
  for (long long v = 0; v < dom.node_count(); ++v)
    if (interior[size_t(v)]) out.push_back(v);
  return out;
}

std::vector<long long> MinimalGraph::boundary_nodes() const {
  std::vector<long long> out;
  for (long long v = 0; v < dom.node_count(); ++v)
    if (boundary[size_t(v)]) out.push_back(v);
  return out;
}

std::vector<long long> MinimalGraph::ring2_nodes() const {
  // Interior nodes whose full Chebyshev-1 neighborhood is interior, plus the
  // two-step axis neighbors; enough for the nested central stencils.
  std::vector<long long> out;
  int m = dom.m;
  long long n = dom.node_count();
  std::vector<int> w(m);
  for (long long v = 0; v < n; ++v) {
    if (!interior[size_t(v)]) continue;
    auto c = dom.coords(v);
    bool ok = true;
    int patterns = 1;
    for (int k = 0; k < m; ++k) patterns *= 3;
    for (int p = 0; p < patterns && ok; ++p) {
      int t = p;
      for (int k = 0; k < m; ++k) {
        w[k] = c[k] + (t % 3) - 1;
        t /= 3;
      }
      if (!dom.in_shape(w) || !interior[size_t(dom.index(w))]) ok = false;
    }
    for (int k = 0; k < m && ok; ++k)
      for (int s = -2; s <= 2; s += 4) {
        w = c;
        w[k] += s;
        if (!dom.in_shape(w) || !interior[size_t(dom.index(w))]) ok = false;
      }
    if (ok) out.push_back(v);
  }
  return out;
}

MinimalGraph graph_from_function(const LatticeDomain& dom,
                                 const std::function<double(const Vec&)>& fn) {
  MinimalGraph mg;
  mg.dom = dom;
  classify_nodes(mg);
  long long n = dom.node_count();
  mg.f = Vec::Zero(n);
  for (long long v = 0; v < n; ++v)
    if (dom.active[size_t(v)]) mg.f[v] = fn(dom.position(v));
  mg.residual = mse_residual(mg);
  return mg;
}

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Reference cell data for trilinear elements: 2^m corners, 2^m Gauss points
// at +-1/sqrt(3), unit weights on [-1,1]^m.
struct CellRule {
  int m = 0;
  int corners = 0;
  Mat value;                // corners x points
  std::vector<Mat> grad_x;  // per point: m x corners, already in x units
  double jac = 0.0;         // (h/2)^m

  CellRule(int mm, double h) : m(mm), corners(1 << mm) {
    int pts = corners;
    value = Mat::Zero(corners, pts);
    grad_x.assign(size_t(pts), Mat::Zero(m, corners));
    double q = 1.0 / std::sqrt(3.0);
    jac = std::pow(h / 2.0, m);
    for (int p = 0; p < pts; ++p) {
      Vec xi(m);
      for (int k = 0; k < m; ++k) xi[k] = ((p >> k) & 1) ? q : -q;
      for (int c = 0; c < corners; ++c) {
        double val = 1.0;
        for (int k = 0; k < m; ++k) {
          double sg = ((c >> k) & 1) ? 1.0 : -1.0;
          val *= 0.5 * (1.0 + sg * xi[k]);
        }
        value(c, p) = val;
        for (int k = 0; k < m; ++k) {
          double g = 1.0;
          for (int l = 0; l < m; ++l) {
            double sg = ((c >> l) & 1) ? 1.0 : -1.0;
            g *= (l == k) ? (0.5 * sg) : (0.5 * (1.0 + sg * xi[l]));
          }
          grad_x[size_t(p)](k, c) = g * 2.0 / h;
        }
      }
    }
  }
};

std::vector<std::vector<long long>> active_cells(const LatticeDomain& d) {
  int m = d.m;
  int corners = 1 << m;
  std::vector<std::vector<long long>> cells;
  std::vector<int> base(m, 0), corner(m);
  bool done = false;
  while (!done) {
    bool ok = true;
    std::vector<long long> ids(static_cast<size_t>(corners));
    for (int s = 0; s < corners && ok; ++s) {
      for (int k = 0; k < m; ++k) corner[k] = base[k] + ((s >> k) & 1);
      long long id = d.index(corner);
      if (!d.active[size_t(id)]) ok = false;
      ids[size_t(s)] = id;
    }
    if (ok) cells.push_back(std::move(ids));
    int k = m - 1;
    while (k >= 0) {
      if (++base[k] <= d.shape[k] - 2) break;
      base[k] = 0;
      --k;
    }
    if (k < 0) done = true;
  }
  return cells;
}

struct Assembly {
  double area = 0.0;
  double max_slope = 0.0;
  Vec grad;
  std::vector<Eigen::Triplet<double>> hess;
};

// Area functional, its gradient, and optionally the Hessian restricted to
// nothing (full-node indexing; the caller masks). The integrand per Gauss
// point is sqrt(1+|p|^2) with p the element gradient.
Assembly assemble(const MinimalGraph& mg, const std::vector<std::vector<long long>>& cells,
                  const CellRule& rule, bool want_grad, bool want_hess) {
  Assembly out;
  long long n = mg.dom.node_count();
  if (want_grad) out.grad = Vec::Zero(n);
  int m = rule.m;
  int corners = rule.corners;
  Vec fc(corners);
  for (const auto& cell : cells) {
    for (int c = 0; c < corners; ++c) fc[c] = mg.f[cell[size_t(c)]];
    for (int p = 0; p < corners; ++p) {
      const Mat& G = rule.grad_x[size_t(p)];
      Vec grd = G * fc;
      double s2 = grd.squaredNorm();
      double W = std::sqrt(1.0 + s2);
      out.max_slope = std::max(out.max_slope, std::sqrt(s2));
      out.area += rule.jac * W;
      if (want_grad) {
        Vec dphi = grd / W;
        for (int c = 0; c < corners; ++c)
          out.grad[cell[size_t(c)]] += rule.jac * G.col(c).dot(dphi);
      }
      if (want_hess) {
        Mat M = (Mat::Identity(m, m) - grd * grd.transpose() / (1.0 + s2)) / W;
        Mat local = rule.jac * G.transpose() * M * G;
        for (int a = 0; a < corners; ++a)
          for (int b = 0; b < corners; ++b)
            out.hess.emplace_back(int(cell[size_t(a)]), int(cell[size_t(b)]), local(a, b));
      }
    }
  }
  return out;
}

double area_only(const MinimalGraph& mg, const std::vector<std::vector<long long>>& cells,
                 const CellRule& rule, double* max_slope) {
  Assembly a = assemble(mg, cells, rule, false, false);
  if (max_slope) *max_slope = a.max_slope;
  return a.area;
}

}  // namespace

double graph_area(const MinimalGraph& mg) {
  CellRule rule(mg.dom.m, mg.dom.h);
  return area_only(mg, active_cells(mg.dom), rule, nullptr);
}

double mse_residual(const MinimalGraph& mg) {
  CellRule rule(mg.dom.m, mg.dom.h);
  Assembly a = assemble(mg, active_cells(mg.dom), rule, true, false);
  double scale = std::pow(mg.dom.h, mg.dom.m);
  double res = 0.0;
  for (long long v = 0; v < mg.dom.node_count(); ++v)
    if (mg.interior[size_t(v)]) res = std::max(res, std::abs(a.grad[v]) / scale);
  return res;
}

MinimalGraph solve_mse(const LatticeDomain& dom, const std::function<double(const Vec&)>& boundary,
                       const MseOptions& opt) {
  MinimalGraph mg;
  mg.dom = dom;
  classify_nodes(mg);
  long long n = dom.node_count();
  mg.f = Vec::Zero(n);
  auto inter = mg.interior_nodes();
  if (inter.empty()) fail(Err::InvalidArgument, "domain has no interior nodes");
  for (long long v = 0; v < n; ++v)
    if (mg.boundary[size_t(v)]) mg.f[v] = boundary(dom.position(v));

  std::vector<long long> to_free(size_t(n), -1);
  for (size_t i = 0; i < inter.size(); ++i) to_free[size_t(inter[i])] = static_cast<long long>(i);
  long long nf = static_cast<long long>(inter.size());

  CellRule rule(dom.m, dom.h);
  auto cells = active_cells(dom);
  double vol = std::pow(dom.h, dom.m);

  auto reduce = [&](const Assembly& a, Eigen::SparseMatrix<double>& H, Vec& g) {
    g = Vec(nf);
    for (long long i = 0; i < nf; ++i) g[i] = a.grad[inter[size_t(i)]];
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(a.hess.size());
    for (const auto& t : a.hess) {
      long long r = to_free[size_t(t.row())], c = to_free[size_t(t.col())];
      if (r >= 0 && c >= 0) trip.emplace_back(int(r), int(c), t.value());
    }
    H.resize(int(nf), int(nf));
    H.setFromTriplets(trip.begin(), trip.end());
  };

  // Harmonic start: one linear solve of the small-slope limit keeps the first
  // Newton step well inside the area functional's convexity region.
  {
    std::vector<Eigen::Triplet<double>> trip;
    Vec rhs = Vec::Zero(nf);
    int corners = rule.corners;
    Vec fc(corners);
    for (const auto& cell : cells) {
      for (int c = 0; c < corners; ++c) fc[c] = mg.f[cell[size_t(c)]];
      for (int p = 0; p < corners; ++p) {
        const Mat& G = rule.grad_x[size_t(p)];
        Mat local = rule.jac * G.transpose() * G;
        for (int a = 0; a < corners; ++a) {
          long long ra = to_free[size_t(cell[size_t(a)])];
          if (ra < 0) continue;
          for (int b = 0; b < corners; ++b) {
            long long rb = to_free[size_t(cell[size_t(b)])];
            if (rb >= 0)
              trip.emplace_back(int(ra), int(rb), local(a, b));
            else
              rhs[ra] -= local(a, b) * fc[b];
          }
        }
      }
    }
    Eigen::SparseMatrix<double> H{int(nf), int(nf)};
    H.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(H);
    if (ldlt.info() != Eigen::Success) fail(Err::SingularSystem, "harmonic start factorization failed");
    Vec sol = ldlt.solve(rhs);
    for (long long i = 0; i < nf; ++i) mg.f[inter[size_t(i)]] = sol[i];
  }

  for (int it = 0; it < opt.max_newton; ++it) {
    Assembly a = assemble(mg, cells, rule, true, true);
    if (a.max_slope > opt.steep_limit)
      fail(Err::SteepBoundary, "slope exceeds the graph regime limit");
    double res = 0.0;
    for (long long i = 0; i < nf; ++i) res = std::max(res, std::abs(a.grad[inter[size_t(i)]]) / vol);
    if (std::getenv("LONGLAB_MSE_DEBUG"))
      std::fprintf(stderr, "newton it=%d res=%.3e area=%.12f slope=%.3f\n", it, res, a.area,
                   a.max_slope);
    if (res <= opt.tol) {
      mg.residual = res;
      return mg;
    }

    Eigen::SparseMatrix<double> H;
    Vec g;
    reduce(a, H, g);

    double mu = 0.0;
    double base_mu = 0.0;
    for (int k = 0; k < H.outerSize(); ++k)
      base_mu = std::max(base_mu, H.coeff(k, k));
    base_mu = std::max(base_mu * 1e-10, 1e-14);

    bool accepted = false;
    for (int lev = 0; lev < 14 && !accepted; ++lev) {
      Eigen::SparseMatrix<double> Hmu = H;
      if (mu > 0.0) {
        for (int k = 0; k < Hmu.outerSize(); ++k) Hmu.coeffRef(k, k) += mu;
      }
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Hmu);
      if (ldlt.info() == Eigen::Success) {
        Vec step = ldlt.solve(-g);
        double slope = g.dot(step);
        if (slope < 0.0) {
          // Once the predicted decrease drops under the area's own rounding
          // floor, Armijo can no longer certify descent; take the plain
          // Newton step (local phase of a strictly convex functional).
          double noise = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(a.area) + 1.0);
          bool local_phase = -slope * 1e-4 <= noise;
          double t = 1.0;
          MinimalGraph trial = mg;
          while (t > std::ldexp(1.0, -40)) {
            for (long long i = 0; i < nf; ++i)
              trial.f[inter[size_t(i)]] = mg.f[inter[size_t(i)]] + t * step[i];
            double sl = 0.0;
            double at = area_only(trial, cells, rule, &sl);
            if (sl <= opt.steep_limit && (local_phase || at <= a.area + 1e-4 * t * slope)) {
              mg.f = trial.f;
              accepted = true;
              break;
            }
            t *= 0.5;
          }
        }
      }
      if (!accepted) mu = (mu == 0.0) ? base_mu : mu * 10.0;
    }
    if (!accepted) fail(Err::NewtonDiverged, "no descent step found for the area functional");
  }
  fail(Err::NewtonDiverged, "Newton iteration cap hit before reaching tolerance");
}

std::string minimal_graph_to_text(const MinimalGraph& mg) {
  const LatticeDomain& d = mg.dom;
  std::ostringstream os;
  os << "minimal-graph 1\n";
  os << "m " << d.m << "\n";
  os << "shape";
  for (int s : d.shape) os << " " << s;
  os << "\norigin";
  for (double o : d.origin) os << " " << fmt17(o);
  os << "\nh " << fmt17(d.h) << "\n";
  os << "mask\n";
  long long n = d.node_count();
  int row = d.shape[size_t(d.m - 1)];
  for (long long v = 0; v < n; ++v) {
    os << (d.active[size_t(v)] ? '1' : '0');
    if ((v + 1) % row == 0) os << "\n";
  }
  os << "heights\n";
  for (long long v = 0; v < n; ++v) os << fmt17(mg.f[v]) << "\n";
  return os.str();
}

MinimalGraph minimal_graph_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string tok;
  int version = 0;
  if (!(is >> tok >> version) || tok != "minimal-graph" || version != 1)
    fail(Err::IoError, "not a minimal graph file");
  LatticeDomain d;
  if (!(is >> tok >> d.m) || tok != "m" || d.m < 1) fail(Err::IoError, "bad dimension line");
  if (!(is >> tok) || tok != "shape") fail(Err::IoError, "bad shape line");
  d.shape.resize(size_t(d.m));
  for (int k = 0; k < d.m; ++k)
    if (!(is >> d.shape[size_t(k)])) fail(Err::IoError, "bad shape line");
  if (!(is >> tok) || tok != "origin") fail(Err::IoError, "bad origin line");
  d.origin.resize(size_t(d.m));
  for (int k = 0; k < d.m; ++k)
    if (!(is >> d.origin[size_t(k)])) fail(Err::IoError, "bad origin line");
  if (!(is >> tok >> d.h) || tok != "h") fail(Err::IoError, "bad spacing line");
  if (!(is >> tok) || tok != "mask") fail(Err::IoError, "missing mask block");
  long long n = d.node_count();
  d.active.assign(size_t(n), 0);
  long long seen = 0;
  while (seen < n) {
    char ch = 0;
    if (!(is >> ch)) fail(Err::IoError, "mask block truncated");
    if (ch == '0' || ch == '1') d.active[size_t(seen++)] = char(ch == '1');
    else fail(Err::IoError, "mask block has a stray character");
  }
  if (!(is >> tok) || tok != "heights") fail(Err::IoError, "missing heights block");
  MinimalGraph mg;
  mg.dom = std::move(d);
  mg.f = Vec::Zero(n);
  for (long long v = 0; v < n; ++v)
    if (!(is >> mg.f[v])) fail(Err::IoError, "heights block truncated");
  classify_nodes(mg);
  mg.residual = mse_residual(mg);
  return mg;
}

void save_minimal_graph(const MinimalGraph& mg, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Err::IoError, "cannot open " + path + " for writing");
  out << minimal_graph_to_text(mg);
  if (!out) fail(Err::IoError, "write to " + path + " failed");
}

MinimalGraph load_minimal_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return minimal_graph_from_text(buf.str());
}

namespace {

long long shifted(const LatticeDomain& d, long long v, int axis, int step) {
  auto c = d.coords(v);
  c[size_t(axis)] += step;
  if (!d.in_shape(c)) fail(Err::BoundaryNode, "stencil leaves the lattice");
  return d.index(c);
}

void require_interior(const MinimalGraph& mg, long long node) {
  if (node < 0 || node >= mg.dom.node_count() || !mg.interior[size_t(node)])
    fail(Err::BoundaryNode, "node is not interior to the domain");
}

}  // namespace

Vec graph_slope(const MinimalGraph& mg, long long node) {
  require_interior(mg, node);
  int m = mg.dom.m;
  Vec s(m);
  for (int k = 0; k < m; ++k) {
    long long plus = shifted(mg.dom, node, k, 1), minus = shifted(mg.dom, node, k, -1);
    s[k] = (mg.f[plus] - mg.f[minus]) / (2.0 * mg.dom.h);
  }
  return s;
}

Mat graph_hessian(const MinimalGraph& mg, long long node) {
  require_interior(mg, node);
  int m = mg.dom.m;
  double h = mg.dom.h;
  Mat H(m, m);
  for (int k = 0; k < m; ++k) {
    long long plus = shifted(mg.dom, node, k, 1), minus = shifted(mg.dom, node, k, -1);
    H(k, k) = (mg.f[plus] - 2.0 * mg.f[node] + mg.f[minus]) / (h * h);
    for (int l = k + 1; l < m; ++l) {
      long long pp = shifted(mg.dom, shifted(mg.dom, node, k, 1), l, 1);
      long long pm = shifted(mg.dom, shifted(mg.dom, node, k, 1), l, -1);
      long long mp = shifted(mg.dom, shifted(mg.dom, node, k, -1), l, 1);
      long long mm = shifted(mg.dom, shifted(mg.dom, node, k, -1), l, -1);
      H(k, l) = H(l, k) = (mg.f[pp] - mg.f[pm] - mg.f[mp] + mg.f[mm]) / (4.0 * h * h);
    }
  }
  return H;
}

Vec gauss_map(const MinimalGraph& mg, long long node) {
  Vec s = graph_slope(mg, node);
  int m = mg.dom.m;
  Vec g(m + 1);
  double W = std::sqrt(1.0 + s.squaredNorm());
  for (int k = 0; k < m; ++k) g[k] = -s[k] / W;
  g[m] = 1.0 / W;
  return g;
}

double gauss_longitude_ratio(const MinimalGraph& mg, long long node) {
  Vec s = graph_slope(mg, node);
  int m = mg.dom.m;
  double head = 0.0;
  for (int k = 0; k + 1 < m; ++k) head += s[k] * s[k];
  return 1.0 + head / (1.0 + s[m - 1] * s[m - 1]);
}

double graph_B2(const MinimalGraph& mg, long long node) {
  Vec s = graph_slope(mg, node);
  Mat hess = graph_hessian(mg, node);
  int m = mg.dom.m;
  double W2 = 1.0 + s.squaredNorm();
  Mat b = hess / std::sqrt(W2);
  Mat Ginv = Mat::Identity(m, m) - s * s.transpose() / W2;
  Mat Sh = Ginv * b;
  return (Sh * Sh).trace();
}

MinimalGraph rescale(const MinimalGraph& mg, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) fail(Err::InvalidArgument, "scale factor must be positive");
  MinimalGraph out = mg;
  out.dom.h *= s;
  for (double& o : out.dom.origin) o *= s;
  out.f *= s;
  out.residual = mse_residual(out);
  return out;
}

namespace {

// W g^{ij} at a node: sqrt(det g) times the inverse of g = I + Df Df^T.
Mat flux_coefficient(const MinimalGraph& mg, long long node) {
  Vec s = graph_slope(mg, node);
  int m = mg.dom.m;
  double W2 = 1.0 + s.squaredNorm();
  double W = std::sqrt(W2);
  return W * (Mat::Identity(m, m) - s * s.transpose() / W2);
}

}  // namespace

double laplace_beltrami(const MinimalGraph& mg, const std::function<double(long long)>& u,
                        long long node) {
  require_interior(mg, node);
  int m = mg.dom.m;
  double h = mg.dom.h;
  auto du = [&](long long v, int axis) {
    return (u(shifted(mg.dom, v, axis, 1)) - u(shifted(mg.dom, v, axis, -1))) / (2.0 * h);
  };
  auto flux = [&](long long v, int i) {
    Mat A = flux_coefficient(mg, v);
    double p = 0.0;
    for (int j = 0; j < m; ++j) p += A(i, j) * du(v, j);
    return p;
  };
  double div = 0.0;
  for (int i = 0; i < m; ++i) {
    long long plus = shifted(mg.dom, node, i, 1), minus = shifted(mg.dom, node, i, -1);
    div += (flux(plus, i) - flux(minus, i)) / (2.0 * h);
  }
  Vec s = graph_slope(mg, node);
  return div / std::sqrt(1.0 + s.squaredNorm());
}

JacobiResiduals jacobi_identity_residual(const MinimalGraph& mg, const Vec& x0) {
  if (x0.size() != mg.dom.m + 1) fail(Err::InvalidArgument, "direction has wrong ambient dimension");
  if (!(x0.norm() > 0.0)) fail(Err::InvalidArgument, "direction must be nonzero");
  Vec dir = x0 / x0.norm();

  long long n = mg.dom.node_count();
  std::vector<double> fj(size_t(n), 0.0);
  for (long long v = 0; v < n; ++v)
    if (mg.interior[size_t(v)]) {
      fj[size_t(v)] = gauss_map(mg, v).dot(dir);
      if (!(fj[size_t(v)] > 0.0))
        fail(Err::NonTransverse, "Gauss image is not transverse to the chosen direction");
    }
  auto uf = [&](long long v) { return fj[size_t(v)]; };

  JacobiResiduals out;
  for (long long v : mg.ring2_nodes()) {
    double lap = laplace_beltrami(mg, uf, v);
    double r = lap + graph_B2(mg, v) * fj[size_t(v)];
    out.res_f = std::max(out.res_f, std::abs(r));
    // h = 1/f turns the identity into LB h = |B|^2 h + 2 |grad h|^2 / h; the
    // discrete residual transports by the exact quotient rule, so res_h is
    // res_f / f^2 pointwise.
    out.res_h = std::max(out.res_h, std::abs(r) / (fj[size_t(v)] * fj[size_t(v)]));
  }
  return out;
}

double gauss_harmonicity_residual(const MinimalGraph& mg) {
  long long n = mg.dom.node_count();
  int m = mg.dom.m;
  Mat gm = Mat::Zero(m + 1, n);
  for (long long v = 0; v < n; ++v)
    if (mg.interior[size_t(v)]) gm.col(v) = gauss_map(mg, v);

  double worst = 0.0;
  for (long long v : mg.ring2_nodes()) {
    Vec lap(m + 1);
    for (int c = 0; c <= m; ++c) {
      auto uc = [&](long long w) { return gm(c, w); };
      lap[c] = laplace_beltrami(mg, uc, v);
    }
    Vec g = gm.col(v);
    Vec tang = lap - g.dot(lap) * g;
    worst = std::max(worst, tang.norm());
  }
  return worst;
}

}  // namespace longlab
