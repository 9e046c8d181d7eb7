#include "elliptic.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>

namespace longlab {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct EdgeWeights {
  std::vector<double> w;  // conductance times coefficient multiplier, per edge
};

EdgeWeights effective_weights(const WeightedGraph& g, const CoefficientField& A) {
  EdgeWeights ew;
  ew.w.resize(g.edges.size());
  for (size_t k = 0; k < g.edges.size(); ++k) {
    double m = A.edge_multiplier(g, int(k));
    if (!(m > 0.0)) fail(Err::NonPositiveCoefficient, "coefficient multiplier must be positive");
    ew.w[k] = g.edges[k].c * m;
  }
  return ew;
}

}  // namespace

Vec solve_divergence(const WeightedGraph& g, const CoefficientField& A,
                     const std::map<int, double>& boundary) {
  g.validate();
  if (boundary.empty()) fail(Err::InvalidArgument, "Dirichlet data must be nonempty");
  const int n = g.vertex_count();
  std::vector<int> interior_index(n, -1);
  std::vector<int> interior;
  for (int v = 0; v < n; ++v)
    if (!boundary.count(v)) {
      interior_index[v] = int(interior.size());
      interior.push_back(v);
    }
  Vec f = Vec::Zero(n);
  for (auto [v, val] : boundary) {
    if (v < 0 || v >= n) fail(Err::InvalidArgument, "boundary vertex out of range");
    f[v] = val;
  }
  if (interior.empty()) return f;

  EdgeWeights ew = effective_weights(g, A);

  // every interior vertex must reach the boundary through the edge set
  {
    std::vector<char> reached(n, 0);
    std::vector<int> stack;
    for (auto [v, val] : boundary) {
      (void)val;
      reached[v] = 1;
      stack.push_back(v);
    }
    Adjacency adj = build_adjacency(g);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (auto [w, c] : adj[v]) {
        (void)c;
        if (!reached[w]) {
          reached[w] = 1;
          stack.push_back(w);
        }
      }
    }
    for (int v : interior)
      if (!reached[v])
        fail(Err::SingularSystem, "interior vertex " + std::to_string(v) +
                                      " has no path to the boundary");
  }

  const int ni = int(interior.size());
  std::vector<Triplet> trips;
  trips.reserve(g.edges.size() * 4 + size_t(ni));
  Vec rhs = Vec::Zero(ni);
  Vec diag = Vec::Zero(ni);
  for (size_t k = 0; k < g.edges.size(); ++k) {
    const auto& e = g.edges[k];
    const double w = ew.w[k];
    int a = interior_index[e.i], b = interior_index[e.j];
    if (a >= 0) diag[a] += w;
    if (b >= 0) diag[b] += w;
    if (a >= 0 && b >= 0) {
      trips.push_back({a, b, -w});
      trips.push_back({b, a, -w});
    } else if (a >= 0) {
      rhs[a] += w * f[e.j];
    } else if (b >= 0) {
      rhs[b] += w * f[e.i];
    }
  }
  for (int i = 0; i < ni; ++i) trips.push_back({i, i, diag[i]});
  SpMat Lii(ni, ni);
  Lii.setFromTriplets(trips.begin(), trips.end());

  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setTolerance(1e-12);  // aim beyond the contract; verify 1e-10 below
  cg.setMaxIterations(100000);
  cg.compute(Lii);
  Vec x = cg.solve(rhs);

  double rhs_norm = rhs.norm();
  double resid = (Lii * x - rhs).norm();
  if (rhs_norm > 0.0 && resid > 1e-10 * rhs_norm)
    fail(Err::SingularSystem, "conjugate gradients missed the residual contract");
  for (int i = 0; i < ni; ++i) f[interior[i]] = x[i];
  return f;
}

double divergence_residual(const WeightedGraph& g, const CoefficientField& A, const Vec& f,
                           const std::map<int, double>& boundary) {
  EdgeWeights ew = effective_weights(g, A);
  const int n = g.vertex_count();
  Vec acc = Vec::Zero(n), wsum = Vec::Zero(n);
  for (size_t k = 0; k < g.edges.size(); ++k) {
    const auto& e = g.edges[k];
    double w = ew.w[k];
    acc[e.i] += w * (f[e.i] - f[e.j]);
    acc[e.j] += w * (f[e.j] - f[e.i]);
    wsum[e.i] += w;
    wsum[e.j] += w;
  }
  double worst = 0.0;
  double scale = f.cwiseAbs().maxCoeff() + 1e-300;
  for (int v = 0; v < n; ++v) {
    if (boundary.count(v)) continue;
    worst = std::max(worst, std::abs(acc[v]) / (wsum[v] * scale + 1e-300));
  }
  return worst;
}

CoefficientBounds coefficient_bounds(const WeightedGraph& g, const CoefficientField& A, double R) {
  std::vector<int> ball = ball_vertices(g, R);
  if (ball.empty()) fail(Err::EmptyBall, "coefficient bounds: empty ball");
  auto b = A.bounds_on_ball(g, ball);
  return CoefficientBounds{b.lambda1, b.lambda2, b.ratio()};
}

double doubling_constant(const WeightedGraph& g, double R) {
  std::vector<int> half = ball_vertices(g, 0.5 * R);
  if (half.empty()) fail(Err::EmptyBall, "doubling constant: empty half ball");
  std::vector<int> full = ball_vertices(g, R);
  return ball_volume(g, full) / ball_volume(g, half);
}

namespace {

// Restricted pencil: L from edges inside the set, M from vertex measures.
struct RestrictedPencil {
  std::vector<int> verts;            // set, ascending
  std::vector<int> local_of_global;  // -1 outside
  SpMat L;
  Vec M;
};

RestrictedPencil restrict_pencil(const WeightedGraph& g, const std::vector<int>& set) {
  RestrictedPencil rp;
  rp.verts = set;
  std::sort(rp.verts.begin(), rp.verts.end());
  rp.local_of_global.assign(g.vertex_count(), -1);
  for (size_t i = 0; i < rp.verts.size(); ++i) rp.local_of_global[rp.verts[i]] = int(i);
  const int m = int(rp.verts.size());
  rp.M.resize(m);
  for (int i = 0; i < m; ++i) rp.M[i] = g.measures[rp.verts[i]];
  std::vector<Triplet> trips;
  Vec diag = Vec::Zero(m);
  for (const auto& e : g.edges) {
    int a = rp.local_of_global[e.i], b = rp.local_of_global[e.j];
    if (a < 0 || b < 0) continue;
    diag[a] += e.c;
    diag[b] += e.c;
    trips.push_back({a, b, -e.c});
    trips.push_back({b, a, -e.c});
  }
  for (int i = 0; i < m; ++i) trips.push_back({i, i, diag[i]});
  rp.L.resize(m, m);
  rp.L.setFromTriplets(trips.begin(), trips.end());
  return rp;
}

double rayleigh(const RestrictedPencil& rp, const Vec& v) {
  return v.dot(rp.L * v) / v.dot(rp.M.asDiagonal() * v);
}

void project_mean(const RestrictedPencil& rp, Vec& v) {
  double mean = rp.M.dot(v) / rp.M.sum();
  v.array() -= mean;
}

// Dense route for modest sets, blocked inverse iteration above that.
double pencil_mu2_dense(const RestrictedPencil& rp, Vec* vec_out) {
  Mat Ld = Mat(rp.L);
  Mat Md = rp.M.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(Ld, Md);
  if (vec_out) *vec_out = es.eigenvectors().col(1);
  return es.eigenvalues()[1];
}

double pencil_mu2_iterative(const RestrictedPencil& rp, Vec* vec_out, std::uint64_t seed) {
  const int m = int(rp.verts.size());
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setTolerance(1e-12);
  cg.setMaxIterations(100000);
  cg.compute(rp.L);

  Rng rng(seed);
  const int block = 3;
  std::vector<Vec> X(block);
  for (int b = 0; b < block; ++b) {
    X[b] = rng.gaussian_vec(m);
    project_mean(rp, X[b]);
  }
  double mu_prev = std::numeric_limits<double>::infinity();
  Vec best = X[0];
  for (int it = 0; it < 200; ++it) {
    // invert, deflate the constant, Rayleigh-Ritz on the block
    for (int b = 0; b < block; ++b) {
      Vec rhs = rp.M.asDiagonal() * X[b];
      rhs.array() -= rhs.sum() / m;  // keep the rhs in range(L)
      X[b] = cg.solve(rhs);
      project_mean(rp, X[b]);
    }
    // M-orthonormalize the block (modified Gram-Schmidt)
    for (int b = 0; b < block; ++b) {
      for (int a = 0; a < b; ++a) {
        double d = X[a].dot(rp.M.asDiagonal() * X[b]);
        X[b] -= d * X[a];
      }
      double nn = std::sqrt(X[b].dot(rp.M.asDiagonal() * X[b]));
      if (nn < 1e-300) {
        X[b] = rng.gaussian_vec(m);
        project_mean(rp, X[b]);
        nn = std::sqrt(X[b].dot(rp.M.asDiagonal() * X[b]));
      }
      X[b] /= nn;
    }
    Mat A(block, block);
    for (int a = 0; a < block; ++a)
      for (int b = 0; b < block; ++b) A(a, b) = X[a].dot(rp.L * X[b]);
    Eigen::SelfAdjointEigenSolver<Mat> small(0.5 * (A + A.transpose()));
    Vec coef = small.eigenvectors().col(0);
    Vec cand = Vec::Zero(m);
    for (int b = 0; b < block; ++b) cand += coef[b] * X[b];
    project_mean(rp, cand);
    double mu = rayleigh(rp, cand);
    best = cand;
    // rotate the block toward the Ritz basis for the next sweep
    std::vector<Vec> Xn(block, Vec::Zero(m));
    for (int b = 0; b < block; ++b)
      for (int a = 0; a < block; ++a) Xn[b] += small.eigenvectors()(a, b) * X[a];
    X = Xn;
    if (std::abs(mu - mu_prev) <= 1e-12 * std::max(1.0, std::abs(mu))) {
      mu_prev = mu;
      break;
    }
    mu_prev = mu;
  }
  if (vec_out) *vec_out = best;
  return rayleigh(rp, best);
}

}  // namespace

double mu2_on_vertex_set(const WeightedGraph& g, const std::vector<int>& set, Vec* eigenvector,
                         double* residual) {
  if (set.size() < 2) fail(Err::EmptyBall, "eigenvalue needs at least two vertices");
  {
    // connectivity within the set
    std::vector<char> in(g.vertex_count(), 0);
    for (int v : set) in[size_t(v)] = 1;
    std::vector<int> mark(g.vertex_count(), -1);
    std::vector<int> stack = {set.front()};
    mark[set.front()] = 1;
    size_t seen = 1;
    Adjacency adj = build_adjacency(g);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (auto [w, c] : adj[v]) {
        (void)c;
        if (in[size_t(w)] && mark[w] < 0) {
          mark[w] = 1;
          ++seen;
          stack.push_back(w);
        }
      }
    }
    if (seen != set.size()) fail(Err::DisconnectedBall, "vertex set is disconnected");
  }
  RestrictedPencil rp = restrict_pencil(g, set);
  Vec v;
  if (rp.verts.size() <= 600)
    pencil_mu2_dense(rp, &v);
  else
    pencil_mu2_iterative(rp, &v, 0x5eedull);
  // report the Rayleigh quotient of the returned vector as the eigenvalue
  project_mean(rp, v);
  double mu = rayleigh(rp, v);
  if (residual) {
    Vec lv = rp.L * v;
    Vec mv = rp.M.asDiagonal() * v;
    *residual = (lv - mu * mv).norm() / mv.norm();
  }
  if (eigenvector) *eigenvector = v;
  return mu;
}

NeumannPoincare neumann_poincare_constant(const WeightedGraph& g, double R) {
  if (!(R > 0.0)) fail(Err::InvalidRange, "radius must be positive");
  std::vector<int> ball = ball_vertices(g, 0.75 * R);
  if (ball.empty()) fail(Err::EmptyBall, "Neumann ball is empty");
  NeumannPoincare np;
  np.ball = ball;
  double resid = 0.0;
  np.mu2 = mu2_on_vertex_set(g, ball, &np.eigenvector, &resid);
  np.rayleigh_residual = resid;
  np.K3_estimate = 1.0 / (R * R * np.mu2);
  return np;
}

double sobolev_ratio(const WeightedGraph& g, double r, double nu, const Vec& v) {
  if (!(nu >= 1.0)) fail(Err::InvalidRange, "nu must be at least 1");
  std::vector<int> ball = ball_vertices(g, r);
  if (ball.empty()) fail(Err::EmptyBall, "Sobolev ratio: empty ball");
  std::vector<char> in(g.vertex_count(), 0);
  for (int i : ball) in[size_t(i)] = 1;
  double vol = ball_volume(g, ball);
  double num = 0.0;
  for (int i : ball) num += g.measures[i] * std::pow(std::abs(v[i]), 2.0 * nu);
  num = std::pow(num / vol, 1.0 / (2.0 * nu));
  double den = 0.0;
  for (const auto& e : g.edges) {
    if (!in[size_t(e.i)] && !in[size_t(e.j)]) continue;
    double d = v[e.i] - v[e.j];
    den += e.c * d * d;
  }
  den = r * std::sqrt(den / vol);
  return (den > 1e-300) ? num / den : 0.0;
}

double sobolev_constant_probe(const WeightedGraph& g, double r, double nu, int trials,
                              std::uint64_t seed) {
  if (trials < 1) fail(Err::InvalidRange, "need at least one trial");
  std::vector<int> ball = ball_vertices(g, r);
  if (ball.empty()) fail(Err::EmptyBall, "Sobolev probe: empty ball");
  Rng rng(seed);
  double best = 0.0;
  for (int t = 0; t < trials; ++t) {
    Vec v = Vec::Zero(g.vertex_count());
    for (int i : ball) v[i] = rng.gaussian();
    best = std::max(best, sobolev_ratio(g, r, nu, v));
  }
  return best;
}

double harnack_ratio(const Vec& f, const WeightedGraph& g, double R) {
  std::vector<int> full = ball_vertices(g, R);
  if (full.empty()) fail(Err::EmptyBall, "Harnack ratio: empty ball");
  for (int v : full)
    if (!(f[v] > 0.0)) fail(Err::NonPositiveField, "field must be positive on the full ball");
  std::vector<int> half = ball_vertices(g, 0.5 * R);
  if (half.empty()) fail(Err::EmptyBall, "Harnack ratio: empty half ball");
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int v : half) {
    lo = std::min(lo, f[v]);
    hi = std::max(hi, f[v]);
  }
  return std::log(hi) - std::log(lo);
}

OscillationDecay oscillation_decay(const Vec& f, const WeightedGraph& g, double R) {
  std::vector<int> full = ball_vertices(g, R);
  std::vector<int> half = ball_vertices(g, 0.5 * R);
  if (full.empty() || half.empty()) fail(Err::EmptyBall, "oscillation decay: empty ball");
  auto osc = [&f](const std::vector<int>& set) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int v : set) {
      lo = std::min(lo, f[v]);
      hi = std::max(hi, f[v]);
    }
    return hi - lo;
  };
  OscillationDecay od;
  od.osc_full = osc(full);
  od.osc_half = osc(half);
  od.factor = (od.osc_full > 0.0) ? od.osc_half / od.osc_full : 0.0;
  return od;
}

}  // namespace longlab
