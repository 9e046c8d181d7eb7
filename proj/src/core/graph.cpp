#include "graph.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace longlab {

void WeightedGraph::validate() const {
  const int n = vertex_count();
  if (n == 0) fail(Err::InvalidArgument, "graph has no vertices");
  if (measures.size() != n) fail(Err::InvalidArgument, "measure count mismatch");
  for (int i = 0; i < n; ++i)
    if (!(measures[i] > 0.0)) fail(Err::InvalidArgument, "vertex measures must be positive");
  for (const Edge& e : edges) {
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n || e.i == e.j)
      fail(Err::InvalidArgument, "edge endpoints out of range");
    if (!(e.c > 0.0)) fail(Err::NonPositiveCoefficient, "edge conductances must be positive");
  }
  if (base < 0 || base >= n) fail(Err::InvalidArgument, "base vertex out of range");
}

Adjacency build_adjacency(const WeightedGraph& g) {
  Adjacency adj(g.vertex_count());
  for (const WeightedGraph::Edge& e : g.edges) {
    adj[e.i].push_back({e.j, e.c});
    adj[e.j].push_back({e.i, e.c});
  }
  return adj;
}

std::vector<int> ball_vertices(const WeightedGraph& g, const Vec& center, double R) {
  if (center.size() != g.dim()) fail(Err::InvalidDimension, "ball center dimension mismatch");
  std::vector<int> out;
  for (int i = 0; i < g.vertex_count(); ++i)
    if ((g.positions.col(i) - center).norm() < R) out.push_back(i);
  return out;
}

std::vector<int> ball_vertices(const WeightedGraph& g, double R) {
  return ball_vertices(g, g.base_position(), R);
}

double ball_volume(const WeightedGraph& g, const std::vector<int>& ball) {
  double v = 0.0;
  for (int i : ball) v += g.measures[i];
  return v;
}

bool is_connected(const WeightedGraph& g, const std::vector<int>& subset) {
  if (subset.empty()) return false;
  std::vector<int> mark(g.vertex_count(), 0);
  for (int i : subset) mark[i] = 1;
  Adjacency adj = build_adjacency(g);
  std::vector<int> stack = {subset.front()};
  mark[subset.front()] = 2;
  size_t seen = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (auto [w, c] : adj[v]) {
      (void)c;
      if (mark[w] == 1) {
        mark[w] = 2;
        ++seen;
        stack.push_back(w);
      }
    }
  }
  return seen == subset.size();
}

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string graph_to_text(const WeightedGraph& g) {
  g.validate();
  std::ostringstream os;
  os << "# weighted graph: v <id> <coords> <measure>; e <i> <j> <conductance>; b <base>\n";
  os << "dim " << g.dim() << "\n";
  for (int i = 0; i < g.vertex_count(); ++i) {
    os << "v " << i;
    for (int d = 0; d < g.dim(); ++d) os << " " << fmt17(g.positions(d, i));
    os << " " << fmt17(g.measures[i]) << "\n";
  }
  for (const WeightedGraph::Edge& e : g.edges)
    os << "e " << e.i << " " << e.j << " " << fmt17(e.c) << "\n";
  os << "b " << g.base << "\n";
  return os.str();
}

WeightedGraph graph_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int dim = -1;
  std::vector<Vec> pos;
  std::vector<double> meas;
  WeightedGraph g;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    auto bad = [&](const std::string& why) {
      fail(Err::IoError, "graph text line " + std::to_string(lineno) + ": " + why);
    };
    if (tag == "dim") {
      if (!(ls >> dim) || dim < 1) bad("bad dimension");
    } else if (tag == "v") {
      if (dim < 0) bad("vertex before dim line");
      int id;
      if (!(ls >> id) || id != int(pos.size())) bad("vertex ids must be 0..n-1 in order");
      Vec p(dim);
      for (int d = 0; d < dim; ++d)
        if (!(ls >> p[d])) bad("missing coordinate");
      double m;
      if (!(ls >> m)) bad("missing measure");
      pos.push_back(p);
      meas.push_back(m);
    } else if (tag == "e") {
      WeightedGraph::Edge e;
      if (!(ls >> e.i >> e.j >> e.c)) bad("malformed edge");
      g.edges.push_back(e);
    } else if (tag == "b") {
      if (!(ls >> g.base)) bad("malformed base line");
    } else {
      bad("unknown record '" + tag + "'");
    }
  }
  if (pos.empty()) fail(Err::IoError, "graph text has no vertices");
  g.positions.resize(dim, int(pos.size()));
  g.measures.resize(int(pos.size()));
  for (size_t i = 0; i < pos.size(); ++i) {
    g.positions.col(int(i)) = pos[i];
    g.measures[int(i)] = meas[i];
  }
  g.validate();
  return g;
}

void save_graph(const WeightedGraph& g, const std::string& path) {
  std::ofstream f(path);
  if (!f) fail(Err::IoError, "cannot open '" + path + "' for writing");
  f << graph_to_text(g);
  if (!f) fail(Err::IoError, "write failed for '" + path + "'");
}

WeightedGraph load_graph(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(Err::IoError, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return graph_from_text(ss.str());
}

CoefficientField CoefficientField::identity() { return CoefficientField{}; }

CoefficientField CoefficientField::edge_scalar(std::vector<double> values) {
  CoefficientField f;
  f.kind_ = Kind::EdgeScalar;
  f.edge_values_ = std::move(values);
  return f;
}

CoefficientField CoefficientField::vertex_scalar(Vec values, MeanRule rule) {
  CoefficientField f;
  f.kind_ = Kind::VertexScalar;
  f.vertex_values_ = std::move(values);
  f.rule_ = rule;
  return f;
}

CoefficientField CoefficientField::vertex_matrix(std::vector<Mat> values) {
  CoefficientField f;
  f.kind_ = Kind::VertexMatrix;
  f.matrices_ = std::move(values);
  return f;
}

double CoefficientField::edge_multiplier(const WeightedGraph& g, int edge_index) const {
  const WeightedGraph::Edge& e = g.edges[size_t(edge_index)];
  switch (kind_) {
    case Kind::Identity:
      return 1.0;
    case Kind::EdgeScalar:
      if (edge_values_.size() != g.edges.size())
        fail(Err::InvalidArgument, "edge-scalar field size mismatch");
      return edge_values_[size_t(edge_index)];
    case Kind::VertexScalar: {
      if (vertex_values_.size() != g.vertex_count())
        fail(Err::InvalidArgument, "vertex-scalar field size mismatch");
      double a = vertex_values_[e.i], b = vertex_values_[e.j];
      if (rule_ == MeanRule::Geometric) {
        if (a <= 0.0 || b <= 0.0)
          fail(Err::NonPositiveCoefficient, "geometric mean needs positive vertex values");
        return std::sqrt(a * b);
      }
      return 0.5 * (a + b);
    }
    case Kind::VertexMatrix: {
      if (matrices_.size() != size_t(g.vertex_count()))
        fail(Err::InvalidArgument, "vertex-matrix field size mismatch");
      Vec t = g.positions.col(e.j) - g.positions.col(e.i);
      double n = t.norm();
      if (n < 1e-14) fail(Err::InvalidArgument, "zero-length edge in matrix field");
      t /= n;
      double a = t.dot(matrices_[size_t(e.i)] * t);
      double b = t.dot(matrices_[size_t(e.j)] * t);
      return 0.5 * (a + b);
    }
  }
  return 1.0;
}

CoefficientField::Bounds CoefficientField::bounds_on_ball(const WeightedGraph& g,
                                                          const std::vector<int>& ball) const {
  if (ball.empty()) fail(Err::EmptyBall, "coefficient bounds on an empty ball");
  Bounds b;
  if (kind_ == Kind::Identity) return b;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  if (kind_ == Kind::EdgeScalar) {
    std::vector<char> in(g.vertex_count(), 0);
    for (int i : ball) in[size_t(i)] = 1;
    for (size_t k = 0; k < g.edges.size(); ++k) {
      if (!in[size_t(g.edges[k].i)] && !in[size_t(g.edges[k].j)]) continue;
      lo = std::min(lo, edge_values_[k]);
      hi = std::max(hi, edge_values_[k]);
    }
    if (!(lo <= hi)) fail(Err::EmptyBall, "ball touches no edges");
  } else if (kind_ == Kind::VertexScalar) {
    for (int i : ball) {
      lo = std::min(lo, vertex_values_[i]);
      hi = std::max(hi, vertex_values_[i]);
    }
  } else {
    for (int i : ball) {
      Eigen::SelfAdjointEigenSolver<Mat> es(matrices_[size_t(i)]);
      lo = std::min(lo, es.eigenvalues().minCoeff());
      hi = std::max(hi, es.eigenvalues().maxCoeff());
    }
  }
  if (!(lo > 0.0)) fail(Err::NonPositiveCoefficient, "coefficient field is not uniformly positive");
  b.lambda1 = lo;
  b.lambda2 = hi;
  return b;
}

WeightedGraph path_graph(int n, double length) {
  if (n < 2) fail(Err::InvalidArgument, "path graph needs at least 2 vertices");
  if (!(length > 0.0)) fail(Err::InvalidRange, "path length must be positive");
  const double h = length / (n - 1);
  WeightedGraph g;
  g.positions.resize(1, n);
  g.measures.resize(n);
  for (int i = 0; i < n; ++i) {
    g.positions(0, i) = i * h;
    g.measures[i] = (i == 0 || i == n - 1) ? 0.5 * h : h;
  }
  for (int i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1, 1.0 / h});
  g.base = n / 2;
  return g;
}

std::vector<int> GridGraph::boundary_ids() const {
  std::vector<int> out;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      if (on_boundary(ix, iy)) out.push_back(id(ix, iy));
  return out;
}

std::vector<int> GridGraph::interior_ids() const {
  std::vector<int> out;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      if (!on_boundary(ix, iy)) out.push_back(id(ix, iy));
  return out;
}

GridGraph grid_graph(int nx, int ny, double x0, double x1, double y0, double y1) {
  if (nx < 2 || ny < 2) fail(Err::InvalidArgument, "grid needs at least 2x2 vertices");
  GridGraph gg;
  gg.nx = nx;
  gg.ny = ny;
  gg.x0 = x0;
  gg.y0 = y0;
  gg.hx = (x1 - x0) / (nx - 1);
  gg.hy = (y1 - y0) / (ny - 1);
  if (!(gg.hx > 0.0) || !(gg.hy > 0.0)) fail(Err::InvalidRange, "grid extents must be increasing");
  WeightedGraph& g = gg.g;
  g.positions.resize(2, nx * ny);
  g.measures = Vec::Constant(nx * ny, gg.hx * gg.hy);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      g.positions(0, gg.id(ix, iy)) = x0 + ix * gg.hx;
      g.positions(1, gg.id(ix, iy)) = y0 + iy * gg.hy;
    }
  const double cx = gg.hy / gg.hx, cy = gg.hx / gg.hy;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      if (ix + 1 < nx) g.edges.push_back({gg.id(ix, iy), gg.id(ix + 1, iy), cx});
      if (iy + 1 < ny) g.edges.push_back({gg.id(ix, iy), gg.id(ix, iy + 1), cy});
    }
  g.base = gg.id(nx / 2, ny / 2);
  return gg;
}

}  // namespace longlab
