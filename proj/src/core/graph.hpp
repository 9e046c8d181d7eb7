#ifndef LONGLAB_GRAPH_HPP
#define LONGLAB_GRAPH_HPP

#include <string>
#include <vector>

#include "common.hpp"

namespace longlab {

// Finite weighted graph with embedded vertices. Distances between vertices
// are extrinsic (ambient Euclidean on the positions); balls contain whole
// vertices only, edges are never clipped.
struct WeightedGraph {
  struct Edge {
    int i = 0, j = 0;
    double c = 1.0;  // conductance, > 0
  };

  Mat positions;  // dim x n
  Vec measures;   // n, > 0
  std::vector<Edge> edges;
  int base = 0;   // distinguished center vertex

  int vertex_count() const { return int(positions.cols()); }
  int dim() const { return int(positions.rows()); }
  Vec base_position() const { return positions.col(base); }

  void validate() const;  // shapes, positivity, index ranges
};

using Adjacency = std::vector<std::vector<std::pair<int, double>>>;
Adjacency build_adjacency(const WeightedGraph& g);

// Vertices with |pos - center| < R, strict.
std::vector<int> ball_vertices(const WeightedGraph& g, const Vec& center, double R);
std::vector<int> ball_vertices(const WeightedGraph& g, double R);  // around the base vertex

double ball_volume(const WeightedGraph& g, const std::vector<int>& ball);

bool is_connected(const WeightedGraph& g, const std::vector<int>& subset);

// Line-oriented text format:
//   # comment
//   dim <d>
//   v <id> <x_1> ... <x_d> <measure>
//   e <i> <j> <conductance>
//   b <base_id>
// Reals print with 17 significant digits so a round trip is exact.
std::string graph_to_text(const WeightedGraph& g);
WeightedGraph graph_from_text(const std::string& text);
void save_graph(const WeightedGraph& g, const std::string& path);
WeightedGraph load_graph(const std::string& path);

// Per-edge coefficient multipliers for divergence-form operators.
// Scalar-per-vertex fields average onto edges (arithmetic mean by default,
// geometric behind the switch); matrix-per-vertex fields contract with the
// unit edge direction before averaging.
class CoefficientField {
 public:
  enum class MeanRule { Arithmetic, Geometric };

  static CoefficientField identity();
  static CoefficientField edge_scalar(std::vector<double> values);
  static CoefficientField vertex_scalar(Vec values, MeanRule rule = MeanRule::Arithmetic);
  static CoefficientField vertex_matrix(std::vector<Mat> values);

  double edge_multiplier(const WeightedGraph& g, int edge_index) const;

  // Extremal multiplier bounds over a ball: per-vertex fields scan ball
  // vertices (matrix fields via eigenvalues), edge fields scan edges with an
  // endpoint in the ball. The identity field is (1, 1).
  struct Bounds {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double ratio() const { return lambda2 / lambda1; }
  };
  Bounds bounds_on_ball(const WeightedGraph& g, const std::vector<int>& ball) const;

  bool is_identity() const { return kind_ == Kind::Identity; }

 private:
  enum class Kind { Identity, EdgeScalar, VertexScalar, VertexMatrix };
  Kind kind_ = Kind::Identity;
  MeanRule rule_ = MeanRule::Arithmetic;
  std::vector<double> edge_values_;
  Vec vertex_values_;
  std::vector<Mat> matrices_;
};

// Builders used across tests and experiments.

// Path discretizing [0, length] with n vertices: conductance 1/h, vertex
// measure h with h/2 at the two endpoints (so the Neumann spectrum matches
// the continuum cosine modes exactly). Base at the middle vertex.
WeightedGraph path_graph(int n, double length = 1.0);

struct GridGraph {
  WeightedGraph g;
  int nx = 0, ny = 0;
  double hx = 0.0, hy = 0.0;
  double x0 = 0.0, y0 = 0.0;

  int id(int ix, int iy) const { return iy * nx + ix; }
  bool on_boundary(int ix, int iy) const { return ix == 0 || iy == 0 || ix == nx - 1 || iy == ny - 1; }
  std::vector<int> boundary_ids() const;
  std::vector<int> interior_ids() const;
};

// nx x ny vertices over [x0,x1] x [y0,y1]; finite-volume conductances
// hy/hx and hx/hy so the graph Laplacian discretizes the flat Laplacian,
// measures hx*hy, base at the central vertex.
GridGraph grid_graph(int nx, int ny, double x0, double x1, double y0, double y1);

}  // namespace longlab

#endif
