#pragma once

#include <functional>
#include <string>
#include <vector>

#include "common.hpp"

namespace longlab {

// Rectangular lattice with uniform spacing and a node activity mask. Node
// order is row-major with the last axis fastest.
struct LatticeDomain {
  int m = 2;
  std::vector<int> shape;
  std::vector<double> origin;
  double h = 0.0;
  std::vector<char> active;

  long long node_count() const;
  long long index(const std::vector<int>& c) const;
  std::vector<int> coords(long long idx) const;
  Vec position(long long idx) const;
  bool in_shape(const std::vector<int>& c) const;
  void validate() const;
};

LatticeDomain box_domain(int m, std::vector<int> shape, std::vector<double> origin, double h);
LatticeDomain masked_domain(int m, std::vector<int> shape, std::vector<double> origin, double h,
                            const std::function<bool(const Vec&)>& keep);

// Height field over a lattice domain. Interior nodes are those whose every
// incident cell has all corners active; the rest of the active set is the
// Dirichlet boundary. ring2 nodes have a full 5^m neighborhood of interior
// nodes, enough for the second-ring stencils below.
struct MinimalGraph {
  LatticeDomain dom;
  Vec f;
  std::vector<char> interior;
  std::vector<char> boundary;
  double residual = 0.0;  // volume-normalized max gradient of the area

  std::vector<long long> interior_nodes() const;
  std::vector<long long> boundary_nodes() const;
  std::vector<long long> ring2_nodes() const;
};

// Populate interior/boundary flags from the mask; f untouched.
void classify_nodes(MinimalGraph& mg);

MinimalGraph graph_from_function(const LatticeDomain& dom,
                                 const std::function<double(const Vec&)>& fn);

// Text form: header lines (m, shape, origin, h), mask rows of 0/1 chars,
// then one height per line in node order (inactive nodes as 0).
std::string minimal_graph_to_text(const MinimalGraph& mg);
MinimalGraph minimal_graph_from_text(const std::string& text);
void save_minimal_graph(const MinimalGraph& mg, const std::string& path);
MinimalGraph load_minimal_graph(const std::string& path);

// Area of the height field: trilinear elements with full tensor Gauss
// quadrature (2^m points per cell).
double graph_area(const MinimalGraph& mg);

// Volume-normalized max over free nodes of the area gradient; the solver
// drives this below 1e-10.
double mse_residual(const MinimalGraph& mg);

struct MseOptions {
  double tol = 1e-10;
  int max_newton = 60;
  double steep_limit = 1e6;  // SteepBoundary beyond this slope
};

// Damped Newton (Armijo backtracking, diagonal regularization fallback) on
// the discrete area functional with Dirichlet data.
MinimalGraph solve_mse(const LatticeDomain& dom, const std::function<double(const Vec&)>& boundary,
                       const MseOptions& opt = MseOptions{});

// Central-difference gradient and Hessian of f at an interior node.
Vec graph_slope(const MinimalGraph& mg, long long node);
Mat graph_hessian(const MinimalGraph& mg, long long node);

// Unit normal (-Df, 1)/W as a point of the upper hemisphere.
Vec gauss_map(const MinimalGraph& mg, long long node);

// 1/r^2 of the Gauss image in the chart whose plane is the last two
// coordinates: 1 + sum_{i<m} (D_i f)^2 / (1 + (D_m f)^2).
double gauss_longitude_ratio(const MinimalGraph& mg, long long node);

// Squared norm of the second fundamental form of the graph at a node.
double graph_B2(const MinimalGraph& mg, long long node);

// Multiply lengths by s (positions, heights, spacing); curvature scales by
// 1/s, so |B| R stays invariant.
MinimalGraph rescale(const MinimalGraph& mg, double s);

// Divergence-form Laplace-Beltrami of a node field on the graph surface,
// evaluated at ring2 nodes: sum_ij D_i(W g^{ij} D_j u) / W with central
// differences and nodal coefficients.
double laplace_beltrami(const MinimalGraph& mg, const std::function<double(long long)>& u,
                        long long node);

struct JacobiResiduals {
  double res_f = 0.0;  // max |LB f + |B|^2 f|, f = (gauss, x0)
  double res_h = 0.0;  // transported to h = 1/f by the exact quotient algebra
};

// Jacobi-field identity residuals for the direction x0 (ambient m+1 vector).
JacobiResiduals jacobi_identity_residual(const MinimalGraph& mg, const Vec& x0);

// Max tangential part of the Laplace-Beltrami of the Gauss map over ring2
// nodes; zero for harmonic Gauss maps up to discretization.
double gauss_harmonicity_residual(const MinimalGraph& mg);

}  // namespace longlab
