#pragma once

#include <map>
#include <string>
#include <vector>

#include "chart.hpp"
#include "graph.hpp"
#include "shrink.hpp"
#include "sphere.hpp"

namespace longlab {

// One unit vector per vertex of a weighted graph.
struct SphereField {
  Mat values;  // ambient x n, unit columns

  int ambient() const { return int(values.rows()); }
  int count() const { return int(values.cols()); }
  Vec value(int v) const { return values.col(v); }
  void validate() const;  // unit norm within 1e-12, ambient >= 3
};

// Text form: comment lines start with '#', then one line per vertex
// "<id> <x_0> ... <x_n>" in order, reals at 17 significant digits.
std::string sphere_field_to_text(const SphereField& u);
SphereField sphere_field_from_text(const std::string& text);
void save_sphere_field(const SphereField& u, const std::string& path);
SphereField load_sphere_field(const std::string& path);

double dirichlet_energy(const WeightedGraph& g, const SphereField& u);

// Largest tangential component, relative to the local weight, of the
// weighted neighbor sum over the given vertices; zero exactly at fixed
// points of the averaging flow.
double max_tension(const WeightedGraph& g, const SphereField& u, const std::vector<int>& verts);

struct FlowOptions {
  double tol = 1e-10;           // max-displacement stopping tolerance
  long long max_iterations = 1000000;
};

struct FlowResult {
  SphereField u;
  std::vector<double> energy;  // Dirichlet energy per sweep, initial first
  long long iterations = 0;
  double final_displacement = 0.0;
  double estimated_error = 0.0;  // contraction-corrected distance to the fixed point
  double tension = 0.0;          // max over interior vertices at exit
};

// Minimizing fixed-point flow for sphere-valued maps with Dirichlet data:
// each sweep sets u_v <- normalize(sum_w c_vw u_w + d_v u_v) synchronously.
// The self-weight keeps the Dirichlet energy provably nonincreasing under
// synchronous sweeps; fixed points are exactly those of the plain weighted
// average (neighbor sum parallel to the value). Stops once the displacement
// is at most tol and the contraction-corrected distance estimate is below
// tol/4, so the returned field sits within tol of the fixed point.
FlowResult harmonic_flow(const WeightedGraph& g, const std::map<int, Vec>& boundary,
                         const FlowOptions& opt = FlowOptions{});

// sup of 1/r over balls around the graph base, tabulated at the sorted
// vertex distances; eval(R) takes the sup over distances strictly below R.
struct MTable {
  std::vector<double> radii;
  std::vector<double> sup_inv_r;  // running max, aligned with radii
  double eval(double R) const;
};

struct ComposedFields {
  Vec theta;
  Vec r;
  MTable M;
};

// Pointwise chart lift of the field; errors carry the offending vertex id.
ComposedFields compose_fields(const WeightedGraph& g, const SphereField& u,
                              const LongitudeChart& chart);

struct WeakResidual {
  double residual = 0.0;  // sum over edges of (r^2)_e (Theta_i - Theta_j)(phi_i - phi_j)
  double bound = 0.0;     // 100 * tol * gradient norm of phi
};

// Weak form of the longitude equation against one test function vanishing
// on the boundary set. The edge coefficient (r^2)_e is the arithmetic mean
// of the endpoint values.
WeakResidual weak_longitude_residual(const WeightedGraph& g, const SphereField& u, const Vec& phi,
                                     const std::vector<int>& boundary, const LongitudeChart& chart,
                                     double tol);

struct ShrinkReport {
  double R1 = 0.0;
  double theta0 = 0.0;
  Vec x0;             // (cos theta0, sin theta0, 0, ...) in the chart plane
  double radius = 0.0;  // arccos(M_R1^{-1} / 2), strictly below pi/2
  double M_R1 = 1.0;
  double osc_R0 = 0.0;
  double osc_R1 = 0.0;
  double min_alignment = 1.0;  // min over B_R1 of (u(y), x0)
  ShrinkChain chain;
};

// Theorem-style image localization: runs the dyadic oscillation chain on
// the longitude of u, then certifies that the image of B_R1 sits in the
// geodesic ball of the reported radius around x0.
ShrinkReport image_shrink_check(const WeightedGraph& g, const SphereField& u, double R0, double C0,
                                const LongitudeChart& chart);

}  // namespace longlab
