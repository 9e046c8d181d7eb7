#ifndef LONGLAB_ELLIPTIC_HPP
#define LONGLAB_ELLIPTIC_HPP

#include <map>

#include "graph.hpp"

namespace longlab {

// Dirichlet problem for the divergence-form operator
//   sum_{w ~ v} c_vw A_vw (f_v - f_w) = 0   at every non-boundary vertex,
// solved by conjugate gradients with diagonal preconditioning (relative
// residual 1e-10 guaranteed, iteration cap 1e5). The discrete maximum
// principle holds up to solver tolerance.
// Errors: NonPositiveCoefficient, SingularSystem (interior component with no
// boundary contact, or CG failure to reach the residual contract).
Vec solve_divergence(const WeightedGraph& g, const CoefficientField& A,
                     const std::map<int, double>& boundary);

// Max over non-boundary vertices of the divergence residual, normalized by
// the local total weight; zero for an exact solution.
double divergence_residual(const WeightedGraph& g, const CoefficientField& A, const Vec& f,
                           const std::map<int, double>& boundary);

struct CoefficientBounds {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double L = 1.0;  // lambda2 / lambda1
};
CoefficientBounds coefficient_bounds(const WeightedGraph& g, const CoefficientField& A, double R);

// Vol(B_R) / Vol(B_{R/2}); EmptyBall if the half ball is empty.
double doubling_constant(const WeightedGraph& g, double R);

// Second Neumann eigenvalue of the measure-weighted graph Laplacian
// restricted to B_{3R/4} (form restriction; constants are the kernel).
// K3_estimate = 1 / (R^2 mu2). DisconnectedBall / EmptyBall as applicable.
struct NeumannPoincare {
  double mu2 = 0.0;
  double K3_estimate = 0.0;
  double rayleigh_residual = 0.0;  // |L v - mu2 M v| / |M v| of the returned eigenvector
  Vec eigenvector;                 // on the ball vertices, ball order
  std::vector<int> ball;
};
NeumannPoincare neumann_poincare_constant(const WeightedGraph& g, double R);

// mu2 of the pencil (L, M) restricted to an explicit connected vertex set.
double mu2_on_vertex_set(const WeightedGraph& g, const std::vector<int>& set, Vec* eigenvector,
                         double* residual);

// Scaled Sobolev ratio of one field supported on B_r:
//   (mean |v|^{2 nu})^{1/(2 nu)} / (r (mean |grad v|^2)^{1/2})
// with means over the ball and gradients over edges touching it; zero for
// fields with vanishing gradient.
double sobolev_ratio(const WeightedGraph& g, double r, double nu, const Vec& v);

// Monte-Carlo lower bound for the scaled Sobolev constant on B_r: max of
// sobolev_ratio over random fields supported in the ball.
double sobolev_constant_probe(const WeightedGraph& g, double r, double nu, int trials,
                              std::uint64_t seed);

// log sup - log inf of f over B_{R/2}; f must be positive on B_R.
double harnack_ratio(const Vec& f, const WeightedGraph& g, double R);

struct OscillationDecay {
  double osc_full = 0.0;  // over B_R
  double osc_half = 0.0;  // over B_{R/2}
  double factor = 0.0;    // osc_half / osc_full, 0 by convention for constants
};
OscillationDecay oscillation_decay(const Vec& f, const WeightedGraph& g, double R);

}  // namespace longlab

#endif
