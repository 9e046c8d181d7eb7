#ifndef LONGLAB_GREAT_CIRCLES_HPP
#define LONGLAB_GREAT_CIRCLES_HPP

#include <optional>
#include <vector>

#include "sphere.hpp"

namespace longlab {

// Closed arc [lo, hi] of equator longitudes, angles in [0, 2 pi], lo <= hi.
struct EquatorArc {
  double lo = 0.0;
  double hi = 0.0;
};

// The three-arc set whose union meets every antipodal pair of equator points:
// [0, pi/3] u [2 pi/3, pi] u [4 pi/3, 5 pi/3].
std::vector<EquatorArc> blocking_arc_set();

struct ArcHit {
  bool hit = false;
  double witness_angle = 0.0;  // longitude of an intersection point inside the arcs
};

// Great circle on S^2 through x with tangent direction v; intersects the
// equator {x_3 = 0} in a pair of antipodal points (or is the equator itself)
// and reports whether one of them lies in the arc set.
// DegenerateCircle if x and v do not span a plane.
ArcHit great_circle_hits_arcs(const SpherePoint& x, const Vec& v,
                              const std::vector<EquatorArc>& arcs);

// k-fold rotation average of f about the x_3-axis,
//   h(x) = (1/k) sum_j f(R_{2 pi j / k} x),
// evaluated for its tangential gradient at the two poles of S^2 by central
// differences with one Richardson step. The average is invariant under a
// nontrivial pole-fixing rotation, so both norms vanish up to fd error.
struct PoleGradients {
  double north = 0.0;
  double south = 0.0;
};

PoleGradients symmetrized_gradient_at_poles(const std::function<double(const SpherePoint&)>& f,
                                            int order = 3, double fd_step = 1e-4);

}  // namespace longlab

#endif
