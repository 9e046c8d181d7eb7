#ifndef LONGLAB_CHART_HPP
#define LONGLAB_CHART_HPP

#include <vector>

#include "sphere.hpp"

namespace longlab {

// Polar lift of a sphere point through the projection onto a distinguished
// coordinate plane: (x_p, x_q) = r (cos theta, sin theta).
struct PolarLift {
  double r = 0.0;
  double theta = 0.0;
};

// Chart assigning a single-valued angle to sphere points away from the axis
// sphere {x_p = x_q = 0}.
//
// StandardCut:  theta in (0, 2 pi), branch cut along the closed half-sphere
//               {x_p >= 0, x_q = 0}; lift rejects points within cut_margin
//               (angular) of the cut and points within 1e-12 of the axis.
// Continued:    angle continued stepwise from a declared reference point and
//               reference angle along a caller-supplied path; each step's raw
//               angular jump must stay below pi/2.
class LongitudeChart {
 public:
  enum class Mode { StandardCut, Continued };

  static LongitudeChart standard_cut(int plane_p = 0, int plane_q = 1,
                                     double cut_margin = 1e-9);
  static LongitudeChart continued(const SpherePoint& reference, double reference_angle,
                                  int plane_p = 0, int plane_q = 1);

  Mode mode() const { return mode_; }
  int plane_p() const { return p_; }
  int plane_q() const { return q_; }
  double cut_margin() const { return cut_margin_; }

  // r(x) = sqrt(x_p^2 + x_q^2); valid in both modes. OnAxis below 1e-12.
  double radius(const SpherePoint& x) const;

  // StandardCut: single-valued lift with branch range (0, 2 pi).
  // Continued: single-step continuation from the reference point.
  PolarLift lift(const SpherePoint& x) const;

  // Continued mode only: threads the angle along the path (starting at the
  // reference) and returns the lift of the last point.
  PolarLift lift_along(const std::vector<SpherePoint>& path) const;

  // Differentials of r and theta at x, as covectors on ambient tangent
  // vectors. Branch-independent; defined wherever r > 0.
  double dr(const SpherePoint& x, const Vec& v) const;
  double dtheta(const SpherePoint& x, const Vec& v) const;

 private:
  LongitudeChart() = default;
  double raw_angle(const SpherePoint& x) const;  // atan2 in [0, 2 pi)

  Mode mode_ = Mode::StandardCut;
  int p_ = 0, q_ = 1;
  double cut_margin_ = 1e-9;
  Vec ref_;
  double ref_angle_ = 0.0;
};

// Closed-form Hessians of the polar pair in an orthonormal tangent frame:
//   Hess r     = -r g + r dtheta (x) dtheta
//   Hess theta = -(dr (x) dtheta + dtheta (x) dr) / r
// Need r > 0 only; usable on the branch cut itself (the forms do not depend
// on the branch choice).
BilinearForm hess_r(const LongitudeChart& chart, const TangentFrame& frame);
BilinearForm hess_theta(const LongitudeChart& chart, const TangentFrame& frame);

// Locally continued angle around a base point, for feeding theta to
// finite-difference checks across the cut: continuous near base, equal to
// the chart angle at base.
std::function<double(const SpherePoint&)> local_angle_function(const LongitudeChart& chart,
                                                               const SpherePoint& base);

struct ConvexBuilderResult {
  double c = 0.0;         // margin constant, half the minimal r over samples
  double lambda = 0.0;    // exponent reached by the doubling search
  double min_eig = 0.0;   // min over samples of the smallest Hess F eigenvalue
};

// Builds the strictly convex exhaustion function
//   F = lambda^{-1} exp(lambda (theta + asin(c / r)))
// over the sample set: c = min_samples(r) / 2, lambda found by doubling from
// 1 until the smallest eigenvalue of Hess F is positive on every sample.
// NoMargin if min r <= 1e-6; SearchExhausted past lambda = 2^20.
ConvexBuilderResult build_convex_function(const std::vector<SpherePoint>& samples,
                                          const LongitudeChart& chart);

// Smallest Hess F eigenvalue over the samples for given (c, lambda);
// build_convex_function is a search over this evaluation.
double convex_min_eigenvalue(const std::vector<SpherePoint>& samples,
                             const LongitudeChart& chart, double c, double lambda);

}  // namespace longlab

#endif
