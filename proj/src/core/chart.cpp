#include "chart.hpp"

#include <cmath>
#include <limits>

namespace longlab {

LongitudeChart LongitudeChart::standard_cut(int plane_p, int plane_q, double cut_margin) {
  if (plane_p == plane_q || plane_p < 0 || plane_q < 0)
    fail(Err::InvalidArgument, "chart plane indices must be distinct and nonnegative");
  if (cut_margin < 0.0 || cut_margin > 1e-2)
    fail(Err::InvalidRange, "cut margin out of range");
  LongitudeChart c;
  c.mode_ = Mode::StandardCut;
  c.p_ = plane_p;
  c.q_ = plane_q;
  c.cut_margin_ = cut_margin;
  return c;
}

LongitudeChart LongitudeChart::continued(const SpherePoint& reference, double reference_angle,
                                         int plane_p, int plane_q) {
  if (plane_p == plane_q || plane_p < 0 || plane_q < 0)
    fail(Err::InvalidArgument, "chart plane indices must be distinct and nonnegative");
  LongitudeChart c;
  c.mode_ = Mode::Continued;
  c.p_ = plane_p;
  c.q_ = plane_q;
  c.ref_ = reference.x;
  c.ref_angle_ = reference_angle;
  // the declared angle must point at the reference's actual plane direction
  double r = std::hypot(reference.x[plane_p], reference.x[plane_q]);
  if (r < 1e-12) fail(Err::OnAxis, "continued chart reference lies on the axis sphere");
  double cx = r * std::cos(reference_angle);
  double cy = r * std::sin(reference_angle);
  if (std::hypot(cx - reference.x[plane_p], cy - reference.x[plane_q]) > 1e-9)
    fail(Err::InvalidArgument, "reference angle does not match the reference point");
  return c;
}

double LongitudeChart::radius(const SpherePoint& x) const {
  if (p_ >= x.ambient_dim() || q_ >= x.ambient_dim())
    fail(Err::InvalidDimension, "chart plane indices exceed ambient dimension");
  double r = std::hypot(x.x[p_], x.x[q_]);
  if (r < 1e-12) fail(Err::OnAxis, "point lies on the axis sphere");
  return r;
}

double LongitudeChart::raw_angle(const SpherePoint& x) const {
  double a = std::atan2(x.x[q_], x.x[p_]);
  if (a < 0.0) a += kTwoPi;
  return a;  // in [0, 2 pi)
}

PolarLift LongitudeChart::lift(const SpherePoint& x) const {
  if (mode_ == Mode::Continued) return lift_along({x});
  double r = radius(x);
  double a = raw_angle(x);
  double dist_to_cut = std::min(a, kTwoPi - a);
  if (dist_to_cut < cut_margin_)
    fail(Err::OnBranchCut, "point lies within the cut margin of the branch cut");
  return PolarLift{r, a};
}

PolarLift LongitudeChart::lift_along(const std::vector<SpherePoint>& path) const {
  if (mode_ != Mode::Continued)
    fail(Err::InvalidArgument, "lift_along requires a continued chart");
  if (path.empty()) fail(Err::InvalidArgument, "empty continuation path");
  SpherePoint prev{ref_};
  double angle = ref_angle_;
  double prev_raw = raw_angle(prev);
  double r = radius(prev);
  for (const SpherePoint& pt : path) {
    r = radius(pt);
    double cur_raw = raw_angle(pt);
    double jump = cur_raw - prev_raw;
    if (jump > kPi) jump -= kTwoPi;
    if (jump < -kPi) jump += kTwoPi;
    if (std::abs(jump) > 0.5 * kPi)
      fail(Err::OnBranchCut, "continuation step jumps by more than pi/2");
    angle += jump;
    prev_raw = cur_raw;
    prev = pt;
  }
  return PolarLift{r, angle};
}

double LongitudeChart::dr(const SpherePoint& x, const Vec& v) const {
  double r = radius(x);
  return (x.x[p_] * v[p_] + x.x[q_] * v[q_]) / r;
}

double LongitudeChart::dtheta(const SpherePoint& x, const Vec& v) const {
  double r = radius(x);
  return (x.x[p_] * v[q_] - x.x[q_] * v[p_]) / (r * r);
}

BilinearForm hess_r(const LongitudeChart& chart, const TangentFrame& frame) {
  const int n = frame.dim();
  double r = chart.radius(frame.base);
  Vec dth(n);
  for (int i = 0; i < n; ++i) dth[i] = chart.dtheta(frame.base, frame.basis.col(i));
  Mat h = -r * Mat::Identity(n, n) + r * (dth * dth.transpose());
  return BilinearForm{h};
}

BilinearForm hess_theta(const LongitudeChart& chart, const TangentFrame& frame) {
  const int n = frame.dim();
  double r = chart.radius(frame.base);
  Vec drv(n), dth(n);
  for (int i = 0; i < n; ++i) {
    drv[i] = chart.dr(frame.base, frame.basis.col(i));
    dth[i] = chart.dtheta(frame.base, frame.basis.col(i));
  }
  Mat h = -(drv * dth.transpose() + dth * drv.transpose()) / r;
  return BilinearForm{h};
}

std::function<double(const SpherePoint&)> local_angle_function(const LongitudeChart& chart,
                                                               const SpherePoint& base) {
  const int p = chart.plane_p(), q = chart.plane_q();
  double base_raw = std::atan2(base.x[q], base.x[p]);
  double base_angle = chart.lift(base).theta;
  return [p, q, base_raw, base_angle](const SpherePoint& y) {
    double a = std::atan2(y.x[q], y.x[p]) - base_raw;
    if (a > kPi) a -= kTwoPi;
    if (a < -kPi) a += kTwoPi;
    return base_angle + a;
  };
}

namespace {

// Hess F / exp(lambda phi) at one sample, phi = theta + asin(c / r).
// Positive definiteness of this matrix is equivalent to that of Hess F.
Mat scaled_hess_F(const LongitudeChart& chart, const SpherePoint& x, double c, double lambda) {
  TangentFrame frame = TangentFrame::coordinate_frame(x);
  const int n = frame.dim();
  double r = chart.radius(x);
  double s = c / r;
  if (s >= 1.0) fail(Err::InvalidRange, "sample radius below the margin constant");
  double root = std::sqrt(r * r - c * c);
  double sp = -c / (r * root);                                    // d/dr asin(c/r)
  double spp = c * (2.0 * r * r - c * c) / (r * r * root * root * root);
  Vec drv(n), dth(n);
  for (int i = 0; i < n; ++i) {
    drv[i] = chart.dr(x, frame.basis.col(i));
    dth[i] = chart.dtheta(x, frame.basis.col(i));
  }
  Mat Hr = -r * Mat::Identity(n, n) + r * (dth * dth.transpose());
  Mat Hth = -(drv * dth.transpose() + dth * drv.transpose()) / r;
  Mat Hphi = Hth + sp * Hr + spp * (drv * drv.transpose());
  Vec dphi = dth + sp * drv;
  return Hphi + lambda * (dphi * dphi.transpose());
}

}  // namespace

double convex_min_eigenvalue(const std::vector<SpherePoint>& samples,
                             const LongitudeChart& chart, double c, double lambda) {
  if (samples.empty()) fail(Err::InvalidArgument, "empty sample set");
  double worst = std::numeric_limits<double>::infinity();
  for (const SpherePoint& x : samples) {
    double phi = chart.lift(x).theta + std::asin(c / chart.radius(x));
    Mat g = scaled_hess_F(chart, x, c, lambda);
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    // exp(lambda phi) > 0 preserves the sign; clamp the exponent so the
    // reported magnitude stays finite for large lambda
    double scale = std::exp(std::min(lambda * phi, 700.0));
    worst = std::min(worst, scale * es.eigenvalues().minCoeff());
  }
  return worst;
}

ConvexBuilderResult build_convex_function(const std::vector<SpherePoint>& samples,
                                          const LongitudeChart& chart) {
  if (samples.empty()) fail(Err::InvalidArgument, "empty sample set");
  double rmin = std::numeric_limits<double>::infinity();
  for (const SpherePoint& x : samples) rmin = std::min(rmin, chart.radius(x));
  if (rmin <= 1e-6) fail(Err::NoMargin, "samples reach the axis sphere; no convexity margin");
  double c = 0.5 * rmin;
  for (double lambda = 1.0; lambda <= double(1 << 20); lambda *= 2.0) {
    double eig = convex_min_eigenvalue(samples, chart, c, lambda);
    if (eig > 0.0) return ConvexBuilderResult{c, lambda, eig};
  }
  fail(Err::SearchExhausted, "no lambda up to 2^20 makes Hess F positive definite");
}

}  // namespace longlab
