#include "great_circles.hpp"

#include <cmath>

namespace longlab {

std::vector<EquatorArc> blocking_arc_set() {
  return {{0.0, kPi / 3.0}, {2.0 * kPi / 3.0, kPi}, {4.0 * kPi / 3.0, 5.0 * kPi / 3.0}};
}

namespace {

bool in_arcs(double angle, const std::vector<EquatorArc>& arcs) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  for (const EquatorArc& arc : arcs)
    if (a >= arc.lo && a <= arc.hi) return true;
  return false;
}

}  // namespace

ArcHit great_circle_hits_arcs(const SpherePoint& x, const Vec& v,
                              const std::vector<EquatorArc>& arcs) {
  if (x.ambient_dim() != 3) fail(Err::InvalidDimension, "great circles live on S^2");
  if (v.size() != 3) fail(Err::InvalidDimension, "tangent direction must be 3-dimensional");
  Eigen::Vector3d p = x.x, d = v;
  Eigen::Vector3d n = p.cross(d);  // plane normal of the circle
  if (n.norm() < 1e-12) fail(Err::DegenerateCircle, "point and direction do not span a plane");
  n.normalize();
  if (arcs.empty()) return ArcHit{false, 0.0};
  // circle plane coincides with the equator plane: every arc point is hit
  if (std::hypot(n[0], n[1]) < 1e-12) {
    const EquatorArc& a = arcs.front();
    return ArcHit{true, 0.5 * (a.lo + a.hi)};
  }
  // generic case: the two planes meet along +/- w, both on the sphere
  Eigen::Vector3d w = n.cross(Eigen::Vector3d(0, 0, 1));
  w.normalize();
  double a0 = std::atan2(w[1], w[0]);
  if (a0 < 0.0) a0 += kTwoPi;
  double a1 = a0 + kPi;
  if (a1 >= kTwoPi) a1 -= kTwoPi;
  if (a1 < a0) std::swap(a0, a1);
  if (in_arcs(a0, arcs)) return ArcHit{true, a0};
  if (in_arcs(a1, arcs)) return ArcHit{true, a1};
  return ArcHit{false, 0.0};
}

namespace {

double rotated_average(const std::function<double(const SpherePoint&)>& f,
                       const SpherePoint& x, int order) {
  double acc = 0.0;
  for (int j = 0; j < order; ++j) {
    double a = kTwoPi * double(j) / double(order);
    double ca = std::cos(a), sa = std::sin(a);
    Vec y(3);
    y[0] = ca * x.x[0] - sa * x.x[1];
    y[1] = sa * x.x[0] + ca * x.x[1];
    y[2] = x.x[2];
    acc += f(SpherePoint{y});
  }
  return acc / double(order);
}

double tangential_gradient_norm(const std::function<double(const SpherePoint&)>& h,
                                const SpherePoint& pole, double step) {
  TangentFrame frame = TangentFrame::coordinate_frame(pole);
  double sum2 = 0.0;
  for (int i = 0; i < frame.dim(); ++i) {
    Vec b = frame.basis.col(i);
    auto diff = [&](double s) {
      return (h(geodesic(pole, b, s)) - h(geodesic(pole, b, -s))) / (2.0 * s);
    };
    double g1 = diff(step);
    double g2 = diff(0.5 * step);
    double g = (4.0 * g2 - g1) / 3.0;
    sum2 += g * g;
  }
  return std::sqrt(sum2);
}

}  // namespace

PoleGradients symmetrized_gradient_at_poles(const std::function<double(const SpherePoint&)>& f,
                                            int order, double fd_step) {
  if (order < 2) fail(Err::InvalidRange, "rotation average needs order >= 2");
  if (fd_step <= 0.0 || fd_step > 1e-2) fail(Err::InvalidRange, "fd step out of range");
  auto h = [&f, order](const SpherePoint& x) { return rotated_average(f, x, order); };
  Vec n(3), s(3);
  n << 0, 0, 1;
  s << 0, 0, -1;
  PoleGradients out;
  out.north = tangential_gradient_norm(h, SpherePoint{n}, fd_step);
  out.south = tangential_gradient_norm(h, SpherePoint{s}, fd_step);
  return out;
}

}  // namespace longlab
