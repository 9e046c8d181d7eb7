#include "sphere.hpp"

#include <cmath>

namespace longlab {

const char* err_name(Err kind) {
  switch (kind) {
    case Err::InvalidArgument: return "InvalidArgument";
    case Err::OnBranchCut: return "OnBranchCut";
    case Err::OnAxis: return "OnAxis";
    case Err::NotTangent: return "NotTangent";
    case Err::NoMargin: return "NoMargin";
    case Err::SearchExhausted: return "SearchExhausted";
    case Err::DegenerateCircle: return "DegenerateCircle";
    case Err::SingularSystem: return "SingularSystem";
    case Err::NonPositiveCoefficient: return "NonPositiveCoefficient";
    case Err::EmptyBall: return "EmptyBall";
    case Err::DisconnectedBall: return "DisconnectedBall";
    case Err::NonPositiveField: return "NonPositiveField";
    case Err::InvalidRange: return "InvalidRange";
    case Err::InvalidDimension: return "InvalidDimension";
    case Err::ZeroAverage: return "ZeroAverage";
    case Err::NonConvergence: return "NonConvergence";
    case Err::NotCompactlySupported: return "NotCompactlySupported";
    case Err::NewtonDiverged: return "NewtonDiverged";
    case Err::SteepBoundary: return "SteepBoundary";
    case Err::BoundaryNode: return "BoundaryNode";
    case Err::InsufficientStencil: return "InsufficientStencil";
    case Err::NonTransverse: return "NonTransverse";
    case Err::NotMinimal: return "NotMinimal";
    case Err::GaussImageOutOfChart: return "GaussImageOutOfChart";
    case Err::ShrinkViolated: return "ShrinkViolated";
    case Err::InsufficientScales: return "InsufficientScales";
    case Err::ConfigError: return "ConfigError";
    case Err::IoError: return "IoError";
  }
  return "Unknown";
}

SpherePoint SpherePoint::make(const Vec& v) {
  if (v.size() < 3) fail(Err::InvalidDimension, "sphere points need ambient dimension >= 3");
  if (std::abs(v.norm() - 1.0) > 1e-12)
    fail(Err::InvalidArgument, "sphere point must be unit length within 1e-12");
  return SpherePoint{v};
}

SpherePoint SpherePoint::normalized(const Vec& v) {
  if (v.size() < 3) fail(Err::InvalidDimension, "sphere points need ambient dimension >= 3");
  double n = v.norm();
  if (n < 1e-14) fail(Err::InvalidArgument, "cannot normalize a near-zero vector");
  return SpherePoint{v / n};
}

TangentVector TangentVector::make(const SpherePoint& base, const Vec& dir) {
  if (dir.size() != base.x.size()) fail(Err::InvalidDimension, "tangent dimension mismatch");
  if (std::abs(base.x.dot(dir)) > 1e-12 * std::max(1.0, dir.norm()))
    fail(Err::NotTangent, "direction is not orthogonal to the base point");
  return TangentVector{base, dir};
}

TangentVector TangentVector::project(const SpherePoint& base, const Vec& dir) {
  Vec t = dir - base.x.dot(dir) * base.x;
  return TangentVector{base, t};
}

TangentFrame TangentFrame::coordinate_frame(const SpherePoint& base) {
  const int d = base.ambient_dim();
  const int n = d - 1;
  Mat basis(d, n);
  int got = 0;
  for (int i = 0; i < d && got < n; ++i) {
    Vec c = Vec::Zero(d);
    c[i] = 1.0;
    c -= base.x.dot(c) * base.x;
    for (int j = 0; j < got; ++j) c -= basis.col(j).dot(c) * basis.col(j);
    double nrm = c.norm();
    if (nrm < 1e-8) continue;  // coordinate vector parallel to span so far; skip
    basis.col(got++) = c / nrm;
  }
  if (got != n) fail(Err::InvalidArgument, "failed to build a tangent frame");
  return TangentFrame{base, basis};
}

double BilinearForm::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  return es.eigenvalues().minCoeff();
}

BilinearForm BilinearForm::from_matrix(const Mat& m) {
  if (m.rows() != m.cols()) fail(Err::InvalidDimension, "bilinear form must be square");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    fail(Err::InvalidArgument, "bilinear form must be symmetric");
  return BilinearForm{m};
}

SpherePoint geodesic(const SpherePoint& x, const Vec& v, double t) {
  if (v.size() != x.x.size()) fail(Err::InvalidDimension, "velocity dimension mismatch");
  if (std::abs(v.norm() - 1.0) > 1e-10) fail(Err::NotTangent, "geodesic velocity must be unit");
  if (std::abs(x.x.dot(v)) > 1e-10) fail(Err::NotTangent, "geodesic velocity must be tangent");
  Vec y = std::cos(t) * x.x + std::sin(t) * v;
  return SpherePoint{y / y.norm()};
}

Eigen::Vector2d project_to_plane(const SpherePoint& x, int p, int q) {
  if (p < 0 || q < 0 || p >= x.ambient_dim() || q >= x.ambient_dim() || p == q)
    fail(Err::InvalidArgument, "bad plane indices");
  return Eigen::Vector2d(x.x[p], x.x[q]);
}

BilinearForm hess_linear(const SpherePoint& x, const Vec& a, const TangentFrame& frame) {
  if (a.size() != x.x.size()) fail(Err::InvalidDimension, "linear functional dimension mismatch");
  const int n = frame.dim();
  return BilinearForm{-x.x.dot(a) * Mat::Identity(n, n)};
}

namespace {

// plain second central difference of f along the unit-speed geodesic
double second_diff(const std::function<double(const SpherePoint&)>& f,
                   const SpherePoint& x, const Vec& vu, double speed, double h) {
  double fp = f(geodesic(x, vu, speed * h));
  double fm = f(geodesic(x, vu, -speed * h));
  double f0 = f(x);
  return (fp - 2.0 * f0 + fm) / (h * h);
}

}  // namespace

double fd_second_derivative(const std::function<double(const SpherePoint&)>& f,
                            const SpherePoint& x, const Vec& u, double h) {
  if (h < 1e-5 || h > 1e-2) fail(Err::InvalidRange, "fd step must lie in [1e-5, 1e-2]");
  double speed = u.norm();
  if (speed < 1e-14) return 0.0;
  Vec vu = u / speed;
  if (std::abs(x.x.dot(vu)) > 1e-10) fail(Err::NotTangent, "fd direction must be tangent");
  // one Richardson step kills the O(h^2) term of the central difference
  double c1 = second_diff(f, x, vu, speed, h);
  double c2 = second_diff(f, x, vu, speed, 0.5 * h);
  return (4.0 * c2 - c1) / 3.0;
}

BilinearForm fd_hessian(const std::function<double(const SpherePoint&)>& f,
                        const TangentFrame& frame, double h) {
  const int n = frame.dim();
  Mat hess(n, n);
  for (int i = 0; i < n; ++i)
    hess(i, i) = fd_second_derivative(f, frame.base, frame.basis.col(i), h);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      // polarization: Q(b_i + b_j) = Q(b_i) + 2 H_ij + Q(b_j)
      double qij = fd_second_derivative(f, frame.base, frame.basis.col(i) + frame.basis.col(j), h);
      hess(i, j) = hess(j, i) = 0.5 * (qij - hess(i, i) - hess(j, j));
    }
  }
  return BilinearForm{hess};
}

SpherePoint random_sphere_point(Rng& rng, int ambient_dim) {
  for (;;) {
    Vec v = rng.gaussian_vec(ambient_dim);
    double n = v.norm();
    if (n > 1e-8) return SpherePoint{v / n};
  }
}

TangentVector random_unit_tangent(Rng& rng, const SpherePoint& base) {
  for (;;) {
    Vec v = rng.gaussian_vec(base.ambient_dim());
    v -= base.x.dot(v) * base.x;
    double n = v.norm();
    if (n > 1e-8) return TangentVector{base, v / n};
  }
}

}  // namespace longlab
