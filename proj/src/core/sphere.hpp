#ifndef LONGLAB_SPHERE_HPP
#define LONGLAB_SPHERE_HPP

#include <functional>

#include "common.hpp"

namespace longlab {

// Point on the unit sphere S^n embedded in R^{n+1}, n >= 2.
struct SpherePoint {
  Vec x;

  int ambient_dim() const { return int(x.size()); }
  int sphere_dim() const { return int(x.size()) - 1; }

  static SpherePoint make(const Vec& v);          // validates |v| = 1 within 1e-12
  static SpherePoint normalized(const Vec& v);    // rescales, rejects near-zero input
};

// Tangent vector at a base point: (base, dir) with dir orthogonal to base.
struct TangentVector {
  SpherePoint base;
  Vec dir;

  static TangentVector make(const SpherePoint& base, const Vec& dir);  // validates orthogonality (1e-12)
  // Projects dir onto the tangent space at base and keeps the result as-is.
  static TangentVector project(const SpherePoint& base, const Vec& dir);
  double norm() const { return dir.norm(); }
};

// Orthonormal tangent frame at a point, columns are the basis vectors.
// Built by Gram-Schmidt on the ambient coordinate vectors in index order,
// so the frame is deterministic for a given base point.
struct TangentFrame {
  SpherePoint base;
  Mat basis;  // (n+1) x n

  static TangentFrame coordinate_frame(const SpherePoint& base);
  int dim() const { return int(basis.cols()); }
};

// Symmetric bilinear form expressed in a supplied orthonormal tangent frame.
struct BilinearForm {
  Mat m;  // n x n, symmetric

  double operator()(const Vec& a, const Vec& b) const { return a.dot(m * b); }
  double min_eigenvalue() const;
  static BilinearForm from_matrix(const Mat& m);  // validates symmetry (1e-10)
};

// Unit-speed geodesic through x with initial velocity v: cos(t) x + sin(t) v.
// v must be unit and tangent at x (NotTangent otherwise).
SpherePoint geodesic(const SpherePoint& x, const Vec& v, double t);

// Projection to the distinguished plane coordinates, default (0, 1).
Eigen::Vector2d project_to_plane(const SpherePoint& x, int p = 0, int q = 1);

// Hessian of the ambient-linear function y -> (y, a) restricted to the sphere:
// Hess (.,a) = -(x,a) g at x.  Exact closed form.
BilinearForm hess_linear(const SpherePoint& x, const Vec& a, const TangentFrame& frame);

// Second derivative of f along the geodesic with (possibly non-unit)
// initial velocity u, by central differences with one Richardson step.
// This is the finite-difference oracle for all closed-form Hessians.
double fd_second_derivative(const std::function<double(const SpherePoint&)>& f,
                            const SpherePoint& x, const Vec& u, double h);

// Full finite-difference Hessian in the given frame. Diagonal entries come
// from geodesic second derivatives, off-diagonal ones from polarization.
// h must lie in [1e-5, 1e-2].
BilinearForm fd_hessian(const std::function<double(const SpherePoint&)>& f,
                        const TangentFrame& frame, double h);

// Uniformly random point / frame helpers (deterministic under the given rng).
SpherePoint random_sphere_point(Rng& rng, int ambient_dim);
TangentVector random_unit_tangent(Rng& rng, const SpherePoint& base);

}  // namespace longlab

#endif
