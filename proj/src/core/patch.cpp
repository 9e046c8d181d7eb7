#include "patch.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace longlab {

namespace {

std::vector<long long> strides_of(const std::vector<int>& shape) {
  int m = int(shape.size());
  std::vector<long long> s(m, 1);
  for (int k = m - 2; k >= 0; --k) s[k] = s[k + 1] * shape[k + 1];
  return s;
}

}  // namespace

long long ImmersedPatch::sample_count() const {
  long long n = 1;
  for (int s : shape) n *= s;
  return n;
}

long long ImmersedPatch::index(const std::vector<int>& c) const {
  auto st = strides_of(shape);
  long long idx = 0;
  for (int k = 0; k < pdim; ++k) idx += st[k] * c[k];
  return idx;
}

std::vector<int> ImmersedPatch::coords(long long idx) const {
  auto st = strides_of(shape);
  std::vector<int> c(pdim);
  for (int k = 0; k < pdim; ++k) {
    c[k] = int(idx / st[k]);
    idx %= st[k];
  }
  return c;
}

Vec ImmersedPatch::param(long long idx) const {
  auto c = coords(idx);
  Vec u(pdim);
  for (int k = 0; k < pdim; ++k) u[k] = origin[k] + h[k] * c[k];
  return u;
}

void ImmersedPatch::validate() const {
  if (pdim < 1 || adim != pdim + 1) fail(Err::InvalidDimension, "patch must have codimension one");
  if (int(shape.size()) != pdim || int(origin.size()) != pdim || int(h.size()) != pdim ||
      int(periodic.size()) != pdim)
    fail(Err::InvalidArgument, "patch axis data sizes disagree");
  for (int k = 0; k < pdim; ++k) {
    if (shape[size_t(k)] < 3) fail(Err::InvalidArgument, "patch axis needs at least three samples");
    if (!(h[size_t(k)] > 0.0)) fail(Err::InvalidArgument, "patch spacing must be positive");
  }
  if (X.rows() != adim || X.cols() != sample_count())
    fail(Err::InvalidArgument, "patch sample matrix has wrong shape");
  if (has_jet && (static_cast<long long>(jet_first.size()) != sample_count() ||
                  static_cast<long long>(jet_second.size()) != sample_count()))
    fail(Err::InvalidArgument, "patch jet arrays have wrong length");
}

int jet_pair_slot(int pdim, int a, int b) {
  if (a > b) std::swap(a, b);
  return a * pdim - a * (a - 1) / 2 + (b - a);
}

long long patch_shift(const ImmersedPatch& p, long long idx, int axis, int step) {
  auto c = p.coords(idx);
  int v = c[size_t(axis)] + step;
  int n = p.shape[size_t(axis)];
  if (p.periodic[size_t(axis)]) {
    v %= n;
    if (v < 0) v += n;
  } else if (v < 0 || v >= n) {
    fail(Err::InsufficientStencil, "stencil leaves a non-periodic patch axis");
  }
  c[size_t(axis)] = v;
  return p.index(c);
}

ImmersedPatch patch_from_immersion(int pdim, int adim, std::vector<int> shape,
                                   std::vector<double> origin, std::vector<double> h,
                                   std::vector<char> periodic,
                                   const std::function<Vec(const Vec&)>& fn) {
  ImmersedPatch p;
  p.pdim = pdim;
  p.adim = adim;
  p.shape = std::move(shape);
  p.origin = std::move(origin);
  p.h = std::move(h);
  p.periodic = std::move(periodic);
  long long n = p.sample_count();
  p.X = Mat::Zero(adim, n);
  for (long long i = 0; i < n; ++i) {
    Vec x = fn(p.param(i));
    if (x.size() != adim) fail(Err::InvalidArgument, "immersion returned wrong ambient dimension");
    p.X.col(i) = x;
  }
  p.validate();
  return p;
}

ImmersedPatch catenoid_patch(int nt, int nangle, double t_max) {
  if (nt < 5 || nangle < 8) fail(Err::InvalidArgument, "catenoid patch needs a denser sampling");
  ImmersedPatch p;
  p.pdim = 2;
  p.adim = 3;
  p.shape = {nt, nangle};
  p.origin = {-t_max, 0.0};
  p.h = {2.0 * t_max / (nt - 1), kTwoPi / nangle};
  p.periodic = {0, 1};
  long long n = p.sample_count();
  p.X = Mat::Zero(3, n);
  p.has_jet = true;
  p.jet_first.assign(size_t(n), Mat::Zero(3, 2));
  p.jet_second.assign(size_t(n), Mat::Zero(3, 3));
  for (long long i = 0; i < n; ++i) {
    Vec u = p.param(i);
    double ch = std::cosh(u[0]), sh = std::sinh(u[0]);
    double ca = std::cos(u[1]), sa = std::sin(u[1]);
    p.X.col(i) = Vec{{ch * ca, ch * sa, u[0]}};
    Mat& J = p.jet_first[size_t(i)];
    J.col(0) = Vec{{sh * ca, sh * sa, 1.0}};
    J.col(1) = Vec{{-ch * sa, ch * ca, 0.0}};
    Mat& S = p.jet_second[size_t(i)];
    S.col(jet_pair_slot(2, 0, 0)) = Vec{{ch * ca, ch * sa, 0.0}};
    S.col(jet_pair_slot(2, 0, 1)) = Vec{{-sh * sa, sh * ca, 0.0}};
    S.col(jet_pair_slot(2, 1, 1)) = Vec{{-ch * ca, -ch * sa, 0.0}};
  }
  p.validate();
  return p;
}

ImmersedPatch sphere_band_patch(int nu, int nv, double u0) {
  if (!(u0 > 0.0 && u0 < kPi / 2.0)) fail(Err::InvalidArgument, "band offset must sit in (0, pi/2)");
  std::vector<int> shape = {nu, nv};
  std::vector<double> origin = {u0, 0.0};
  std::vector<double> h = {(kPi - 2.0 * u0) / (nu - 1), kTwoPi / nv};
  auto fn = [](const Vec& u) {
    return Vec{{std::sin(u[0]) * std::cos(u[1]), std::sin(u[0]) * std::sin(u[1]), std::cos(u[0])}};
  };
  return patch_from_immersion(2, 3, shape, origin, h, {0, 1}, fn);
}

namespace {

// Generalized cross product: component i is (-1)^i times the minor of T with
// row i removed. Continuous in T, which keeps normals consistent across
// neighboring samples.
Vec tangent_cross(const Mat& T) {
  int adim = int(T.rows()), pdim = int(T.cols());
  Vec nu(adim);
  Mat minor(pdim, pdim);
  for (int i = 0; i < adim; ++i) {
    int r = 0;
    for (int row = 0; row < adim; ++row) {
      if (row == i) continue;
      minor.row(r++) = T.row(row);
    }
    nu[i] = ((i % 2) ? -1.0 : 1.0) * minor.determinant();
  }
  return nu;
}

Mat first_derivatives(const ImmersedPatch& p, long long idx) {
  if (p.has_jet) return p.jet_first[size_t(idx)];
  Mat T(p.adim, p.pdim);
  for (int a = 0; a < p.pdim; ++a) {
    long long plus = patch_shift(p, idx, a, 1), minus = patch_shift(p, idx, a, -1);
    T.col(a) = (p.X.col(plus) - p.X.col(minus)) / (2.0 * p.h[size_t(a)]);
  }
  return T;
}

Vec second_derivative(const ImmersedPatch& p, long long idx, int a, int b) {
  if (p.has_jet) return p.jet_second[size_t(idx)].col(jet_pair_slot(p.pdim, a, b));
  if (a == b) {
    long long plus = patch_shift(p, idx, a, 1), minus = patch_shift(p, idx, a, -1);
    return (p.X.col(plus) - 2.0 * p.X.col(idx) + p.X.col(minus)) / (p.h[size_t(a)] * p.h[size_t(a)]);
  }
  long long pp = patch_shift(p, patch_shift(p, idx, a, 1), b, 1);
  long long pm = patch_shift(p, patch_shift(p, idx, a, 1), b, -1);
  long long mp = patch_shift(p, patch_shift(p, idx, a, -1), b, 1);
  long long mm = patch_shift(p, patch_shift(p, idx, a, -1), b, -1);
  return (p.X.col(pp) - p.X.col(pm) - p.X.col(mp) + p.X.col(mm)) /
         (4.0 * p.h[size_t(a)] * p.h[size_t(b)]);
}

Mat inverse_sqrt_spd(const Mat& g) {
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  Vec lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i) {
    if (!(lam[i] > 0.0)) fail(Err::InvalidArgument, "patch metric is not positive definite");
    lam[i] = 1.0 / std::sqrt(lam[i]);
  }
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

SampleGeometry patch_geometry(const ImmersedPatch& p, long long idx) {
  p.validate();
  if (idx < 0 || idx >= p.sample_count()) fail(Err::InvalidArgument, "sample index out of range");
  SampleGeometry out;
  out.T = first_derivatives(p, idx);
  out.g = out.T.transpose() * out.T;
  double det = out.g.determinant();
  if (!(det > 0.0)) fail(Err::InvalidArgument, "degenerate tangent basis");
  out.sqrtg = std::sqrt(det);
  out.ginv = out.g.inverse();
  Vec cross = tangent_cross(out.T);
  double cn = cross.norm();
  if (!(cn > 0.0)) fail(Err::InvalidArgument, "degenerate tangent basis");
  out.normal = cross / cn;
  out.b = Mat(p.pdim, p.pdim);
  for (int a = 0; a < p.pdim; ++a)
    for (int bb = a; bb < p.pdim; ++bb) {
      double val = second_derivative(p, idx, a, bb).dot(out.normal);
      out.b(a, bb) = val;
      out.b(bb, a) = val;
    }
  Mat gis = inverse_sqrt_spd(out.g);
  out.Bframe = gis * out.b * gis;
  out.B2 = (out.Bframe * out.Bframe).trace();
  out.trace_shape = out.Bframe.trace();
  return out;
}

SecondFundamental second_fundamental_form(const ImmersedPatch& p, long long idx) {
  SampleGeometry geo = patch_geometry(p, idx);
  SecondFundamental out;
  out.B = geo.Bframe;
  out.B2 = geo.B2;
  out.trace_shape = geo.trace_shape;
  out.energy_from_B = 0.5 * geo.B2;

  // Independent density: Dirichlet energy of the normal field from sample
  // differences, with local sign alignment.
  std::vector<Vec> dnu(size_t(p.pdim));
  for (int a = 0; a < p.pdim; ++a) {
    long long ip = patch_shift(p, idx, a, 1), im = patch_shift(p, idx, a, -1);
    Vec np = patch_geometry(p, ip).normal;
    Vec nm = patch_geometry(p, im).normal;
    if (np.dot(geo.normal) < 0.0) np = -np;
    if (nm.dot(geo.normal) < 0.0) nm = -nm;
    dnu[size_t(a)] = (np - nm) / (2.0 * p.h[size_t(a)]);
  }
  double dg2 = 0.0;
  for (int a = 0; a < p.pdim; ++a)
    for (int bb = 0; bb < p.pdim; ++bb) dg2 += geo.ginv(a, bb) * dnu[size_t(a)].dot(dnu[size_t(bb)]);
  out.energy_from_dgamma = 0.5 * dg2;
  return out;
}

SecondFundamental second_fundamental_form(const MinimalGraph& mg, long long node) {
  if (node < 0 || node >= mg.dom.node_count() || !mg.interior[size_t(node)])
    fail(Err::BoundaryNode, "need an interior node");
  int m = mg.dom.m;
  auto c = mg.dom.coords(node);
  for (int k = 0; k < m; ++k)
    for (int s = -1; s <= 1; s += 2) {
      auto cc = c;
      cc[size_t(k)] += s;
      if (!mg.dom.in_shape(cc) || !mg.interior[size_t(mg.dom.index(cc))])
        fail(Err::InsufficientStencil, "normal differences need interior axis neighbors");
    }

  Vec slope = graph_slope(mg, node);
  double W = std::sqrt(1.0 + slope.squaredNorm());
  Mat g = Mat::Identity(m, m) + slope * slope.transpose();
  Mat b = graph_hessian(mg, node) / W;
  Mat gis = inverse_sqrt_spd(g);
  SecondFundamental out;
  out.B = gis * b * gis;
  out.B2 = (out.B * out.B).trace();
  out.trace_shape = out.B.trace();
  out.energy_from_B = 0.5 * out.B2;

  // The graph normal has a positive last component everywhere, so central
  // differences of the Gauss map need no sign alignment.
  Mat ginv = g.inverse();
  std::vector<Vec> dnu(static_cast<size_t>(m));
  for (int k = 0; k < m; ++k) {
    auto cp = c, cm = c;
    cp[size_t(k)] += 1;
    cm[size_t(k)] -= 1;
    dnu[size_t(k)] =
        (gauss_map(mg, mg.dom.index(cp)) - gauss_map(mg, mg.dom.index(cm))) / (2.0 * mg.dom.h);
  }
  double dg2 = 0.0;
  for (int a = 0; a < m; ++a)
    for (int bb = 0; bb < m; ++bb) dg2 += ginv(a, bb) * dnu[size_t(a)].dot(dnu[size_t(bb)]);
  out.energy_from_dgamma = 0.5 * dg2;
  return out;
}

namespace {

// Orthonormalize the projection of a neighbor frame onto the tangent plane
// at the center, then read it in the center frame. The result is close to a
// rotation; it transports frame components of B across one sample step.
Mat transport_matrix(const Vec& center_normal, const Mat& center_frame, const Mat& neighbor_frame) {
  Mat V = neighbor_frame - center_normal * (center_normal.transpose() * neighbor_frame);
  int p = int(V.cols());
  for (int a = 0; a < p; ++a) {
    for (int b = 0; b < a; ++b) V.col(a) -= V.col(b).dot(V.col(a)) * V.col(b);
    double norm = V.col(a).norm();
    if (!(norm > 1e-12)) fail(Err::InvalidArgument, "frame transport degenerated");
    V.col(a) /= norm;
  }
  return center_frame.transpose() * V;
}

}  // namespace

SimonsKato simons_kato_check(const ImmersedPatch& p, double min_tol) {
  p.validate();
  long long n = p.sample_count();

  // Geometry is needed on the core plus two rings; FD geometry already
  // needs one ring, so precompute wherever the stencil fits.
  std::vector<char> have(size_t(n), 0);
  std::vector<double> B2(size_t(n), 0.0), absB(size_t(n), 0.0), sqrtg(size_t(n), 0.0);
  std::vector<Mat> Bf(static_cast<size_t>(n)), frame(static_cast<size_t>(n)), ginv(static_cast<size_t>(n));
  std::vector<Vec> normal(static_cast<size_t>(n));
  for (long long i = 0; i < n; ++i) {
    auto c = p.coords(i);
    bool ok = true;
    if (!p.has_jet)
      for (int k = 0; k < p.pdim; ++k)
        if (!p.periodic[size_t(k)] && (c[size_t(k)] < 1 || c[size_t(k)] > p.shape[size_t(k)] - 2))
          ok = false;
    if (!ok) continue;
    SampleGeometry geo = patch_geometry(p, i);
    have[size_t(i)] = 1;
    B2[size_t(i)] = geo.B2;
    absB[size_t(i)] = std::sqrt(std::max(geo.B2, 0.0));
    sqrtg[size_t(i)] = geo.sqrtg;
    ginv[size_t(i)] = geo.ginv;
    normal[size_t(i)] = geo.normal;
    Bf[size_t(i)] = geo.Bframe;
    Mat gis = inverse_sqrt_spd(geo.g);
    frame[size_t(i)] = geo.T * gis;
    if (std::abs(geo.trace_shape) > min_tol * std::max(1.0, absB[size_t(i)]))
      fail(Err::NotMinimal, "mean curvature is not negligible on this patch");
  }

  std::vector<long long> core;
  for (long long i = 0; i < n; ++i) {
    if (!have[size_t(i)]) continue;
    auto c = p.coords(i);
    bool ok = true;
    for (int k = 0; k < p.pdim; ++k)
      if (!p.periodic[size_t(k)]) {
        int lo = p.has_jet ? 2 : 3;
        if (c[size_t(k)] < lo || c[size_t(k)] > p.shape[size_t(k)] - 1 - lo) ok = false;
      }
    if (ok) core.push_back(i);
  }
  if (core.empty()) fail(Err::InsufficientStencil, "no core samples away from the patch edges");

  auto dscalar = [&](const std::vector<double>& s, long long v, int a) {
    return (s[size_t(patch_shift(p, v, a, 1))] - s[size_t(patch_shift(p, v, a, -1))]) /
           (2.0 * p.h[size_t(a)]);
  };

  // Divergence-form Laplace-Beltrami of B2 with nodal coefficients.
  auto lap_B2 = [&](long long v) {
    double div = 0.0;
    for (int a = 0; a < p.pdim; ++a) {
      auto flux = [&](long long w) {
        double s = 0.0;
        for (int b = 0; b < p.pdim; ++b) s += ginv[size_t(w)](a, b) * dscalar(B2, w, b);
        return sqrtg[size_t(w)] * s;
      };
      div += (flux(patch_shift(p, v, a, 1)) - flux(patch_shift(p, v, a, -1))) / (2.0 * p.h[size_t(a)]);
    }
    return div / sqrtg[size_t(v)];
  };

  SimonsKato out;
  out.kato_min = std::numeric_limits<double>::infinity();
  out.kato_max = -std::numeric_limits<double>::infinity();
  double kato_factor = 1.0 + 2.0 / p.pdim;
  for (long long v : core) {
    std::vector<Mat> dB(size_t(p.pdim));
    for (int a = 0; a < p.pdim; ++a) {
      long long ip = patch_shift(p, v, a, 1), im = patch_shift(p, v, a, -1);
      Mat Mp = transport_matrix(normal[size_t(v)], frame[size_t(v)], frame[size_t(ip)]);
      Mat Mm = transport_matrix(normal[size_t(v)], frame[size_t(v)], frame[size_t(im)]);
      Mat Bp = Mp * Bf[size_t(ip)] * Mp.transpose();
      Mat Bm = Mm * Bf[size_t(im)] * Mm.transpose();
      dB[size_t(a)] = (Bp - Bm) / (2.0 * p.h[size_t(a)]);
    }
    double gradB2 = 0.0, gradAbs2 = 0.0;
    for (int a = 0; a < p.pdim; ++a)
      for (int b = 0; b < p.pdim; ++b) {
        gradB2 += ginv[size_t(v)](a, b) * (dB[size_t(a)] * dB[size_t(b)]).trace();
        gradAbs2 += ginv[size_t(v)](a, b) * dscalar(absB, v, a) * dscalar(absB, v, b);
      }
    double simons = lap_B2(v) + 2.0 * B2[size_t(v)] * B2[size_t(v)] - 2.0 * gradB2;
    double kato = gradB2 - kato_factor * gradAbs2;
    out.simons_max = std::max(out.simons_max, std::abs(simons));
    out.kato_min = std::min(out.kato_min, kato);
    out.kato_max = std::max(out.kato_max, kato);
    out.minimality_max = std::max(out.minimality_max, std::abs(Bf[size_t(v)].trace()));
  }
  out.core_samples = static_cast<long long>(core.size());
  return out;
}

}  // namespace longlab
