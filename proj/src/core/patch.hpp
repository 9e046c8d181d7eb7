#pragma once

#include <functional>
#include <vector>

#include "common.hpp"
#include "mingraph.hpp"

namespace longlab {

// Sampled immersion of a parameter box into Euclidean space, codimension
// one. Axes may wrap; non-periodic stencils stop one sample short of each
// end. An optional analytic jet (first and second parameter derivatives)
// makes the pointwise geometry exact instead of finite-differenced.
struct ImmersedPatch {
  int pdim = 2;
  int adim = 3;
  std::vector<int> shape;
  std::vector<double> origin;
  std::vector<double> h;
  std::vector<char> periodic;
  Mat X;  // adim x samples, last axis fastest
  bool has_jet = false;
  std::vector<Mat> jet_first;   // per sample: adim x pdim
  std::vector<Mat> jet_second;  // per sample: adim x pdim*(pdim+1)/2, cols (0,0),(0,1),...,(1,1),...

  long long sample_count() const;
  long long index(const std::vector<int>& c) const;
  std::vector<int> coords(long long idx) const;
  Vec param(long long idx) const;
  void validate() const;
};

// Column slot of the packed second-derivative pair (a,b), a <= b.
int jet_pair_slot(int pdim, int a, int b);

long long patch_shift(const ImmersedPatch& p, long long idx, int axis, int step);

ImmersedPatch patch_from_immersion(int pdim, int adim, std::vector<int> shape,
                                   std::vector<double> origin, std::vector<double> h,
                                   std::vector<char> periodic,
                                   const std::function<Vec(const Vec&)>& fn);

// Catenoid patch (cosh t cos a, cosh t sin a, t) over t in [-t_max, t_max],
// angle periodic, with the analytic jet attached.
ImmersedPatch catenoid_patch(int nt, int nangle, double t_max = 1.5);

// Unit sphere band away from the poles, finite-difference geometry only.
ImmersedPatch sphere_band_patch(int nu, int nv, double u0 = 0.3);

struct SampleGeometry {
  Mat T;       // adim x pdim tangent basis
  Mat g;       // metric
  Mat ginv;
  double sqrtg = 0.0;
  Vec normal;  // generalized cross product of the tangents, normalized
  Mat b;       // second fundamental form in coordinates
  Mat Bframe;  // g^{-1/2} b g^{-1/2}
  double B2 = 0.0;
  double trace_shape = 0.0;
};

SampleGeometry patch_geometry(const ImmersedPatch& p, long long idx);

struct SecondFundamental {
  Mat B;  // orthonormal-frame components
  double B2 = 0.0;
  double trace_shape = 0.0;
  double energy_from_B = 0.0;       // |B|^2 / 2
  double energy_from_dgamma = 0.0;  // Dirichlet density of the normal field
};

// Second fundamental form plus the Gauss-map energy density computed two
// ways; the two densities agree to O(h) on smooth patches.
SecondFundamental second_fundamental_form(const ImmersedPatch& p, long long idx);

// Graph version at a node whose axis neighbors are all interior, so the
// normal field admits central differences there.
SecondFundamental second_fundamental_form(const MinimalGraph& mg, long long node);

struct SimonsKato {
  double simons_max = 0.0;      // max |LB|B|^2 + 2|B|^4 - 2|nabla B|^2|
  double kato_min = 0.0;        // min |nabla B|^2 - (1+2/m)|nabla|B||^2
  double kato_max = 0.0;
  double minimality_max = 0.0;  // max |trace of shape|
  long long core_samples = 0;
};

// Simons identity and refined Kato inequality over the core samples (two
// rings inside each non-periodic end). The covariant derivative of B uses
// projection transport of the orthonormal tangent frames between neighbor
// samples. NotMinimal if the mean curvature exceeds min_tol.
SimonsKato simons_kato_check(const ImmersedPatch& p, double min_tol = 1e-8);

}  // namespace longlab
