#pragma once

#include <functional>
#include <map>
#include <vector>

#include "common.hpp"

namespace longlab {

// Constants of the small-scale geometry package. Defaults realize the
// canonical worked example (C0 = 1, c1 = 1, c2 = 2*pi).
struct GeometryConstants {
  int m = 2;
  double nu = 4.0;
  double K1 = 0.0;
  double K2 = 0.0;
  double K3 = 0.0;
  double omega_m = kPi;
  double C0 = 1.0;
  double c1 = 1.0;
  double c2 = kTwoPi;
  double C1 = 0.0;
  std::map<double, double> M_table;
  bool sobolev_placeholder = false;  // true when C_m was left at its default
};

double unit_ball_volume(int m);

struct ShrinkStep {
  double radius;      // ball radius the step contracts from
  double log_factor;  // log(1 - exp(-C0 * M(radius)))
};

struct ShrinkChain {
  double c1 = 1.0;
  double C1 = 0.0;
  double R1 = 0.0;
  int depth = 0;  // dyadic steps needed to pass below 2*R1
  std::vector<ShrinkStep> ledger;
  double ledger_sum = 0.0;
  double bound = 0.0;  // -log(3*c2/(2*pi)); ledger_sum must stay below it
  bool verified = false;
};

// Iterated oscillation decay: given the radial bound M, produce the radius
// R1 at which the accumulated contraction beats the target, together with
// the per-step ledger that certifies it.
ShrinkChain shrink_chain(const std::function<double(double)>& M_func, double R0, double C0,
                         double c2);

// Populate the dimension-dependent constants from the doubling bound D_R0,
// the spectral bound Lambda_R0 and the ambient Sobolev constant C_m.
GeometryConstants dsvp_constants(int m, double D_R0, double Lambda_R0, double C_m = 1.0);

}  // namespace longlab
