#include "shrink.hpp"

#include <cmath>

namespace longlab {

double unit_ball_volume(int m) {
  if (m < 1) fail(Err::InvalidDimension, "unit ball volume needs m >= 1");
  return std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

ShrinkChain shrink_chain(const std::function<double(double)>& M_func, double R0, double C0,
                         double c2) {
  if (!(C0 > 0.0)) fail(Err::InvalidRange, "C0 must be positive");
  if (!(c2 > 0.0)) fail(Err::InvalidRange, "c2 must be positive");
  if (!(R0 > 0.0)) fail(Err::InvalidRange, "R0 must be positive");

  ShrinkChain out;
  out.c1 = 1.0;  // -log(1-t) >= t on (0,1), so the sharp choice is 1
  double M0 = M_func(R0);
  if (!(M0 > 0.0) || !std::isfinite(M0)) fail(Err::InvalidRange, "M(R0) must be finite positive");

  // target: accumulate contraction log(2*pi/(3*c2)); nothing to do if the
  // oscillation already fits, hence the clamp at zero
  double target = std::log(3.0 * c2 / kTwoPi);
  out.C1 = std::max(0.0, std::log(2.0) * target / out.c1);
  out.bound = -target;

  // log2(R0 / (2 R1)) in exact form; guards the radius against underflow
  double halvings = out.C1 * std::exp(C0 * M0) / std::log(2.0);
  if (!(halvings <= 860.0))
    fail(Err::InvalidRange, "contraction chain too deep, the radius would underflow");
  out.R1 = 0.5 * R0 * std::exp(-out.C1 * std::exp(C0 * M0));
  out.depth = int(std::floor(halvings)) + 1;

  double sum = 0.0;
  double prev_M = -1.0;
  for (int j = 0; j < out.depth; ++j) {
    double Rj = std::ldexp(R0, -j);
    double Mj = M_func(Rj);
    if (!(Mj > 0.0) || !std::isfinite(Mj))
      fail(Err::InvalidRange, "M must be finite positive along the chain");
    if (prev_M >= 0.0 && Mj > prev_M * (1.0 + 1e-12))
      fail(Err::InvalidRange, "M must be nondecreasing in the radius");
    prev_M = Mj;
    double t = std::exp(-C0 * Mj);
    double lf = std::log1p(-t);
    out.ledger.push_back({Rj, lf});
    sum += lf;
  }
  out.ledger_sum = sum;
  out.verified = (sum <= out.bound + 1e-12);
  return out;
}

GeometryConstants dsvp_constants(int m, double D_R0, double Lambda_R0, double C_m) {
  if (m < 2) fail(Err::InvalidDimension, "need dimension at least 2");
  if (!(D_R0 >= 1.0)) fail(Err::InvalidRange, "doubling bound must be at least 1");
  if (!(Lambda_R0 > 0.0)) fail(Err::InvalidRange, "spectral bound must be positive");
  if (!(C_m > 0.0)) fail(Err::InvalidRange, "Sobolev constant must be positive");

  GeometryConstants gc;
  gc.m = m;
  gc.nu = (m == 2) ? 4.0 : double(m) / double(m - 2);
  gc.omega_m = unit_ball_volume(m);
  gc.K1 = 2.0 * gc.nu * double(m - 1) / double(m) * std::pow(D_R0, 1.0 / m) *
          std::pow(gc.omega_m, 1.0 / m) * C_m;
  gc.K2 = std::pow(2.0, m) * D_R0;
  gc.K3 = (9.0 / 16.0) * Lambda_R0;
  gc.sobolev_placeholder = (C_m == 1.0);
  return gc;
}

}  // namespace longlab
