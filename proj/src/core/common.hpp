#ifndef LONGLAB_COMMON_HPP
#define LONGLAB_COMMON_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace longlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error kinds surfaced by the library. Each maps to a stable C-API status.
enum class Err {
  InvalidArgument,
  OnBranchCut,
  OnAxis,
  NotTangent,
  NoMargin,
  SearchExhausted,
  DegenerateCircle,
  SingularSystem,
  NonPositiveCoefficient,
  EmptyBall,
  DisconnectedBall,
  NonPositiveField,
  InvalidRange,
  InvalidDimension,
  ZeroAverage,
  NonConvergence,
  NotCompactlySupported,
  NewtonDiverged,
  SteepBoundary,
  BoundaryNode,
  InsufficientStencil,
  NonTransverse,
  NotMinimal,
  GaussImageOutOfChart,
  ShrinkViolated,
  InsufficientScales,
  ConfigError,
  IoError,
};

class Error : public std::runtime_error {
 public:
  Error(Err kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Err kind() const { return kind_; }

 private:
  Err kind_;
};

[[noreturn]] inline void fail(Err kind, const std::string& msg) { throw Error(kind, msg); }

const char* err_name(Err kind);

// Deterministic RNG. All randomness in the library and the experiment runner
// goes through this so that a fixed seed reproduces identical bytes on any
// platform (we avoid std::<distribution>, whose output is unspecified).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in (0,1), safe for logs
  double uniform_pos() {
    double u;
    do { u = uniform(); } while (u <= 0.0);
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; one value per call, cache the pair.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform_pos();
    double u2 = uniform();
    double m = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = m * std::sin(a);
    have_spare_ = true;
    return m * std::cos(a);
  }

  Vec gaussian_vec(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = gaussian();
    return v;
  }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + int(next_u64() % std::uint64_t(hi - lo + 1));
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

}  // namespace longlab

#endif
