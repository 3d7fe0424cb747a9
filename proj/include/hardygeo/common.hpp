#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace hardygeo {

// Error kinds mirror the failure modes of the pipeline; the CLI maps them to
// exit codes (config -> 3, hypothesis -> 1, solver -> 2).
enum class ErrorKind {
  EmptyDomain,
  CrackNotInterior,
  BadDimension,
  ScaleTooFine,
  QuadratureUnderflow,
  DEmpty,
  NoConvergence,
  ENotOnBoundary,
  NonzeroNearE,
  CoverGap,
  PatchNotReflectable,
  ConditionFailed,
  Config,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  ErrorKind kind;
};

const char* error_kind_name(ErrorKind k);

using Vec = std::array<double, 3>;
using IVec = std::array<int64_t, 3>;

inline Vec vec(double x, double y = 0.0, double z = 0.0) { return {x, y, z}; }

inline double dist2(const Vec& a, const Vec& b, int d) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) {
    double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

inline double dist(const Vec& a, const Vec& b, int d) { return std::sqrt(dist2(a, b, d)); }

inline double norm(const Vec& a, int d) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) s += a[k] * a[k];
  return std::sqrt(s);
}

// Clipped cubic smoothstep: 0 for t<=0, 1 for t>=1, 3t^2-2t^3 between.
inline double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * (3.0 - 2.0 * t);
}

// Deterministic RNG. mt19937_64 is pinned by the standard; the scalings below
// avoid std::*_distribution, whose sequences vary between library vendors.
class Rng {
public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0,1)
    return (eng_() >> 11) * (1.0 / 9007199254740992.0);
  }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double log_uniform(double a, double b) { return a * std::exp(uniform() * std::log(b / a)); }
  int64_t index(int64_t n) {  // [0,n)
    return static_cast<int64_t>(uniform() * static_cast<double>(n)) % n;
  }
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(6.283185307179586476925287 * u2);
    have_spare_ = true;
    return r * std::cos(6.283185307179586476925287 * u2);
  }

private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct Norms {
  double lp = 0.0;        // ||u||_p
  double grad_lp = 0.0;   // ||grad u||_p (face quadrature)
  double weighted_lp = 0.0;  // ||u / dist_D||_p
};

}  // namespace hardygeo
