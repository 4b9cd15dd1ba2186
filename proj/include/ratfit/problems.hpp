#pragma once

#include <cstdint>

#include "ratfit/polybasis.hpp"

namespace ratfit {

enum class PenzlVariant { one_parameter, two_parameter };

// Transfer function of the 1006-state Penzl model, evaluated in closed form
// (2x2 resolvent blocks plus the diagonal tail). The one-parameter variant
// uses rotation frequencies (t, 200, 400); the two-parameter variant
// (t, u, 2u).
Complex penzl_eval(PenzlVariant variant, Complex z, double t, double u = 0.0);

// |x| on `count` equispaced points in [-1, 1].
PointSet gen_abs(Eigen::Index count);

// exp(x) on `count` points x = -10^e, e equispaced in [-3, 4].
PointSet gen_exp(Eigen::Index count);

// tan(256 x) on `count` equispaced points on the unit circle, starting at 1.
PointSet gen_tan(Eigen::Index count);

// exp(x1 x2) / ((x1^2 - 1.44)(x2^2 - 1.44)) on `count` seeded uniform
// points in (-1, 1)^2.
PointSet gen_exp2d(Eigen::Index count, std::uint64_t seed);

// One-parameter Penzl grid: coordinates (omega, t) with responses
// H(i*omega, t); omega log-spaced in [0.1, 1000], t equispaced in
// [10, 100]. Rows are flattened with omega varying fastest.
PointSet gen_penzl1(Eigen::Index freq_count, Eigen::Index t_count);

// Two-parameter Penzl grid: coordinates (omega, t, u) with responses
// H(i*omega, t, u); omega log-spaced in [1, 2000], t in [10, 100],
// u in [150, 250]. Omega varies fastest, u slowest.
PointSet gen_penzl2(Eigen::Index freq_count, Eigen::Index t_count,
                    Eigen::Index u_count);

// SplitMix64. Named in generated data headers so runs can be reproduced
// outside this library.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t state_;
};

}  // namespace ratfit
