#include "ratfit/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace ratfit {

namespace {

void require_count(Eigen::Index n, const char* what) {
  if (n < 2) throw std::invalid_argument(std::string(what) + " must be >= 2");
}

double linstep(double lo, double hi, Eigen::Index i, Eigen::Index n) {
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

Complex penzl_eval(PenzlVariant variant, Complex z, double t, double u) {
  const double w2 = variant == PenzlVariant::one_parameter ? 200.0 : u;
  const double w3 = variant == PenzlVariant::one_parameter ? 400.0 : 2.0 * u;
  const Complex s = z + 1.0;
  Complex h = 200.0 * s / (s * s + t * t);
  h += 200.0 * s / (s * s + w2 * w2);
  h += 200.0 * s / (s * s + w3 * w3);
  for (int k = 1; k <= 1000; ++k) h += 1.0 / (z + static_cast<double>(k));
  return h;
}

PointSet gen_abs(Eigen::Index count) {
  require_count(count, "count");
  PointSet p;
  p.X.resize(count, 1);
  p.y.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const double x = linstep(-1.0, 1.0, i, count);
    p.X(i, 0) = x;
    p.y(i) = std::abs(x);
  }
  return p;
}

PointSet gen_exp(Eigen::Index count) {
  require_count(count, "count");
  PointSet p;
  p.X.resize(count, 1);
  p.y.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const double x = -std::pow(10.0, linstep(-3.0, 4.0, i, count));
    p.X(i, 0) = x;
    p.y(i) = std::exp(x);
  }
  return p;
}

PointSet gen_tan(Eigen::Index count) {
  require_count(count, "count");
  PointSet p;
  p.X.resize(count, 1);
  p.y.resize(count);
  const double step = 2.0 * M_PI / static_cast<double>(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Complex x = std::polar(1.0, step * static_cast<double>(i));
    p.X(i, 0) = x;
    p.y(i) = std::tan(256.0 * x);
  }
  return p;
}

PointSet gen_exp2d(Eigen::Index count, std::uint64_t seed) {
  require_count(count, "count");
  SplitMix64 rng(seed);
  PointSet p;
  p.X.resize(count, 2);
  p.y.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const double x1 = 2.0 * rng.next_unit() - 1.0;
    const double x2 = 2.0 * rng.next_unit() - 1.0;
    p.X(i, 0) = x1;
    p.X(i, 1) = x2;
    p.y(i) = std::exp(x1 * x2) /
             ((x1 - 1.2) * (x1 + 1.2) * (x2 - 1.2) * (x2 + 1.2));
  }
  return p;
}

PointSet gen_penzl1(Eigen::Index freq_count, Eigen::Index t_count) {
  require_count(freq_count, "freq_count");
  require_count(t_count, "t_count");
  PointSet p;
  p.X.resize(freq_count * t_count, 2);
  p.y.resize(freq_count * t_count);
  Eigen::Index row = 0;
  for (Eigen::Index it = 0; it < t_count; ++it) {
    const double t = linstep(10.0, 100.0, it, t_count);
    for (Eigen::Index iw = 0; iw < freq_count; ++iw, ++row) {
      const double omega = std::pow(10.0, linstep(-1.0, 3.0, iw, freq_count));
      p.X(row, 0) = omega;
      p.X(row, 1) = t;
      p.y(row) = penzl_eval(PenzlVariant::one_parameter, Complex(0.0, omega), t);
    }
  }
  return p;
}

PointSet gen_penzl2(Eigen::Index freq_count, Eigen::Index t_count,
                    Eigen::Index u_count) {
  require_count(freq_count, "freq_count");
  require_count(t_count, "t_count");
  require_count(u_count, "u_count");
  PointSet p;
  const Eigen::Index total = freq_count * t_count * u_count;
  p.X.resize(total, 3);
  p.y.resize(total);
  Eigen::Index row = 0;
  for (Eigen::Index iu = 0; iu < u_count; ++iu) {
    const double u = linstep(150.0, 250.0, iu, u_count);
    for (Eigen::Index it = 0; it < t_count; ++it) {
      const double t = linstep(10.0, 100.0, it, t_count);
      for (Eigen::Index iw = 0; iw < freq_count; ++iw, ++row) {
        const double omega =
            std::pow(10.0, linstep(0.0, std::log10(2000.0), iw, freq_count));
        p.X(row, 0) = omega;
        p.X(row, 1) = t;
        p.X(row, 2) = u;
        p.y(row) =
            penzl_eval(PenzlVariant::two_parameter, Complex(0.0, omega), t, u);
      }
    }
  }
  return p;
}

}  // namespace ratfit
