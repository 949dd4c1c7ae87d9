#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "geomflow/curves.hpp"
#include "geomflow/grid.hpp"

namespace testing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline geomflow::PeriodicGrid circle_grid(std::size_t n) { return geomflow::PeriodicGrid(n, kTwoPi); }

inline geomflow::GridFunction sample(std::size_t n, const std::function<double(double)>& f) {
  return geomflow::GridFunction::sample(circle_grid(n), f);
}

inline double sup_diff(const geomflow::GridFunction& a, const geomflow::GridFunction& b) {
  return (a - b).max_abs();
}

inline double sup_diff(const geomflow::GridFunction& a, const std::function<double(double)>& f) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - f(a.grid.point(j))));
  return m;
}

// Random trigonometric polynomial with modes 1..modes and decaying amplitudes.
inline geomflow::GridFunction random_smooth(std::size_t n, std::mt19937_64& rng, int modes = 4, double scale = 1.0) {
  std::normal_distribution<double> normal;
  std::vector<double> a(modes), b(modes);
  for (int m = 0; m < modes; ++m) {
    a[m] = scale * normal(rng) / (1.0 + m * m);
    b[m] = scale * normal(rng) / (1.0 + m * m);
  }
  const double c = scale * normal(rng);
  return sample(n, [=](double x) {
    double s = c;
    for (int m = 0; m < int(a.size()); ++m) s += a[m] * std::cos((m + 1) * x) + b[m] * std::sin((m + 1) * x);
    return s;
  });
}

inline geomflow::ProjectiveCurve projective(std::size_t n, const std::function<double(double)>& periodic,
                                            double slope = 1.0) {
  return geomflow::ProjectiveCurve(slope, sample(n, periodic));
}

// Helix wound once around a torus with an out-of-plane wobble; generic torsion.
inline geomflow::EuclideanCurve torus_helix(std::size_t n, double wobble = 0.15) {
  return geomflow::EuclideanCurve::sample(circle_grid(n), [wobble](double t) {
    const double r = 3.0 + 0.6 * std::cos(5.0 * t);
    return Eigen::Vector3d(r * std::cos(t), r * std::sin(t), 0.6 * std::sin(5.0 * t) + wobble * std::cos(2.0 * t));
  });
}

inline geomflow::EuclideanCurve circle(std::size_t n, double radius) {
  return geomflow::EuclideanCurve::sample(circle_grid(n), [radius](double t) {
    return Eigen::Vector3d(radius * std::cos(t), radius * std::sin(t), 0.0);
  });
}

}  // namespace testing
