#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace geomflow {

using cplx = std::complex<double>;

/// Uniform periodic grid x_j = j L / n on [0, L).
class PeriodicGrid {
 public:
  PeriodicGrid(std::size_t n, double length);

  std::size_t n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double dx() const noexcept { return length_ / static_cast<double>(n_); }
  double point(std::size_t j) const noexcept { return static_cast<double>(j) * dx(); }
  std::vector<double> points() const;

  /// Angular wavenumber of Fourier mode k on this period.
  double wavenumber(double k) const noexcept;

  friend bool operator==(const PeriodicGrid& a, const PeriodicGrid& b) noexcept {
    return a.n_ == b.n_ && a.length_ == b.length_;
  }

 private:
  std::size_t n_;
  double length_;
};

/// Real samples of a periodic function.
struct GridFunction {
  PeriodicGrid grid;
  std::vector<double> values;

  GridFunction(PeriodicGrid g, std::vector<double> v);
  explicit GridFunction(PeriodicGrid g, double fill = 0.0);

  static GridFunction sample(const PeriodicGrid& g, const std::function<double(double)>& f);

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t j) const noexcept { return values[j]; }
  double& operator[](std::size_t j) noexcept { return values[j]; }

  double max_abs() const noexcept;
  double min() const noexcept;
  double max() const noexcept;
  double mean() const noexcept;
  bool all_finite() const noexcept;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(const GridFunction& o);
  GridFunction& operator*=(double s);
  GridFunction& operator+=(double s);
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(GridFunction a, const GridFunction& b);
GridFunction operator/(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double s, GridFunction a);
GridFunction operator*(GridFunction a, double s);
GridFunction operator+(GridFunction a, double s);
GridFunction operator-(GridFunction a);
GridFunction map(const GridFunction& f, const std::function<double(double)>& fn);

/// Complex samples of a periodic function (the Hasimoto variable lives here).
struct ComplexGridFunction {
  PeriodicGrid grid;
  std::vector<cplx> values;

  ComplexGridFunction(PeriodicGrid g, std::vector<cplx> v);

  std::size_t size() const noexcept { return values.size(); }
  GridFunction real() const;
  GridFunction imag() const;
  GridFunction abs() const;
  double max_abs() const noexcept;
};

ComplexGridFunction make_complex(const GridFunction& re, const GridFunction& im);

/// Throws ShapeMismatch when the two functions do not live on the same grid.
void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b, const char* where);

}  // namespace geomflow
