#include <doctest.h>

#include <cmath>
#include <limits>
#include <thread>

#include "geomflow/diff_operator.hpp"
#include "geomflow/error.hpp"
#include "geomflow/finite_difference.hpp"
#include "geomflow/kernels.hpp"
#include "geomflow/matrix_field.hpp"
#include "geomflow/rk4.hpp"
#include "geomflow/solve.hpp"
#include "geomflow/spectral.hpp"
#include "support.hpp"

using namespace geomflow;
using testing::sample;
using testing::sup_diff;

TEST_CASE("grid construction") {
  const PeriodicGrid g(16, testing::kTwoPi);
  CHECK(g.dx() == doctest::Approx(testing::kTwoPi / 16));
  CHECK(g.points().size() == 16);
  CHECK(g.point(0) == 0.0);
  CHECK(g.point(15) < g.length());
  CHECK_THROWS_AS(PeriodicGrid(4, 1.0), Error);
  CHECK_THROWS_AS(PeriodicGrid(16, -1.0), Error);
  CHECK_THROWS_AS(GridFunction(g, std::vector<double>(15)), Error);
  std::vector<double> bad(16, 0.0);
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(GridFunction(g, bad).all_finite());
}

TEST_CASE("derivative examples") {
  const auto s = sample(64, [](double x) { return std::sin(x); });
  CHECK(sup_diff(derivative(s, 1), [](double x) { return std::cos(x); }) < 1e-12);

  const GridFunction c(testing::circle_grid(32), 2.5);
  for (int order = 1; order <= 5; ++order) CHECK(derivative(c, order).max_abs() < 1e-12);

  const auto s3 = sample(64, [](double x) { return std::sin(3 * x); });
  CHECK(sup_diff(derivative(s3, 3), [](double x) { return -27.0 * std::cos(3 * x); }) < 1e-10);
}

TEST_CASE("derivative on a non-2pi period") {
  const PeriodicGrid g(48, 3.0);
  const double w = testing::kTwoPi / 3.0;
  const auto f = GridFunction::sample(g, [w](double x) { return std::cos(2 * w * x); });
  CHECK(sup_diff(derivative(f, 2), [w](double x) { return -4 * w * w * std::cos(2 * w * x); }) < 1e-10);
}

TEST_CASE("derivative errors") {
  const auto s = sample(16, [](double x) { return std::sin(x); });
  try {
    derivative(s, 6);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedOrder);
  }
  GridFunction bad = s;
  bad.values[2] = std::numeric_limits<double>::infinity();
  try {
    derivative(bad, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidInput);
  }
}

TEST_CASE("jet agrees with repeated derivatives") {
  std::mt19937_64 rng(3);
  const auto f = testing::random_smooth(64, rng, 6);
  const auto j = jet(f, 5);
  REQUIRE(j.size() == 6);
  for (int m = 1; m <= 5; ++m) CHECK(sup_diff(j[m], derivative(f, m)) < 1e-10);
}

TEST_CASE("integrate examples") {
  CHECK(std::abs(integrate(sample(32, [](double x) { return std::sin(x); }))) < 1e-14);
  CHECK(integrate(GridFunction(testing::circle_grid(32), 1.0)) == doctest::Approx(testing::kTwoPi).epsilon(1e-15));
  const double v = integrate(sample(32, [](double x) { return std::sin(x) * std::sin(x); }));
  CHECK(std::abs(v - std::numbers::pi) < 1e-12);
}

TEST_CASE("antiderivative examples") {
  const auto a = antiderivative(sample(32, [](double x) { return std::cos(x); }), 0.0);
  CHECK(sup_diff(a.values, [](double x) { return std::sin(x); }) < 1e-12);
  CHECK(std::abs(a.slope) < 1e-14);

  const auto b = antiderivative(GridFunction(testing::circle_grid(16)), 5.0);
  CHECK(sup_diff(b.values, [](double) { return 5.0; }) < 1e-14);

  const auto c = antiderivative(sample(32, [](double x) { return 1.0 + std::cos(x); }), 0.0);
  CHECK(c.slope == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sup_diff(c.values, [](double x) { return x + std::sin(x); }) < 1e-12);

  const auto d = antiderivative(sample(32, [](double x) { return 1.0 + std::cos(x); }), 0.0,
                                MeanHandling::RemoveMean);
  CHECK(d.slope == 0.0);
  CHECK(sup_diff(d.values, [](double x) { return std::sin(x); }) < 1e-12);
}

TEST_CASE("calculus identities on random band-limited data") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = testing::random_smooth(64, rng, 8);
    const auto g = testing::random_smooth(64, rng, 8);
    const auto F = antiderivative(f, 0.3, MeanHandling::RemoveMean);
    CHECK(sup_diff(derivative(F.values), f + (-f.mean())) < 1e-10);
    CHECK(std::abs(integrate(derivative(f))) < 1e-12);
    CHECK(std::abs(inner(derivative(f), g) + inner(f, derivative(g))) < 1e-10);
  }
}

TEST_CASE("solve_operator examples") {
  const PeriodicGrid g = testing::circle_grid(32);
  const auto D = DiffOperator::d(g);
  const auto y = solve_operator(D, GridFunction::sample(g, [](double x) { return std::cos(x); }));
  CHECK(sup_diff(y, [](double x) { return std::sin(x); }) < 1e-12);

  try {
    solve_operator(D, GridFunction(g, 1.0));
    FAIL("expected unsolvable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Unsolvable);
    CHECK(e.value() == doctest::Approx(1.0));
  }

  // Symbol of D^3 + D at mode 2 is i(2 - 8) = -6i, so sin 2x -> cos(2x) / 6.
  const auto L = DiffOperator::d(g, 3) + DiffOperator::d(g);
  const auto rhs = GridFunction::sample(g, [](double x) { return std::sin(2 * x); });
  const auto z = solve_operator(L, rhs);
  CHECK(sup_diff(z, [](double x) { return std::cos(2 * x) / 6.0; }) < 1e-12);
  CHECK((L.apply(z) - rhs).max_abs() < 1e-10);
}

TEST_CASE("solve_operator with variable coefficients") {
  const PeriodicGrid g = testing::circle_grid(32);
  const auto a = GridFunction::sample(g, [](double x) { return 2.0 + std::sin(x); });
  // L y = D(a D y): range is mean zero, kernel the constants.
  const auto L = DiffOperator::d(g) * DiffOperator::multiply(a, "a") * DiffOperator::d(g);
  const auto y0 = GridFunction::sample(g, [](double x) { return std::cos(x) + 0.2 * std::sin(3 * x); });
  const auto y = solve_operator(L, L.apply(y0));
  CHECK(sup_diff(y, y0) < 1e-9);
  CHECK(std::abs(y.mean()) < 1e-12);
  CHECK_THROWS_AS(solve_operator(L, GridFunction::sample(g, [](double x) { return 1.0 + std::cos(x); })), Error);
}

TEST_CASE("rk4 examples") {
  const RightHandSide growth = [](const State& y) { return y; };
  const State one = rk4_step({1.0}, growth, 0.1);
  CHECK(std::abs(one[0] - std::exp(0.1)) < 1e-7);
  CHECK(one[0] == doctest::Approx(1.1051708).epsilon(1e-7));

  const State s{1.0, -2.0, 3.5};
  CHECK(rk4_step(s, [](const State& y) { return State(y.size(), 0.0); }, 0.3) == s);

  const auto u0 = sample(64, [](double x) { return std::sin(x); });
  const RightHandSide advect = [&](const State& y) {
    const auto d = derivative(GridFunction(u0.grid, y));
    State v(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) v[i] = -d[i];
    return v;
  };
  State u = u0.values;
  for (int i = 0; i < 100; ++i) u = rk4_step(u, advect, 1e-3);
  CHECK(sup_diff(GridFunction(u0.grid, u), [](double x) { return std::sin(x - 0.1); }) < 1e-6);
}

TEST_CASE("rk4 errors") {
  const RightHandSide growth = [](const State& y) { return y; };
  CHECK_THROWS_AS(rk4_step({1.0}, growth, 0.0), Error);
  CHECK_THROWS_AS(rk4_step({1.0}, growth, -0.1), Error);
  try {
    rk4_step({1e300}, [](const State& y) { return State{y[0] * 1e300}; }, 1.0);
    FAIL("expected blow-up");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BlowUp);
  }
}

TEST_CASE("rk4 is fourth order on the exponential") {
  const RightHandSide growth = [](const State& y) { return y; };
  auto error_at_one = [&](int steps) {
    State y{1.0};
    for (int i = 0; i < steps; ++i) y = rk4_step(y, growth, 1.0 / steps);
    return std::abs(y[0] - std::exp(1.0));
  };
  const double ratio = error_at_one(10) / error_at_one(20);
  CHECK(ratio > 16.0 * 0.8);
  CHECK(ratio < 16.0 * 1.2);
}

TEST_CASE("dealias and band limit") {
  const auto f = sample(48, [](double x) { return std::cos(x) + std::cos(20 * x); });
  CHECK(sup_diff(dealias(f), [](double x) { return std::cos(x); }) < 1e-13);
  CHECK(sup_diff(band_limit(f, 0.5), [](double x) { return std::cos(x); }) < 1e-13);
  CHECK(sup_diff(band_limit(f, 1.0), f) == 0.0);
}

TEST_CASE("fourier coefficients round trip and interpolation") {
  std::mt19937_64 rng(5);
  const auto f = testing::random_smooth(32, rng, 5);
  CHECK(sup_diff(from_fourier_coefficients(f.grid, fourier_coefficients(f)), f) < 1e-13);
  const std::vector<double> xs{0.1, 1.7, 4.0, 7.0};
  const auto g = sample(32, [](double x) { return std::sin(2 * x) + 0.5; });
  const auto v = evaluate_at(g, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(v[i] - std::sin(2 * xs[i]) - 0.5) < 1e-13);
}

TEST_CASE("complex derivative") {
  const PeriodicGrid g = testing::circle_grid(32);
  std::vector<cplx> v(32);
  for (std::size_t j = 0; j < 32; ++j) v[j] = std::polar(1.0, 3.0 * g.point(j));
  const auto d = derivative(ComplexGridFunction(g, v), 2);
  for (std::size_t j = 0; j < 32; ++j) CHECK(std::abs(d.values[j] + 9.0 * v[j]) < 1e-11);
}

TEST_CASE("finite differences") {
  const std::vector<double> nodes{-1.0, 0.0, 1.0};
  const auto w = fd::fornberg_weights(0.0, nodes, 2);
  CHECK(w[2][0] == doctest::Approx(1.0));
  CHECK(w[2][1] == doctest::Approx(-2.0));
  CHECK(w[2][2] == doctest::Approx(1.0));
  CHECK(w[1][0] == doctest::Approx(-0.5));

  // Exact on polynomials of degree below the stencil width, ends included.
  std::vector<double> s(20);
  const double h = 0.1;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = i * h;
    s[i] = x * x * x - 2 * x * x + 1;
  }
  const auto d = fd::derivative(s, h, 2);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(d[i] - (6 * i * h - 4)) < 1e-8);
}

TEST_CASE("matrix field calculus") {
  const PeriodicGrid g = testing::circle_grid(32);
  MatrixField a(g, 2), b(g, 2);
  a.set_entry(0, 1, GridFunction::sample(g, [](double x) { return std::sin(x); }));
  b.set_entry(1, 0, GridFunction(g, 1.0));
  const auto c = commutator(a, b);
  // [[0,s],[0,0]] [[0,0],[1,0]] - [[0,0],[1,0]] [[0,s],[0,0]] = diag(s, -s)
  CHECK(sup_diff(c.entry(0, 0), [](double x) { return std::sin(x); }) < 1e-15);
  CHECK(sup_diff(c.entry(1, 1), [](double x) { return -std::sin(x); }) < 1e-15);
  CHECK(sup_diff(derivative(a).entry(0, 1), [](double x) { return std::cos(x); }) < 1e-12);
  CHECK((a + b - b).max_abs() == doctest::Approx(a.max_abs()));
}

TEST_CASE("simd kernels agree with the scalar reference") {
  if (!kernels::avx2::available()) {
    MESSAGE("AVX2 not available, comparing the scalar backend with itself");
  }
  const auto& ref = kernels::scalar_backend();
  const auto& fast = kernels::avx2::available() ? kernels::avx2_backend() : ref;
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 33u, 129u}) {
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = normal(rng);
    for (auto& v : y) v = normal(rng);

    auto y1 = y, y2 = y;
    ref.add_scaled(y1, 0.7, x);
    fast.add_scaled(y2, 0.7, x);
    for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));

    std::vector<double> o1(n), o2(n);
    ref.lincomb(o1, x, -1.3, y);
    fast.lincomb(o2, x, -1.3, y);
    for (std::size_t i = 0; i < n; ++i) CHECK(o1[i] == doctest::Approx(o2[i]).epsilon(1e-15));

    ref.multiply(o1, x, y);
    fast.multiply(o2, x, y);
    for (std::size_t i = 0; i < n; ++i) CHECK(o1[i] == o2[i]);

    CHECK(std::abs(ref.sum(x) - fast.sum(x)) < 1e-13);

    std::vector<cplx> c1(n), c2;
    for (auto& v : c1) v = {normal(rng), normal(rng)};
    c2 = c1;
    for (int turns = 0; turns < 4; ++turns) {
      ref.spectral_scale(c1, x, turns);
      fast.spectral_scale(c2, x, turns);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(c1[i] - c2[i]) < 1e-13 * (1.0 + std::abs(c1[i])));
    }
  }
}

TEST_CASE("spectral calls are reentrant across threads") {
  const auto f = sample(128, [](double x) { return std::exp(std::sin(x)); });
  const auto expected = derivative(f, 3);
  std::vector<double> worst(4, 0.0);
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t)
    pool.emplace_back([&, t] {
      const std::size_t n = 64 + 32 * std::size_t(t);  // fresh plans race with cached ones
      const auto other = sample(n, [](double x) { return std::cos(x); });
      for (int i = 0; i < 50; ++i) {
        worst[t] = std::max(worst[t], sup_diff(derivative(f, 3), expected));
        worst[t] = std::max(worst[t], sup_diff(derivative(other, 1), [](double x) { return -std::sin(x); }));
      }
    });
  for (auto& th : pool) th.join();
  for (double w : worst) CHECK(w < 1e-10);
}
