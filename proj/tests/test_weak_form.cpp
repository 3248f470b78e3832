#include <cmath>
#include <memory>
#include <numbers>

#include "ctns/error.hpp"
#include "ctns/weak_form.hpp"
#include "doctest.h"

using namespace ctns;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::shared_ptr<const Spectral> spectral(int dim, int n, double length) {
  return std::make_shared<const Spectral>(Grid::cube(dim, n, length));
}

// Exact solutions of decoupled linear pieces, sampled every dt:
// kind 0: n heat mode (c = 0, u = 0); kind 1: c heat mode (n = 0, u = 0);
// kind 2: Taylor-Green u (n = c = 0).
std::vector<State> exact_trajectory(const Grid& g, int kind, double dt, double t_end) {
  std::vector<State> out;
  const long steps = std::lround(t_end / dt);
  for (long i = 0; i <= steps; ++i) {
    const double t = i * dt;
    State s{t, ScalarField(g), ScalarField(g), VectorField(g)};
    if (kind == 0)
      s.n = sample(g, [&](const auto& x) { return 1.0 + 0.3 * std::exp(-2 * t) * std::cos(x[0] + x[1]); });
    if (kind == 1)
      s.c = sample(g, [&](const auto& x) { return 0.5 + 0.2 * std::exp(-5 * t) * std::cos(x[0] + 2 * x[1]); });
    if (kind == 2) {
      s.u[0] = sample(g, [&](const auto& x) { return std::sin(x[0]) * std::cos(x[1]) * std::exp(-2 * t); });
      s.u[1] = sample(g, [&](const auto& x) { return -std::cos(x[0]) * std::sin(x[1]) * std::exp(-2 * t); });
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST_CASE("time bump") {
  CHECK(time_bump(0.0, 0.5) == 1.0);
  CHECK(time_bump_derivative(0.0, 0.5) == 0.0);
  CHECK(time_bump(0.5, 0.5) == 0.0);
  CHECK(time_bump(0.7, 0.5) == 0.0);
  CHECK(time_bump(-0.1, 0.5) == 0.0);
  // integral of eta' over [0, tau] is -eta(0)
  const int m = 200000;
  double sum = 0.0;
  for (int i = 0; i < m; ++i) sum += time_bump_derivative((i + 0.5) * 0.5 / m, 0.5) * 0.5 / m;
  CHECK(sum == doctest::Approx(-1.0).epsilon(1e-9));
  const double h = 1e-6;
  for (double t : {0.1, 0.25, 0.4})
    CHECK(time_bump_derivative(t, 0.5) ==
          doctest::Approx((time_bump(t + h, 0.5) - time_bump(t - h, 0.5)) / (2 * h)).epsilon(1e-7));
}

TEST_CASE("default test library") {
  for (int dim : {2, 3}) {
    const auto sp = spectral(dim, 16, 1.0);
    const TestLibrary lib = default_test_library(sp->grid(), 0.3);
    CHECK(lib.scalar.size() == 5);
    CHECK(lib.vector.size() == 5);
    for (const auto& v : lib.vector) {
      double kd = 0.0, len = 0.0;
      for (int a = 0; a < 3; ++a) {
        kd += v.mode[a] * v.direction[a];
        len += v.direction[a] * v.direction[a];
      }
      CHECK(std::abs(kd) < 1e-14);
      CHECK(len == doctest::Approx(1.0));
    }
  }
  CHECK_THROWS_AS(default_test_library(Grid::cube(2, 8, 1.0), 0.0), InvalidArgument);
}

TEST_CASE("weak residuals of trivial trajectories") {
  const auto sp = spectral(2, 16, kTwoPi);
  const Grid& g = sp->grid();
  const TestLibrary lib = default_test_library(g, 0.1);
  const CoefficientSet coeffs = prototype(1.0, 1.0, Potential::cosine(2.0, 1, 1));
  std::vector<State> zero, steady;
  for (int i = 0; i <= 100; ++i) {
    zero.push_back(State{i * 1e-3, ScalarField(g), ScalarField(g), VectorField(g)});
    steady.push_back(State{i * 1e-3, ScalarField(g, 1.7), ScalarField(g), VectorField(g)});
  }
  const WeakResiduals z = weak_residuals(zero, lib, coeffs);
  CHECK(z.r_n() == 0.0);
  CHECK(z.r_c() == 0.0);
  CHECK(z.r_u() == 0.0);
  const WeakResiduals s = weak_residuals(steady, lib, coeffs);
  CHECK(s.r_n() <= 1e-10);
  CHECK(s.r_c() <= 1e-10);
  CHECK(s.r_u() <= 1e-10);

  zero.erase(zero.begin() + 50, zero.end());
  CHECK_THROWS_AS(weak_residuals(zero, lib, coeffs), InvalidArgument);
}

TEST_CASE("weak residuals vanish on exact solutions as the time grid is refined") {
  const auto sp = spectral(2, 32, kTwoPi);
  const Grid& g = sp->grid();
  const CoefficientSet coeffs = prototype(1.0, 1.0);
  const TestLibrary lib = default_test_library(g, 0.2);
  for (int kind : {0, 1, 2}) {
    CAPTURE(kind);
    double prev = 0.0;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
      const WeakResiduals r = weak_residuals(exact_trajectory(g, kind, dt, 0.2), lib, coeffs);
      const double res = std::max({r.r_n(), r.r_c(), r.r_u()});
      CHECK(res < 1e-3);
      // trapezoidal rule in time: second order
      if (prev > 0.0) CHECK(prev / res == doctest::Approx(4.0).epsilon(0.05));
      prev = res;
    }
  }
}

TEST_CASE("weak residuals of the regularized scheme shrink with dt and eps") {
  const auto sp = spectral(2, 32, 1.0);
  const StokesOperator op(sp);
  const CoefficientSet coeffs = prototype(1.0, 1.0, Potential::cosine(1.0, 1, 1));
  InitPreset preset;
  preset.u_norm = 0.05;
  const State s0 = make_initial_data(preset, op, coeffs);
  const TestLibrary lib = default_test_library(sp->grid(), 0.02);
  WeakResiduals prev;
  for (int level = 0; level < 3; ++level) {
    SimParams p;
    p.dt = 4e-4 / (1 << level);
    p.eps = 0.02 / (1 << level);
    p.t_end = 0.02;
    WeakResidualAccumulator acc(sp, coeffs, lib);
    acc.observe(s0);
    run(s0, p, coeffs, op, [&](const State& s) { acc.observe(s); });
    const WeakResiduals r = acc.result();
    CAPTURE(level);
    if (level > 0) {
      CHECK(r.r_n() < prev.r_n());
      CHECK(r.r_c() < prev.r_c());
      CHECK(r.r_u() < prev.r_u());
    }
    prev = r;
  }
}
