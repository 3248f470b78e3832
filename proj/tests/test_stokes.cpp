#include <cmath>
#include <memory>
#include <numbers>

#include "ctns/error.hpp"
#include "ctns/random_fields.hpp"
#include "ctns/stokes.hpp"
#include "doctest.h"

using namespace ctns;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

StokesOperator make_op(int dim, int n) {
  return StokesOperator(std::make_shared<const Spectral>(Grid::cube(dim, n, kTwoPi)));
}

double max_abs(const VectorField& v) {
  double m = 0.0;
  for (int i = 0; i < v.dim(); ++i) m = std::max(m, linf(v[i]));
  return m;
}

double pairing(const VectorField& a, const VectorField& b) { return integrate(dot(a, b)); }

// (sin(m y), 0[, 0]): solenoidal with |k|^2 = m^2
VectorField shear_mode(const Grid& g, int m, double amp) {
  VectorField v(g);
  v[0] = sample(g, [&](const std::array<double, 3>& x) { return amp * std::sin(m * x[1]); });
  return v;
}

VectorField unit(VectorField v) {
  const double norm = l2_norm(v);
  return v *= 1.0 / norm;
}

VectorField random_solenoidal(const StokesOperator& op, int band, std::uint64_t seed) {
  Rng rng(seed);
  return unit(op.project(random_band_limited_vector(op.spectral(), band, rng)));
}

}  // namespace

TEST_CASE("projection kills gradients and keeps solenoidal fields") {
  for (int dim : {2, 3}) {
    const StokesOperator op = make_op(dim, dim == 2 ? 32 : 16);
    Rng rng(7);
    const ScalarField q = random_band_limited(op.spectral(), 5, rng);
    const VectorField grad = op.spectral().gradient(q);
    CHECK(max_abs(op.project(grad)) <= 1e-13 * max_abs(grad));

    if (dim == 2) {
      const Grid& g = op.grid();
      // stream function psi = sin(x) cos(2y) + cos(3x)
      VectorField v(g);
      v[0] = sample(g, [](const auto& x) { return 2.0 * std::sin(x[0]) * std::sin(2 * x[1]); });
      v[1] = sample(g, [](const auto& x) { return std::cos(x[0]) * std::cos(2 * x[1]) - 3.0 * std::sin(3 * x[0]); });
      CHECK(lp_norm(op.spectral().divergence(v), 2.0) < 1e-12);
      CHECK(max_abs(op.project(v) - v) <= 1e-13);
    }
  }
}

TEST_CASE("projection is idempotent, self-adjoint and divergence free") {
  for (int dim : {2, 3}) {
    const StokesOperator op = make_op(dim, dim == 2 ? 32 : 16);
    Rng rng(11 + dim);
    const VectorField v = unit(random_band_limited_vector(op.spectral(), 7, rng));
    const VectorField w = unit(random_band_limited_vector(op.spectral(), 7, rng));
    const VectorField pv = op.project(v);
    CHECK(max_abs(op.project(pv) - pv) <= 1e-13 * max_abs(pv));
    CHECK(lp_norm(op.spectral().divergence(pv), 2.0) <= 1e-12);
    const double a = pairing(pv, w), b = pairing(v, op.project(w));
    CHECK(std::abs(a - b) <= 1e-12 * (std::abs(a) + l2_norm(v) * l2_norm(w)));
    // orthogonal decomposition: |v|^2 = |Pv|^2 + |v - Pv|^2
    CHECK(l2_norm_squared(v) == doctest::Approx(l2_norm_squared(pv) + l2_norm_squared(v - pv)).epsilon(1e-12));
  }
}

TEST_CASE("Yosida approximation") {
  const StokesOperator op = make_op(2, 32);
  const Grid& g = op.grid();

  VectorField constant(g);
  constant[0] = ScalarField(g, 1.5);
  constant[1] = ScalarField(g, -0.25);
  CHECK(max_abs(op.yosida(constant, 0.3) - constant) == 0.0);

  // |k|^2 = 4, eps = 0.25: factor 1 / (1 + 1) = 0.5
  const VectorField mode = shear_mode(g, 2, 1.0);
  CHECK(max_abs(op.yosida(mode, 0.25) - 0.5 * mode) <= 1e-15);

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const VectorField v = random_solenoidal(op, 10, seed);
    for (double eps : {1e-3, 0.05, 1.0}) {
      const VectorField y = op.yosida(v, eps);
      CHECK(l2_norm(y) <= l2_norm(v));
      CHECK(max_abs(op.project(y) - y) <= 1e-13 * max_abs(y));
      CHECK(lp_norm(op.spectral().divergence(y), 2.0) <= 1e-12);
    }
  }
  // the input is projected first
  Rng rng(3);
  const VectorField raw = random_band_limited_vector(op.spectral(), 6, rng);
  CHECK(max_abs(op.yosida(raw, 0.1) - op.yosida(op.project(raw), 0.1)) <= 1e-14);
  CHECK_THROWS_AS(op.yosida(raw, 0.0), InvalidArgument);
}

TEST_CASE("Yosida error follows the mode-wise formula") {
  const StokesOperator op = make_op(2, 32);
  const Grid& g = op.grid();
  // two shear modes with |k|^2 = 1 and 25
  const VectorField v = shear_mode(g, 1, 1.0) + shear_mode(g, 5, 0.5);
  auto oracle = [&](double eps) {
    const double e1 = eps / (1 + eps), e25 = 25 * eps / (1 + 25 * eps);
    // each sine mode of amplitude a has L^2 norm^2 a^2 |box| / 2
    return std::sqrt((e1 * e1 + 0.25 * e25 * e25) * g.volume() / 2);
  };
  double prev = 0.0;
  for (double eps = 0.2; eps > 1e-7; eps /= 2) {
    const double err = l2_norm(v - op.yosida(v, eps));
    CHECK(err == doctest::Approx(oracle(eps)).epsilon(1e-12));
    if (prev > 0.0) {
      // ratio (1 + eps|k|^2) / (2 + eps|k|^2) per mode: in (1/2, 1), tending to 1/2
      CHECK(err < prev);
      CHECK(err > 0.5 * prev);
    }
    prev = err;
  }
  CHECK(l2_norm(v - op.yosida(v, 1e-8)) / l2_norm(v - op.yosida(v, 2e-8)) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("fractional powers of the Stokes operator") {
  for (int dim : {2, 3}) {
    const StokesOperator op = make_op(dim, dim == 2 ? 32 : 16);
    const VectorField u = random_solenoidal(op, 6, 21);
    CHECK(max_abs(op.fractional_power(u, 0.0) - u) == 0.0);

    const VectorField half = op.fractional_power(u, 0.5);
    double grad2 = 0.0;
    for (int i = 0; i < dim; ++i) grad2 += l2_norm_squared(op.spectral().gradient(u[i]));
    CHECK(l2_norm_squared(half) == doctest::Approx(grad2).epsilon(1e-12));
    // A^{1/2} A^{1/2} = A = -Laplacian on solenoidal fields
    const VectorField twice = op.fractional_power(half, 0.5);
    for (int i = 0; i < dim; ++i) {
      const ScalarField minus_lap = -1.0 * op.spectral().laplacian(u[i]);
      CHECK(linf(twice[i] - minus_lap) <= 1e-12 * linf(minus_lap));
    }
    const VectorField back = op.fractional_power(op.fractional_power(u, -1.0), 1.0);
    CHECK(max_abs(back - u) <= 1e-13 * max_abs(u));
  }
  const StokesOperator op = make_op(2, 32);
  const VectorField mode = shear_mode(op.grid(), 3, 0.7);
  CHECK(max_abs(op.fractional_power(mode, 1.0) - 9.0 * mode) <= 1e-13 * 9.0 * 0.7);

  VectorField with_mean = mode;
  with_mean[1] += ScalarField(op.grid(), 0.5);
  CHECK_THROWS_AS(op.fractional_power(with_mean, -0.5), InvalidArgument);
  CHECK(linf(op.fractional_power(with_mean, 0.5)[1]) <= 1e-15);
  CHECK_THROWS_AS(op.fractional_power(mode, 1.5), InvalidArgument);
}

TEST_CASE("implicit solves") {
  const StokesOperator op = make_op(2, 32);
  const Grid& g = op.grid();
  const ScalarField c(g, 2.5);
  CHECK(linf(op.implicit_solve(c, 0.7) - c) == 0.0);

  // |k|^2 = 1, dt = 1: factor 1/2
  const ScalarField mode = sample(g, [](const auto& x) { return std::cos(x[0]); });
  CHECK(linf(op.implicit_solve(mode, 1.0) - 0.5 * mode) <= 1e-15);

  Rng rng(5);
  const ScalarField rhs = random_band_limited(op.spectral(), 12, rng);
  for (double dt : {1e-3, 0.1, 10.0}) {
    const ScalarField x = op.implicit_solve(rhs, dt);
    const ScalarField back = x - dt * op.spectral().laplacian(x);
    CHECK(linf(back - rhs) <= 1e-12 * linf(rhs));
  }

  const VectorField v = unit(random_band_limited_vector(op.spectral(), 8, rng));
  const VectorField heat = op.implicit_solve(v, 0.1, StokesOperator::Kind::heat);
  const VectorField stokes = op.implicit_solve(v, 0.1, StokesOperator::Kind::stokes);
  CHECK(max_abs(op.project(heat) - stokes) <= 1e-14 * max_abs(stokes));
  CHECK(lp_norm(op.spectral().divergence(stokes), 2.0) <= 1e-12);
  CHECK_THROWS_AS(op.implicit_solve(rhs, 0.0), InvalidArgument);
}
