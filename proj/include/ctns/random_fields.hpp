#pragma once

#include <cstdint>

#include "ctns/spectral.hpp"

namespace ctns {

/// splitmix64 generator with platform-independent real conversions, so that
/// seeded fields are bitwise reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller).
  double normal();

 private:
  std::uint64_t state_;
};

/// Real field whose Fourier modes satisfy max_a |m_a| <= band, with
/// independent standard-normal coefficients and zero mean.
ScalarField random_band_limited(const Spectral& spectral, int band, Rng& rng);
VectorField random_band_limited_vector(const Spectral& spectral, int band, Rng& rng);

/// Band-limited field rescaled to [lo, hi] (min and max attained on the grid).
ScalarField random_positive_field(const Spectral& spectral, int band, double lo, double hi, Rng& rng);

}  // namespace ctns
