#include "ctns/random_fields.hpp"

#include <cmath>
#include <numbers>

#include "ctns/error.hpp"

namespace ctns {

std::uint64_t Rng::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

ScalarField random_band_limited(const Spectral& spectral, int band, Rng& rng) {
  if (band < 1) throw InvalidArgument("band must be at least 1");
  const Grid& grid = spectral.grid();
  for (int a = 0; a < grid.dim(); ++a)
    if (band >= grid.n(a) / 2) throw InvalidArgument("band exceeds the grid's resolvable modes");
  // walk the stored modes, drawing coefficients only inside the band so the
  // draw sequence depends on the band alone, not on the resolution
  Spectrum s(spectral.spectral_size(), 0.0);
  const int d = grid.dim();
  std::vector<int> cshape(grid.n_per_axis());
  cshape.back() = cshape.back() / 2 + 1;
  const auto stored_index = [&](const std::array<int, 3>& m) {
    std::size_t idx = 0;
    for (int a = 0; a < d; ++a) {
      const int j = (a == d - 1) ? m[a] : (m[a] >= 0 ? m[a] : m[a] + grid.n(a));
      idx = idx * cshape[a] + j;
    }
    return idx;
  };
  const double scale = static_cast<double>(grid.size());
  std::array<int, 3> m{0, 0, 0};
  const int lo0 = -band, lo1 = (d == 3) ? -band : 0;
  for (m[0] = lo0; m[0] <= band; ++m[0]) {
    for (m[1] = (d == 3 ? lo1 : 0); m[1] <= band; ++m[1]) {
      const int top2 = (d == 3) ? band : 0;
      for (m[2] = 0; m[2] <= top2; ++m[2]) {
        std::array<int, 3> mm = m;
        if (d == 2) {
          // 2D: axis 1 is the truncated axis; m[1] runs over [0, band]
          mm = {m[0], m[1], 0};
        }
        const bool zero = mm[0] == 0 && mm[1] == 0 && mm[2] == 0;
        if (zero) continue;
        const double re = rng.normal();
        const double im = rng.normal();
        s[stored_index(mm)] = std::complex<double>(re, im) * scale;
      }
    }
  }
  return spectral.inverse(s);
}

VectorField random_band_limited_vector(const Spectral& spectral, int band, Rng& rng) {
  std::vector<ScalarField> comps;
  for (int a = 0; a < spectral.dim(); ++a) comps.push_back(random_band_limited(spectral, band, rng));
  return VectorField(spectral.grid(), std::move(comps));
}

ScalarField random_positive_field(const Spectral& spectral, int band, double lo, double hi, Rng& rng) {
  if (!(hi > lo)) throw InvalidArgument("random_positive_field needs hi > lo");
  ScalarField r = random_band_limited(spectral, band, rng);
  const double mn = r.min();
  const double mx = r.max();
  for (double& v : r.values()) v = lo + (hi - lo) * (v - mn) / (mx - mn);
  return r;
}

}  // namespace ctns
