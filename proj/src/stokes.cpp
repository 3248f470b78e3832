#include "ctns/stokes.hpp"

#include <cmath>

#include "ctns/error.hpp"

namespace ctns {

StokesOperator::StokesOperator(std::shared_ptr<const Spectral> spectral)
    : spectral_(std::move(spectral)) {
  if (!spectral_) throw InvalidArgument("StokesOperator needs a spectral context");
}

VectorSpectrum StokesOperator::forward(const VectorField& v) const {
  VectorSpectrum out;
  out.reserve(v.dim());
  for (int a = 0; a < v.dim(); ++a) out.push_back(spectral_->forward(v[a]));
  return out;
}

VectorField StokesOperator::inverse(const VectorSpectrum& v) const {
  std::vector<ScalarField> comps;
  comps.reserve(v.size());
  for (const auto& c : v) comps.push_back(spectral_->inverse(c));
  return VectorField(grid(), std::move(comps));
}

void StokesOperator::project_in_place(VectorSpectrum& v) const {
  const Spectral& sp = *spectral_;
  const int d = sp.dim();
  for (std::size_t m = 0; m < sp.spectral_size(); ++m) {
    // the odd-derivative wavevector makes the projected field exactly
    // divergence-free under the discrete divergence
    const double k2 = sp.k_odd_squared(m);
    if (k2 == 0.0) continue;
    std::complex<double> kv = 0.0;
    for (int a = 0; a < d; ++a) kv += sp.k(a, m) * v[a][m];
    kv /= k2;
    for (int a = 0; a < d; ++a) v[a][m] -= sp.k(a, m) * kv;
  }
}

void StokesOperator::yosida_in_place(VectorSpectrum& v, double eps) const {
  if (!(eps > 0.0)) throw InvalidArgument("yosida needs eps > 0");
  project_in_place(v);
  const Spectral& sp = *spectral_;
  for (std::size_t m = 0; m < sp.spectral_size(); ++m) {
    const double factor = 1.0 / (1.0 + eps * sp.k_squared(m));
    for (auto& c : v) c[m] *= factor;
  }
}

void StokesOperator::implicit_in_place(Spectrum& s, double dt) const {
  if (!(dt > 0.0)) throw InvalidArgument("implicit_solve needs dt > 0");
  const Spectral& sp = *spectral_;
  for (std::size_t m = 0; m < sp.spectral_size(); ++m) s[m] /= (1.0 + dt * sp.k_squared(m));
}

VectorField StokesOperator::project(const VectorField& v) const {
  VectorSpectrum vh = forward(v);
  project_in_place(vh);
  return inverse(vh);
}

VectorField StokesOperator::yosida(const VectorField& v, double eps) const {
  VectorSpectrum vh = forward(v);
  yosida_in_place(vh, eps);
  return inverse(vh);
}

VectorField StokesOperator::fractional_power(const VectorField& v, double alpha) const {
  if (!(alpha >= -1.0 && alpha <= 1.0)) throw InvalidArgument("fractional power needs alpha in [-1, 1]");
  if (alpha == 0.0) return v;
  VectorSpectrum vh = forward(v);
  const Spectral& sp = *spectral_;
  if (alpha < 0.0) {
    // relative to the field's own scale; the zero mode is where A has no inverse
    double scale = 0.0;
    for (const auto& c : vh)
      for (const auto& x : c) scale = std::max(scale, std::abs(x));
    for (const auto& c : vh)
      if (std::abs(c[0]) > 1e-12 * std::max(scale, 1e-300))
        throw InvalidArgument("negative power of A applied to a field with nonzero mean");
  }
  for (std::size_t m = 0; m < sp.spectral_size(); ++m) {
    const double k2 = sp.k_squared(m);
    // constants lie in the kernel of A
    const double factor = (k2 == 0.0) ? 0.0 : std::pow(k2, alpha);
    for (auto& c : vh) c[m] *= factor;
  }
  return inverse(vh);
}

ScalarField StokesOperator::implicit_solve(const ScalarField& rhs, double dt) const {
  Spectrum s = spectral_->forward(rhs);
  implicit_in_place(s, dt);
  return spectral_->inverse(s);
}

VectorField StokesOperator::implicit_solve(const VectorField& rhs, double dt, Kind kind) const {
  VectorSpectrum vh = forward(rhs);
  for (auto& c : vh) implicit_in_place(c, dt);
  if (kind == Kind::stokes) project_in_place(vh);
  return inverse(vh);
}

}  // namespace ctns
