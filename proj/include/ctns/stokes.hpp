#pragma once

#include <memory>
#include <vector>

#include "ctns/spectral.hpp"

namespace ctns {

/// Spectrum of each component of a vector field.
using VectorSpectrum = std::vector<Spectrum>;

/// Fluid operator algebra on the periodic box.
///
/// On the torus the Stokes operator A = -P Delta restricted to solenoidal
/// fields is diagonal in the Fourier basis with symbol |k|^2; its zero mode
/// is 0, so constants lie in the kernel.
class StokesOperator {
 public:
  explicit StokesOperator(std::shared_ptr<const Spectral> spectral);

  const Spectral& spectral() const { return *spectral_; }
  std::shared_ptr<const Spectral> spectral_ptr() const { return spectral_; }
  const Grid& grid() const { return spectral_->grid(); }

  /// Symbol of A for a stored mode.
  double symbol(std::size_t mode) const { return spectral_->k_squared(mode); }

  VectorField project(const VectorField& v) const;
  VectorField yosida(const VectorField& v, double eps) const;
  /// A^alpha for alpha in [-1, 1]; alpha < 0 requires a mean-free input.
  VectorField fractional_power(const VectorField& v, double alpha) const;

  enum class Kind { heat, stokes };
  /// (I + dt |k|^2)^{-1} per mode; the Stokes variant also projects.
  ScalarField implicit_solve(const ScalarField& rhs, double dt) const;
  VectorField implicit_solve(const VectorField& rhs, double dt, Kind kind = Kind::stokes) const;

  // Spectral-space kernels used by the stepper.
  VectorSpectrum forward(const VectorField& v) const;
  VectorField inverse(const VectorSpectrum& v) const;
  void project_in_place(VectorSpectrum& v) const;
  void yosida_in_place(VectorSpectrum& v, double eps) const;
  void implicit_in_place(Spectrum& s, double dt) const;

 private:
  std::shared_ptr<const Spectral> spectral_;
};

}  // namespace ctns
