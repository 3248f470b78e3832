#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "ctns/grid.hpp"

namespace ctns {

/// Half-complex spectrum of a real field (last axis truncated to n/2+1).
using Spectrum = std::vector<std::complex<double>>;

/// dim x dim matrix of scalar fields; (i,j) and (j,i) share storage.
class Hessian {
 public:
  Hessian(int dim, std::vector<ScalarField> upper);
  int dim() const { return dim_; }
  const ScalarField& operator()(int i, int j) const;

 private:
  int dim_;
  std::vector<ScalarField> upper_;  // row-major upper triangle
};

/// Fourier transforms and wavenumber symbols for one grid.
///
/// Immutable after construction; every member function may be called
/// concurrently. Forward transforms are unnormalized, inverse transforms
/// divide by the number of grid points.
class Spectral {
 public:
  explicit Spectral(const Grid& grid);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  std::size_t spectral_size() const { return spectral_size_; }

  Spectrum forward(const ScalarField& s) const;
  ScalarField inverse(const Spectrum& s) const;

  /// Wavenumber used for odd derivatives; zero on the Nyquist plane.
  double k(int axis, std::size_t mode) const { return k_[axis][mode]; }
  /// Full |k|^2, Nyquist modes included.
  double k_squared(std::size_t mode) const { return k2_[mode]; }
  /// Squared length of the odd-derivative wavevector.
  double k_odd_squared(std::size_t mode) const { return k2_odd_[mode]; }
  /// Multiplicity of a stored mode in the full spectrum (1 or 2).
  double weight(std::size_t mode) const { return weight_[mode]; }
  /// False for modes removed by the 2/3 rule.
  bool retained(std::size_t mode) const { return retained_[mode] != 0; }

  void dealias(Spectrum& s) const;
  /// Multiply by i k_axis.
  Spectrum derivative(const Spectrum& s, int axis) const;
  /// Integral of |field|^2 computed from its spectrum.
  double spectral_energy(const Spectrum& s) const;

  VectorField gradient(const ScalarField& s) const;
  ScalarField divergence(const VectorField& v) const;
  ScalarField laplacian(const ScalarField& s) const;
  Hessian hessian(const ScalarField& s) const;

  VectorField gradient_from(const Spectrum& s) const;
  Hessian hessian_from(const Spectrum& s) const;

 private:
  struct Plans;

  Grid grid_;
  std::size_t spectral_size_ = 0;
  std::vector<std::vector<double>> k_;
  std::vector<std::vector<double>> kfull_;
  std::vector<double> k2_;
  std::vector<double> k2_odd_;
  std::vector<double> weight_;
  std::vector<char> retained_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace ctns
