#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace ctns {

/// Uniform periodic box [0, L_0) x ... x [0, L_{dim-1}).
///
/// Storage is row-major with axis 0 slowest. Every axis carries an even
/// number of points so that the Nyquist mode is unambiguous.
class Grid {
 public:
  Grid(std::vector<int> n_per_axis, std::vector<double> length_per_axis);

  /// Same number of points and length on every axis.
  static Grid cube(int dim, int n, double length);

  int dim() const { return static_cast<int>(n_.size()); }
  const std::vector<int>& n_per_axis() const { return n_; }
  const std::vector<double>& length_per_axis() const { return length_; }
  int n(int axis) const { return n_[axis]; }
  double length(int axis) const { return length_[axis]; }
  double spacing(int axis) const { return length_[axis] / n_[axis]; }
  double min_spacing() const;

  std::size_t size() const { return size_; }
  double cell_volume() const { return cell_volume_; }
  double volume() const;

  /// Multi-index of a linear index (unused trailing entries are 0).
  std::array<int, 3> index_of(std::size_t linear) const;
  /// Physical coordinates of grid point `linear`.
  std::array<double, 3> point(std::size_t linear) const;

  bool operator==(const Grid& other) const = default;

 private:
  std::vector<int> n_;
  std::vector<double> length_;
  std::size_t size_ = 0;
  double cell_volume_ = 0.0;
};

/// Real-valued field sampled on a grid (physical space).
class ScalarField {
 public:
  explicit ScalarField(const Grid& grid, double value = 0.0);
  ScalarField(const Grid& grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool all_finite() const;
  double min() const;
  double max() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double factor);

 private:
  Grid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double factor, ScalarField a);

/// Vector field with `grid.dim()` components.
class VectorField {
 public:
  explicit VectorField(const Grid& grid);
  VectorField(const Grid& grid, std::vector<ScalarField> components);

  const Grid& grid() const { return grid_; }
  int dim() const { return static_cast<int>(components_.size()); }
  ScalarField& operator[](int i) { return components_[i]; }
  const ScalarField& operator[](int i) const { return components_[i]; }

  bool all_finite() const;
  /// max over points of the Euclidean norm.
  double max_magnitude() const;

  VectorField& operator+=(const VectorField& other);
  VectorField& operator-=(const VectorField& other);
  VectorField& operator*=(double factor);

 private:
  Grid grid_;
  std::vector<ScalarField> components_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double factor, VectorField a);

/// Pointwise dot product.
ScalarField dot(const VectorField& a, const VectorField& b);

/// Grid quadrature: cell volume times the sum of the samples.
double integrate(const ScalarField& s);
/// (integral of |s|^p)^(1/p); p must be >= 1 (infinity allowed).
double lp_norm(const ScalarField& s, double p);
double linf(const ScalarField& s);
/// Sum of the squared L2 norms of the components.
double l2_norm_squared(const VectorField& v);
double l2_norm(const VectorField& v);

/// Sample a function of the physical coordinates on the grid.
template <typename Fn>
ScalarField sample(const Grid& grid, Fn&& fn) {
  ScalarField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = fn(grid.point(i));
  return out;
}

}  // namespace ctns
