#include "ctns/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ctns/error.hpp"

namespace ctns {

Grid::Grid(std::vector<int> n_per_axis, std::vector<double> length_per_axis)
    : n_(std::move(n_per_axis)), length_(std::move(length_per_axis)) {
  if (n_.size() != 2 && n_.size() != 3)
    throw InvalidArgument("grid dimension must be 2 or 3");
  if (length_.size() != n_.size())
    throw InvalidArgument("grid needs one length per axis");
  size_ = 1;
  cell_volume_ = 1.0;
  for (std::size_t a = 0; a < n_.size(); ++a) {
    if (n_[a] < 2 || n_[a] % 2 != 0)
      throw InvalidArgument("points per axis must be a positive even integer");
    if (!(length_[a] > 0.0) || !std::isfinite(length_[a]))
      throw InvalidArgument("box length must be positive");
    size_ *= static_cast<std::size_t>(n_[a]);
    cell_volume_ *= length_[a] / n_[a];
  }
}

Grid Grid::cube(int dim, int n, double length) {
  if (dim != 2 && dim != 3) throw InvalidArgument("grid dimension must be 2 or 3");
  return Grid(std::vector<int>(dim, n), std::vector<double>(dim, length));
}

double Grid::min_spacing() const {
  double h = std::numeric_limits<double>::infinity();
  for (int a = 0; a < dim(); ++a) h = std::min(h, spacing(a));
  return h;
}

double Grid::volume() const {
  return std::accumulate(length_.begin(), length_.end(), 1.0, std::multiplies<>());
}

std::array<int, 3> Grid::index_of(std::size_t linear) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(linear % n_[a]);
    linear /= n_[a];
  }
  return idx;
}

std::array<double, 3> Grid::point(std::size_t linear) const {
  const auto idx = index_of(linear);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim(); ++a) x[a] = idx[a] * spacing(a);
  return x;
}

ScalarField::ScalarField(const Grid& grid, double value)
    : grid_(grid), values_(grid.size(), value) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw InvalidArgument("field values do not match the grid size");
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double factor) {
  for (double& v : values_) v *= factor;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double factor, ScalarField a) { return a *= factor; }

VectorField::VectorField(const Grid& grid)
    : grid_(grid), components_(grid.dim(), ScalarField(grid)) {}

VectorField::VectorField(const Grid& grid, std::vector<ScalarField> components)
    : grid_(grid), components_(std::move(components)) {
  if (static_cast<int>(components_.size()) != grid_.dim())
    throw InvalidArgument("vector field needs one component per axis");
}

bool VectorField::all_finite() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const ScalarField& s) { return s.all_finite(); });
}

double VectorField::max_magnitude() const {
  double m = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    double s = 0.0;
    for (const auto& c : components_) s += c[i] * c[i];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

VectorField& VectorField::operator+=(const VectorField& other) {
  for (int a = 0; a < dim(); ++a) components_[a] += other[a];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& other) {
  for (int a = 0; a < dim(); ++a) components_[a] -= other[a];
  return *this;
}

VectorField& VectorField::operator*=(double factor) {
  for (auto& c : components_) c *= factor;
  return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double factor, VectorField a) { return a *= factor; }

ScalarField dot(const VectorField& a, const VectorField& b) {
  ScalarField out(a.grid());
  for (int c = 0; c < a.dim(); ++c)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += a[c][i] * b[c][i];
  return out;
}

double integrate(const ScalarField& s) {
  double sum = 0.0;
  for (double v : s.values()) sum += v;
  return sum * s.grid().cell_volume();
}

double lp_norm(const ScalarField& s, double p) {
  if (std::isinf(p)) return linf(s);
  if (!(p >= 1.0)) throw InvalidArgument("lp_norm requires p >= 1");
  double sum = 0.0;
  for (double v : s.values()) sum += std::pow(std::abs(v), p);
  return std::pow(sum * s.grid().cell_volume(), 1.0 / p);
}

double linf(const ScalarField& s) {
  double m = 0.0;
  for (double v : s.values()) m = std::max(m, std::abs(v));
  return m;
}

double l2_norm_squared(const VectorField& v) {
  double sum = 0.0;
  for (int a = 0; a < v.dim(); ++a)
    for (double x : v[a].values()) sum += x * x;
  return sum * v.grid().cell_volume();
}

double l2_norm(const VectorField& v) { return std::sqrt(l2_norm_squared(v)); }

}  // namespace ctns
