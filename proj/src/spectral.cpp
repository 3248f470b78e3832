#include "ctns/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "ctns/error.hpp"

namespace ctns {
namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Spectral::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

Hessian::Hessian(int dim, std::vector<ScalarField> upper) : dim_(dim), upper_(std::move(upper)) {
  if (static_cast<int>(upper_.size()) != dim * (dim + 1) / 2)
    throw InvalidArgument("hessian needs dim*(dim+1)/2 components");
}

const ScalarField& Hessian::operator()(int i, int j) const {
  if (i > j) std::swap(i, j);
  // offset of row i in the packed upper triangle
  const int row = i * dim_ - i * (i - 1) / 2;
  return upper_[row + (j - i)];
}

Spectral::Spectral(const Grid& grid) : grid_(grid), plans_(std::make_unique<Plans>()) {
  const int d = grid_.dim();
  std::vector<int> cshape(grid_.n_per_axis());
  cshape.back() = cshape.back() / 2 + 1;
  spectral_size_ = 1;
  for (int n : cshape) spectral_size_ *= static_cast<std::size_t>(n);

  k_.assign(d, std::vector<double>(spectral_size_));
  kfull_.assign(d, std::vector<double>(spectral_size_));
  k2_.assign(spectral_size_, 0.0);
  k2_odd_.assign(spectral_size_, 0.0);
  weight_.assign(spectral_size_, 2.0);
  retained_.assign(spectral_size_, 1);

  for (std::size_t mode = 0; mode < spectral_size_; ++mode) {
    std::size_t rest = mode;
    std::array<int, 3> j{0, 0, 0};
    for (int a = d - 1; a >= 0; --a) {
      j[a] = static_cast<int>(rest % cshape[a]);
      rest /= cshape[a];
    }
    for (int a = 0; a < d; ++a) {
      const int n = grid_.n(a);
      const int m = (j[a] <= n / 2 - 1 || a == d - 1) ? j[a] : j[a] - n;
      const double unit = 2.0 * std::numbers::pi / grid_.length(a);
      const double kfull = unit * m;
      const bool nyquist = (std::abs(m) == n / 2);
      k_[a][mode] = nyquist ? 0.0 : kfull;
      kfull_[a][mode] = kfull;
      k2_[mode] += kfull * kfull;
      k2_odd_[mode] += k_[a][mode] * k_[a][mode];
      if (3 * std::abs(m) >= n) retained_[mode] = 0;
    }
    const int last = j[d - 1];
    if (last == 0 || last == grid_.n(d - 1) / 2) weight_[mode] = 1.0;
  }

  std::lock_guard<std::mutex> lock(planner_mutex());
  double* rbuf = fftw_alloc_real(grid_.size());
  fftw_complex* cbuf = fftw_alloc_complex(spectral_size_);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->r2c = fftw_plan_dft_r2c(d, grid_.n_per_axis().data(), rbuf, cbuf, flags);
  plans_->c2r = fftw_plan_dft_c2r(d, grid_.n_per_axis().data(), cbuf, rbuf, flags);
  fftw_free(rbuf);
  fftw_free(cbuf);
  if (plans_->r2c == nullptr || plans_->c2r == nullptr)
    throw std::runtime_error("FFTW planning failed");
}

Spectral::~Spectral() {
  if (!plans_) return;
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plans_->r2c) fftw_destroy_plan(plans_->r2c);
  if (plans_->c2r) fftw_destroy_plan(plans_->c2r);
}

Spectrum Spectral::forward(const ScalarField& s) const {
  Spectrum out(spectral_size_);
  // out-of-place r2c preserves its input
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(s.values().data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

ScalarField Spectral::inverse(const Spectrum& s) const {
  Spectrum scratch(s);
  ScalarField out(grid_);
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.values().data());
  out *= 1.0 / static_cast<double>(grid_.size());
  return out;
}

void Spectral::dealias(Spectrum& s) const {
  for (std::size_t m = 0; m < spectral_size_; ++m)
    if (!retained_[m]) s[m] = 0.0;
}

Spectrum Spectral::derivative(const Spectrum& s, int axis) const {
  Spectrum out(spectral_size_);
  const auto& ka = k_[axis];
  for (std::size_t m = 0; m < spectral_size_; ++m) out[m] = std::complex<double>(0.0, ka[m]) * s[m];
  return out;
}

double Spectral::spectral_energy(const Spectrum& s) const {
  double sum = 0.0;
  for (std::size_t m = 0; m < spectral_size_; ++m) sum += weight_[m] * std::norm(s[m]);
  return sum * grid_.cell_volume() / static_cast<double>(grid_.size());
}

VectorField Spectral::gradient_from(const Spectrum& s) const {
  std::vector<ScalarField> comps;
  comps.reserve(dim());
  for (int a = 0; a < dim(); ++a) comps.push_back(inverse(derivative(s, a)));
  return VectorField(grid_, std::move(comps));
}

VectorField Spectral::gradient(const ScalarField& s) const { return gradient_from(forward(s)); }

ScalarField Spectral::divergence(const VectorField& v) const {
  Spectrum acc(spectral_size_, 0.0);
  for (int a = 0; a < dim(); ++a) {
    const Spectrum va = forward(v[a]);
    const auto& ka = k_[a];
    for (std::size_t m = 0; m < spectral_size_; ++m)
      acc[m] += std::complex<double>(0.0, ka[m]) * va[m];
  }
  return inverse(acc);
}

ScalarField Spectral::laplacian(const ScalarField& s) const {
  Spectrum sh = forward(s);
  for (std::size_t m = 0; m < spectral_size_; ++m) sh[m] *= -k2_[m];
  return inverse(sh);
}

Hessian Spectral::hessian_from(const Spectrum& s) const {
  std::vector<ScalarField> upper;
  const int d = dim();
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      Spectrum out(spectral_size_);
      for (std::size_t m = 0; m < spectral_size_; ++m) {
        // even derivatives keep the Nyquist wavenumber
        const double kk = (i == j) ? kfull_[i][m] * kfull_[i][m] : k_[i][m] * k_[j][m];
        out[m] = -kk * s[m];
      }
      upper.push_back(inverse(out));
    }
  }
  return Hessian(d, std::move(upper));
}

Hessian Spectral::hessian(const ScalarField& s) const { return hessian_from(forward(s)); }

}  // namespace ctns
