#include "ctns/weak_form.hpp"

#include <cmath>
#include <numbers>

#include "ctns/error.hpp"

namespace ctns {

double time_bump(double t, double tau) {
  if (t < 0.0 || t >= tau) return 0.0;
  const double r = t / tau;
  return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

double time_bump_derivative(double t, double tau) {
  if (t < 0.0 || t >= tau) return 0.0;
  const double r = t / tau;
  const double q = 1.0 - r * r;
  return time_bump(t, tau) * (-2.0 * r / (q * q)) / tau;
}

TestLibrary default_test_library(const Grid& grid, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("test function support must be positive");
  TestLibrary lib;
  lib.tau = tau;
  const bool three = grid.dim() == 3;
  const std::array<std::array<int, 3>, 5> modes =
      three ? std::array<std::array<int, 3>, 5>{{{1, 0, 0}, {0, 1, 1}, {1, 1, 0}, {2, -1, 1}, {1, 0, 2}}}
            : std::array<std::array<int, 3>, 5>{{{1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {2, -1, 0}, {1, 2, 0}}};
  const std::array<double, 5> phases = {0.3, 1.1, 2.0, 0.7, 2.9};
  for (int j = 0; j < 5; ++j) {
    lib.scalar.push_back({modes[j], phases[j]});
    std::array<double, 3> k{};
    for (int a = 0; a < grid.dim(); ++a) k[a] = 2.0 * std::numbers::pi * modes[j][a] / grid.length(a);
    std::array<double, 3> dir{};
    if (!three) {
      dir = {-k[1], k[0], 0.0};
    } else {
      // k x e for the axis least aligned with k
      int axis = 0;
      for (int a = 1; a < 3; ++a)
        if (std::abs(k[a]) < std::abs(k[axis])) axis = a;
      std::array<double, 3> e{};
      e[axis] = 1.0;
      dir = {k[1] * e[2] - k[2] * e[1], k[2] * e[0] - k[0] * e[2], k[0] * e[1] - k[1] * e[0]};
    }
    const double len = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
    for (double& v : dir) v /= len;
    lib.vector.push_back({modes[j], phases[j] + 0.5, dir});
  }
  return lib;
}

namespace {

double root_sum_square(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::array<double, 3> wavevector(const Grid& grid, const std::array<int, 3>& mode) {
  std::array<double, 3> k{};
  for (int a = 0; a < grid.dim(); ++a) k[a] = 2.0 * std::numbers::pi * mode[a] / grid.length(a);
  return k;
}

double phase_at(const std::array<double, 3>& k, const std::array<double, 3>& x, int dim, double phase) {
  double s = phase;
  for (int a = 0; a < dim; ++a) s += k[a] * x[a];
  return s;
}

double pair(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) s += a[i] * b[i];
  return s * a.grid().cell_volume();
}

double pair(const VectorField& a, const VectorField& b) {
  double s = 0.0;
  for (int d = 0; d < a.dim(); ++d) s += pair(a[d], b[d]);
  return s;
}

}  // namespace

double WeakResiduals::r_n() const { return root_sum_square(n); }
double WeakResiduals::r_c() const { return root_sum_square(c); }
double WeakResiduals::r_u() const { return root_sum_square(u); }

WeakResidualAccumulator::WeakResidualAccumulator(std::shared_ptr<const Spectral> spectral, CoefficientSet coeffs,
                                                 TestLibrary library)
    : spectral_(std::move(spectral)), coeffs_(std::move(coeffs)), library_(std::move(library)),
      grad_phi_(coeffs_.phi.gradient(*spectral_)) {
  const Grid& grid = spectral_->grid();
  const int d = grid.dim();
  for (const auto& tf : library_.scalar) {
    const auto k = wavevector(grid, tf.mode);
    psi_.push_back(sample(grid, [&](const auto& x) { return std::cos(phase_at(k, x, d, tf.phase)); }));
    VectorField g(grid);
    for (int a = 0; a < d; ++a)
      g[a] = sample(grid, [&](const auto& x) { return -k[a] * std::sin(phase_at(k, x, d, tf.phase)); });
    grad_psi_.push_back(std::move(g));
  }
  for (const auto& tf : library_.vector) {
    const auto k = wavevector(grid, tf.mode);
    double kd = 0.0;
    for (int a = 0; a < d; ++a) kd += k[a] * tf.direction[a];
    if (std::abs(kd) > 1e-12) throw InvalidArgument("vector test function is not solenoidal");
    VectorField v(grid);
    std::vector<ScalarField> gv;
    for (int i = 0; i < d; ++i) {
      v[i] = sample(grid, [&](const auto& x) { return tf.direction[i] * std::cos(phase_at(k, x, d, tf.phase)); });
      for (int j = 0; j < d; ++j)
        gv.push_back(sample(grid, [&](const auto& x) {
          return -tf.direction[i] * k[j] * std::sin(phase_at(k, x, d, tf.phase));
        }));
    }
    vpsi_.push_back(std::move(v));
    grad_vpsi_.push_back(std::move(gv));
  }
  sum_n_.assign(psi_.size(), 0.0);
  sum_c_.assign(psi_.size(), 0.0);
  sum_u_.assign(vpsi_.size(), 0.0);
}

WeakResidualAccumulator::Terms WeakResidualAccumulator::evaluate(const State& s) const {
  const Spectral& sp = *spectral_;
  const Grid& grid = sp.grid();
  const int d = grid.dim();
  const std::size_t np = grid.size();

  const VectorField grad_n = sp.gradient(s.n);
  const VectorField grad_c = sp.gradient(s.c);
  // pointwise fluxes with the limit coefficients
  VectorField flux_n(grid), flux_c(grid), forcing(grid);
  ScalarField consumption(grid);
  for (std::size_t p = 0; p < np; ++p) {
    const double n = s.n[p], c = s.c[p];
    const double chi = coeffs_.chi(c);
    for (int a = 0; a < d; ++a) {
      flux_n[a][p] = grad_n[a][p] - n * chi * grad_c[a][p] - n * s.u[a][p];
      flux_c[a][p] = grad_c[a][p] - c * s.u[a][p];
      forcing[a][p] = n * grad_phi_[a][p];
    }
    consumption[p] = n * coeffs_.f(std::max(c, 0.0));
  }
  std::vector<VectorField> grad_u;
  for (int i = 0; i < d; ++i) grad_u.push_back(sp.gradient(s.u[i]));

  Terms t;
  for (std::size_t j = 0; j < psi_.size(); ++j) {
    t.mass_n.push_back(pair(s.n, psi_[j]));
    t.flux_n.push_back(pair(flux_n, grad_psi_[j]));
    t.mass_c.push_back(pair(s.c, psi_[j]));
    t.flux_c.push_back(pair(flux_c, grad_psi_[j]) + pair(consumption, psi_[j]));
  }
  for (std::size_t j = 0; j < vpsi_.size(); ++j) {
    double visc = 0.0, conv = 0.0;
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) {
        const ScalarField& dpsi = grad_vpsi_[j][i * d + k];
        visc += pair(grad_u[i][k], dpsi);
        double acc = 0.0;
        for (std::size_t p = 0; p < np; ++p) acc += s.u[i][p] * s.u[k][p] * dpsi[p];
        conv += acc * grid.cell_volume();
      }
    t.mass_u.push_back(pair(s.u, vpsi_[j]));
    t.flux_u.push_back(visc - conv - pair(forcing, vpsi_[j]));
  }
  return t;
}

void WeakResidualAccumulator::accumulate(const Terms& terms, double t, double weight) {
  const double eta = time_bump(t, library_.tau);
  const double deta = time_bump_derivative(t, library_.tau);
  for (std::size_t j = 0; j < sum_n_.size(); ++j) {
    sum_n_[j] += weight * (-deta * terms.mass_n[j] + eta * terms.flux_n[j]);
    sum_c_[j] += weight * (-deta * terms.mass_c[j] + eta * terms.flux_c[j]);
  }
  for (std::size_t j = 0; j < sum_u_.size(); ++j)
    sum_u_[j] += weight * (-deta * terms.mass_u[j] + eta * terms.flux_u[j]);
}

void WeakResidualAccumulator::observe(const State& state) {
  if (started_ && !(state.t > last_t_)) throw InvalidArgument("states must be observed in increasing time");
  if (started_ && last_t_ >= library_.tau) {
    // the test functions vanish from here on
    last_t_ = state.t;
    return;
  }
  Terms cur = evaluate(state);
  if (!started_) {
    // initial-data term: - integral of f0 psi eta(0)
    const double eta0 = time_bump(state.t, library_.tau);
    for (std::size_t j = 0; j < sum_n_.size(); ++j) {
      sum_n_[j] -= eta0 * cur.mass_n[j];
      sum_c_[j] -= eta0 * cur.mass_c[j];
    }
    for (std::size_t j = 0; j < sum_u_.size(); ++j) sum_u_[j] -= eta0 * cur.mass_u[j];
  } else {
    const double h = state.t - last_t_;
    accumulate(last_, last_t_, 0.5 * h);
    accumulate(cur, state.t, 0.5 * h);
  }
  started_ = true;
  last_t_ = state.t;
  last_ = std::move(cur);
}

WeakResiduals WeakResidualAccumulator::result() const {
  if (!started_ || last_t_ < library_.tau * (1.0 - 1e-12))
    throw InvalidArgument("test function support exceeds the trajectory");
  WeakResiduals r;
  for (double v : sum_n_) r.n.push_back(std::abs(v));
  for (double v : sum_c_) r.c.push_back(std::abs(v));
  for (double v : sum_u_) r.u.push_back(std::abs(v));
  return r;
}

WeakResiduals weak_residuals(const std::vector<State>& trajectory, const TestLibrary& library,
                             const CoefficientSet& coeffs) {
  if (trajectory.empty()) throw InvalidArgument("empty trajectory");
  WeakResidualAccumulator acc(std::make_shared<const Spectral>(trajectory.front().n.grid()), coeffs, library);
  for (const State& s : trajectory) acc.observe(s);
  return acc.result();
}

}  // namespace ctns
