#include "ctns/regularized_system.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ctns/error.hpp"
#include "ctns/random_fields.hpp"

namespace ctns {

void SimParams::validate() const {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in (0, 1)");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (!(t_end > 0.0)) throw InvalidArgument("t_end must be positive");
  if (!(dt < t_end)) throw InvalidArgument("dt must be smaller than t_end");
  if (!(cfl_guard > 0.0)) throw InvalidArgument("cfl_guard must be positive");
  if (snapshot_every < 0) throw InvalidArgument("snapshot_every must be nonnegative");
}

long SimParams::steps_from(double t0) const {
  return std::max(0L, std::lround((t_end - t0) / dt));
}

double f_eps(double s, double eps) {
  if (!(s >= 0.0)) throw InvalidArgument("f_eps is defined for s >= 0");
  return std::log1p(eps * s) / eps;
}

double f_eps_prime(double s, double eps) {
  if (!(s >= 0.0)) throw InvalidArgument("f_eps_prime is defined for s >= 0");
  return 1.0 / (1.0 + eps * s);
}

InitPreset::Kind parse_preset_kind(const std::string& name) {
  if (name == "bump") return InitPreset::Kind::bump;
  if (name == "layered") return InitPreset::Kind::layered;
  if (name == "random_band") return InitPreset::Kind::random_band;
  throw InvalidArgument("unknown init preset '" + name + "'");
}

std::string to_string(InitPreset::Kind kind) {
  switch (kind) {
    case InitPreset::Kind::bump:
      return "bump";
    case InitPreset::Kind::layered:
      return "layered";
    case InitPreset::Kind::random_band:
      return "random_band";
  }
  return "bump";
}

namespace {

// Smooth periodic bump with peak 1 at `center` (fractions of the box).
double periodic_bump(const Grid& grid, const std::array<double, 3>& x, double center, double width) {
  double r2 = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    const double L = grid.length(a);
    const double s = (L / std::numbers::pi) * std::sin(std::numbers::pi * (x[a] - center * L) / L);
    r2 += s * s;
  }
  const double w = width * grid.length(0);
  return std::exp(-r2 / (2.0 * w * w));
}

// sqrt(c0) = sqrt(amp) * (bg + (1 - bg) * shape), shape in [0, 1]
ScalarField signal_from_shape(const ScalarField& shape, double amp, double bg) {
  ScalarField c(shape.grid());
  const double root = std::sqrt(amp);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double r = root * (bg + (1.0 - bg) * shape[i]);
    c[i] = r * r;
  }
  return c;
}

}  // namespace

State make_initial_data(const InitPreset& preset, const StokesOperator& op, const CoefficientSet& coeffs) {
  if (!(preset.mass > 0.0)) throw InvalidArgument("prescribed mass must be positive");
  if (!(preset.c_amplitude >= 0.0)) throw InvalidArgument("signal amplitude must be nonnegative");
  if (preset.c_amplitude > 0.0 && coeffs.s0 == 0.0)
    throw InvalidArgument("s0 = 0 does not admit a nonzero signal amplitude");
  if (preset.c_amplitude > coeffs.s0 * (1.0 + 1e-12))
    throw InvalidArgument("signal amplitude exceeds the ceiling s0");
  if (!(preset.c_background >= 0.0 && preset.c_background <= 1.0))
    throw InvalidArgument("signal background must lie in [0, 1]");
  if (!(preset.n_amplitude >= 0.0)) throw InvalidArgument("density amplitude must be nonnegative");
  if (!(preset.u_norm >= 0.0)) throw InvalidArgument("velocity norm must be nonnegative");

  const Spectral& sp = op.spectral();
  const Grid& grid = sp.grid();
  Rng rng(preset.seed);

  State s{0.0, ScalarField(grid), ScalarField(grid), VectorField(grid)};
  switch (preset.kind) {
    case InitPreset::Kind::bump: {
      s.n = sample(grid, [&](const auto& x) {
        return 1.0 + preset.n_amplitude * periodic_bump(grid, x, 0.4, preset.n_width);
      });
      const ScalarField shape =
          sample(grid, [&](const auto& x) { return periodic_bump(grid, x, 0.6, preset.c_width); });
      s.c = signal_from_shape(shape, preset.c_amplitude, preset.c_background);
      break;
    }
    case InitPreset::Kind::layered: {
      const int last = grid.dim() - 1;
      const double L = grid.length(last);
      s.n = sample(grid, [&](const auto& x) {
        return 1.0 + preset.n_amplitude * 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * x[last] / L));
      });
      const ScalarField shape = sample(grid, [&](const auto& x) {
        return 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * (x[last] - 0.5 * L) / L));
      });
      s.c = signal_from_shape(shape, preset.c_amplitude, preset.c_background);
      break;
    }
    case InitPreset::Kind::random_band: {
      ScalarField r = random_band_limited(sp, preset.band, rng);
      const double scale = std::max(linf(r), 1e-300);
      s.n = ScalarField(grid);
      for (std::size_t i = 0; i < r.size(); ++i) s.n[i] = std::exp(preset.n_amplitude * 0.25 * r[i] / scale);
      const ScalarField shape = random_positive_field(sp, preset.band, 0.0, 1.0, rng);
      s.c = signal_from_shape(shape, preset.c_amplitude, preset.c_background);
      break;
    }
  }
  s.n *= preset.mass / integrate(s.n);

  if (preset.u_norm > 0.0) {
    // separate stream so the velocity does not depend on the scalar draws
    Rng urng(preset.seed ^ 0x5bd1e995u);
    VectorField u = op.project(random_band_limited_vector(sp, preset.band, urng));
    u *= preset.u_norm / l2_norm(u);
    s.u = op.project(u);
  }
  return s;
}

double divergence_l2(const Spectral& spectral, const VectorField& u) {
  return lp_norm(spectral.divergence(u), 2.0);
}

// ---------------------------------------------------------------------------

Stepper::Stepper(const SimParams& params, const CoefficientSet& coeffs, const StokesOperator& op)
    : params_(params), coeffs_(coeffs), op_(op), grad_phi_(coeffs.phi.gradient(op.spectral())) {
  params_.validate();
}

State Stepper::step(const State& state) const {
  const Spectral& sp = op_.spectral();
  const Grid& grid = sp.grid();
  const int d = grid.dim();
  const std::size_t np = grid.size();
  const std::size_t nm = sp.spectral_size();
  const double dt = params_.dt;
  const double eps = params_.eps;

  if (!state.n.all_finite() || !state.c.all_finite() || !state.u.all_finite()) {
    std::ostringstream os;
    os << "non-finite state at t = " << state.t;
    throw BlowUp(os.str(), state.t);
  }
  const double courant = state.u.max_magnitude() * dt / grid.min_spacing();
  if (courant > params_.cfl_guard) {
    std::ostringstream os;
    os << "CFL guard violated: |u| dt / h = " << courant << " at t = " << state.t;
    throw CflViolation(os.str(), state.t);
  }

  const auto filtered = [&](const ScalarField& f) {
    Spectrum h = sp.forward(f);
    if (params_.dealias) sp.dealias(h);
    return h;
  };

  Spectrum n_hat = sp.forward(state.n);
  Spectrum c_hat = sp.forward(state.c);
  VectorSpectrum u_hat = op_.forward(state.u);
  const VectorField grad_c = sp.gradient_from(c_hat);

  // pointwise coefficients; undershoots of n are not clamped in the state,
  // only inside the regularized nonlinearities
  ScalarField chemo_weight(grid), consumption(grid), transport_c(grid);
  for (std::size_t i = 0; i < np; ++i) {
    const double n = state.n[i];
    const double np_ = std::max(n, 0.0);
    const double c = state.c[i];
    chemo_weight[i] = n * f_eps_prime(np_, eps) * coeffs_.chi(c);
    consumption[i] = f_eps(np_, eps) * coeffs_.f(std::max(c, 0.0));
    double adv = 0.0;
    for (int a = 0; a < d; ++a) adv += state.u[a][i] * grad_c[a][i];
    transport_c[i] = -(adv + consumption[i]);
  }

  // n: conservative flux n u + n F_eps'(n) chi(c) grad c
  Spectrum n_rhs(nm, 0.0);
  for (int a = 0; a < d; ++a) {
    ScalarField flux(grid);
    for (std::size_t i = 0; i < np; ++i) flux[i] = state.n[i] * state.u[a][i] + chemo_weight[i] * grad_c[a][i];
    const Spectrum fh = filtered(flux);
    for (std::size_t m = 0; m < nm; ++m) n_rhs[m] -= std::complex<double>(0.0, sp.k(a, m)) * fh[m];
  }
  for (std::size_t m = 0; m < nm; ++m) n_hat[m] += dt * n_rhs[m];
  op_.implicit_in_place(n_hat, dt);

  // c: transport and consumption
  const Spectrum c_rhs = filtered(transport_c);
  for (std::size_t m = 0; m < nm; ++m) c_hat[m] += dt * c_rhs[m];
  op_.implicit_in_place(c_hat, dt);

  // u: buoyancy minus Yosida-regularized convection, projected
  VectorSpectrum v_hat = u_hat;
  op_.yosida_in_place(v_hat, eps);
  const VectorField v = op_.inverse(v_hat);
  VectorSpectrum u_rhs;
  u_rhs.reserve(d);
  for (int i = 0; i < d; ++i) {
    const VectorField grad_ui = sp.gradient_from(u_hat[i]);
    ScalarField force(grid);
    for (std::size_t p = 0; p < np; ++p) {
      double conv = 0.0;
      for (int j = 0; j < d; ++j) conv += v[j][p] * grad_ui[j][p];
      force[p] = state.n[p] * grad_phi_[i][p] - conv;
    }
    u_rhs.push_back(filtered(force));
  }
  op_.project_in_place(u_rhs);
  for (int i = 0; i < d; ++i) {
    for (std::size_t m = 0; m < nm; ++m) u_hat[i][m] += dt * u_rhs[i][m];
    op_.implicit_in_place(u_hat[i], dt);
  }
  op_.project_in_place(u_hat);

  State next{state.t + dt, sp.inverse(n_hat), sp.inverse(c_hat), op_.inverse(u_hat)};
  if (!next.n.all_finite() || !next.c.all_finite() || !next.u.all_finite()) {
    std::ostringstream os;
    os << "non-finite values at t = " << next.t;
    throw BlowUp(os.str(), next.t);
  }
  return next;
}

State step(const State& state, const SimParams& params, const CoefficientSet& coeffs,
           const StokesOperator& op) {
  return Stepper(params, coeffs, op).step(state);
}

State run(State state0, const SimParams& params, const CoefficientSet& coeffs,
          const StokesOperator& op, const Observer& observer) {
  const Stepper stepper(params, coeffs, op);
  const long steps = params.steps_from(state0.t);
  State state = std::move(state0);
  for (long k = 0; k < steps; ++k) {
    state = stepper.step(state);
    if (observer) observer(state);
  }
  return state;
}

}  // namespace ctns
