#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "ctns/coefficients.hpp"
#include "ctns/stokes.hpp"

namespace ctns {

/// Numerical parameters of one run of the regularized system.
struct SimParams {
  double eps = 0.05;       // regularization strength, in (0, 1)
  double dt = 1e-3;
  double t_end = 1.0;
  bool dealias = true;     // 2/3 rule on the explicit terms
  double cfl_guard = 0.5;  // max |u| dt / h
  int snapshot_every = 0;  // 0 disables snapshots

  /// Throws InvalidArgument on inconsistent values.
  void validate() const;
  /// Number of steps needed to reach t_end from t0.
  long steps_from(double t0) const;
};

/// One time slice of the regularized system.
struct State {
  double t = 0.0;
  ScalarField n;  // cell density
  ScalarField c;  // signal concentration
  VectorField u;  // solenoidal velocity
};

/// Smoothed identity F_eps(s) = ln(1 + eps s) / eps, s >= 0.
double f_eps(double s, double eps);
/// F_eps'(s) = 1 / (1 + eps s).
double f_eps_prime(double s, double eps);

/// Initial data generators.
///
///  - bump: Gaussian-like periodic bumps for n0 and sqrt(c0), offset so that
///    the signal gradient is nonzero where cells sit.
///  - layered: n0 and sqrt(c0) vary along the last axis only.
///  - random_band: n0 = exp(band-limited field), sqrt(c0) band-limited.
///
/// In every preset u0 is a projected random band-limited field rescaled to
/// L2 norm `u_norm` (zero when u_norm = 0), n0 is rescaled to the exact
/// mass, and max c0 equals `c_amplitude` when attained on the grid.
struct InitPreset {
  enum class Kind { bump, layered, random_band };
  Kind kind = Kind::bump;
  double mass = 1.0;
  double n_amplitude = 4.0;     // relative height of the n0 bump or layer
  double n_width = 0.12;        // bump width as a fraction of the box
  double c_amplitude = 1.0;     // max of c0
  double c_background = 0.4;    // floor of sqrt(c0) relative to its peak
  double c_width = 0.2;
  double u_norm = 0.0;
  int band = 3;
  std::uint64_t seed = 1;
};

InitPreset::Kind parse_preset_kind(const std::string& name);
std::string to_string(InitPreset::Kind kind);

State make_initial_data(const InitPreset& preset, const StokesOperator& op, const CoefficientSet& coeffs);

/// First-order IMEX step of the regularized system.
///
/// Transport, chemotaxis, consumption, buoyancy and the Yosida-regularized
/// convection are explicit; diffusion of n, c and u is implicit and exact
/// per Fourier mode. Both transport terms of the n equation are written as
/// spectral divergences so the mean of n is untouched.
class Stepper {
 public:
  Stepper(const SimParams& params, const CoefficientSet& coeffs, const StokesOperator& op);

  /// Throws CflViolation before stepping and BlowUp on non-finite output.
  State step(const State& state) const;

  const SimParams& params() const { return params_; }
  const VectorField& potential_gradient() const { return grad_phi_; }

 private:
  SimParams params_;
  CoefficientSet coeffs_;
  StokesOperator op_;
  VectorField grad_phi_;
};

State step(const State& state, const SimParams& params, const CoefficientSet& coeffs,
           const StokesOperator& op);

using Observer = std::function<void(const State&)>;

/// Steps from state0.t to params.t_end, calling `observer` after each step.
State run(State state0, const SimParams& params, const CoefficientSet& coeffs,
          const StokesOperator& op, const Observer& observer = {});

/// L2 norm of the discrete divergence of u.
double divergence_l2(const Spectral& spectral, const VectorField& u);

}  // namespace ctns
