#pragma once

#include <array>
#include <memory>
#include <vector>

#include "ctns/coefficients.hpp"
#include "ctns/regularized_system.hpp"

namespace ctns {

/// psi(x) = cos(k . x + phase) with k = 2 pi m / L (zero mean).
struct ScalarTestFunction {
  std::array<int, 3> mode{};
  double phase = 0.0;
};

/// a cos(k . x + phase) with a unit vector orthogonal to k (solenoidal).
struct VectorTestFunction {
  std::array<int, 3> mode{};
  double phase = 0.0;
  std::array<double, 3> direction{};
};

/// Smooth time bump eta(t) = exp(1 - 1 / (1 - (t/tau)^2)) on [0, tau),
/// zero afterwards; eta(0) = 1 and eta'(0) = 0.
double time_bump(double t, double tau);
double time_bump_derivative(double t, double tau);

/// Five space modes per equation, each paired with the same time bump.
struct TestLibrary {
  double tau = 1.0;
  std::vector<ScalarTestFunction> scalar;
  std::vector<VectorTestFunction> vector;
};

TestLibrary default_test_library(const Grid& grid, double tau);

struct WeakResiduals {
  std::vector<double> n;  // one absolute residual per test function
  std::vector<double> c;
  std::vector<double> u;
  /// Root-sum-square over the library.
  double r_n() const;
  double r_c() const;
  double r_u() const;
};

/// Streaming assembly of the weak identities for n, c and u with the limit
/// coefficients chi(c), f(c) and u (x) u. Time integrals use the trapezoidal
/// rule over the observed states; space integrals use grid quadrature.
class WeakResidualAccumulator {
 public:
  WeakResidualAccumulator(std::shared_ptr<const Spectral> spectral, CoefficientSet coeffs, TestLibrary library);

  /// Feed states in time order, starting with the initial data.
  void observe(const State& state);
  /// Throws InvalidArgument if the observed trajectory ends before tau.
  WeakResiduals result() const;

 private:
  struct Terms {
    std::vector<double> mass_n, flux_n, mass_c, flux_c, mass_u, flux_u;
  };
  Terms evaluate(const State& state) const;
  void accumulate(const Terms& terms, double t, double weight);

  std::shared_ptr<const Spectral> spectral_;
  CoefficientSet coeffs_;
  TestLibrary library_;
  VectorField grad_phi_;
  std::vector<ScalarField> psi_;
  std::vector<VectorField> grad_psi_;
  std::vector<VectorField> vpsi_;
  std::vector<std::vector<ScalarField>> grad_vpsi_;  // [test][i * dim + j] = d_j psi_i

  bool started_ = false;
  double last_t_ = 0.0;
  Terms last_;
  std::vector<double> sum_n_, sum_c_, sum_u_;
};

WeakResiduals weak_residuals(const std::vector<State>& trajectory, const TestLibrary& library,
                             const CoefficientSet& coeffs);

}  // namespace ctns
