#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ctns/grid.hpp"

namespace ctns {

class Spectral;

/// A real function of one variable with optional closed-form derivatives.
struct ScalarFunction {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;

  double operator()(double s) const { return value(s); }
  bool has_derivatives() const { return static_cast<bool>(d1) && static_cast<bool>(d2); }

  static ScalarFunction constant(double c);
  static ScalarFunction power(double exponent, double factor = 1.0);
};

/// Gravitational potential over the box.
///
/// Either identically zero, a single cosine mode
///   amplitude * cos(2 pi mode x_axis / L_axis),
/// or gridded samples whose gradient is taken spectrally.
class Potential {
 public:
  enum class Kind { zero, cosine, gridded };

  static Potential zero();
  static Potential cosine(double amplitude, int axis, int mode);
  static Potential gridded(ScalarField samples);

  Kind kind() const { return kind_; }
  ScalarField values(const Grid& grid) const;
  VectorField gradient(const Spectral& spectral) const;
  /// Finite values and finite gradient on the grid.
  bool is_valid_on(const Spectral& spectral) const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::zero;
  double amplitude_ = 0.0;
  int axis_ = 0;
  int mode_ = 1;
  std::shared_ptr<const ScalarField> samples_;
};

/// Closed-form antiderivatives of 1/sqrt(g) and 1/g normalized at s = 1.
struct ClosedTransforms {
  std::function<double(double)> psi;
  std::function<double(double)> rho;
};

/// The model coefficient functions: consumption rate f, chemotactic
/// sensitivity chi, potential phi and the signal ceiling s0.
struct CoefficientSet {
  std::string family;
  ScalarFunction f;
  ScalarFunction chi;
  Potential phi;
  double s0 = 1.0;
  std::optional<ClosedTransforms> closed;
};

/// f(s) = s, chi = chi0.
CoefficientSet prototype(double chi0, double s0, Potential phi = Potential::zero());
/// f(s) = s^f_exp, chi = chi0.
CoefficientSet powerlaw(double f_exp, double chi0, double s0, Potential phi = Potential::zero());
/// f and chi interpolated linearly from a CSV file with columns s, f, chi.
CoefficientSet tabulated(const std::filesystem::path& csv, double s0,
                         Potential phi = Potential::zero());
/// Parse "prototype{chi0}", "powerlaw{f_exp, chi0}" or "tabulated{path}".
CoefficientSet make_family(const std::string& spec, double s0, Potential phi = Potential::zero());

/// Throws InvalidArgument unless f(0) = 0, f >= 0, chi > 0 on the sample grid
/// of [0, s0] and phi is finite (only checked when `spectral` is given).
void validate(const CoefficientSet& coeffs, int n_samples = 4096,
              const Spectral* spectral = nullptr);

/// Uniform samples of [0, s0], endpoints included.
std::vector<double> sample_grid(double s0, int n_samples);

/// g = f/chi with derivatives, the transforms Psi and rho, and the linear
/// envelope constants of g on (0, s0].
///
/// Psi(s) = int_1^s dsigma / sqrt(g), rho(s) = int_1^s dsigma / g are
/// tabulated on log-spaced nodes in [1e-6 s0, s0] and interpolated linearly.
class DerivedChemo {
 public:
  double g(double s) const;
  double g_prime(double s) const;
  double g_second(double s) const;
  double psi(double s) const;
  double rho(double s) const;

  double cg_minus() const { return cg_minus_; }
  double cg_plus() const { return cg_plus_; }
  double s_min() const { return nodes_.front(); }
  double s0() const { return s0_; }
  /// Step used for finite-difference derivatives of tabulated families.
  double fd_step() const { return fd_step_; }
  const CoefficientSet& coefficients() const { return *coeffs_; }

 private:
  friend DerivedChemo derive_chemo(const CoefficientSet&, int);
  double interpolate(const std::vector<double>& table, double s) const;

  std::shared_ptr<const CoefficientSet> coeffs_;
  double s0_ = 0.0;
  double fd_step_ = 0.0;
  double cg_minus_ = 0.0;
  double cg_plus_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> psi_table_;
  std::vector<double> rho_table_;
};

/// n_samples >= 16. Throws InvalidArgument when s0 = 0 or g(s) <= 0 at some
/// sample s > 0.
DerivedChemo derive_chemo(const CoefficientSet& coeffs, int n_samples = 4096);

enum class StructuralCondition {
  g_increasing,      // (f/chi)' > 0
  g_concave,         // (f/chi)'' <= 0
  chi_f_convex,      // (chi f)'' >= 0
  consumption_sign,  // f g'/(2 g^2) - f'/g <= 0, consistency only
};

std::string to_string(StructuralCondition c);

struct StructuralViolation {
  StructuralCondition condition;
  double s;
  double value;
};

struct StructuralReport {
  bool passes = true;
  std::vector<StructuralViolation> violations;
  /// Failures of the derived consumption-sign identity; not part of `passes`.
  std::vector<StructuralViolation> consistency;
  std::vector<double> sample_grid;

  bool flags(StructuralCondition c) const;
};

StructuralReport check_structural(const CoefficientSet& coeffs, int n_samples = 4096);

/// Derivative helpers shared by the validators: closed form when the
/// function carries it, second-order finite differences on [0, s0] otherwise.
double first_derivative(const ScalarFunction& fn, double s, double h, double s0);
double second_derivative(const ScalarFunction& fn, double s, double h, double s0);

}  // namespace ctns
