#pragma once

#include <array>
#include <cmath>
#include <iosfwd>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctns/coefficients.hpp"
#include "ctns/regularized_system.hpp"
#include "json.hpp"

namespace ctns {

/// Default positivity floor for singular denominators.
inline constexpr double kDefaultFloor = 1e-12;

/// One row of the per-step energy ledger.
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;            // integral of n
  double c_max = 0.0;
  double u_l2sq = 0.0;          // integral of |u|^2
  double energy_total = 0.0;    // entropy + signal + kappa * u_l2sq
  double energy_entropy = 0.0;  // integral of n ln n
  double energy_signal = 0.0;   // 1/2 integral of (chi(c)/f(c)) |grad c|^2
  double dissip_n = 0.0;        // integral of |grad n|^2 / n
  double dissip_c4 = 0.0;       // integral of |grad c|^4 / c^3
  double dissip_c2 = 0.0;       // integral of |D^2 c|^2 / c
  double dissip_u = 0.0;        // integral of |grad u|^2
  double fluid_residual = 0.0;
};

/// CSV column names, in field order.
const std::array<const char*, 12>& record_columns();
std::array<double, 12> record_values(const DiagnosticsRecord& r);

/// f(c) vanished at a point with c above the floor and |grad c| > 0.
class SingularWeight : public std::runtime_error {
 public:
  SingularWeight(const std::string& what, std::size_t index) : std::runtime_error(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Fills t, mass, c_max, u_l2sq and the three energy fields.
///
/// n ln n counts as 0 where n < floor; inside f the signal is replaced by
/// max(c, floor).
DiagnosticsRecord energy_functional(const State& state, const DerivedChemo& derived, const Spectral& spectral,
                                    double kappa, double floor = kDefaultFloor);

struct Dissipation {
  double n = 0.0;
  double c4 = 0.0;
  double c2 = 0.0;
  double u = 0.0;
};

/// The four dissipation integrals; denominators are max(., floor).
Dissipation dissipation_terms(const State& state, const Spectral& spectral, double floor = kDefaultFloor);

/// |d/dt (1/2 |u|^2) + |grad u|^2 - n u . grad Phi| over one step, with the
/// quadratic terms averaged over the two endpoints.
double fluid_energy_residual(const State& prev, const State& next, double dt, const VectorField& phi_grad,
                             const Spectral& spectral);

/// 1/2 integral of Psi'(c)^2 |grad c|^2 with Psi' = 1/sqrt(g); equals the
/// signal energy when chi/f = 1/g is evaluated consistently.
double signal_energy_via_psi(const ScalarField& c, const DerivedChemo& derived, const Spectral& spectral,
                             double floor = kDefaultFloor);

/// Energy and dissipation fields for one state; fluid_residual is left 0.
DiagnosticsRecord make_record(const State& state, const DerivedChemo& derived, const Spectral& spectral,
                              double kappa, double floor = kDefaultFloor);

struct EnergyFit {
  double kappa = 1.0;
  double k_hat = 0.0;
  /// k_hat - ((F_{i+1} - F_i)/dt + D_i / k_hat) for each step; all >= 0.
  std::vector<double> margin_series;
};

inline constexpr double kFitLower = 1e-6;
inline constexpr double kFitUpper = 1e12;

/// Smallest K in [1e-6, 1e12] with (F_{i+1} - F_i)/dt + D_i / K <= K for
/// every step, where F is recomputed with `kappa` and
/// D_i = dissip_n + dissip_c4 + dissip_u of record i. Records must start
/// with the initial state and be spaced uniformly in t.
/// Throws InvalidArgument on bad input and std::runtime_error when no
/// K <= 1e12 works.
EnergyFit fit_energy_constant(const std::vector<DiagnosticsRecord>& records, double kappa);

inline const double kInequalityConstant = (2.0 + std::sqrt(3.0)) * (2.0 + std::sqrt(3.0));

struct InequalityResult {
  double lhs = 0.0;
  double rhs_base = 0.0;
  double rhs = 0.0;  // bound_constant * rhs_base
  double bound_constant = kInequalityConstant;
  bool satisfied = false;
};

/// lhs = integral of (h'(phi)/h(phi)^3) |grad phi|^4,
/// rhs_base = integral of (h(phi)/h'(phi)) |D^2 Theta(phi)|^2 with
/// Theta' = 1/h, D^2 Theta(phi) = Theta'' grad phi (x) grad phi + Theta' D^2 phi.
/// h.d1 is used when present, otherwise a centered difference.
InequalityResult functional_inequality_check(const ScalarField& phi, const ScalarFunction& h,
                                             const Spectral& spectral);

nlohmann::json to_json(const InequalityResult& r);

/// Cumulative time integrals behind the a priori bounds.
enum class GrowthQuantity { n_5_3, grad_n_5_4, u_10_3, dissip_n, dissip_c2, dissip_c4, dissip_u };
inline constexpr int kGrowthQuantities = 7;
std::string to_string(GrowthQuantity q);

struct GrowthCheckpoint {
  double t = 0.0;
  std::array<double, kGrowthQuantities> cumulative{};
  std::array<double, kGrowthQuantities> ratio{};  // cumulative / (t + 1)
};

struct GrowthReport {
  std::vector<GrowthCheckpoint> checkpoints;
  /// max over checkpoints of the ratio divided by the min; 1 when all are 0.
  std::array<double, kGrowthQuantities> spread() const;
  bool bounded(double factor) const;
};

/// Streaming trapezoidal accumulator over a uniformly spaced trajectory.
class AprioriMonitor {
 public:
  AprioriMonitor(std::shared_ptr<const Spectral> spectral, std::vector<double> checkpoints,
                 double floor = kDefaultFloor);

  /// Feed states in time order, starting with the initial state.
  void observe(const State& state, const DiagnosticsRecord& record);
  const GrowthReport& report() const { return report_; }

 private:
  std::array<double, kGrowthQuantities> integrands(const State& state, const DiagnosticsRecord& record) const;

  std::shared_ptr<const Spectral> spectral_;
  std::vector<double> checkpoints_;
  double floor_;
  std::size_t next_checkpoint_ = 0;
  bool started_ = false;
  double last_t_ = 0.0;
  std::array<double, kGrowthQuantities> last_{};
  std::array<double, kGrowthQuantities> cumulative_{};
  GrowthReport report_;
};

GrowthReport apriori_monitors(const std::vector<DiagnosticsRecord>& records, const std::vector<State>& trajectory,
                              const std::vector<double>& checkpoints, double floor = kDefaultFloor);

/// Header plus one row per record, every value printed with 17 significant digits.
void write_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records);
void write_csv_row(std::ostream& out, const DiagnosticsRecord& r);
void write_csv_header(std::ostream& out);

}  // namespace ctns
