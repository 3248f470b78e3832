#include "ctns/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "ctns/error.hpp"

namespace ctns {

const std::array<const char*, 12>& record_columns() {
  static const std::array<const char*, 12> names = {
      "t",        "mass",      "c_max",     "u_l2sq",    "energy_total", "energy_entropy",
      "energy_signal", "dissip_n", "dissip_c4", "dissip_c2", "dissip_u", "fluid_residual"};
  return names;
}

std::array<double, 12> record_values(const DiagnosticsRecord& r) {
  return {r.t,        r.mass,      r.c_max,     r.u_l2sq,   r.energy_total, r.energy_entropy,
          r.energy_signal, r.dissip_n, r.dissip_c4, r.dissip_c2, r.dissip_u, r.fluid_residual};
}

namespace {

double grad_squared_sum(const VectorField& u, const Spectral& sp) {
  double total = 0.0;
  for (int i = 0; i < u.dim(); ++i) total += l2_norm_squared(sp.gradient(u[i]));
  return total;
}

double squared_norm_at(const VectorField& v, std::size_t i) {
  double s = 0.0;
  for (int a = 0; a < v.dim(); ++a) s += v[a][i] * v[a][i];
  return s;
}

}  // namespace

DiagnosticsRecord energy_functional(const State& state, const DerivedChemo& derived, const Spectral& sp,
                                    double kappa, double floor) {
  if (!(floor > 0.0)) throw InvalidArgument("floor must be positive");
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  const CoefficientSet& coeffs = derived.coefficients();
  const Grid& grid = sp.grid();

  DiagnosticsRecord r;
  r.t = state.t;
  r.mass = integrate(state.n);
  r.c_max = state.c.max();
  r.u_l2sq = l2_norm_squared(state.u);

  ScalarField entropy(grid), signal(grid);
  const VectorField grad_c = sp.gradient(state.c);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double n = state.n[i];
    entropy[i] = n >= floor ? n * std::log(n) : 0.0;
    const double gc2 = squared_norm_at(grad_c, i);
    if (gc2 == 0.0) continue;
    const double c = state.c[i];
    const double f = coeffs.f(std::max(c, floor));
    if (!(f > 0.0)) {
      std::ostringstream os;
      os << "singular signal weight: f(" << c << ") = " << f << " with |grad c| > 0";
      throw SingularWeight(os.str(), i);
    }
    signal[i] = coeffs.chi(c) / f * gc2;
  }
  r.energy_entropy = integrate(entropy);
  r.energy_signal = 0.5 * integrate(signal);
  r.energy_total = r.energy_entropy + r.energy_signal + kappa * r.u_l2sq;
  return r;
}

Dissipation dissipation_terms(const State& state, const Spectral& sp, double floor) {
  if (!(floor > 0.0)) throw InvalidArgument("floor must be positive");
  const Grid& grid = sp.grid();
  const int d = grid.dim();
  const VectorField grad_n = sp.gradient(state.n);
  const VectorField grad_c = sp.gradient(state.c);
  const Hessian hess_c = sp.hessian(state.c);

  ScalarField dn(grid), dc4(grid), dc2(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double n = std::max(state.n[i], floor);
    const double c = std::max(state.c[i], floor);
    dn[i] = squared_norm_at(grad_n, i) / n;
    const double gc2 = squared_norm_at(grad_c, i);
    dc4[i] = gc2 * gc2 / (c * c * c);
    double h2 = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) h2 += hess_c(a, b)[i] * hess_c(a, b)[i];
    dc2[i] = h2 / c;
  }
  Dissipation out;
  out.n = integrate(dn);
  out.c4 = integrate(dc4);
  out.c2 = integrate(dc2);
  out.u = grad_squared_sum(state.u, sp);
  return out;
}

double fluid_energy_residual(const State& prev, const State& next, double dt, const VectorField& phi_grad,
                             const Spectral& sp) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  const double k0 = 0.5 * l2_norm_squared(prev.u);
  const double k1 = 0.5 * l2_norm_squared(next.u);
  const double diss = 0.5 * (grad_squared_sum(prev.u, sp) + grad_squared_sum(next.u, sp));
  const auto work = [&](const State& s) {
    ScalarField w = dot(s.u, phi_grad);
    for (std::size_t i = 0; i < w.values().size(); ++i) w[i] *= s.n[i];
    return integrate(w);
  };
  const double forcing = 0.5 * (work(prev) + work(next));
  return std::abs((k1 - k0) / dt + diss - forcing);
}

double signal_energy_via_psi(const ScalarField& c, const DerivedChemo& derived, const Spectral& sp, double floor) {
  const VectorField grad_c = sp.gradient(c);
  ScalarField w(c.grid());
  for (std::size_t i = 0; i < w.values().size(); ++i) {
    const double psi_prime = 1.0 / std::sqrt(derived.g(std::max(c[i], floor)));
    w[i] = psi_prime * psi_prime * squared_norm_at(grad_c, i);
  }
  return 0.5 * integrate(w);
}

DiagnosticsRecord make_record(const State& state, const DerivedChemo& derived, const Spectral& sp, double kappa,
                              double floor) {
  DiagnosticsRecord r = energy_functional(state, derived, sp, kappa, floor);
  const Dissipation d = dissipation_terms(state, sp, floor);
  r.dissip_n = d.n;
  r.dissip_c4 = d.c4;
  r.dissip_c2 = d.c2;
  r.dissip_u = d.u;
  return r;
}

EnergyFit fit_energy_constant(const std::vector<DiagnosticsRecord>& records, double kappa) {
  if (records.size() < 10) throw InvalidArgument("fit_energy_constant needs at least 10 records");
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  const double dt = records[1].t - records[0].t;
  if (!(dt > 0.0)) throw InvalidArgument("records must advance in time");
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double h = records[i].t - records[i - 1].t;
    if (std::abs(h - dt) > 1e-9 * dt) throw InvalidArgument("records must be spaced uniformly in t");
  }

  const std::size_t steps = records.size() - 1;
  std::vector<double> rate(steps), diss(steps);
  const auto energy = [kappa](const DiagnosticsRecord& r) {
    return r.energy_entropy + r.energy_signal + kappa * r.u_l2sq;
  };
  for (std::size_t i = 0; i < steps; ++i) {
    rate[i] = (energy(records[i + 1]) - energy(records[i])) / dt;
    diss[i] = records[i].dissip_n + records[i].dissip_c4 + records[i].dissip_u;
  }
  const auto holds = [&](double k) {
    for (std::size_t i = 0; i < steps; ++i)
      if (rate[i] + diss[i] / k > k) return false;
    return true;
  };

  EnergyFit fit;
  fit.kappa = kappa;
  if (holds(kFitLower)) {
    fit.k_hat = kFitLower;
  } else {
    if (!holds(kFitUpper)) throw std::runtime_error("no energy constant K <= 1e12 satisfies the inequality");
    double lo = kFitLower, hi = kFitUpper;
    // geometric bisection; the predicate is monotone in K
    while (hi / lo - 1.0 > 1e-14) {
      const double mid = std::sqrt(lo * hi);
      if (mid <= lo || mid >= hi) break;
      (holds(mid) ? hi : lo) = mid;
    }
    fit.k_hat = hi;
  }
  fit.margin_series.resize(steps);
  for (std::size_t i = 0; i < steps; ++i) fit.margin_series[i] = fit.k_hat - (rate[i] + diss[i] / fit.k_hat);
  return fit;
}

InequalityResult functional_inequality_check(const ScalarField& phi, const ScalarFunction& h, const Spectral& sp) {
  if (!(phi.min() > 0.0)) throw InvalidArgument("functional inequality needs phi > 0");
  const Grid& grid = sp.grid();
  const int d = grid.dim();
  const auto h_prime = [&h](double s) {
    if (h.d1) return h.d1(s);
    const double step = 1e-6 * std::max(1.0, std::abs(s));
    return (h(s + step) - h(s - step)) / (2 * step);
  };
  const VectorField grad = sp.gradient(phi);
  const Hessian hess = sp.hessian(phi);

  ScalarField left(grid), right(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = phi[i];
    const double hv = h(s);
    const double hp = h_prime(s);
    if (!(hv > 0.0)) throw InvalidArgument("functional inequality needs h > 0 on the range of phi");
    if (!(hp > 0.0)) throw InvalidArgument("functional inequality needs h' > 0 on the range of phi");
    const double g2 = squared_norm_at(grad, i);
    left[i] = hp / (hv * hv * hv) * g2 * g2;
    const double t1 = 1.0 / hv;
    const double t2 = -hp / (hv * hv);
    double frob = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        const double v = t2 * grad[a][i] * grad[b][i] + t1 * hess(a, b)[i];
        frob += v * v;
      }
    right[i] = hv / hp * frob;
  }
  InequalityResult r;
  r.lhs = integrate(left);
  r.rhs_base = integrate(right);
  r.rhs = r.bound_constant * r.rhs_base;
  r.satisfied = r.lhs <= r.rhs + 1e-9 * (1.0 + r.lhs);
  return r;
}

nlohmann::json to_json(const InequalityResult& r) {
  return {{"lhs", r.lhs}, {"rhs", r.rhs}, {"rhs_base", r.rhs_base}, {"constant", r.bound_constant},
          {"satisfied", r.satisfied}};
}

std::string to_string(GrowthQuantity q) {
  switch (q) {
    case GrowthQuantity::n_5_3:
      return "int n^(5/3)";
    case GrowthQuantity::grad_n_5_4:
      return "int |grad n|^(5/4)";
    case GrowthQuantity::u_10_3:
      return "int |u|^(10/3)";
    case GrowthQuantity::dissip_n:
      return "int |grad n|^2/n";
    case GrowthQuantity::dissip_c2:
      return "int |D^2 c|^2/c";
    case GrowthQuantity::dissip_c4:
      return "int |grad c|^4/c^3";
    case GrowthQuantity::dissip_u:
      return "int |grad u|^2";
  }
  return "?";
}

std::array<double, kGrowthQuantities> GrowthReport::spread() const {
  std::array<double, kGrowthQuantities> out{};
  for (int q = 0; q < kGrowthQuantities; ++q) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& cp : checkpoints) {
      lo = std::min(lo, cp.ratio[q]);
      hi = std::max(hi, cp.ratio[q]);
    }
    if (checkpoints.empty() || hi == 0.0)
      out[q] = 1.0;
    else
      out[q] = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  }
  return out;
}

bool GrowthReport::bounded(double factor) const {
  for (double s : spread())
    if (!(s <= factor)) return false;
  return true;
}

AprioriMonitor::AprioriMonitor(std::shared_ptr<const Spectral> spectral, std::vector<double> checkpoints,
                               double floor)
    : spectral_(std::move(spectral)), checkpoints_(std::move(checkpoints)), floor_(floor) {
  if (!spectral_) throw InvalidArgument("AprioriMonitor needs a spectral context");
  if (!std::is_sorted(checkpoints_.begin(), checkpoints_.end()))
    throw InvalidArgument("checkpoints must be increasing");
}

std::array<double, kGrowthQuantities> AprioriMonitor::integrands(const State& state,
                                                                 const DiagnosticsRecord& record) const {
  const Grid& grid = spectral_->grid();
  const VectorField grad_n = spectral_->gradient(state.n);
  double n53 = 0.0, gn54 = 0.0, u103 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    n53 += std::pow(std::max(state.n[i], 0.0), 5.0 / 3.0);
    gn54 += std::pow(squared_norm_at(grad_n, i), 5.0 / 8.0);
    u103 += std::pow(squared_norm_at(state.u, i), 5.0 / 3.0);
  }
  const double cv = grid.cell_volume();
  return {n53 * cv, gn54 * cv, u103 * cv, record.dissip_n, record.dissip_c2, record.dissip_c4, record.dissip_u};
}

void AprioriMonitor::observe(const State& state, const DiagnosticsRecord& record) {
  const auto cur = integrands(state, record);
  double step = 0.0;
  if (started_) {
    step = state.t - last_t_;
    if (!(step > 0.0)) throw InvalidArgument("states must be observed in increasing time");
    for (int q = 0; q < kGrowthQuantities; ++q) cumulative_[q] += 0.5 * step * (last_[q] + cur[q]);
  }
  started_ = true;
  last_t_ = state.t;
  last_ = cur;
  while (next_checkpoint_ < checkpoints_.size() && state.t >= checkpoints_[next_checkpoint_] - 0.5 * step) {
    GrowthCheckpoint cp;
    cp.t = state.t;
    cp.cumulative = cumulative_;
    for (int q = 0; q < kGrowthQuantities; ++q) cp.ratio[q] = cumulative_[q] / (state.t + 1.0);
    report_.checkpoints.push_back(cp);
    ++next_checkpoint_;
  }
}

GrowthReport apriori_monitors(const std::vector<DiagnosticsRecord>& records, const std::vector<State>& trajectory,
                              const std::vector<double>& checkpoints, double floor) {
  if (records.size() != trajectory.size()) throw InvalidArgument("records and trajectory differ in length");
  if (trajectory.empty()) return {};
  AprioriMonitor monitor(std::make_shared<const Spectral>(trajectory.front().n.grid()), checkpoints, floor);
  for (std::size_t i = 0; i < trajectory.size(); ++i) monitor.observe(trajectory[i], records[i]);
  return monitor.report();
}

void write_csv_header(std::ostream& out) {
  const auto& names = record_columns();
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
}

void write_csv_row(std::ostream& out, const DiagnosticsRecord& r) {
  char buf[32];
  const auto values = record_values(r);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    out << (i ? "," : "") << buf;
  }
  out << '\n';
}

void write_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records) {
  write_csv_header(out);
  for (const auto& r : records) write_csv_row(out, r);
}

}  // namespace ctns
