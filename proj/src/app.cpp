#include "ctns/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <future>
#include <ostream>
#include <sstream>

#include "ctns/error.hpp"
#include "ctns/snapshot.hpp"
#include "ctns/verify.hpp"

namespace ctns {

namespace {

std::string to_string(RunResult::Status s) {
  switch (s) {
    case RunResult::Status::ok:
      return "ok";
    case RunResult::Status::invariant_violation:
      return "invariant_violation";
    case RunResult::Status::blow_up:
      return "blow_up";
  }
  return "?";
}

std::string step_name(long step) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%06ld", step);
  return buf;
}

void write_state_snapshot(const std::filesystem::path& dir, long step, const State& s) {
  std::filesystem::create_directories(dir);
  write_snapshot(dir / ("n_" + step_name(step) + ".bin"), s.n);
  write_snapshot(dir / ("c_" + step_name(step) + ".bin"), s.c);
  write_snapshot(dir / ("u_" + step_name(step) + ".bin"), s.u);
}

// At most this many messages per invariant; later hits are only counted.
constexpr int kMessagesPerCheck = 3;

class InvariantLog {
 public:
  void fail(const std::string& check, const std::string& message) {
    int& n = counts_[check];
    if (++n <= kMessagesPerCheck) messages_.push_back(message);
  }
  std::vector<std::string> messages() const {
    std::vector<std::string> out = messages_;
    for (const auto& [check, n] : counts_)
      if (n > kMessagesPerCheck)
        out.push_back(check + ": " + std::to_string(n - kMessagesPerCheck) + " further violations");
    return out;
  }
  bool empty() const { return counts_.empty(); }

 private:
  std::map<std::string, int> counts_;
  std::vector<std::string> messages_;
};

std::string at_time(double t) {
  std::ostringstream os;
  os << " at t = " << t;
  return os.str();
}

}  // namespace

RunResult simulate(const RunConfig& config, const RunOptions& options) {
  config.validate();
  auto spectral = std::make_shared<const Spectral>(config.grid());
  const StokesOperator op(spectral);
  const CoefficientSet coeffs = config.coefficients();
  std::optional<DerivedChemo> derived;
  State state0{0.0, ScalarField(spectral->grid()), ScalarField(spectral->grid()), VectorField(spectral->grid())};
  try {
    derived = derive_chemo(coeffs);
    state0 = make_initial_data(config.init, op, coeffs);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  const Stepper stepper(config.sim, coeffs, op);
  const double dt = config.sim.dt;

  std::ofstream csv;
  if (options.output_dir) {
    std::filesystem::create_directories(*options.output_dir);
    csv.open(*options.output_dir / "diagnostics.csv", std::ios::binary);
    if (!csv) throw ConfigError("cannot write " + (*options.output_dir / "diagnostics.csv").string());
    write_csv_header(csv);
  }
  const auto snapshot_dir = options.output_dir ? std::optional(*options.output_dir / "snapshots") : std::nullopt;
  const int every = config.sim.snapshot_every;

  RunResult result;
  InvariantLog log;
  State prev = state0;
  DiagnosticsRecord rec0 = make_record(state0, *derived, *spectral, config.kappa, config.floor);
  result.records.push_back(rec0);
  result.mass0 = rec0.mass;
  result.c_max0 = rec0.c_max;
  result.c_max_envelope = rec0.c_max;
  result.c_min_envelope = state0.c.min();
  result.max_divergence = divergence_l2(*spectral, state0.u);
  if (options.on_record) options.on_record(state0, rec0);
  if (snapshot_dir && every > 0) write_state_snapshot(*snapshot_dir, 0, state0);
  if (result.c_max0 > coeffs.s0 + 1e-8) log.fail("c_le_s0", "initial max c exceeds s0");

  const long steps = config.sim.steps_from(0.0);
  double prev_c_max = rec0.c_max;
  try {
    for (long k = 1; k <= steps; ++k) {
      State next = stepper.step(prev);
      DiagnosticsRecord rec;
      try {
        rec = make_record(next, *derived, *spectral, config.kappa, config.floor);
      } catch (const SingularWeight& e) {
        log.fail("singular_weight", std::string(e.what()) + at_time(next.t));
        result.final_state = std::move(next);
        break;
      }
      rec.fluid_residual = fluid_energy_residual(prev, next, dt, stepper.potential_gradient(), *spectral);

      const double drift = std::abs(rec.mass - result.mass0) / result.mass0;
      const double div = divergence_l2(*spectral, next.u);
      const double c_min = next.c.min();
      const double n_min = next.n.min(), n_max = next.n.max();
      result.max_mass_drift = std::max(result.max_mass_drift, drift);
      result.max_divergence = std::max(result.max_divergence, div);
      result.c_max_envelope = std::max(result.c_max_envelope, rec.c_max);
      result.c_min_envelope = std::min(result.c_min_envelope, c_min);
      result.max_fluid_residual = std::max(result.max_fluid_residual, rec.fluid_residual);
      if (drift > 1e-10) log.fail("mass", "relative mass drift " + std::to_string(drift) + at_time(next.t));
      if (div > 1e-11) log.fail("divergence", "L2 divergence of u " + std::to_string(div) + at_time(next.t));
      if (rec.c_max > result.c_max0 + 1e-8) log.fail("c_max", "max c above its initial value" + at_time(next.t));
      if (rec.c_max > prev_c_max + 1e-8) log.fail("c_max_monotone", "max c increased" + at_time(next.t));
      if (rec.c_max > coeffs.s0 + 1e-8) log.fail("c_le_s0", "max c exceeds s0" + at_time(next.t));
      if (c_min < -1e-8) log.fail("c_min", "min c below -1e-8" + at_time(next.t));
      if (n_min < -1e-8 * n_max) log.fail("n_min", "min n below -1e-8 max n" + at_time(next.t));
      prev_c_max = rec.c_max;

      if (csv.is_open()) write_csv_row(csv, rec);
      if (options.on_record) options.on_record(next, rec);
      if (snapshot_dir && every > 0 && k % every == 0) write_state_snapshot(*snapshot_dir, k, next);
      result.records.push_back(rec);
      prev = std::move(next);
    }
    if (!result.final_state) result.final_state = prev;
  } catch (const StepError& e) {
    result.status = RunResult::Status::blow_up;
    result.blow_up_time = e.time();
    result.blow_up_message = e.what();
    result.final_state = prev;
  }

  if (result.status != RunResult::Status::blow_up && result.records.size() >= 10) {
    try {
      result.fit = fit_energy_constant(result.records, config.kappa);
    } catch (const std::runtime_error& e) {
      log.fail("energy_fit", e.what());
    }
  }
  result.violations = log.messages();
  if (result.status == RunResult::Status::ok && !log.empty()) result.status = RunResult::Status::invariant_violation;

  if (options.output_dir) {
    csv.close();
    std::ofstream js(*options.output_dir / "summary.json", std::ios::binary);
    js << summary_json(config, result).dump(2) << '\n';
  }
  return result;
}

nlohmann::json summary_json(const RunConfig& config, const RunResult& r) {
  nlohmann::json j;
  j["status"] = to_string(r.status);
  j["steps"] = r.records.empty() ? 0 : r.records.size() - 1;
  j["final_time"] = r.records.empty() ? 0.0 : r.records.back().t;
  j["eps"] = config.sim.eps;
  j["dt"] = config.sim.dt;
  j["kappa"] = config.kappa;
  j["mass_initial"] = r.mass0;
  j["mass_final"] = r.records.empty() ? 0.0 : r.records.back().mass;
  j["final_mass_drift"] = r.records.empty() ? 0.0 : std::abs(r.records.back().mass - r.mass0) / r.mass0;
  j["max_mass_drift"] = r.max_mass_drift;
  j["c_max_initial"] = r.c_max0;
  j["c_max_envelope"] = r.c_max_envelope;
  j["c_min_envelope"] = r.c_min_envelope;
  j["max_divergence"] = r.max_divergence;
  j["max_fluid_residual"] = r.max_fluid_residual;
  if (r.fit) {
    j["k_hat"] = r.fit->k_hat;
    j["k_hat_at_lower_bound"] = r.fit->k_hat == kFitLower;
    j["min_margin"] = r.fit->margin_series.empty()
                          ? 0.0
                          : *std::min_element(r.fit->margin_series.begin(), r.fit->margin_series.end());
  } else {
    j["k_hat"] = nullptr;
  }
  j["blow_up_time"] = r.blow_up_time ? nlohmann::json(*r.blow_up_time) : nlohmann::json(nullptr);
  if (!r.blow_up_message.empty()) j["blow_up_message"] = r.blow_up_message;
  j["violations"] = r.violations;
  return j;
}

bool SweepResult::monotone() const {
  const auto non_increasing = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] > v[i - 1]) return false;
    return true;
  };
  return non_increasing(diff_n) && non_increasing(diff_c) && non_increasing(diff_u);
}

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw ConfigError("eps list entry '" + item + "' is not a number");
    }
  }
  if (out.size() < 3) throw ConfigError("eps sweep needs at least three values");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] > 0.0 && out[i] < 1.0)) throw ConfigError("eps values must lie in (0, 1)");
    if (i > 0 && out[i] > out[i - 1]) throw ConfigError("eps values must be non-increasing");
  }
  return out;
}

SweepResult sweep_eps(const RunConfig& base, const std::vector<double>& eps,
                      const std::optional<std::filesystem::path>& output_dir) {
  std::vector<std::future<RunResult>> jobs;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    RunConfig cfg = base;
    cfg.sim.eps = eps[i];
    RunOptions opt;
    if (output_dir) opt.output_dir = *output_dir / ("run_" + std::to_string(i));
    jobs.push_back(std::async(std::launch::async, [cfg, opt] { return simulate(cfg, opt); }));
  }
  std::vector<RunResult> runs;
  for (auto& j : jobs) runs.push_back(j.get());

  SweepResult out;
  out.eps = eps;
  for (const auto& r : runs) out.status.push_back(r.status);
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    const State& a = *runs[i].final_state;
    const State& b = *runs[i + 1].final_state;
    ScalarField dn = a.n - b.n, dc = a.c - b.c;
    out.diff_n.push_back(lp_norm(dn, 1.0));
    out.diff_c.push_back(lp_norm(dc, 1.0));
    out.diff_u.push_back(l2_norm(a.u - b.u));
  }
  if (output_dir) {
    nlohmann::json j;
    j["eps"] = out.eps;
    j["diff_n_l1"] = out.diff_n;
    j["diff_c_l1"] = out.diff_c;
    j["diff_u_l2"] = out.diff_u;
    j["monotone"] = out.monotone();
    std::vector<std::string> st;
    for (auto s : out.status) st.push_back(to_string(s));
    j["status"] = st;
    std::ofstream(*output_dir / "sweep.json", std::ios::binary) << j.dump(2) << '\n';
  }
  return out;
}

int cmd_simulate(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out,
                 std::ostream& log) {
  RunConfig cfg;
  RunResult r;
  try {
    cfg = load_config(config_path);
    RunOptions opt;
    opt.output_dir = out ? *out : cfg.output_dir();
    r = simulate(cfg, opt);
    log << "wrote " << opt.output_dir->string() << "\n";
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  log << "steps " << (r.records.size() - 1) << ", max mass drift " << r.max_mass_drift << ", max c "
      << r.c_max_envelope;
  if (r.fit) log << ", k_hat " << r.fit->k_hat;
  log << "\n";
  if (r.status == RunResult::Status::blow_up) {
    log << "blow-up at t = " << *r.blow_up_time << ": " << r.blow_up_message << "\n";
    return kExitBlowUp;
  }
  if (r.status == RunResult::Status::invariant_violation) {
    for (const auto& v : r.violations) log << "violation: " << v << "\n";
    return kExitInvariant;
  }
  return kExitOk;
}

int cmd_sweep_eps(const std::filesystem::path& config_path, const std::string& eps_list,
                  const std::optional<std::filesystem::path>& out, std::ostream& log) {
  SweepResult s;
  try {
    const RunConfig cfg = load_config(config_path);
    const std::vector<double> eps = parse_eps_list(eps_list);
    const std::filesystem::path dir = out ? *out : cfg.output_dir();
    std::filesystem::create_directories(dir);
    s = sweep_eps(cfg, eps, dir);
    log << "wrote " << dir.string() << "\n";
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  log << "eps pair            |n diff|_1      |c diff|_1      |u diff|_2\n";
  for (std::size_t i = 0; i < s.diff_n.size(); ++i) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-8g %-8g  %-14.6e  %-14.6e  %-14.6e\n", s.eps[i], s.eps[i + 1], s.diff_n[i],
                  s.diff_c[i], s.diff_u[i]);
    log << buf;
  }
  for (auto st : s.status)
    if (st == RunResult::Status::blow_up) {
      log << "a run blew up\n";
      return kExitBlowUp;
    }
  for (auto st : s.status)
    if (st == RunResult::Status::invariant_violation) {
      log << "a run violated an invariant\n";
      return kExitInvariant;
    }
  log << (s.monotone() ? "differences non-increasing\n" : "differences NOT non-increasing\n");
  return s.monotone() ? kExitOk : kExitFailure;
}

int cmd_verify(const std::string& suite, std::ostream& log) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    log << "unknown suite '" << suite << "'; choose one of:";
    for (const auto& n : names) log << " " << n;
    log << "\n";
    return kExitConfig;
  }
  const std::vector<CheckResult> checks = run_suite(suite);
  std::size_t width = 0;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  int failed = 0;
  for (const auto& c : checks) {
    log << (c.passed ? "PASS  " : "FAIL  ") << c.name << std::string(width - c.name.size() + 2, ' ') << c.detail
        << "\n";
    failed += c.passed ? 0 : 1;
  }
  log << suite << ": " << (checks.size() - failed) << "/" << checks.size() << " passed\n";
  return failed ? kExitFailure : kExitOk;
}

}  // namespace ctns
