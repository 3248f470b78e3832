#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ctns/config.hpp"
#include "ctns/diagnostics.hpp"

namespace ctns {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // verify: a property failed; sweep: differences not monotone
  kExitConfig = 2,
  kExitBlowUp = 3,
  kExitInvariant = 4,
};

struct RunOptions {
  /// Write diagnostics.csv, snapshots and summary.json into this directory.
  std::optional<std::filesystem::path> output_dir;
  /// Called with the initial state and after every step.
  std::function<void(const State&, const DiagnosticsRecord&)> on_record;
};

struct RunResult {
  enum class Status { ok, invariant_violation, blow_up };
  Status status = Status::ok;
  std::optional<State> final_state;
  /// Initial state first, then one record per step.
  std::vector<DiagnosticsRecord> records;
  std::optional<EnergyFit> fit;
  std::vector<std::string> violations;
  double mass0 = 0.0;
  double max_mass_drift = 0.0;  // relative
  double c_max0 = 0.0;
  double c_max_envelope = 0.0;
  double c_min_envelope = 0.0;
  double max_divergence = 0.0;
  double max_fluid_residual = 0.0;
  std::optional<double> blow_up_time;
  std::string blow_up_message;
};

/// Runs one configuration with the diagnostics observer and checks the
/// per-step invariants. Throws ConfigError for configurations that cannot
/// be set up; numerical failures are reported in the result.
RunResult simulate(const RunConfig& config, const RunOptions& options = {});

nlohmann::json summary_json(const RunConfig& config, const RunResult& result);

struct SweepResult {
  std::vector<double> eps;
  std::vector<double> diff_n;  // L1 of n_j - n_{j+1} at t_end
  std::vector<double> diff_c;  // L1
  std::vector<double> diff_u;  // L2
  std::vector<RunResult::Status> status;
  bool monotone() const;
};

/// Comma-separated list of at least three non-increasing values in (0, 1).
/// Throws ConfigError.
std::vector<double> parse_eps_list(const std::string& text);

/// Runs every eps from the same initial data, concurrently.
SweepResult sweep_eps(const RunConfig& base, const std::vector<double>& eps,
                      const std::optional<std::filesystem::path>& output_dir = std::nullopt);

int cmd_simulate(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out,
                 std::ostream& log);
int cmd_sweep_eps(const std::filesystem::path& config_path, const std::string& eps_list,
                  const std::optional<std::filesystem::path>& out, std::ostream& log);
int cmd_verify(const std::string& suite, std::ostream& log);

}  // namespace ctns
