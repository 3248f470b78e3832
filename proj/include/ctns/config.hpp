#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ctns/coefficients.hpp"
#include "ctns/regularized_system.hpp"

namespace ctns {

/// Everything one run needs, read from a key = value file.
///
/// Blank lines and text after '#' are ignored. Keys:
///   dim, n_grid, box_length,
///   eps, dt, t_end, dealias, cfl_guard, snapshot_every,
///   coeff (prototype{chi0} | powerlaw{f_exp, chi0} | tabulated{path}), s0,
///   potential (zero | cosine{amplitude, axis, mode}),
///   init (bump | layered | random_band), init_mass, init_n_amplitude,
///   init_n_width, init_c_amplitude, init_c_background, init_c_width,
///   init_u_norm, init_band, seed,
///   kappa, floor, output.
/// Relative paths (tabulated tables, output) resolve against the directory
/// of the configuration file.
struct RunConfig {
  int dim = 2;
  int n_grid = 64;
  double box_length = 1.0;
  SimParams sim;
  std::string coeff = "prototype{1}";
  double s0 = 1.0;
  std::string potential = "zero";
  InitPreset init;
  double kappa = 1.0;
  double floor = 1e-12;
  std::filesystem::path output = "out";
  std::filesystem::path base_dir = ".";

  /// Throws ConfigError.
  void validate() const;

  Grid grid() const;
  Potential make_potential() const;
  CoefficientSet coefficients() const;
  std::filesystem::path output_dir() const;

  /// Canonical key = value text; parsing it gives back the same config.
  std::string to_text() const;
};

/// Throws ConfigError on syntax errors, unknown or repeated keys and values
/// that fail validation.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = ".");
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

/// "zero" or "cosine{amplitude, axis, mode}".
Potential parse_potential(const std::string& text);

}  // namespace ctns
