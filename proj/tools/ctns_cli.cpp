#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "ctns/app.hpp"
#include "ctns/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Regularized chemotaxis-fluid simulator"};
  app.require_subcommand(1);

  std::string config, out, eps_list, suite;

  auto* sim = app.add_subcommand("simulate", "run one simulation from a config file");
  sim->add_option("--config", config, "config file")->required();
  sim->add_option("--out", out, "output directory (overrides the config)");

  auto* sweep = app.add_subcommand("sweep-eps", "run a decreasing sequence of eps from the same data");
  sweep->add_option("--config", config, "config file")->required();
  sweep->add_option("--eps-list", eps_list, "comma-separated eps values, non-increasing")->required();
  sweep->add_option("--out", out, "output directory (overrides the config)");

  auto* verify = app.add_subcommand("verify", "run a built-in property suite");
  verify->add_option("--suite", suite, "operators, coefficients, inequality, energy or weak")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ctns::kExitOk : ctns::kExitConfig;
  }

  const std::optional<std::filesystem::path> out_dir =
      out.empty() ? std::nullopt : std::optional<std::filesystem::path>(out);
  try {
    if (sim->parsed()) return ctns::cmd_simulate(config, out_dir, std::cout);
    if (sweep->parsed()) return ctns::cmd_sweep_eps(config, eps_list, out_dir, std::cout);
    return ctns::cmd_verify(suite, std::cout);
  } catch (const ctns::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return ctns::kExitConfig;
  } catch (const ctns::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return ctns::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ctns::kExitFailure;
  }
}
