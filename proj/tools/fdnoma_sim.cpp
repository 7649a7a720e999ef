#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fdnoma/config.hpp"
#include "fdnoma/sim.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  std::optional<int> subframes;
  std::uint64_t seed = 1;
  std::string out = "out";
  bool full_scale = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "scenario file (key = value lines)");
  cmd->add_option("--set", args.overrides, "override a config key, e.g. --set lambda_ul=50");
  cmd->add_option("--subframes", args.subframes, "number of subframes")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", args.seed, "master seed (sweeps use seed, seed+1, ...)");
  cmd->add_option("--out", args.out, "output directory");
  cmd->add_flag("--full-scale", args.full_scale,
                "10 SBSs, 10 users per SBS, 4000 subframes (sweeps default to 30 replications)");
}

fdnoma::ScenarioConfig build_config(const CommonArgs& args) {
  fdnoma::ScenarioConfig config =
      args.config_path.empty() ? fdnoma::ScenarioConfig{} : fdnoma::load_config(args.config_path);
  if (args.full_scale) fdnoma::apply_full_scale(config);
  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got " + kv);
    fdnoma::set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (args.subframes) config.num_subframes = *args.subframes;
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FD/NOMA small-cell scheduling simulator"};
  app.require_subcommand(1);

  CommonArgs run_args;
  std::string run_scheme = "proposed";
  auto* run = app.add_subcommand("run", "simulate one topology and write report files");
  add_common(run, run_args);
  run->add_option("--scheme", run_scheme, "proposed|hd-oma|hd-noma|fd-oma|uncoordinated");

  CommonArgs sweep_args;
  std::string axis;
  std::vector<double> values;
  std::vector<std::string> schemes = {"proposed", "uncoordinated", "hd-oma", "hd-noma", "fd-oma"};
  std::optional<int> replications;
  int threads = 1;
  auto* sweep = app.add_subcommand("sweep", "sweep one scenario axis over several replications");
  add_common(sweep, sweep_args);
  sweep->add_option("--axis", axis, "traffic (kb) | density (SBSs) | si (dB)")->required();
  sweep->add_option("--values", values, "axis values")->required();
  sweep->add_option("--scheme,--schemes", schemes, "schemes to compare");
  sweep->add_option("--replications", replications, "replications per point")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto config = build_config(run_args);
      const auto scheme = fdnoma::parse_scheme(run_scheme);
      const auto report = fdnoma::run_replication(config, run_args.seed, scheme);
      fdnoma::write_outputs(report, config, run_args.out);
      std::cout << "scheme " << report.scheme << ", " << report.num_users << " users, "
                << report.num_sbs << " SBSs, mean packet throughput "
                << fdnoma::format_double(report.mean_packet_throughput) << " bit/s -> "
                << run_args.out << '\n';
    } else {
      const auto config = build_config(sweep_args);
      std::vector<fdnoma::Scheme> parsed;
      for (const auto& s : schemes) parsed.push_back(fdnoma::parse_scheme(s));
      const auto result = fdnoma::run_sweep(config, fdnoma::parse_axis(axis), values, parsed,
                                            replications.value_or(sweep_args.full_scale ? 30 : 5),
                                            sweep_args.seed, threads);
      fdnoma::write_sweep(result, sweep_args.out);
      std::cout << result.cells.size() << " sweep points -> " << sweep_args.out << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "fdnoma-sim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
