// Command-line front end: analytical sweeps, Monte Carlo runs, bit-rate
// optimization and the harvest-then-transmit comparison, all emitted as CSV.
//
//   dts analyze       --axis p_dbm --grid 20:46:2 --levels 100
//   dts simulate      --axis p_dbm --grid 26,30,36 --blocks 1000000 --seed 7
//   dts optimize-rate --p-dbm 36 --levels 200 --r-min 0.5 --r-max 10
//   dts compare-htt   --axis capacity --grid 1e-6,2e-6,5e-6,1e-5,2e-5,3e-5
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "dts/experiment.hpp"
#include "dts/markov.hpp"

namespace {

using dts::cli::ConfigError;

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"--n-antennas", "n_antennas", "AP antenna count N"},
    {"--p-dbm", "p_dbm", "AP transmit power [dBm]"},
    {"--p-watts", "p_watts", "AP transmit power [W]"},
    {"--eta", "eta", "energy conversion efficiency"},
    {"--channel-variance", "channel_variance", "per-antenna channel gain (instead of distance/alpha)"},
    {"--distance", "distance", "AP-source distance [m]"},
    {"--alpha", "alpha", "path-loss exponent"},
    {"--noise-dbm", "noise_dbm", "noise power [dBm]"},
    {"--noise-watts", "noise_watts", "noise power [W]"},
    {"--rate", "rate", "bit rate R [bit/s/Hz]"},
    {"--capacity", "capacity", "battery capacity C [J]"},
    {"--levels", "levels", "battery levels L"},
    {"--blocks", "blocks", "simulated blocks"},
    {"--seed", "seed", "random seed"},
    {"--warmup", "warmup", "blocks discarded before statistics"},
    {"--battery-mode", "battery_mode", "discrete | continuous"},
    {"--protocol", "protocol", "dts | htt (simulate)"},
    {"--axis", "axis", "sweep axis: p_dbm | rate | capacity | levels | n_antennas"},
    {"--grid", "grid", "sweep values: a,b,c or start:stop:step"},
    {"--tau-grid", "tau_grid", "HTT harvesting fractions"},
    {"--r-min", "r_min", "lower bit rate for optimize-rate"},
    {"--r-max", "r_max", "upper bit rate for optimize-rate"},
    {"--resolution", "resolution", "bit rate resolution for optimize-rate"},
    {"--threads", "threads", "worker threads for sweep points"},
    {"--out", "out", "output CSV path (default stdout)"},
    {"--trace", "trace", "per-block trace CSV (simulate, single point)"},
    {"--dump-matrix", "dump", "write <prefix>_matrix.csv and <prefix>_pi.csv (analyze)"},
};

struct Inputs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::vector<std::pair<std::string, std::string>> flags;  // key, value
};

void add_common_options(CLI::App& cmd, Inputs& in) {
  cmd.add_option("--config", in.config_path, "key = value config file");
  cmd.add_option("--set", in.overrides, "generic key=value override")->take_all();
  for (const auto& spec : kFlags) {
    cmd.add_option_function<std::string>(
        spec.flag, [&in, key = spec.key](const std::string& v) { in.flags.emplace_back(key, v); },
        spec.help);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int execute(const std::string& command, const Inputs& in) {
  dts::cli::RawConfig raw;
  if (!in.config_path.empty()) raw = dts::cli::parse_config_text(read_file(in.config_path));
  for (const auto& kv : in.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("set: expected key=value, got '" + kv + "'");
    dts::cli::set_key(raw, kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto& [key, value] : in.flags) dts::cli::set_key(raw, key, value);
  raw["command"] = command;

  const dts::cli::ExperimentConfig cfg = dts::cli::resolve(raw);
  const std::string csv = dts::cli::run(cfg);
  if (cfg.out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(cfg.out, std::ios::binary);
    if (!out) throw ConfigError("out: cannot open '" + cfg.out + "'");
    out << csv;
  }
  return dts::cli::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete time-switching wireless-powered link: analysis and simulation"};
  app.require_subcommand(1);
  Inputs in;
  std::string chosen;
  for (const char* name : {"analyze", "simulate", "optimize-rate", "compare-htt"}) {
    CLI::App* cmd = app.add_subcommand(name);
    add_common_options(*cmd, in);
    cmd->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return dts::cli::kExitConfig;
  }

  try {
    return execute(chosen, in);
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return dts::cli::kExitConfig;
  } catch (const dts::NumericalError& e) {
    std::cerr << "error: numerical: " << e.what() << '\n';
    return dts::cli::kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: numerical: " << e.what() << '\n';
    return dts::cli::kExitNumerical;
  }
}
