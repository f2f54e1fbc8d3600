#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dts/analysis.hpp"
#include "dts/protocol_sim.hpp"
#include "dts/stats.hpp"

namespace dts::cli {

/// Invalid or inconsistent experiment configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

enum class Command { kAnalyze, kSimulate, kOptimizeRate, kCompareHtt };
enum class Protocol { kDts, kHtt };

std::string_view command_name(Command c);
Command parse_command(std::string_view name);

/// Flat key -> value map, as read from a config file or flags.
using RawConfig = std::map<std::string, std::string>;

/// Every key a config may carry.
const std::vector<std::string>& known_keys();

/// Parses `key = value` lines. Blank lines and lines starting with `#` or `;`
/// are skipped; a leading `[section]` header is ignored. Unknown keys throw.
RawConfig parse_config_text(std::string_view text);

/// Extracts the `# key = value` metadata block at the top of an emitted CSV.
RawConfig parse_metadata(std::string_view csv);

/// Sets `key` in `raw`, dropping keys that specify the same quantity in
/// another unit (p_dbm/p_watts, noise_dbm/noise_watts,
/// channel_variance/distance+alpha).
void set_key(RawConfig& raw, const std::string& key, const std::string& value);

/// Grid syntax: comma list `a,b,c` or inclusive range `start:stop:step`.
std::vector<double> parse_grid(std::string_view text);

struct ExperimentConfig {
  Command command = Command::kAnalyze;
  SystemParams params;
  SimConfig sim;
  Protocol protocol = Protocol::kDts;
  std::optional<SweepAxis> axis;
  std::vector<double> grid;
  std::vector<double> tau_grid;
  double r_min = 0.5;
  double r_max = 10.0;
  double resolution = 1e-3;

  // Run-time options; they do not affect results and are not echoed.
  std::string out;
  std::string trace;        // per-block trace CSV (simulate, single DTS point)
  std::string dump_prefix;  // writes <prefix>_matrix.csv and <prefix>_pi.csv
  unsigned threads = 1;
};

/// Validates and converts raw keys; unspecified keys take the reference
/// scenario defaults (N = 3, P = 30 dBm, eta = 0.5, d = 10 m, alpha = 2,
/// N0 = -90 dBm, R = 3, C = 2e-5 J, L = 300). Throws ConfigError.
ExperimentConfig resolve(const RawConfig& raw);

/// Canonical `# key = value` lines echoing every result-relevant setting.
std::string metadata_block(const ExperimentConfig& cfg);

/// Runs the configured command and returns the full CSV text (metadata
/// block, header, rows). Throws ConfigError or NumericalError.
std::string run(const ExperimentConfig& cfg);

}  // namespace dts::cli
