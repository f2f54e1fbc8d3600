#include "dts/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "dts/markov.hpp"

namespace dts::cli {

namespace {

// Shortest representation that parses back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    s += fmt(values[i]);
  }
  return s;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v))
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  errno = 0;
  char* end = nullptr;
  if (text.empty() || text[0] == '-')
    throw ConfigError(key + ": expected a nonnegative integer, got '" + text + "'");
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (end != text.c_str() + text.size() || errno == ERANGE)
    throw ConfigError(key + ": expected a nonnegative integer, got '" + text + "'");
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  const std::uint64_t v = to_uint(key, text);
  if (v > 1'000'000) throw ConfigError(key + ": value too large");
  return static_cast<int>(v);
}

// Evaluates f(k) for k in [0, n) on up to `threads` workers; results are
// stored by index so the output order never depends on scheduling.
template <typename T>
std::vector<T> parallel_map(std::size_t n, unsigned threads,
                            const std::function<T(std::size_t)>& f) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        out[k] = f(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned count =
      std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::max<std::size_t>(n, 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

const std::vector<std::vector<std::string>>& exclusive_groups() {
  static const std::vector<std::vector<std::string>> groups = {
      {"p_dbm", "p_watts"},
      {"noise_dbm", "noise_watts"},
      {"channel_variance", "distance", "alpha"},
  };
  return groups;
}

void require_sweep(const ExperimentConfig& cfg) {
  if (!cfg.axis) throw ConfigError("axis: required for " + std::string(command_name(cfg.command)));
  if (cfg.grid.empty()) throw ConfigError("grid: empty sweep grid");
}

std::vector<double> default_tau_grid() {
  std::vector<double> taus;
  for (int k = 1; k <= 99; ++k) taus.push_back(k / 100.0);
  return taus;
}

}  // namespace

std::string_view command_name(Command c) {
  switch (c) {
    case Command::kAnalyze: return "analyze";
    case Command::kSimulate: return "simulate";
    case Command::kOptimizeRate: return "optimize-rate";
    case Command::kCompareHtt: return "compare-htt";
  }
  return "?";
}

Command parse_command(std::string_view name) {
  for (auto c : {Command::kAnalyze, Command::kSimulate, Command::kOptimizeRate,
                 Command::kCompareHtt}) {
    if (command_name(c) == name) return c;
  }
  throw ConfigError("command: unknown command '" + std::string(name) + "'");
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "command",  "n_antennas", "p_dbm",     "p_watts",  "eta",        "channel_variance",
      "distance", "alpha",      "noise_dbm", "noise_watts", "rate",    "capacity",
      "levels",   "blocks",     "seed",      "warmup",   "battery_mode", "protocol",
      "axis",     "grid",       "tau_grid",  "r_min",    "r_max",      "resolution",
      "threads",  "out",        "trace",     "dump",
  };
  return keys;
}

void set_key(RawConfig& raw, const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end())
    throw ConfigError(key + ": unknown key");
  for (const auto& group : exclusive_groups()) {
    if (std::find(group.begin(), group.end(), key) == group.end()) continue;
    // distance and alpha travel together; either one displaces channel_variance.
    for (const auto& other : group) {
      const bool partner = (key == "distance" && other == "alpha") ||
                           (key == "alpha" && other == "distance");
      if (other != key && !partner) raw.erase(other);
    }
  }
  raw[key] = value;
}

RawConfig parse_config_text(std::string_view text) {
  RawConfig raw;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[' && line.back() == ']') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (raw.count(key))
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError(key + ": unknown key");
    raw[key] = value;
  }
  return raw;
}

RawConfig parse_metadata(std::string_view csv) {
  std::string block;
  while (!csv.empty()) {
    const auto nl = csv.find('\n');
    const std::string_view line = csv.substr(0, nl);
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    if (line.rfind("# ", 0) != 0) break;
    block += line.substr(2);
    block += '\n';
  }
  return parse_config_text(block);
}

std::vector<double> parse_grid(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ConfigError("grid: empty sweep grid");
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    std::vector<double> parts;
    std::string_view rest = text;
    while (true) {
      const auto c = rest.find(':');
      parts.push_back(to_double("grid", std::string(trim(rest.substr(0, c)))));
      if (c == std::string_view::npos) break;
      rest = rest.substr(c + 1);
    }
    if (parts.size() != 3) throw ConfigError("grid: range must be start:stop:step");
    const double start = parts[0], stop = parts[1], step = parts[2];
    if (!(step > 0.0) || stop < start) throw ConfigError("grid: need step > 0 and stop >= start");
    const double count = std::floor((stop - start) / step + 1e-9);
    if (count > 1e6) throw ConfigError("grid: too many points");
    for (long k = 0; k <= static_cast<long>(count); ++k) out.push_back(start + k * step);
    return out;
  }
  std::string_view rest = text;
  while (true) {
    const auto c = rest.find(',');
    const std::string item(trim(rest.substr(0, c)));
    if (!item.empty()) out.push_back(to_double("grid", item));
    if (c == std::string_view::npos) break;
    rest = rest.substr(c + 1);
  }
  if (out.empty()) throw ConfigError("grid: empty sweep grid");
  return out;
}

ExperimentConfig resolve(const RawConfig& raw) {
  for (const auto& [key, value] : raw) {
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError(key + ": unknown key");
  }
  if (raw.count("p_dbm") && raw.count("p_watts"))
    throw ConfigError("p_dbm: give exactly one of p_dbm / p_watts");
  if (raw.count("noise_dbm") && raw.count("noise_watts"))
    throw ConfigError("noise_dbm: give exactly one of noise_dbm / noise_watts");
  if (raw.count("channel_variance") && (raw.count("distance") || raw.count("alpha")))
    throw ConfigError("channel_variance: give either channel_variance or distance/alpha");

  auto get = [&](const std::string& key) -> const std::string* {
    const auto it = raw.find(key);
    return it == raw.end() ? nullptr : &it->second;
  };

  ExperimentConfig cfg;
  SystemParams& p = cfg.params;
  p.antennas = 3;
  p.ap_power = dbm_to_watts(30.0);
  p.efficiency = 0.5;
  p.channel_variance = pathloss_variance(10.0, 2.0);
  p.noise_power = dbm_to_watts(-90.0);
  p.bit_rate = 3.0;
  p.capacity = 2e-5;
  p.levels = 300;
  cfg.tau_grid = default_tau_grid();

  try {
    if (auto v = get("command")) cfg.command = parse_command(*v);
    if (auto v = get("n_antennas")) p.antennas = to_int("n_antennas", *v);
    if (auto v = get("p_dbm")) p.ap_power = dbm_to_watts(to_double("p_dbm", *v));
    if (auto v = get("p_watts")) p.ap_power = to_double("p_watts", *v);
    if (auto v = get("eta")) p.efficiency = to_double("eta", *v);
    if (auto v = get("channel_variance")) p.channel_variance = to_double("channel_variance", *v);
    if (get("distance") || get("alpha")) {
      const double d = get("distance") ? to_double("distance", *get("distance")) : 10.0;
      const double a = get("alpha") ? to_double("alpha", *get("alpha")) : 2.0;
      p.channel_variance = pathloss_variance(d, a);
    }
    if (auto v = get("noise_dbm")) p.noise_power = dbm_to_watts(to_double("noise_dbm", *v));
    if (auto v = get("noise_watts")) p.noise_power = to_double("noise_watts", *v);
    if (auto v = get("rate")) p.bit_rate = to_double("rate", *v);
    if (auto v = get("capacity")) p.capacity = to_double("capacity", *v);
    if (auto v = get("levels")) p.levels = to_int("levels", *v);

    if (auto v = get("blocks")) cfg.sim.block_count = to_uint("blocks", *v);
    if (auto v = get("seed")) cfg.sim.seed = to_uint("seed", *v);
    if (auto v = get("warmup")) cfg.sim.warmup_blocks = to_uint("warmup", *v);
    if (auto v = get("battery_mode")) {
      if (*v == "discrete") cfg.sim.battery_mode = BatteryMode::kDiscrete;
      else if (*v == "continuous") cfg.sim.battery_mode = BatteryMode::kContinuous;
      else throw ConfigError("battery_mode: expected discrete or continuous");
    }
    if (auto v = get("protocol")) {
      if (*v == "dts") cfg.protocol = Protocol::kDts;
      else if (*v == "htt") cfg.protocol = Protocol::kHtt;
      else throw ConfigError("protocol: expected dts or htt");
    }
    if (auto v = get("axis")) cfg.axis = parse_axis(*v);
    if (auto v = get("grid")) cfg.grid = parse_grid(*v);
    if (auto v = get("tau_grid")) cfg.tau_grid = parse_grid(*v);
    if (auto v = get("r_min")) cfg.r_min = to_double("r_min", *v);
    if (auto v = get("r_max")) cfg.r_max = to_double("r_max", *v);
    if (auto v = get("resolution")) cfg.resolution = to_double("resolution", *v);
    if (auto v = get("threads")) cfg.threads = std::max(1, to_int("threads", *v));
    if (auto v = get("out")) cfg.out = *v;
    if (auto v = get("trace")) cfg.trace = *v;
    if (auto v = get("dump")) cfg.dump_prefix = *v;

    p.validate();
    cfg.sim.validate();
    if (p.levels + 1 > kMaxStates)
      throw ConfigError("levels: at most " + std::to_string(kMaxStates - 1) + " levels");
    for (double tau : cfg.tau_grid) {
      if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau_grid: values must lie in (0, 1)");
    }
    if (!(cfg.r_min > 0.0) || cfg.r_max < cfg.r_min)
      throw ConfigError("r_min/r_max: need 0 < r_min <= r_max");
    if (!(cfg.resolution > 0.0)) throw ConfigError("resolution: must be > 0");
    if (cfg.axis) {
      if (cfg.grid.empty()) throw ConfigError("grid: empty sweep grid");
      for (double v : cfg.grid) {
        SystemParams q = apply_axis(p, *cfg.axis, v);
        q.validate();
        if (q.levels + 1 > kMaxStates)
          throw ConfigError("grid: at most " + std::to_string(kMaxStates - 1) + " levels");
      }
    } else if (get("grid")) {
      throw ConfigError("grid: set without an axis");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

std::string metadata_block(const ExperimentConfig& cfg) {
  const SystemParams& p = cfg.params;
  std::ostringstream os;
  auto line = [&](const char* key, const std::string& value) {
    os << "# " << key << " = " << value << '\n';
  };
  line("command", std::string(command_name(cfg.command)));
  line("n_antennas", std::to_string(p.antennas));
  line("p_watts", fmt(p.ap_power));
  line("eta", fmt(p.efficiency));
  line("channel_variance", fmt(p.channel_variance));
  line("noise_watts", fmt(p.noise_power));
  line("rate", fmt(p.bit_rate));
  line("capacity", fmt(p.capacity));
  line("levels", std::to_string(p.levels));
  line("blocks", std::to_string(cfg.sim.block_count));
  line("seed", std::to_string(cfg.sim.seed));
  line("warmup", std::to_string(cfg.sim.effective_warmup()));
  line("battery_mode", cfg.sim.battery_mode == BatteryMode::kDiscrete ? "discrete" : "continuous");
  line("protocol", cfg.protocol == Protocol::kDts ? "dts" : "htt");
  if (cfg.axis) {
    line("axis", std::string(axis_name(*cfg.axis)));
    line("grid", join(cfg.grid));
  }
  if (cfg.command == Command::kCompareHtt ||
      (cfg.command == Command::kSimulate && cfg.protocol == Protocol::kHtt))
    line("tau_grid", join(cfg.tau_grid));
  if (cfg.command == Command::kOptimizeRate) {
    line("r_min", fmt(cfg.r_min));
    line("r_max", fmt(cfg.r_max));
    line("resolution", fmt(cfg.resolution));
  }
  return os.str();
}

namespace {

std::string run_analyze(const ExperimentConfig& cfg) {
  require_sweep(cfg);
  if (!cfg.dump_prefix.empty()) {
    const SystemParams first = apply_axis(cfg.params, *cfg.axis, cfg.grid.front());
    const TransitionMatrix z = build_transition_matrix(first);
    std::ofstream mz(cfg.dump_prefix + "_matrix.csv");
    write_matrix_csv(mz, z);
    std::ofstream mp(cfg.dump_prefix + "_pi.csv");
    write_distribution_csv(mp, stationary_distribution(z).pi);
  }
  const auto rows = sweep({*cfg.axis, cfg.grid, cfg.params}, cfg.threads);
  std::string csv = metadata_block(cfg) + "axis,phi_analytical\n";
  std::string failures;
  for (const auto& row : rows) {
    csv += fmt(row.value) + ',' + (row.throughput ? fmt(*row.throughput) : "nan") + '\n';
    if (!row.throughput) failures += "# failed " + fmt(row.value) + ": " + row.error + '\n';
  }
  if (std::none_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.throughput; }))
    throw NumericalError("every sweep point failed: " + rows.front().error);
  return csv + failures;
}

std::string run_simulate(const ExperimentConfig& cfg) {
  require_sweep(cfg);
  if (!cfg.trace.empty() && (cfg.grid.size() != 1 || cfg.protocol != Protocol::kDts))
    throw ConfigError("trace: needs a single grid point and protocol = dts");

  const auto stats = parallel_map<SimStats>(cfg.grid.size(), cfg.threads, [&](std::size_t k) {
    const SystemParams p = apply_axis(cfg.params, *cfg.axis, cfg.grid[k]);
    if (cfg.protocol == Protocol::kHtt) return simulate_htt(p, cfg.sim, cfg.tau_grid).stats;
    if (!cfg.trace.empty()) {
      std::ofstream trace_file(cfg.trace);
      if (!trace_file) throw ConfigError("trace: cannot open '" + cfg.trace + "'");
      return simulate_dts(p, cfg.sim, csv_trace_sink(trace_file));
    }
    return simulate_dts(p, cfg.sim);
  });

  std::string csv = metadata_block(cfg) + "axis,phi_sim,ci_halfwidth,overflow_prob,it_fraction\n";
  for (std::size_t k = 0; k < stats.size(); ++k) {
    const SimStats& s = stats[k];
    csv += fmt(cfg.grid[k]) + ',' + fmt(s.avg_throughput) + ',' + fmt(s.ci_halfwidth) + ',' +
           fmt(s.overflow_probability) + ',' + fmt(s.it_fraction) + '\n';
  }
  return csv;
}

std::string run_optimize_rate(const ExperimentConfig& cfg) {
  const RateOptimum best = optimal_rate(cfg.params, cfg.r_min, cfg.r_max, cfg.resolution);
  return metadata_block(cfg) + "r_star,phi_star,boundary_optimum\n" + fmt(best.rate) + ',' +
         fmt(best.throughput) + ',' + (best.boundary_optimum ? "1" : "0") + '\n';
}

struct ComparisonRow {
  double phi_dts = 0.0;
  SimStats dts;
  HttResult htt;
};

std::string run_compare_htt(const ExperimentConfig& cfg) {
  require_sweep(cfg);
  const auto rows = parallel_map<ComparisonRow>(cfg.grid.size(), cfg.threads, [&](std::size_t k) {
    const SystemParams p = apply_axis(cfg.params, *cfg.axis, cfg.grid[k]);
    ComparisonRow row;
    row.phi_dts = dts_throughput(p).throughput;
    row.dts = simulate_dts(p, cfg.sim);
    row.htt = simulate_htt(p, cfg.sim, cfg.tau_grid);
    return row;
  });

  std::string csv = metadata_block(cfg) +
                    "axis,phi_dts_analytical,phi_dts_sim,ci_dts,overflow_dts,"
                    "phi_htt_sim,ci_htt,overflow_htt,tau_htt\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    csv += fmt(cfg.grid[k]) + ',' + fmt(r.phi_dts) + ',' + fmt(r.dts.avg_throughput) + ',' +
           fmt(r.dts.ci_halfwidth) + ',' + fmt(r.dts.overflow_probability) + ',' +
           fmt(r.htt.stats.avg_throughput) + ',' + fmt(r.htt.stats.ci_halfwidth) + ',' +
           fmt(r.htt.stats.overflow_probability) + ',' + fmt(r.htt.tau) + '\n';
  }
  return csv;
}

}  // namespace

std::string run(const ExperimentConfig& cfg) {
  switch (cfg.command) {
    case Command::kAnalyze: return run_analyze(cfg);
    case Command::kSimulate: return run_simulate(cfg);
    case Command::kOptimizeRate: return run_optimize_rate(cfg);
    case Command::kCompareHtt: return run_compare_htt(cfg);
  }
  throw ConfigError("command: unsupported");
}

}  // namespace dts::cli
