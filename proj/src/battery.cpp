#include "dts/battery.hpp"

#include <cmath>
#include <stdexcept>

namespace dts {

namespace {

// Same expression as level_energy, without the range check. The top level is
// pinned to the capacity so that i * C / L rounding cannot move it.
double energy_at(int i, const BatteryConfig& cfg) {
  return i == cfg.levels ? cfg.capacity : i * cfg.capacity / cfg.levels;
}

}  // namespace

void BatteryConfig::validate() const {
  if (!(capacity > 0.0) || !std::isfinite(capacity))
    throw std::invalid_argument("battery capacity must be positive");
  if (levels < 1) throw std::invalid_argument("battery levels must be >= 1");
}

double level_energy(EnergyLevel level, const BatteryConfig& cfg) {
  if (!level.feasible() || level.index() < 0 || level.index() > cfg.levels)
    throw std::out_of_range("level_energy: index outside [0, levels]");
  return energy_at(level.index(), cfg);
}

EnergyLevel quantize_harvest(double harvested, const BatteryConfig& cfg) {
  if (std::isnan(harvested) || harvested < 0.0)
    throw std::invalid_argument("quantize_harvest: negative energy");
  if (harvested > cfg.capacity) return EnergyLevel(cfg.levels);

  // Estimate from the ratio, then settle the boundary against the exact
  // level energies so that ties follow the strict-inequality rule.
  int j = static_cast<int>(std::ceil(harvested / cfg.unit())) - 1;
  if (j < 0) j = 0;
  if (j > cfg.levels) j = cfg.levels;
  while (j > 0 && energy_at(j, cfg) >= harvested) --j;
  while (j < cfg.levels && energy_at(j + 1, cfg) < harvested) ++j;
  return EnergyLevel(j);
}

EnergyLevel quantize_requirement(double required, const BatteryConfig& cfg) {
  if (std::isnan(required) || required <= 0.0)
    throw std::invalid_argument("quantize_requirement: energy must be positive");
  if (required >= cfg.capacity) return EnergyLevel::infeasible();

  int j = static_cast<int>(std::floor(required / cfg.unit())) + 1;
  if (j < 1) j = 1;
  if (j > cfg.levels) j = cfg.levels;
  while (j > 1 && energy_at(j - 1, cfg) > required) --j;
  while (j <= cfg.levels && energy_at(j, cfg) <= required) ++j;
  if (j > cfg.levels) return EnergyLevel::infeasible();
  return EnergyLevel(j);
}

}  // namespace dts
