#pragma once

namespace dts {

/// Uniformly quantized battery: level i stores i * capacity / levels joules.
struct BatteryConfig {
  double capacity = 2e-5;
  int levels = 300;

  double unit() const { return capacity / levels; }
  void validate() const;
};

/// Index of a battery level, or the distinguished Infeasible value used when
/// a transmit requirement exceeds anything the battery can hold.
class EnergyLevel {
 public:
  constexpr explicit EnergyLevel(int index) : index_(index) {}
  static constexpr EnergyLevel infeasible() { return EnergyLevel(kInfeasible); }

  constexpr bool feasible() const { return index_ != kInfeasible; }
  /// Requires feasible().
  constexpr int index() const { return index_; }

  friend constexpr bool operator==(EnergyLevel, EnergyLevel) = default;

 private:
  static constexpr int kInfeasible = -1;
  int index_;
};

/// Energy stored at level i. Throws std::out_of_range for an index outside
/// [0, levels] or for Infeasible.
double level_energy(EnergyLevel level, const BatteryConfig& cfg);

/// Largest level strictly below `harvested`, capped at the top level.
/// An exact hit on level i maps to i - 1; zero maps to level 0.
EnergyLevel quantize_harvest(double harvested, const BatteryConfig& cfg);

/// Smallest level strictly above `required`; Infeasible when
/// required >= capacity. An exact hit on level i maps to i + 1.
EnergyLevel quantize_requirement(double required, const BatteryConfig& cfg);

}  // namespace dts
