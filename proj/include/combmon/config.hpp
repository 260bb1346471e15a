#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "combmon/drive.hpp"
#include "combmon/dynamics.hpp"

// Run configuration: INI-style text with sections, strict key checking,
// presets, and a mandatory seed (no wall-clock default anywhere).
namespace combmon {

enum class Experiment {
  fock_fluorescence,
  jump_track,
  rates,
  dephasing,
  confidence_time,
};

std::string experiment_name(Experiment e);
std::optional<Experiment> parse_experiment(const std::string& name);

struct RunConfig {
  SystemParams params;
  double theta = M_PI / 2;  // kick angle, rad
  int comb_k_teeth = 10;
  Experiment experiment = Experiment::rates;
  int n_trajectories = 1000;
  uint64_t seed = 0;
  bool has_seed = false;
  std::string output_dir = "out";
  std::map<std::string, double> tolerances;
  std::string preset = "paper";
  int schema = 1;

  CombSpec comb() const;  // standard geometry at theta with comb_k_teeth
};

struct ConfigResult {
  std::optional<RunConfig> config;  // set iff errors empty
  std::vector<std::string> errors;  // full list, field-named
};

// Parse + validate; unknown keys rejected, all errors collected. Defaults
// come from the named preset ("paper", "paper_t22", "fast").
ConfigResult validate_config(const std::string& text,
                             const std::string& preset = "paper");

RunConfig preset_config(const std::string& name);

// Canonical text form; validate(serialize(c)) reproduces c.
std::string serialize_config(const RunConfig& c);

// FNV-1a over the canonical serialization.
uint64_t config_hash(const RunConfig& c);

}  // namespace combmon
