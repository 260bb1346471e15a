#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "combmon/dynamics.hpp"
#include "combmon/rng.hpp"

// Stochastic master equation unraveling and synthetic heterodyne
// voltage-record generation.
//
// Fixed-photon-number records integrate the qubit SME in the low-IF frame
// (qubit at omega_IF + n chi) where the single real ADC voltage carries both
// fluorescence quadratures. The step splits the propagator into an exact
// drive unitary, the exact no-jump decay and the measurement Kraus factor
// (positivity preserving); step unitaries are cached over the shortest
// duration on which every comb tooth completes an integer number of IF
// cycles.
namespace combmon {

struct VoltageRecord {
  std::vector<double> samples;  // volts (gain units)
  double dt = 0.0;              // us
  double gain = 1.0;            // G
  int n_true = -1;              // -1 when the photon number jumps in-record
  uint64_t seed = 0;
  std::string frame = "low-if";
};

struct JumpEvent {
  double time = 0.0;  // us
  int from = 0, to = 0;
};

struct TrajectoryResult {
  VoltageRecord record;
  std::vector<double> sigma_x;     // Tr(sigma_x rho) per sample (optional)
  std::vector<Complex> innovation; // dW per SME step (optional)
  std::vector<int> n_path;         // photon number per sample (jump runs)
  std::vector<JumpEvent> jumps;    // ground-truth staircase (jump runs)
};

// SME time resolution, tied to the comb period: dt = (pi/chi)/steps_per_period.
struct SimGrid {
  int steps_per_period = 210;    // resolves the 5 ns kick with 10+ substeps
  int substeps_per_sample = 2;   // record sampling ~1 ns

  int samples_per_period() const { return steps_per_period / substeps_per_sample; }
  double step_dt(const SystemParams& p) const {
    return p.comb_period() / steps_per_period;
  }
  double sample_dt(const SystemParams& p) const {
    return step_dt(p) * substeps_per_sample;
  }
};

enum class Unraveling { homodyne, heterodyne };

// One generic SME step (Rouchon-style Kraus form, any dimension).
// l_meas is the monitored collapse operator; dy = sqrt(eta) Tr(l rho) dt + dW
// (heterodyne, complex dW with dW dW* = dt) or
// dy = sqrt(eta) Tr((l + l+) rho) dt + dW (homodyne, real dW).
struct SmeStep {
  Operator rho;
  Complex dy;
};
SmeStep sme_step_heterodyne(const Operator& rho, const Operator& h,
                            const Operator& l_meas, double eta, Complex dw,
                            double dt);
SmeStep sme_step_homodyne(const Operator& rho, const Operator& h,
                          const Operator& l_meas, double eta, double dw,
                          double dt);

// Optimized fixed-photon-number qubit simulator.
class FixedNSimulator {
 public:
  FixedNSimulator(const SystemParams& params, const CombSpec& spec, int n,
                  SimGrid grid = {}, Unraveling unraveling = Unraveling::homodyne);

  // One stochastic record of n_periods comb periods. The stream index
  // seeds an independent counter-based RNG stream.
  TrajectoryResult run(uint64_t seed, uint64_t stream, int n_periods,
                       bool want_sigma_x = false) const;

  // Deterministic paths (eta = 0 dynamics): mean record
  // sqrt(eta G / T_q) Tr(sigma_x rho(t)) and mean sigma_x itself.
  std::vector<double> mean_record(int n_periods) const;
  std::vector<double> mean_sigma_x_per_sample(int n_periods) const;

  const SystemParams& params() const { return params_; }
  const SimGrid& grid() const { return grid_; }
  int cache_periods() const { return cache_periods_; }

 private:
  friend class JumpSimulator;
  struct Step {  // precomputed per-SME-step propagator pieces
    Complex u00, u01, u10, u11;  // drive+phase unitary times no-jump decay
  };

  void build_tables();
  // advances rho (2x2, row-major) by one step; returns dy increment
  template <bool kHet>
  Complex advance(Complex rho[4], const Step& s, Complex dw,
                  double sqrt_eta) const;

  SystemParams params_;
  CombSpec spec_;
  int n_;
  SimGrid grid_;
  Unraveling unraveling_;
  int cache_periods_ = 0;      // table covers this many comb periods
  std::vector<Step> steps_;    // cache_periods * steps_per_period entries
  double decay_e_ = 0.0;       // exp(-dt / 2 T_q)
};

// Pure-loss staircase plus conditioned qubit record: cavity decay is
// unraveled as Monte Carlo jumps (rate n/T_c), the qubit follows the
// fixed-n SME between jumps.
class JumpSimulator {
 public:
  JumpSimulator(const SystemParams& params, const CombSpec& spec,
                SimGrid grid = {});

  // initial_dist over photon number 0..n_max (normalized by caller or here)
  TrajectoryResult run(const std::vector<double>& initial_dist, uint64_t seed,
                       uint64_t stream, int n_periods) const;

 private:
  SystemParams params_;
  SimGrid grid_;
  std::vector<FixedNSimulator> per_n_;
};

// Mean record over a stochastic ensemble (deterministic block-ordered
// reduction; result independent of worker count) or the analytic
// Lindblad-path template when n_traj == 0.
std::vector<double> ensemble_mean_record(const SystemParams& params,
                                         const CombSpec& spec, int n,
                                         int n_periods, int n_traj,
                                         uint64_t seed, bool serial = false);

// Convenience wrappers matching the run-level interface.
TrajectoryResult simulate_record(const SystemParams& params,
                                 const CombSpec& spec, int n_true,
                                 double duration, uint64_t seed);
TrajectoryResult simulate_jump_record(const SystemParams& params,
                                      const CombSpec& spec,
                                      const std::vector<double>& initial_dist,
                                      double duration, uint64_t seed);

// Truncated Poisson distribution over 0..n_max.
std::vector<double> truncated_poisson(double nbar, int n_max);

}  // namespace combmon
