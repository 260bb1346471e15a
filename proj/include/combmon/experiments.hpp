#pragma once

#include <string>
#include <vector>

#include "combmon/config.hpp"
#include "combmon/estimation.hpp"
#include "combmon/theory.hpp"

// Experiment orchestration: deterministic ensemble pipelines, CSV/JSON
// outputs, and run manifests (atomic completion markers).
namespace combmon {

inline constexpr const char* kCodeVersion = "combmon 1.0";

struct StageTiming {
  std::string name;
  double seconds = 0.0;
};

struct OutputFile {
  std::string path;  // relative to the output dir
  uint64_t checksum = 0;
};

struct RunManifest {
  uint64_t config_hash = 0;
  std::string code_version = kCodeVersion;
  std::string integrator;
  std::string experiment;
  std::vector<StageTiming> timings;
  std::vector<OutputFile> outputs;
};

uint64_t fnv1a_file(const std::string& path);

void write_manifest(const RunManifest& manifest, const std::string& path);
RunManifest load_manifest(const std::string& path);

// Low-IF voltage windows grouped by photon number: [n][record][sample].
// Stream indices are a pure function of (n, record), so the result is
// independent of worker count.
std::vector<std::vector<std::vector<double>>> simulate_record_ensembles(
    const SystemParams& params, const CombSpec& spec, int n_windows_per_n,
    int n_periods, uint64_t seed);

// Bank estimated from simulated windows (split-half Gram, sample
// covariances).
TemplateBank empirical_bank(const SystemParams& params, const CombSpec& spec,
                            int n_windows_per_n, int n_periods, uint64_t seed);

struct RatesPoint {
  double theta = 0.0;
  RateEstimate empirical;
  double het_eta = 0.0, het_eta_se = 0.0;  // heterodyne bound at params.eta
  double het_unit = 0.0, het_unit_se = 0.0;  // heterodyne bound at eta = 1
  double i_acc = 0.0;
  double gamma_d_bound = 0.0;
};

// Full synthetic measurement-rate pipeline at one kick angle, with the
// theory curves evaluated alongside. zero_bank is the shared zero-amplitude
// calibration bank built from the same number of windows.
RatesPoint rates_point(const SystemParams& params, double theta,
                       int n_windows_per_n, const TemplateBank& zero_bank,
                       int zero_windows_per_n, uint64_t seed, int mc_samples);

// Joint-system tomography series (comb drive, qubit decay, cavity loss and
// dephasing) sampled at multiples of pi/chi, then rate extraction.
DephasingFit simulated_dephasing(const SystemParams& params, double theta,
                                 Complex alpha0, int n_snapshots, double dt);

// run() for each experiment enum; returns the manifest it wrote.
RunManifest run_experiment(const RunConfig& config);

// Aggregated report over completed manifests. Returns a process exit code
// (0 iff every manifest loads and all checksums match).
int report_runs(const std::vector<std::string>& manifest_paths,
                std::ostream& os);

}  // namespace combmon
