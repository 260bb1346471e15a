#pragma once

#include <complex>

#include "combmon/hilbert.hpp"

// Frequency-comb waveform synthesis and kick parametrization. The comb has
// 2K+1 teeth of equal amplitude Omega spaced by delta_omega, centered
// center_offset away from the qubit frequency. All teeth share zero phase at
// t = 0 (cosine comb), so the time-domain envelope is the Dirichlet kernel.
namespace combmon {

struct CombSpec {
  double omega = 0.0;          // per-tooth Rabi amplitude, rad/us
  double delta_omega = 0.0;    // tooth spacing, rad/us
  int k_teeth = 10;            // 2K+1 teeth
  double center_offset = 0.0;  // comb center relative to the qubit, rad/us
  double duration = 0.0;       // us, positive multiple of the comb period
  double sample_dt = 1e-3;     // us

  double period() const { return 2.0 * M_PI / delta_omega; }
  void validate() const;  // throws std::invalid_argument on bad fields
};

// Dirichlet kernel D_K(t) = sin((2K+1) dw t / 2) / sin(dw t / 2), the
// time-domain envelope of 2K+1 unit teeth.
double dirichlet_kernel(int k_teeth, double delta_omega, double t);

// Omega * exp(i * center_offset * t) * D_K(t). Real when center_offset = 0.
Complex comb_envelope(const CombSpec& spec, double t);

// Bloch rotation per comb period, theta = 2 pi Omega / delta_omega.
double kick_angle(const CombSpec& spec);

// Spec for a given kick angle at the standard comb geometry
// (delta_omega = 2 chi, 21 teeth, center at -4 chi).
CombSpec standard_comb(double theta, double chi);

// Complex low-IF tooth sum Omega sum_k e^{i nu_k t} with
// nu_k = omega_IF + center_offset + k delta_omega. This is the exact image
// of the lab-frame RWA drive in the simulation frame where the qubit sits at
// omega_IF + n chi: H_drive = (1/2)(Re w sigma_y + Im w sigma_x), i.e.
// H_01 = -i w / 2. Using the real part alone (a cosine comb at IF) would
// reintroduce counter-rotating terms that are far from negligible at a
// low IF and inflate the kick angle.
Complex comb_waveform_low_if(const CombSpec& spec, double omega_if, double t);

}  // namespace combmon
