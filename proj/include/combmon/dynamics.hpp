#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "combmon/drive.hpp"
#include "combmon/hilbert.hpp"

// Deterministic Lindblad evolution, steady states, and the single-tone
// reflection-coefficient model. Times in us, angular frequencies in rad/us.
namespace combmon {

struct SystemParams {
  double chi = 2.0 * M_PI * 5.25;       // dispersive shift, rad/us
  double t_q = 0.023;                   // qubit emission time, us
  double t_c = 200.0;                   // cavity decay time, us
  double t_c_phi = 36.0;                // cavity pure dephasing time, us
  double chi_cc = 2.0 * M_PI * 0.010;   // cavity self-Kerr, rad/us
  double eta = 0.185;                   // detection efficiency
  double omega_if = 2.0 * M_PI * 66.0;  // intermediate frequency, rad/us
  int n_max = 9;                        // largest tracked photon number
  int n_trunc = 12;                     // cavity truncation

  double comb_period() const { return M_PI / chi; }
  void validate() const;

  static SystemParams paper();      // main-text values, T_q = 23 ns
  static SystemParams paper_t22();  // circuit-table variant, T_q = 22 ns
};

// H(t) = static_part + envelope(t) * drive_op + conj(envelope(t)) * drive_op+.
// With a Hermitian drive_op and real envelope the drive term is
// 2 envelope(t) drive_op.
struct TimeDependentHamiltonian {
  Operator static_part;
  Operator drive_op;
  std::function<Complex(double)> envelope;  // may be null (no drive)

  Operator at(double t) const;
};

using RateOperator = std::pair<double, Operator>;  // (rate 1/us, jump op)

// Invariant drift of the raw (unsymmetrized) propagated state, filled in
// at every emitted grid time when requested.
struct EvolveStats {
  double max_trace_drift = 0.0;   // max |Tr rho - 1|
  double max_herm_defect = 0.0;   // max_ij |rho - rho+|
  double min_eigenvalue = 0.0;    // most negative eigenvalue seen
};

struct LindbladOptions {
  double trace_tol_per_us = 1e-9;
  double positivity_tol = 1e-6;
  bool check_positivity = true;
  EvolveStats* stats = nullptr;
};

// RK4 integration of the Lindblad equation with the Hamiltonian sampled at
// step midpoints. t_grid entries must be non-negative multiples of dt.
// Throws with a suggested smaller dt when positivity degrades beyond
// tolerance.
std::vector<DensityMatrix> evolve_lindblad(
    const DensityMatrix& rho0, const TimeDependentHamiltonian& h,
    const std::vector<RateOperator>& dissipators,
    const std::vector<double>& t_grid, double dt,
    const LindbladOptions& opts = {});

// Null vector of the vectorized Liouvillian, trace-normalized. Rejects
// degenerate (non-unique) steady states.
DensityMatrix steady_state(const Operator& h,
                           const std::vector<RateOperator>& dissipators);

// Steady-state reflection r = <a_out>/<a_in> of a single tone of Rabi-scale
// amplitude Omega at omega_drive on the qubit dressed by n photons. Models
// the ideal input-output ratio (no detection-chain circle offset).
Complex reflection_coefficient(const SystemParams& params, double omega_drive,
                               double omega_rabi, int n);

// Cavity-only evolution under the self-Kerr Hamiltonian -chi_cc a+^2 a^2
// with the pure dephasing dissipator (2/T_c_phi) D_{a+a}.
std::vector<DensityMatrix> evolve_cavity_kerr(const DensityMatrix& rho0,
                                              const SystemParams& params,
                                              const std::vector<double>& t_grid,
                                              double dt = 1e-3);

// Joint qubit(x)cavity interaction-picture Hamiltonian
// H_int = -(chi/2)(1 + sigma_z) a+a  plus the comb drive (RWA envelope on
// sigma+). Drive phase convention: kick about a fixed transverse axis.
TimeDependentHamiltonian joint_comb_hamiltonian(const SystemParams& params,
                                                const CombSpec& spec);

// Fixed-photon-number simulation-frame Hamiltonian
// H_n = (omega_IF + n chi)|e><e| plus the RWA comb image
// (Re w sigma_y + Im w sigma_x)/2, w the complex low-IF tooth sum.
TimeDependentHamiltonian fixed_n_hamiltonian(const SystemParams& params,
                                             const CombSpec& spec, int n);

}  // namespace combmon
