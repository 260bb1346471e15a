#pragma once

#include <cstdint>
#include <vector>

#include "combmon/estimation.hpp"
#include "combmon/hilbert.hpp"

// Closed-form and semi-analytic rates: emitted-state overlaps, dephasing
// bound, infinite-comb outcome model, heterodyne and accessible-information
// rates, dephasing extraction from simulated tomography.
namespace combmon {

struct EmittedStatePair {
  double theta = 0.0;
  double chi_tq = 0.0;
  Complex overlap;
};

// <phi|phi>_01 = cos^2(theta/2) + sin^2(theta/2) / (1 - i chi T_q): overlap
// of the field states emitted with 0 vs 1 photon in the cavity.
Complex emitted_overlap(double theta, double chi_tq);

// Gamma_d = -(chi/pi) ln|emitted_overlap|, in 1/us.
double dephasing_rate_bound(double theta, const SystemParams& params);

// Heterodyne outcome model for one comb period in the infinite-comb limit.
// The matched outcome combines the emitted field with vacuum:
// m_n = sqrt(eta) alpha + sqrt(1-eta) gamma, alpha Husimi-distributed for the
// single-rail state cos(theta/2)|0> + sin(theta/2)|1>. A mismatched filter at
// detuning d chi sees c_d m_n + s_d beta with c_d = G_q/(G_q + i d chi).
struct OutcomeModel {
  double theta = 0.0, eta = 0.0;
  int n = 0, k = 0;        // true photon number, filter index
  double gamma_q = 0.0;    // 1/T_q
  double chi = 0.0;

  Complex mean() const;
  double density(Complex m) const;        // k == n only
  Complex sample(Philox& rng) const;      // k == n only (rejection)
  Complex filter_rotation() const;        // c_d for d = k - n
  double filter_noise_amp() const;        // |s_d|
};
OutcomeModel outcome_distribution_infinite_comb(double theta, double eta,
                                                int n, int k,
                                                const SystemParams& params);

// MI per unit time between adjacent photon numbers and the exact
// (non-Gaussian) heterodyne pair outcome (m_q, m_{q+1}), in 1/us.
MiEstimate heterodyne_rate_bound(double theta, double eta,
                                 const SystemParams& params, int n_samples,
                                 uint64_t seed);

// Upper bound for any detector: accessible information of two equiprobable
// pure states with overlap |emitted_overlap|, per period pi/chi. 1/us.
double accessible_information_rate(double theta, const SystemParams& params);

struct DephasingFit {
  double gamma = 0.0;    // decay rate of |<a>|, 1/us
  double kappa = 0.0;    // decay rate of nbar, 1/us
  double gamma_d = 0.0;  // gamma - kappa/2 - 1/T_cphi
  double r2_coherence = 0.0;
  double r2_nbar = 0.0;
  bool poor_fit = false;  // either R^2 < 0.98
};

// Cavity-coherence and photon-number decay rates from a tomography series
// (cavity density matrices at multiples of pi/chi); nbar measured through the
// phase-space route (Wigner map -> Fock weights).
DephasingFit dephasing_extraction(const std::vector<double>& times,
                                  const std::vector<Operator>& cavity_states,
                                  const SystemParams& params);

struct CoherentDecayFit {
  double n0 = 0.0;
  double t_c = 0.0;       // us
  double max_residual = 0.0;
};

// Fit P_t(0) = exp(-n0 e^{-t/T_c}) (vacuum weight of a decaying coherent
// state) by linearizing ln(-ln P).
CoherentDecayFit coherent_vacuum_decay_fit(const std::vector<double>& times,
                                           const std::vector<double>& p0);

// Binary entropy in nats.
double binary_entropy(double p);

}  // namespace combmon
