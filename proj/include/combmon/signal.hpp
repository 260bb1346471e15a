#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "combmon/dynamics.hpp"
#include "combmon/trajectories.hpp"

// Record processing: analytic signal, IQ demodulation, matched filters,
// Gram and covariance estimation.
namespace combmon {

struct TemplateBank {
  std::vector<std::vector<double>> templates;  // mean records, n = 0..N_max
  Eigen::MatrixXd gram;                        // G_nm = (template_n | template_m)
  std::vector<Eigen::MatrixXd> covariances;    // outcome covariance given n
  double tau = 0.0;        // window length, us
  double sample_dt = 0.0;  // us
  bool split_half = false;

  int n_states() const { return int(templates.size()); }
  void validate() const;
};

struct OutcomeVector {
  Eigen::VectorXd m;
  double t = 0.0;    // window end, us
  double tau = 0.0;  // us
};

// x + i H[x]: negative frequencies zeroed, interior positive band doubled.
std::vector<Complex> analytic_signal(const std::vector<double>& x);

// I/Q at omega_IF + n chi: I - iQ = e^{-i(w_if + n chi)t + i phi} * analytic(v).
std::pair<std::vector<double>, std::vector<double>> demodulate_quadratures(
    const std::vector<double>& v, double dt, int n, const SystemParams& params,
    double phase);

// Phase putting the fluorescence in I: maximizes the I energy over the
// first comb period.
double demodulation_phase(const std::vector<double>& v, double dt, int n,
                          const SystemParams& params);

// m_n = sum_t v(t) template_n(t) dt over one window.
OutcomeVector matched_filter_outcomes(const VoltageRecord& v,
                                      const TemplateBank& bank);

// Gram matrix of the given templates (plain inner products, step dt).
Eigen::MatrixXd gram_matrix(const std::vector<std::vector<double>>& templates,
                            double dt);

// Unbiased estimate from >= 2 records per n: bra templates from one half of
// the records, ket templates from the other, so template noise never
// multiplies itself.
Eigen::MatrixXd gram_matrix_split(
    const std::vector<std::vector<std::vector<double>>>& records_per_n,
    double dt);

struct GramInverse {
  Eigen::MatrixXd inv;
  double condition = 0.0;
  bool pseudo = false;  // true when a pseudo-inverse was substituted
};
GramInverse invert_gram(const Eigen::MatrixXd& gram);

// r = G^-1 m; E[r_k | n photons] = delta_{kn}.
Eigen::VectorXd normalized_outcomes(const OutcomeVector& m,
                                    const GramInverse& ginv);

struct CovarianceSet {
  std::vector<Eigen::MatrixXd> sigma;
  bool wide_uncertainty = false;  // fewer than 100 records in some class
};
// Sample covariance of matched-filter outcomes per photon class, with
// split-half templates when the bank provides them.
CovarianceSet covariance_matrices(
    const std::vector<std::vector<std::vector<double>>>& records_per_n,
    const TemplateBank& bank);

// Bank from per-n record ensembles (split_half controls the Gram estimator).
TemplateBank build_template_bank(
    const std::vector<std::vector<std::vector<double>>>& records_per_n,
    double tau, double dt, bool split_half);

// Bank from the analytic (noise-free) mean records; covariances left for the
// caller (or taken as white-noise vacuum covariance sigma2 * dt * G).
TemplateBank analytic_template_bank(const SystemParams& params,
                                    const CombSpec& spec, double tau);
void attach_vacuum_covariances(TemplateBank& bank, double noise_variance);

// Versioned binary file (float64 payload) plus a JSON sidecar at path+".json".
void save_template_bank(const TemplateBank& bank, const std::string& path);
TemplateBank load_template_bank(const std::string& path);

void export_gram_csv(const TemplateBank& bank, const std::string& path);

}  // namespace combmon
