#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "combmon/signal.hpp"

// Gaussian outcome likelihoods, Bayesian photon-number tracking, empirical
// measurement rate and confidence time.
namespace combmon {

struct PosteriorTrajectory {
  std::vector<double> times;  // window-end times, us
  Eigen::MatrixXd p;          // windows x (N_max+1)
  std::vector<int> map_path;

  void validate() const;  // rows sum to 1 (1e-9), entries >= 0
};

struct RateEstimate {
  double theta = 0.0;      // rad
  double gamma_m = 0.0;    // 1/us, bias-subtracted
  double bias = 0.0;       // 1/us
  double stderr_rate = 0.0;  // 1/us
  int n_samples = 0;       // MC samples per entropy estimate
  bool negative_flagged = false;  // rate < -stderr after subtraction
};

// log N(m; mean = Gram column n, cov = Sigma_n). Non-PSD covariance is
// ridge-regularized with eps = 1e-6 tr(Sigma)/dim (logged via last_ridge).
double gaussian_log_likelihood(const Eigen::VectorXd& m, int n,
                               const TemplateBank& bank);

// Exact pure-loss propagation of a photon-number distribution over dt:
// binomial thinning with survival e^{-dt/T_c}.
std::vector<double> decay_prior_step(const std::vector<double>& p, double dt,
                                     double t_c);

// Window-by-window Bayesian filter: decay prior then Gaussian likelihood,
// log-domain. with_decay=false freezes the prior between windows (used for
// the confidence-time analysis).
PosteriorTrajectory bayes_track(const VoltageRecord& record,
                                const TemplateBank& bank,
                                const SystemParams& params,
                                std::vector<double> p0,
                                bool with_decay = true);

// Forward-backward smoother on the same hidden Markov model as bayes_track
// (binomial-thinning transitions, Gaussian window likelihoods): posterior of
// the photon number per window given the WHOLE record. The forward filter
// lags a jump by several windows when the per-window information Gamma_m tau
// is small; the smoothed marginals localize transitions without that lag, so
// jump staircases are read off these (map_path = per-window argmax).
PosteriorTrajectory smooth_track(const VoltageRecord& record,
                                 const TemplateBank& bank,
                                 const SystemParams& params,
                                 std::vector<double> p0);

struct MiEstimate {
  double nats = 0.0;
  double stderr_nats = 0.0;
  int n_samples = 0;
};

// I(component; outcome) for a Gaussian mixture: mixture entropy by Monte
// Carlo, conditional entropies closed-form.
MiEstimate mutual_information_gaussian_mixture(
    const std::vector<Eigen::VectorXd>& means,
    const std::vector<Eigen::MatrixXd>& covs, const std::vector<double>& prior,
    int n_samples, uint64_t seed);

// Average per-period measurement rate from Gaussian outcome models:
// adjacent-pair (q, q+1) prior 1/2 each, Gram rescaled to G' = G/sqrt(21)
// for single-period statistics, averaged over q, zero-amplitude rate
// subtracted as bias (scaled by the sample-count ratio).
RateEstimate empirical_measurement_rate(const TemplateBank& bank,
                                        const TemplateBank& zero_bank,
                                        const SystemParams& params,
                                        double theta, int mc_samples,
                                        uint64_t seed,
                                        int n_records_bank = 0,
                                        int n_records_zero = 0);

struct ConfidencePoint {
  double nbar = 0.0;   // initial mean photon number (caller-provided label)
  double tau_m = 0.0;  // mean first-passage time to confidence x, us
  int n_records = 0;
  int n_censored = 0;  // never reached within the record
};

// Mean time for max_n P_t(n) to reach x, tracking without dissipation.
ConfidencePoint confidence_time(const std::vector<VoltageRecord>& records,
                                const TemplateBank& bank,
                                const SystemParams& params, double x,
                                double nbar_label = 0.0);

}  // namespace combmon
