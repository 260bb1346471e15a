#include "combmon/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace combmon {

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

Complex emitted_overlap(double theta, double chi_tq) {
  const double c2 = std::cos(0.5 * theta) * std::cos(0.5 * theta);
  return c2 + (1.0 - c2) / Complex(1.0, -chi_tq);
}

double dephasing_rate_bound(double theta, const SystemParams& params) {
  const double s = std::abs(emitted_overlap(theta, params.chi * params.t_q));
  return -(params.chi / M_PI) * std::log(s);
}

Complex OutcomeModel::mean() const {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  const Complex matched = std::sqrt(eta) * c * s;
  return (k == n) ? matched : filter_rotation() * matched;
}

Complex OutcomeModel::filter_rotation() const {
  const double d = double(k - n);
  return gamma_q / Complex(gamma_q, d * chi);
}

double OutcomeModel::filter_noise_amp() const {
  const Complex cd = filter_rotation();
  return std::sqrt(std::max(0.0, 1.0 - std::norm(cd)));
}

double OutcomeModel::density(Complex m) const {
  if (k != n) {
    throw std::logic_error("OutcomeModel::density: matched filter only");
  }
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  const double amp = std::norm(c + s * std::sqrt(eta) * std::conj(m));
  return std::exp(-std::norm(m)) / M_PI * (amp + s * s * (1.0 - eta));
}

Complex OutcomeModel::sample(Philox& rng) const {
  if (k != n) {
    throw std::logic_error("OutcomeModel::sample: matched filter only");
  }
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  // proposal q(m) = (1/pi) e^{-|m|^2} (c^2 + s^2(1-eta) + s^2 eta |m|^2),
  // already normalized; p <= 2q by AM-GM on the cross term
  const double w_one = s * s * eta;  // weight of the |1>-like component
  for (;;) {
    Complex m;
    if (rng.next_uniform() <= w_one) {
      // (1/pi) e^{-E} E with E = |m|^2: Gamma(2,1) radius
      const double e = -std::log(rng.next_uniform()) - std::log(rng.next_uniform());
      const double phi = 2.0 * M_PI * rng.next_uniform();
      m = std::sqrt(e) * std::exp(Complex(0.0, phi));
    } else {
      m = Complex(rng.next_gaussian(), rng.next_gaussian()) / std::sqrt(2.0);
    }
    const double q = std::exp(-std::norm(m)) / M_PI *
                     (c * c + s * s * (1.0 - eta) + w_one * std::norm(m));
    if (rng.next_uniform() * 2.0 * q <= density(m)) return m;
  }
}

OutcomeModel outcome_distribution_infinite_comb(double theta, double eta,
                                                int n, int k,
                                                const SystemParams& params) {
  OutcomeModel m;
  m.theta = theta;
  m.eta = eta;
  m.n = n;
  m.k = k;
  m.gamma_q = 1.0 / params.t_q;
  m.chi = params.chi;
  return m;
}

namespace {
double log_cgauss(Complex x, double var) {
  return -std::norm(x) / var - std::log(M_PI * var);
}
}  // namespace

MiEstimate heterodyne_rate_bound(double theta, double eta,
                                 const SystemParams& params, int n_samples,
                                 uint64_t seed) {
  // adjacent-pair hypotheses q and q+1; only d = k - n matters, so evaluate
  // the canonical pair with the matched filter and its neighbor
  OutcomeModel matched = outcome_distribution_infinite_comb(theta, eta, 0, 0, params);
  OutcomeModel off = outcome_distribution_infinite_comb(theta, eta, 0, 1, params);
  const Complex cd = off.filter_rotation();
  const double var = off.filter_noise_amp() * off.filter_noise_amp();

  // joint density of (m_q, m_{q+1}) under photon number q: matched density
  // times circular Gaussian around c_d m_q; mirrored under q+1
  auto log_joint = [&](Complex mq, Complex mq1, bool hyp_q) {
    if (hyp_q) {
      return std::log(matched.density(mq)) + log_cgauss(mq1 - cd * mq, var);
    }
    return std::log(matched.density(mq1)) +
           log_cgauss(mq - std::conj(cd) * mq1, var);
  };

  Philox rng(seed, 0x68657462u);  // channel tag
  double sum = 0.0, sum2 = 0.0;
  const double ln2 = std::log(2.0);
  for (int i = 0; i < n_samples; ++i) {
    const bool hyp_q = rng.next_uniform() <= 0.5;
    Complex mm = matched.sample(rng);
    Complex beta = Complex(rng.next_gaussian(), rng.next_gaussian()) /
                   std::sqrt(2.0);
    Complex other = (hyp_q ? cd : std::conj(cd)) * mm + std::sqrt(var) * beta;
    const Complex mq = hyp_q ? mm : other;
    const Complex mq1 = hyp_q ? other : mm;
    const double l_true = log_joint(mq, mq1, hyp_q);
    const double l_false = log_joint(mq, mq1, !hyp_q);
    const double peak = std::max(l_true, l_false);
    const double log_mix =
        peak + std::log(std::exp(l_true - peak) + std::exp(l_false - peak)) -
        ln2;
    const double inc = l_true - log_mix;
    sum += inc;
    sum2 += inc * inc;
  }
  const double mi = sum / n_samples;
  const double var_mi = std::max(0.0, sum2 / n_samples - mi * mi);

  MiEstimate out;
  out.nats = mi / params.comb_period();
  out.stderr_nats = std::sqrt(var_mi / n_samples) / params.comb_period();
  out.n_samples = n_samples;
  return out;
}

double accessible_information_rate(double theta, const SystemParams& params) {
  const double s = std::abs(emitted_overlap(theta, params.chi * params.t_q));
  const double q = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - s * s)));
  const double i_nats = std::log(2.0) - binary_entropy(q);
  return i_nats / params.comb_period();
}

namespace {

struct LinFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) {
    throw std::runtime_error("linear_fit: degenerate abscissae");
  }
  LinFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0.0;
  const double mean_y = sy / n;
  double ss_tot = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double fit = f.slope * x[i] + f.intercept;
    ss_res += (y[i] - fit) * (y[i] - fit);
    ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
  }
  f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

}  // namespace

DephasingFit dephasing_extraction(const std::vector<double>& times,
                                  const std::vector<Operator>& cavity_states,
                                  const SystemParams& params) {
  if (times.size() != cavity_states.size() || times.size() < 3) {
    throw std::invalid_argument("dephasing_extraction: need >= 3 snapshots");
  }
  const int n_trunc = int(cavity_states.front().rows()) - 1;
  const Operator a = annihilation_op(n_trunc);

  std::vector<double> log_coh, t_coh;
  std::vector<double> log_nbar, t_nbar;
  WignerGrid grid;
  grid.extent = 5.0;
  grid.step = 0.125;
  for (size_t i = 0; i < times.size(); ++i) {
    const double coh = std::abs((a * cavity_states[i]).trace());
    if (coh > 1e-12) {
      log_coh.push_back(std::log(coh));
      t_coh.push_back(times[i]);
    }
    // photon number through the phase-space route
    WignerMap w = wigner_map(DensityMatrix(cavity_states[i]), grid);
    double nbar = 0.0;
    for (int k = 0; k <= n_trunc; ++k) {
      nbar += k * fock_prob_from_wigner(w, k);
    }
    if (nbar > 1e-12) {
      log_nbar.push_back(std::log(nbar));
      t_nbar.push_back(times[i]);
    }
  }
  if (log_coh.size() < 3 || log_nbar.size() < 3) {
    throw std::runtime_error("dephasing_extraction: decayed below precision");
  }
  const LinFit fc = linear_fit(t_coh, log_coh);
  const LinFit fn = linear_fit(t_nbar, log_nbar);

  DephasingFit out;
  out.gamma = -fc.slope;
  out.kappa = -fn.slope;
  out.gamma_d = out.gamma - 0.5 * out.kappa - 1.0 / params.t_c_phi;
  out.r2_coherence = fc.r2;
  out.r2_nbar = fn.r2;
  out.poor_fit = fc.r2 < 0.98 || fn.r2 < 0.98;
  return out;
}

CoherentDecayFit coherent_vacuum_decay_fit(const std::vector<double>& times,
                                           const std::vector<double>& p0) {
  if (times.size() != p0.size() || times.size() < 5) {
    throw std::invalid_argument("coherent_vacuum_decay_fit: need >= 5 points");
  }
  // ln(-ln P) = ln n0 - t / T_c
  std::vector<double> x, y;
  for (size_t i = 0; i < p0.size(); ++i) {
    if (p0[i] <= 0.0 || p0[i] > 1.0) {
      throw std::invalid_argument("coherent_vacuum_decay_fit: P outside (0,1]");
    }
    if (p0[i] < 1.0) {
      x.push_back(times[i]);
      y.push_back(std::log(-std::log(p0[i])));
    }
  }
  if (x.size() < 3) {
    throw std::runtime_error(
        "coherent_vacuum_decay_fit: too few informative points");
  }
  const LinFit f = linear_fit(x, y);
  if (f.slope >= 0.0) {
    throw std::runtime_error(
        "coherent_vacuum_decay_fit: non-decaying series, fit rejected");
  }
  CoherentDecayFit out;
  out.n0 = std::exp(f.intercept);
  out.t_c = -1.0 / f.slope;
  for (size_t i = 0; i < p0.size(); ++i) {
    const double model = std::exp(-out.n0 * std::exp(-times[i] / out.t_c));
    out.max_residual = std::max(out.max_residual, std::abs(model - p0[i]));
  }
  return out;
}

}  // namespace combmon
