#include <doctest.h>

#include <cmath>

#include "combmon/estimation.hpp"
#include "combmon/rng.hpp"

using namespace combmon;

namespace {

// Small synthetic bank whose Gaussian outcome model is fully hand-checkable.
TemplateBank tiny_bank() {
  TemplateBank bank;
  bank.sample_dt = 1e-3;
  bank.tau = 2.0;
  bank.templates = {{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}};  // placeholders
  bank.gram.resize(3, 3);
  bank.gram << 2.0, 0.6, 0.1,
               0.6, 1.5, 0.4,
               0.1, 0.4, 1.0;
  for (int n = 0; n < 3; ++n) {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(3, 3) * (0.5 + 0.1 * n);
    cov(0, 1) = cov(1, 0) = 0.05;
    bank.covariances.push_back(cov);
  }
  return bank;
}

}  // namespace

TEST_CASE("Gaussian log likelihood matches the explicit formula") {
  TemplateBank bank = tiny_bank();
  Eigen::VectorXd m(3);
  m << 1.7, 0.9, -0.2;
  for (int n = 0; n < 3; ++n) {
    const Eigen::VectorXd d = m - bank.gram.col(n);
    const Eigen::MatrixXd& s = bank.covariances[n];
    const double expect = -0.5 * d.dot(s.inverse() * d) -
                          0.5 * std::log(s.determinant()) -
                          1.5 * std::log(2.0 * M_PI);
    CHECK(gaussian_log_likelihood(m, n, bank) ==
          doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("decay prior: conservation, fixed point, mean decay") {
  std::vector<double> p = {0.1, 0.2, 0.3, 0.25, 0.15};
  const double dt = 5.0, t_c = 200.0;
  const auto q = decay_prior_step(p, dt, t_c);
  double total = 0.0, mean_in = 0.0, mean_out = 0.0;
  for (size_t n = 0; n < p.size(); ++n) {
    total += q[n];
    mean_in += n * p[n];
    mean_out += n * q[n];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  // pure loss: <n> decays exactly by e^{-dt/T_c}
  CHECK(mean_out ==
        doctest::Approx(mean_in * std::exp(-dt / t_c)).epsilon(1e-12));
  // vacuum is a fixed point; dt = 0 is the identity
  CHECK(decay_prior_step({1.0, 0.0}, dt, t_c)[0] == doctest::Approx(1.0));
  CHECK(decay_prior_step(p, 0.0, t_c) == p);
}

TEST_CASE("Bayesian tracking on synthetic Gaussian outcomes") {
  // Records built directly from templates + white noise; the tracker should
  // recover the class and produce valid posteriors.
  SystemParams params = SystemParams::paper();
  TemplateBank bank;
  bank.sample_dt = 1e-3;
  const int len = 400;
  bank.tau = len * bank.sample_dt;
  for (int n = 0; n < 3; ++n) {
    std::vector<double> tpl(len);
    for (int k = 0; k < len; ++k) {
      tpl[k] = 3.0 * std::sin(2.0 * M_PI * (n + 1) * k / len);
    }
    bank.templates.push_back(tpl);
  }
  bank.gram = gram_matrix(bank.templates, bank.sample_dt);
  attach_vacuum_covariances(bank, 1.0 / bank.sample_dt);

  const int n_windows = 6, truth = 2;
  VoltageRecord rec;
  rec.dt = bank.sample_dt;
  Philox rng(5, 0);
  const double noise_sd = std::sqrt(1.0 / bank.sample_dt);
  for (int w = 0; w < n_windows; ++w) {
    for (int k = 0; k < len; ++k) {
      rec.samples.push_back(bank.templates[truth][k] +
                            noise_sd * rng.next_gaussian());
    }
  }
  std::vector<double> p0(3, 1.0 / 3.0);
  PosteriorTrajectory post = bayes_track(rec, bank, params, p0, false);
  post.validate();
  REQUIRE(post.map_path.size() == size_t(n_windows));
  CHECK(post.map_path.back() == truth);
  CHECK(post.p(n_windows - 1, truth) > 0.9);
  CHECK(post.times.back() == doctest::Approx(n_windows * bank.tau));
}

TEST_CASE("smoothed tracking matches brute-force path enumeration") {
  SystemParams params = SystemParams::paper();
  params.t_c = 10.0;  // fast decay so the transition matrix is non-trivial
  TemplateBank bank;
  bank.sample_dt = 1e-3;
  const int len = 200, n_states = 3, n_windows = 5;
  bank.tau = len * bank.sample_dt;
  for (int n = 0; n < n_states; ++n) {
    std::vector<double> tpl(len);
    for (int k = 0; k < len; ++k) {
      // strong templates so the likelihoods dominate the transition prior
      // and the MAP staircase recovers the injected truth path
      tpl[k] = 8.0 * std::sin(2.0 * M_PI * (n + 1) * k / len);
    }
    bank.templates.push_back(tpl);
  }
  bank.gram = gram_matrix(bank.templates, bank.sample_dt);
  attach_vacuum_covariances(bank, 1.0 / bank.sample_dt);

  VoltageRecord rec;
  rec.dt = bank.sample_dt;
  Philox rng(17, 0);
  const double noise_sd = std::sqrt(1.0 / bank.sample_dt);
  const int truth[n_windows] = {2, 2, 1, 1, 0};
  for (int w = 0; w < n_windows; ++w) {
    for (int k = 0; k < len; ++k) {
      rec.samples.push_back(bank.templates[truth[w]][k] +
                            noise_sd * rng.next_gaussian());
    }
  }
  const std::vector<double> p0(n_states, 1.0 / n_states);
  PosteriorTrajectory post = smooth_track(rec, bank, params, p0);
  post.validate();

  // exact marginals: enumerate all 3^5 hidden paths of the same chain
  // (transition applied before each window's likelihood)
  Eigen::MatrixXd ll(n_windows, n_states);
  VoltageRecord window;
  window.dt = rec.dt;
  for (int w = 0; w < n_windows; ++w) {
    window.samples.assign(rec.samples.begin() + w * len,
                          rec.samples.begin() + (w + 1) * len);
    const OutcomeVector m = matched_filter_outcomes(window, bank);
    for (int n = 0; n < n_states; ++n) {
      ll(w, n) = gaussian_log_likelihood(m.m, n, bank);
    }
    ll.row(w).array() -= ll.row(w).maxCoeff();
  }
  Eigen::MatrixXd trans(n_states, n_states);
  for (int m0 = 0; m0 < n_states; ++m0) {
    std::vector<double> delta(n_states, 0.0);
    delta[m0] = 1.0;
    const auto step = decay_prior_step(delta, bank.tau, params.t_c);
    for (int n = 0; n < n_states; ++n) trans(n, m0) = step[n];
  }
  Eigen::MatrixXd marg = Eigen::MatrixXd::Zero(n_windows, n_states);
  double total = 0.0;
  const int n_paths = 243;  // 3^5
  for (int code = 0; code < n_paths; ++code) {
    int x[n_windows];
    int c = code;
    for (int w = 0; w < n_windows; ++w) {
      x[w] = c % n_states;
      c /= n_states;
    }
    double weight = 0.0;
    for (int m0 = 0; m0 < n_states; ++m0) {
      weight += trans(x[0], m0) * p0[m0];
    }
    weight *= std::exp(ll(0, x[0]));
    for (int w = 1; w < n_windows; ++w) {
      weight *= trans(x[w], x[w - 1]) * std::exp(ll(w, x[w]));
    }
    total += weight;
    for (int w = 0; w < n_windows; ++w) marg(w, x[w]) += weight;
  }
  marg /= total;
  CHECK((post.p - marg).cwiseAbs().maxCoeff() < 1e-10);
  for (int w = 0; w < n_windows; ++w) {
    CHECK(post.map_path[w] == truth[w]);
  }
}

TEST_CASE("mixture MI: zero, maximal and affine-invariant") {
  const int mc = 200000;
  Eigen::VectorXd m0 = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd m1(2);
  m1 << 1.3, -0.4;
  Eigen::MatrixXd c0 = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd c1 = c0 * 1.5;

  // identical components carry no information
  MiEstimate zero =
      mutual_information_gaussian_mixture({m0, m0}, {c0, c0}, {0.5, 0.5},
                                          mc, 11);
  CHECK(std::abs(zero.nats) < 3.0 * zero.stderr_nats + 1e-6);

  // far-separated components saturate the prior entropy ln 2
  MiEstimate sat = mutual_information_gaussian_mixture(
      {m0, m0 + Eigen::VectorXd::Constant(2, 50.0)}, {c0, c0}, {0.5, 0.5},
      mc, 12);
  CHECK(sat.nats == doctest::Approx(std::log(2.0)).epsilon(1e-3));

  // MI is invariant under an invertible affine map of the outcome
  Eigen::MatrixXd a(2, 2);
  a << 2.0, 0.7, -0.3, 1.1;
  MiEstimate base = mutual_information_gaussian_mixture(
      {m0, m1}, {c0, c1}, {0.5, 0.5}, mc, 13);
  MiEstimate mapped = mutual_information_gaussian_mixture(
      {a * m0, a * m1}, {a * c0 * a.transpose(), a * c1 * a.transpose()},
      {0.5, 0.5}, mc, 14);
  CHECK(std::abs(base.nats - mapped.nats) <
        4.0 * (base.stderr_nats + mapped.stderr_nats));
  CHECK(base.nats > 0.05);
}

TEST_CASE("measurement rate bias subtraction zeroes an empty bank") {
  SystemParams params = SystemParams::paper();
  TemplateBank bank = tiny_bank();
  RateEstimate est = empirical_measurement_rate(bank, bank, params, 1.0,
                                                100000, 3, 500, 500);
  // identical banks: the subtraction cancels up to independent MC noise
  CHECK(std::abs(est.gamma_m) < 4.0 * est.stderr_rate);
  CHECK(est.bias > 0.0);  // the calibration term itself is far from zero
}

TEST_CASE("confidence time on trivially separable records") {
  SystemParams params = SystemParams::paper();
  TemplateBank bank;
  bank.sample_dt = 1e-3;
  const int len = 100;
  bank.tau = len * bank.sample_dt;
  for (int n = 0; n < 2; ++n) {
    std::vector<double> tpl(len, n == 0 ? 5.0 : -5.0);
    bank.templates.push_back(tpl);
  }
  bank.gram = gram_matrix(bank.templates, bank.sample_dt);
  attach_vacuum_covariances(bank, 1.0 / bank.sample_dt);

  std::vector<VoltageRecord> records;
  Philox rng(9, 0);
  for (int r = 0; r < 10; ++r) {
    VoltageRecord rec;
    rec.dt = bank.sample_dt;
    const double noise_sd = std::sqrt(1.0 / bank.sample_dt);
    for (int w = 0; w < 5; ++w) {
      for (int k = 0; k < len; ++k) {
        rec.samples.push_back(5.0 + noise_sd * rng.next_gaussian());
      }
    }
    records.push_back(std::move(rec));
  }
  ConfidencePoint pt = confidence_time(records, bank, params, 0.95, 1.0);
  CHECK(pt.n_records == 10);
  CHECK(pt.n_censored == 0);
  CHECK(pt.tau_m > 0.0);
  CHECK(pt.tau_m <= 2.0 * bank.tau);  // one window separates the classes
  CHECK(pt.nbar == doctest::Approx(1.0));
}
