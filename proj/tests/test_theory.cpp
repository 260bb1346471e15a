#include <doctest.h>

#include <cmath>

#include "combmon/theory.hpp"

using namespace combmon;

TEST_CASE("emitted overlap limits") {
  const double chi_tq = 2.0 * M_PI * 5.25 * 0.023;
  CHECK(std::abs(emitted_overlap(0.0, chi_tq) - 1.0) < 1e-14);
  const Complex full = emitted_overlap(M_PI, chi_tq);
  CHECK(std::abs(full - 1.0 / Complex(1.0, -chi_tq)) < 1e-14);
  // monotone decreasing magnitude in theta on (0, pi)
  double prev = 1.0;
  for (int i = 1; i <= 8; ++i) {
    const double mag = std::abs(emitted_overlap(i * M_PI / 8.0, chi_tq));
    CHECK(mag < prev);
    prev = mag;
  }
}

TEST_CASE("dephasing bound: zero at theta 0, peak at pi, positive") {
  SystemParams params = SystemParams::paper();
  CHECK(dephasing_rate_bound(0.0, params) == doctest::Approx(0.0));
  double best = 0.0;
  int best_i = 0;
  for (int i = 1; i <= 16; ++i) {
    const double g = dephasing_rate_bound(i * M_PI / 16.0, params);
    CHECK(g > 0.0);
    if (g > best) {
      best = g;
      best_i = i;
    }
  }
  CHECK(best_i == 16);
  // explicit formula check at pi/2
  const double s = std::abs(emitted_overlap(M_PI / 2, params.chi * params.t_q));
  CHECK(dephasing_rate_bound(M_PI / 2, params) ==
        doctest::Approx(-(params.chi / M_PI) * std::log(s)).epsilon(1e-12));
}

TEST_CASE("outcome model: density normalization and sampler moments") {
  SystemParams params = SystemParams::paper();
  for (double theta : {0.8, M_PI / 2}) {
    OutcomeModel model = outcome_distribution_infinite_comb(
        theta, params.eta, 1, 1, params);

    // grid quadrature of the density over the complex plane
    const double extent = 6.0, step = 0.05;
    double total = 0.0, mean_re = 0.0, mean_im = 0.0, second = 0.0;
    for (double x = -extent; x <= extent; x += step) {
      for (double y = -extent; y <= extent; y += step) {
        const double p = model.density(Complex(x, y)) * step * step;
        total += p;
        mean_re += x * p;
        mean_im += y * p;
        second += (x * x + y * y) * p;
      }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(std::abs(Complex(mean_re, mean_im) - model.mean()) < 1e-3);

    // rejection sampler reproduces the quadrature moments
    Philox rng(31, 7);
    const int mc = 400000;
    Complex m_acc = 0.0;
    double s_acc = 0.0;
    for (int k = 0; k < mc; ++k) {
      const Complex m = model.sample(rng);
      m_acc += m;
      s_acc += std::norm(m);
    }
    m_acc /= double(mc);
    s_acc /= double(mc);
    CHECK(std::abs(m_acc - model.mean()) < 4.0 / std::sqrt(double(mc)));
    CHECK(std::abs(s_acc - second) < 0.02);
  }
}

TEST_CASE("mismatched filter rotation") {
  SystemParams params = SystemParams::paper();
  OutcomeModel matched = outcome_distribution_infinite_comb(
      M_PI / 2, params.eta, 2, 2, params);
  OutcomeModel shifted = outcome_distribution_infinite_comb(
      M_PI / 2, params.eta, 2, 3, params);
  CHECK(std::abs(matched.filter_rotation() - 1.0) < 1e-14);
  const double gq = 1.0 / params.t_q;
  const Complex cd = gq / Complex(gq, (3 - 2) * params.chi);
  CHECK(std::abs(shifted.filter_rotation() - cd) < 1e-12);
  // |c_d|^2 + |s_d|^2 = 1 keeps the mismatched outcome unit-variance
  CHECK(std::norm(shifted.filter_rotation()) +
            shifted.filter_noise_amp() * shifted.filter_noise_amp() ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(shifted.mean() - cd * matched.mean()) < 1e-12);
}

TEST_CASE("heterodyne rate bound: positive, ordered in eta, vanishes at 0") {
  SystemParams params = SystemParams::paper();
  const int mc = 60000;
  MiEstimate unit = heterodyne_rate_bound(M_PI / 2, 1.0, params, mc, 5);
  MiEstimate eta = heterodyne_rate_bound(M_PI / 2, params.eta, params, mc, 5);
  CHECK(unit.nats > 0.0);
  CHECK(eta.nats > 0.0);
  CHECK(unit.nats > eta.nats - 3.0 * (unit.stderr_nats + eta.stderr_nats));
  MiEstimate tiny = heterodyne_rate_bound(0.02, params.eta, params, mc, 5);
  CHECK(std::abs(tiny.nats) < 0.02 * eta.nats + 3.0 * tiny.stderr_nats);
}

TEST_CASE("accessible information rate formula") {
  SystemParams params = SystemParams::paper();
  const double theta = M_PI / 2;
  const double s = std::abs(emitted_overlap(theta, params.chi * params.t_q));
  const double expect =
      (std::log(2.0) -
       binary_entropy(0.5 * (1.0 + std::sqrt(1.0 - s * s)))) /
      params.comb_period();
  CHECK(accessible_information_rate(theta, params) ==
        doctest::Approx(expect).epsilon(1e-12));
  CHECK(binary_entropy(0.5) == doctest::Approx(std::log(2.0)));
  CHECK(binary_entropy(0.0) == doctest::Approx(0.0));
}

TEST_CASE("dephasing extraction on a hand-built tomography series") {
  // rho(t): mixture of +-alpha(t) coherent states. |<a>| decays at
  // kappa/2 + gamma_x while nbar decays at exactly kappa, so the extraction
  // must return gamma_x - 1/T_cphi + (kappa terms cancel).
  SystemParams params = SystemParams::paper();
  const int nt = 14;
  const double kappa = 1.0 / params.t_c, gamma_x = 0.08;
  std::vector<double> times;
  std::vector<Operator> states;
  for (int k = 0; k < 8; ++k) {
    const double t = 2.0 * k;
    const Complex alpha = 1.1 * std::exp(-0.5 * kappa * t);
    const double p = 0.5 * (1.0 - std::exp(-gamma_x * t));
    times.push_back(t);
    states.push_back((1.0 - p) * coherent_state(alpha, nt) +
                     p * coherent_state(-alpha, nt));
  }
  DephasingFit fit = dephasing_extraction(times, states, params);
  CHECK(!fit.poor_fit);
  CHECK(fit.kappa == doctest::Approx(kappa).epsilon(0.02));
  // |<a>| = |alpha|(1 - 2p) ~ e^{-(kappa/2 + gamma_x) t} for small gamma_x t
  CHECK(fit.gamma == doctest::Approx(0.5 * kappa + gamma_x).epsilon(0.05));
  CHECK(fit.gamma_d ==
        doctest::Approx(gamma_x - 1.0 / params.t_c_phi).epsilon(0.08));
}

TEST_CASE("vacuum-weight decay fit recovers the planted curve") {
  const double n0 = 3.7, t_c = 180.0;
  std::vector<double> times, p0;
  for (int k = 0; k < 12; ++k) {
    const double t = 15.0 * k;
    times.push_back(t);
    p0.push_back(std::exp(-n0 * std::exp(-t / t_c)));
  }
  CoherentDecayFit fit = coherent_vacuum_decay_fit(times, p0);
  CHECK(fit.n0 == doctest::Approx(n0).epsilon(1e-8));
  CHECK(fit.t_c == doctest::Approx(t_c).epsilon(1e-8));
  CHECK(fit.max_residual < 1e-10);
  // a falling vacuum weight (wrong-sign trend) must be rejected
  CHECK_THROWS(coherent_vacuum_decay_fit({0.0, 10.0, 20.0, 30.0, 40.0},
                                         {0.5, 0.4, 0.3, 0.2, 0.1}));
}
