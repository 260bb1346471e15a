#include <doctest.h>

#include <cmath>

#include "combmon/drive.hpp"
#include "combmon/dynamics.hpp"

using namespace combmon;

TEST_CASE("Dirichlet kernel equals the explicit cosine sum") {
  const int k = 10;
  const double dw = 2.0 * 2.0 * M_PI * 5.25;
  for (double t : {1e-4, 3.7e-3, 0.011, 0.05, 0.0952}) {
    double direct = 1.0;  // k = 0 tooth
    for (int j = 1; j <= k; ++j) direct += 2.0 * std::cos(j * dw * t);
    CHECK(dirichlet_kernel(k, dw, t) == doctest::Approx(direct).epsilon(1e-10));
  }
  CHECK(dirichlet_kernel(k, dw, 0.0) == doctest::Approx(2.0 * k + 1.0));
  // periodic with period 2 pi / dw
  CHECK(dirichlet_kernel(k, dw, 0.013 + 2.0 * M_PI / dw) ==
        doctest::Approx(dirichlet_kernel(k, dw, 0.013)).epsilon(1e-9));
}

TEST_CASE("low-IF tooth sum equals the explicit complex sum") {
  SystemParams p = SystemParams::paper();
  const CombSpec spec = standard_comb(M_PI / 2, p.chi);
  for (double t : {2e-4, 0.004, 0.021, 0.088}) {
    Complex direct = 0.0;
    for (int j = -spec.k_teeth; j <= spec.k_teeth; ++j) {
      direct += std::exp(Complex(0.0, (p.omega_if + spec.center_offset +
                                       j * spec.delta_omega) * t));
    }
    CHECK(std::abs(comb_waveform_low_if(spec, p.omega_if, t) -
                   spec.omega * direct) < 1e-9 * spec.omega * 21.0);
  }
}

TEST_CASE("standard comb geometry") {
  SystemParams p = SystemParams::paper();
  for (double theta : {0.2, M_PI / 2, M_PI}) {
    const CombSpec spec = standard_comb(theta, p.chi);
    CHECK(spec.delta_omega == doctest::Approx(2.0 * p.chi));
    CHECK(spec.center_offset == doctest::Approx(-4.0 * p.chi));
    CHECK(spec.k_teeth == 10);
    CHECK(kick_angle(spec) == doctest::Approx(theta).epsilon(1e-12));
    CHECK(spec.period() == doctest::Approx(p.comb_period()).epsilon(1e-12));
  }
}

TEST_CASE("kick angle oracle: integrated two-level rotation per period") {
  // Drive a decoherence-free qubit on resonance with one comb period of the
  // real low-IF waveform and read the rotation angle off the excited
  // population. Independent RK4 on the Schrodinger equation.
  SystemParams p = SystemParams::paper();
  const double theta = 0.3;
  const CombSpec spec = standard_comb(theta, p.chi);
  const int n = 2;  // photon class sets the resonance
  const double wq = p.omega_if + n * p.chi;

  Eigen::Vector2cd psi(1.0, 0.0);  // |g>
  const double period = p.comb_period();
  const int steps = 40000;
  const double dt = period / steps;
  auto h = [&](double t) {
    const Complex b =
        Complex(0.0, -0.5) * comb_waveform_low_if(spec, p.omega_if, t);
    Eigen::Matrix2cd m;
    m << 0.0, b, std::conj(b), wq;
    return m;
  };
  const Complex mi(0.0, -1.0);
  for (int s = 0; s < steps; ++s) {
    const double t = s * dt;
    Eigen::Vector2cd k1 = mi * (h(t) * psi);
    Eigen::Vector2cd k2 = mi * (h(t + dt / 2) * (psi + dt / 2 * k1));
    Eigen::Vector2cd k3 = mi * (h(t + dt / 2) * (psi + dt / 2 * k2));
    Eigen::Vector2cd k4 = mi * (h(t + dt) * (psi + dt * k3));
    psi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  const double pe = std::norm(psi(1));
  const double expect = std::sin(theta / 2) * std::sin(theta / 2);
  // off-resonant teeth leave only second-order light-shift corrections
  CHECK(std::abs(pe - expect) < 0.02 * expect + 1e-4);
}

TEST_CASE("comb spec validation") {
  CombSpec spec = standard_comb(M_PI / 2, 2.0 * M_PI * 5.25);
  CHECK_NOTHROW(spec.validate());
  CombSpec bad = spec;
  bad.delta_omega = 0.0;
  CHECK_THROWS(bad.validate());
  bad = spec;
  bad.k_teeth = -1;
  CHECK_THROWS(bad.validate());
  bad = spec;
  bad.omega = -1.0;
  CHECK_THROWS(bad.validate());
}
