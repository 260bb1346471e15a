#include <doctest.h>

#include <cmath>

#include "combmon/dynamics.hpp"

using namespace combmon;

namespace {

std::vector<double> grid(int n, double step) {
  std::vector<double> t;
  for (int k = 0; k <= n; ++k) t.push_back(k * step);
  return t;
}

}  // namespace

TEST_CASE("Lindblad integration matches the analytic damped qubit") {
  PauliOps p = pauli_ops();
  const double w = 12.0, t1 = 0.4;
  TimeDependentHamiltonian h;
  h.static_part = 0.5 * w * p.sz;
  Operator rho0 = Operator::Zero(2, 2);
  // |g> at index 0, sigma_z|g> = -|g>; excited occupies index 1
  rho0 << 0.3, Complex(0.2, -0.1), Complex(0.2, 0.1), 0.7;
  auto states = evolve_lindblad(DensityMatrix{rho0}, h,
                                {{1.0 / t1, p.sm}}, grid(8, 0.05), 1e-4);
  for (int k = 0; k <= 8; ++k) {
    const double t = 0.05 * k;
    const Operator& rho = states[k].op();
    CHECK(std::abs(rho(1, 1).real() - 0.7 * std::exp(-t / t1)) < 1e-9);
    // coherence rotates at w (index 1 is the upper level) and damps at 1/2T1
    const Complex expect =
        rho0(0, 1) * std::exp(Complex(-t / (2 * t1), w * t));
    CHECK(std::abs(rho(0, 1) - expect) < 1e-8);
  }
}

TEST_CASE("time-dependent drive matches the resonant Rabi solution") {
  PauliOps p = pauli_ops();
  const double w = 40.0, rabi = 6.0;
  TimeDependentHamiltonian h;
  h.static_part = 0.5 * w * p.sz;
  h.drive_op = p.sm.adjoint();
  h.envelope = [=](double t) {
    return 0.5 * rabi * std::exp(Complex(0.0, -w * t));
  };
  Operator rho0 = Operator::Zero(2, 2);
  rho0(0, 0) = 1.0;
  auto states =
      evolve_lindblad(DensityMatrix{rho0}, h, {}, grid(10, 0.02), 2e-5);
  for (int k = 0; k <= 10; ++k) {
    const double t = 0.02 * k;
    const double pe = std::sin(rabi * t / 2) * std::sin(rabi * t / 2);
    CHECK(std::abs(states[k].op()(1, 1).real() - pe) < 5e-6);
  }
}

TEST_CASE("RK4 order: halving dt shrinks the error ~16x") {
  PauliOps p = pauli_ops();
  TimeDependentHamiltonian h;
  h.static_part = 3.0 * p.sx + 1.0 * p.sz;
  Operator rho0 = Operator::Zero(2, 2);
  rho0(0, 0) = 1.0;
  const std::vector<double> t = {0.0, 0.5};
  auto exact = [&](double dt) {
    return evolve_lindblad(DensityMatrix{rho0}, h, {{2.0, p.sm}}, t, dt)
        .back()
        .op();
  };
  const Operator ref = exact(7.8125e-5);  // effectively converged
  const double e1 = (exact(5e-3) - ref).norm();
  const double e2 = (exact(2.5e-3) - ref).norm();
  const double ratio = e1 / e2;
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("steady state annihilated by the generator, unique for decay") {
  PauliOps p = pauli_ops();
  Operator h = 1.5 * p.sx + 0.7 * p.sz;
  const std::vector<RateOperator> diss = {{2.0, p.sm}};
  DensityMatrix ss = steady_state(h, diss);
  Operator drift = Complex(0.0, -1.0) * (h * ss.op() - ss.op() * h);
  for (const auto& [rate, a] : diss) {
    drift += rate * dissipator_apply(a, ss.op());
  }
  CHECK(drift.norm() < 1e-8);

  // pure decay, no drive: ground state
  DensityMatrix ground = steady_state(0.5 * p.sz, diss);
  CHECK(std::abs(ground.op()(0, 0).real() - 1.0) < 1e-9);

  // no dissipation: degenerate kernel must be rejected
  CHECK_THROWS(steady_state(0.5 * p.sz, {}));
}

TEST_CASE("reflection: full dip on resonance, unity far away") {
  SystemParams params = SystemParams::paper();
  const double rabi = 0.05 / params.t_q;  // weak drive
  const int n = 3;
  const Complex on_res = reflection_coefficient(params, -n * params.chi, rabi, n);
  CHECK(std::abs(on_res + 1.0) < 0.01);  // r -> -1, purely radiative qubit
  // dispersive tail decays as 1/(delta T_q)
  const Complex far =
      reflection_coefficient(params, -n * params.chi + 400.0 * params.chi,
                             rabi, n);
  CHECK(std::abs(far - 1.0) < 0.005);
  // half-linewidth detuning: |1 - r| drops to ~sqrt(2) x half the dip depth
  const Complex half = reflection_coefficient(
      params, -n * params.chi + 0.5 / params.t_q, rabi, n);
  CHECK(std::abs(1.0 - half) == doctest::Approx(2.0 / std::sqrt(2.0)).epsilon(0.02));
}

TEST_CASE("Kerr-dephasing cavity evolution: analytic coherence decay") {
  SystemParams params = SystemParams::paper();
  const int nt = 4;
  Vec psi = Vec::Zero(nt + 1);
  psi(0) = 1.0 / std::sqrt(2.0);
  psi(2) = 1.0 / std::sqrt(2.0);
  Operator rho0 = psi * psi.adjoint();
  auto states = evolve_cavity_kerr(DensityMatrix{rho0}, params,
                                   grid(4, 0.5), 5e-4);
  for (int k = 0; k <= 4; ++k) {
    const double t = 0.5 * k;
    // D_{a+a} at rate 2/T_cphi damps rho_02 by e^{-(rate/2)(dn)^2 t}, dn = 2
    const double mag = 0.5 * std::exp(-4.0 * t / params.t_c_phi);
    CHECK(std::abs(std::abs(states[k].op()(0, 2)) - mag) < 1e-6);
    CHECK(std::abs(states[k].op()(0, 0).real() - 0.5) < 1e-9);
  }
}

TEST_CASE("joint Hamiltonian: dispersive shift only in the excited branch") {
  SystemParams params = SystemParams::paper();
  const CombSpec spec = standard_comb(M_PI / 2, params.chi);
  TimeDependentHamiltonian h = joint_comb_hamiltonian(params, spec);
  const int nt = params.n_trunc;
  for (int n = 0; n <= 3; ++n) {
    const int g_idx = n, e_idx = (nt + 1) + n;
    CHECK(std::abs(h.static_part(g_idx, g_idx)) < 1e-12);
    CHECK(std::abs(h.static_part(e_idx, e_idx) - Complex(-params.chi * n)) <
          1e-10);
  }
  // drive envelope is the comb kernel on sigma+ (RWA)
  const Complex env = h.envelope(1e-3);
  CHECK(std::abs(env - Complex(0.0, -0.5) * comb_envelope(spec, 1e-3)) <
        1e-12);
}

TEST_CASE("positivity guard trips on a too-coarse step") {
  PauliOps p = pauli_ops();
  TimeDependentHamiltonian h;
  h.static_part = 50.0 * p.sx;
  Operator rho0 = Operator::Zero(2, 2);
  rho0(1, 1) = 1.0;
  LindbladOptions opts;
  opts.positivity_tol = 1e-12;
  CHECK_THROWS(evolve_lindblad(DensityMatrix{rho0}, h, {{80.0, p.sm}},
                               grid(2, 0.5), 0.25, opts));
}
