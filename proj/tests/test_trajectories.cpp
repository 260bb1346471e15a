#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numeric>

#include "combmon/trajectories.hpp"

using namespace combmon;

TEST_CASE("generic SME step: trace one, positivity, Lindblad limit") {
  PauliOps p = pauli_ops();
  Operator h = 2.0 * p.sx;
  Operator l = p.sm / std::sqrt(0.023);
  Operator rho = Operator::Zero(2, 2);
  rho << 0.4, Complex(0.25, 0.1), Complex(0.25, -0.1), 0.6;
  const double dt = 1e-4, eta = 0.185;

  Philox rng(7, 0);
  for (int s = 0; s < 200; ++s) {
    const Complex dw(std::sqrt(dt / 2) * rng.next_gaussian(),
                     std::sqrt(dt / 2) * rng.next_gaussian());
    SmeStep step = sme_step_heterodyne(rho, h, l, eta, dw, dt);
    rho = step.rho;
    CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
    Eigen::SelfAdjointEigenSolver<Operator> es(rho);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }

  // eta = 0, dW = 0 reduces to one deterministic Lindblad step
  Operator r0 = Operator::Zero(2, 2);
  r0 << 0.4, Complex(0.25, 0.1), Complex(0.25, -0.1), 0.6;
  SmeStep det = sme_step_heterodyne(r0, h, l, 0.0, Complex(0.0), dt);
  Operator lind = Complex(0.0, -1.0) * (h * r0 - r0 * h) +
                  dissipator_apply(l, r0);
  // split U D Kraus factorization carries an O(dt^2) commutator defect
  CHECK((det.rho - (r0 + dt * lind)).norm() < 1e-5);
  // ... which shrinks quadratically
  SmeStep half = sme_step_heterodyne(r0, h, l, 0.0, Complex(0.0), dt / 2);
  const double e_full = (det.rho - (r0 + dt * lind)).norm();
  const double e_half = (half.rho - (r0 + 0.5 * dt * lind)).norm();
  CHECK(e_full / e_half > 3.0);
  CHECK(e_full / e_half < 5.0);
}

TEST_CASE("fast fixed-n path replays through the generic SME step") {
  SystemParams params = SystemParams::paper();
  const int n = 1, n_periods = 1;
  const CombSpec spec = standard_comb(M_PI / 2, params.chi);
  SimGrid grid;
  FixedNSimulator sim(params, spec, n, grid, Unraveling::heterodyne);
  TrajectoryResult traj = sim.run(99, 3, n_periods, true);
  REQUIRE(traj.innovation.size() == size_t(grid.steps_per_period));

  TimeDependentHamiltonian h = fixed_n_hamiltonian(params, spec, n);
  Operator l = pauli_ops().sm / std::sqrt(params.t_q);
  Operator rho = Operator::Zero(2, 2);
  rho(0, 0) = 1.0;
  const double dt = grid.step_dt(params);
  // sigma_x entries are averaged over the sub-steps of each sample, so the
  // replay must accumulate the same way
  std::vector<double> sx;
  double sx_acc = 0.0;
  for (int s = 0; s < grid.steps_per_period; ++s) {
    const Operator hmid = h.at((s + 0.5) * dt);
    rho = sme_step_heterodyne(rho, hmid, l, params.eta, traj.innovation[s],
                              dt)
              .rho;
    sx_acc += (rho(0, 1) + rho(1, 0)).real();
    if ((s + 1) % grid.substeps_per_sample == 0) {
      sx.push_back(sx_acc / grid.substeps_per_sample);
      sx_acc = 0.0;
    }
  }
  REQUIRE(sx.size() == traj.sigma_x.size());
  double max_err = 0.0;
  for (size_t k = 0; k < sx.size(); ++k) {
    max_err = std::max(max_err, std::abs(sx[k] - traj.sigma_x[k]));
  }
  CHECK(max_err < 5e-3);  // midpoint-sampled expm vs exact split propagator
}

TEST_CASE("mean record equals the analytic scaling of mean sigma_x") {
  SystemParams params = SystemParams::paper();
  const CombSpec spec = standard_comb(M_PI / 2, params.chi);
  FixedNSimulator sim(params, spec, 0);
  const auto rec = sim.mean_record(2);
  const auto sx = sim.mean_sigma_x_per_sample(2);
  const double scale = std::sqrt(params.eta / params.t_q);
  for (size_t k = 0; k < rec.size(); ++k) {
    CHECK(std::abs(rec[k] - scale * sx[k]) < 1e-12);
  }
}

TEST_CASE("trajectories are reproducible and stream-independent") {
  SystemParams params = SystemParams::paper();
  const CombSpec spec = standard_comb(M_PI / 2, params.chi);
  FixedNSimulator sim(params, spec, 2, SimGrid{}, Unraveling::heterodyne);
  TrajectoryResult a = sim.run(5, 11, 2);
  TrajectoryResult b = sim.run(5, 11, 2);
  CHECK(a.record.samples == b.record.samples);
  TrajectoryResult c = sim.run(5, 12, 2);
  CHECK(a.record.samples != c.record.samples);
}

TEST_CASE("ensemble mean: serial and parallel reductions are bit-identical") {
  SystemParams params = SystemParams::paper();
  const CombSpec spec = standard_comb(M_PI / 2, params.chi);
  const auto par = ensemble_mean_record(params, spec, 1, 2, 48, 17, false);
  const auto ser = ensemble_mean_record(params, spec, 1, 2, 48, 17, true);
  REQUIRE(par.size() == ser.size());
  CHECK(std::memcmp(par.data(), ser.data(), par.size() * sizeof(double)) == 0);
  // n_traj = 0 falls back to the analytic path
  const auto analytic = ensemble_mean_record(params, spec, 1, 2, 0, 17);
  FixedNSimulator sim(params, spec, 1);
  CHECK(analytic == sim.mean_record(2));
}

TEST_CASE("jump runs: staircase statistics and frozen limit") {
  SystemParams params = SystemParams::paper();
  const CombSpec spec = standard_comb(M_PI / 2, params.chi);

  SUBCASE("infinite cavity lifetime freezes the photon number") {
    SystemParams frozen = params;
    frozen.t_c = 1e12;
    JumpSimulator sim(frozen, spec);
    const auto dist = truncated_poisson(3.0, frozen.n_max);
    TrajectoryResult traj = sim.run(dist, 3, 0, 3);
    CHECK(traj.jumps.empty());
    CHECK(std::adjacent_find(traj.n_path.begin(), traj.n_path.end(),
                             std::not_equal_to<>()) == traj.n_path.end());
  }

  SUBCASE("initial numbers follow the requested distribution") {
    JumpSimulator sim(params, spec);
    const auto dist = truncated_poisson(2.0, params.n_max);
    std::vector<int> counts(params.n_max + 1, 0);
    const int n_records = 2000;
    for (int r = 0; r < n_records; ++r) {
      TrajectoryResult traj = sim.run(dist, 21, uint64_t(r), 1);
      ++counts[traj.n_path.front()];
    }
    for (int n = 0; n <= 5; ++n) {
      const double p = dist[n];
      const double se = std::sqrt(p * (1 - p) / n_records);
      CHECK(std::abs(counts[n] / double(n_records) - p) < 4.0 * se + 1e-3);
    }
  }

  SUBCASE("jumps only step downward and match the recorded path") {
    SystemParams fast = params;
    fast.t_c = 3.0;  // frequent decay within a short record
    JumpSimulator sim(fast, spec);
    const auto dist = truncated_poisson(6.0, fast.n_max);
    int total_jumps = 0;
    for (uint64_t r = 0; r < 20; ++r) {
      TrajectoryResult traj = sim.run(dist, 4, r, 42);
      int prev = traj.n_path.front();
      for (const auto& jump : traj.jumps) {
        CHECK(jump.from == prev);
        CHECK(jump.to == prev - 1);
        prev = jump.to;
        ++total_jumps;
      }
      CHECK(traj.n_path.back() == prev);
    }
    CHECK(total_jumps > 20);  // ~1 - e^{-t/T_c} per photon, heavily jumping
  }
}

TEST_CASE("truncated Poisson") {
  const auto p = truncated_poisson(2.5, 9);
  CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) < 1e-14);
  for (int n = 1; n <= 9; ++n) {
    CHECK(p[n] / p[n - 1] == doctest::Approx(2.5 / n).epsilon(1e-12));
  }
}

TEST_CASE("simulation grid must divide the comb period") {
  SystemParams params = SystemParams::paper();
  const CombSpec spec = standard_comb(M_PI / 2, params.chi);
  SimGrid bad;
  bad.steps_per_period = 211;  // not divisible by substeps_per_sample
  CHECK_THROWS(FixedNSimulator(params, spec, 0, bad));
}
