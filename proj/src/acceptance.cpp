#include "combmon/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "combmon/experiments.hpp"
#include "combmon/parallel.hpp"

namespace combmon {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << what;
    }
  }
  void note(const std::string& what) {
    if (detail.tellp() > 0) detail << "; ";
    detail << what;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  auto ranks = [&](const std::vector<double>& v) {
    std::vector<double> r(n);
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](size_t a, size_t b) { return v[a] < v[b]; });
    for (size_t i = 0; i < n; ++i) r[idx[i]] = double(i);
    return r;
  };
  const std::vector<double> rx = ranks(x), ry = ranks(y);
  double d2 = 0.0;
  for (size_t i = 0; i < n; ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
  return 1.0 - 6.0 * d2 / (double(n) * (double(n) * n - 1.0));
}

// ---------------------------------------------------------------- criterion 1

Check c1_physics_sanity(uint64_t) {
  Check c;
  SystemParams params = SystemParams::paper();
  const CombSpec comb = standard_comb(M_PI / 2, params.chi);
  TimeDependentHamiltonian h = joint_comb_hamiltonian(params, comb);
  const int nt = params.n_trunc;
  PauliOps p = pauli_ops();
  const Operator a = annihilation_op(nt);
  std::vector<RateOperator> diss = {
      {1.0 / params.t_q, tensor_embed(p.sm, Subsystem::qubit, nt)},
      {1.0 / params.t_c, tensor_embed(a, Subsystem::cavity, nt)},
      {2.0 / params.t_c_phi,
       tensor_embed(Operator(a.adjoint() * a), Subsystem::cavity, nt)},
  };
  Operator rho0 = Operator::Zero(2 * (nt + 1), 2 * (nt + 1));
  rho0.topLeftCorner(nt + 1, nt + 1) = coherent_state(Complex(1.5, 0.0), nt);

  const double dt = 2e-4;
  std::vector<double> t_grid;
  for (int k = 0; k <= 20; ++k) t_grid.push_back(0.1 * k);  // 2 us span

  EvolveStats stats;
  LindbladOptions opts;
  opts.check_positivity = false;  // measured via stats instead
  opts.stats = &stats;
  evolve_lindblad(DensityMatrix(rho0), h, diss, t_grid, dt, opts);

  c.require(stats.max_trace_drift < 2e-9,
            "trace drift " + fmt(stats.max_trace_drift) + " over 2 us");
  c.require(stats.max_herm_defect < 1e-10,
            "hermiticity defect " + fmt(stats.max_herm_defect));
  c.require(stats.min_eigenvalue >= -1e-9,
            "negative eigenvalue " + fmt(stats.min_eigenvalue));
  c.note("trace " + fmt(stats.max_trace_drift) + ", herm " +
         fmt(stats.max_herm_defect) + ", min eig " +
         fmt(stats.min_eigenvalue));
  return c;
}

// ---------------------------------------------------------------- criterion 2

Check c2_sme_vs_lindblad(uint64_t seed) {
  Check c;
  SystemParams params = SystemParams::paper();
  const int n_traj = 2000, n_periods = 10, block = 100;
  for (double theta : {M_PI / 4, M_PI / 2, M_PI}) {
    const CombSpec comb = standard_comb(theta, params.chi);
    FixedNSimulator sim(params, comb, 1, SimGrid{}, Unraveling::heterodyne);
    const std::vector<double> ref = sim.mean_sigma_x_per_sample(n_periods);
    const int len = int(ref.size());

    const int n_blocks = n_traj / block;
    std::vector<std::vector<double>> bsum(n_blocks), bsum2(n_blocks);
    parallel_for(n_blocks, [&](std::ptrdiff_t b) {
      std::vector<double> s(len, 0.0), s2(len, 0.0);
      for (int i = int(b) * block; i < int(b + 1) * block; ++i) {
        TrajectoryResult tr = sim.run(seed, uint64_t(i), n_periods, true);
        for (int k = 0; k < len; ++k) {
          s[k] += tr.sigma_x[k];
          s2[k] += tr.sigma_x[k] * tr.sigma_x[k];
        }
      }
      bsum[b] = std::move(s);
      bsum2[b] = std::move(s2);
    });
    int beyond3 = 0, beyond5 = 0;
    for (int k = 0; k < len; ++k) {
      double s = 0.0, s2 = 0.0;
      for (int b = 0; b < n_blocks; ++b) {
        s += bsum[b][k];
        s2 += bsum2[b][k];
      }
      const double mean = s / n_traj;
      const double var = std::max(0.0, s2 / n_traj - mean * mean);
      const double se = std::max(std::sqrt(var / n_traj), 1e-12);
      const double dev = std::abs(mean - ref[k]);
      if (dev > 3.0 * se) ++beyond3;
      if (dev > 5.0 * se + 1e-9) ++beyond5;
    }
    // pointwise 3-sigma with the chance-outlier allowance (0.27% expected)
    c.require(beyond3 <= len / 100,
              "theta=" + fmt(theta) + ": " + std::to_string(beyond3) + "/" +
                  std::to_string(len) + " points beyond 3 SE");
    c.require(beyond5 == 0, "theta=" + fmt(theta) + ": " +
                                std::to_string(beyond5) + " points beyond 5 SE");
  }
  return c;
}

// ---------------------------------------------------------------- criterion 3

Check c3_fluorescence_structure(uint64_t) {
  Check c;
  SystemParams params = SystemParams::paper();
  const CombSpec comb = standard_comb(M_PI / 2, params.chi);
  SimGrid grid;
  const double dt = grid.sample_dt(params);
  const int spp = grid.samples_per_period();
  const int n_periods = 4;

  for (int n = 0; n <= 4; ++n) {
    FixedNSimulator sim(params, comb, n, grid);
    const std::vector<double> rec = sim.mean_record(n_periods);
    const double phi = demodulation_phase(rec, dt, n, params);
    const std::vector<double> i_n =
        demodulate_quadratures(rec, dt, n, params, phi).first;

    // post-kick extrema, one per period, searched just after each kick
    std::vector<double> extrema;
    for (int p = 0; p < n_periods; ++p) {
      const int lo = p * spp + std::max(2, spp / 20);
      const int hi = p * spp + (3 * spp) / 10;
      double best = 0.0;
      for (int k = lo; k < hi; ++k) {
        if (std::abs(i_n[k]) > std::abs(best)) best = i_n[k];
      }
      extrema.push_back(best);
    }
    bool alternates = true, constant_sign = true;
    for (int p = 0; p + 1 < n_periods; ++p) {
      if (extrema[p] * extrema[p + 1] >= 0.0) alternates = false;
      if (extrema[p] * extrema[p + 1] <= 0.0) constant_sign = false;
    }
    if (n % 2 == 1) {
      c.require(alternates, "n=" + std::to_string(n) +
                                ": kick sign does not alternate");
    } else {
      c.require(constant_sign, "n=" + std::to_string(n) +
                                   ": kick sign not period-constant");
    }

    // inter-kick decay rate ~ 1/(2 T_q), fitted inside period 1 (away from
    // the transform's edge artifacts)
    std::vector<double> ts, ly;
    const int lo = spp + spp / 12, hi = spp + spp / 2;
    for (int k = lo; k < hi; ++k) {
      const double v = std::abs(i_n[k]);
      if (v > 1e-12) {
        ts.push_back(k * dt);
        ly.push_back(std::log(v));
      }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < ts.size(); ++i) {
      sx += ts[i];
      sy += ly[i];
      sxx += ts[i] * ts[i];
      sxy += ts[i] * ly[i];
    }
    const double nn = double(ts.size());
    const double rate = -(nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    const double expected = 1.0 / (2.0 * params.t_q);
    if (n == 0) c.note("n=0 decay rate " + fmt(rate) + " /us");
    c.require(std::abs(rate - expected) < 0.3 * expected,
              "n=" + std::to_string(n) + ": decay rate " + fmt(rate) +
                  " vs 1/(2T_q)=" + fmt(expected));
  }
  return c;
}

// ---------------------------------------------------------------- criterion 4

Check c4_dephasing_bound(uint64_t) {
  Check c;
  SystemParams params = SystemParams::paper();
  params.chi_cc = 0.0;  // Kerr makes small-theta decay non-exponential
  std::vector<double> sim_rates, bounds;
  for (int i = 1; i <= 8; ++i) {
    const double theta = i * M_PI / 8.0;
    DephasingFit fit =
        simulated_dephasing(params, theta, Complex(1.2, 0.0), 16, 2.5e-4);
    sim_rates.push_back(fit.gamma_d);
    bounds.push_back(dephasing_rate_bound(theta, params));
    if (i <= 4) {
      const double rel = std::abs(fit.gamma_d - bounds.back()) / bounds.back();
      c.require(rel <= 0.15, "theta=" + fmt(theta) + ": simulated " +
                                 fmt(fit.gamma_d) + " vs bound " +
                                 fmt(bounds.back()) + " (" + fmt(100 * rel) +
                                 "%)");
    }
  }
  const auto peak =
      std::max_element(sim_rates.begin(), sim_rates.end()) - sim_rates.begin();
  // the Lindblad rate includes comb-induced decoherence beyond the bound,
  // which flattens the curve near pi; accept a peak on the last two nodes
  c.require(peak >= 6, "simulated dephasing peaks at grid index " +
                           std::to_string(peak) + ", expected theta near pi");
  c.note("Gamma_d(pi) = " + fmt(sim_rates.back()) + " /us");
  return c;
}

// ---------------------------------------------------------------- criterion 5

Check c5_measurement_rate(uint64_t seed) {
  Check c;
  SystemParams params = SystemParams::paper();
  const int windows_per_n = 1000;  // 10^4 windows per theta over 10 classes
  const int n_periods = 21;        // tau = 2 us
  const int mc = 200000;
  TemplateBank zero_bank =
      empirical_bank(params, standard_comb(0.0, params.chi), windows_per_n,
                     n_periods, seed ^ 0x5a45524fULL);
  std::vector<double> gammas;
  for (int i = 1; i <= 8; ++i) {
    const double theta = i * M_PI / 8.0;
    RatesPoint pt = rates_point(params, theta, windows_per_n, zero_bank,
                                windows_per_n, seed + uint64_t(i) * 1000003, mc);
    gammas.push_back(pt.empirical.gamma_m);
    if (i <= 4) {
      const double slack =
          2.0 * std::sqrt(pt.empirical.stderr_rate * pt.empirical.stderr_rate +
                          pt.het_eta_se * pt.het_eta_se);
      const double dev = std::abs(pt.empirical.gamma_m - pt.het_eta);
      c.require(dev <= 0.2 * pt.het_eta + slack,
                "theta=" + fmt(theta) + ": empirical " +
                    fmt(pt.empirical.gamma_m) + " vs heterodyne bound " +
                    fmt(pt.het_eta));
    }
  }
  const auto peak =
      std::max_element(gammas.begin(), gammas.end()) - gammas.begin();
  c.require(peak >= 2 && peak <= 4,
            "peak at grid index " + std::to_string(peak) +
                ", expected near theta=pi/2");
  const double best = *std::max_element(gammas.begin(), gammas.end());
  c.require(best * params.t_c >= 10.0,
            "Gamma_m T_c = " + fmt(best * params.t_c) + " < 10 at the peak");
  c.note("peak Gamma_m T_c = " + fmt(best * params.t_c));
  return c;
}

// ---------------------------------------------------------------- criterion 6

Check c6_information_ordering(uint64_t seed) {
  Check c;
  SystemParams params = SystemParams::paper();
  const int mc = 100000;
  double worst_ratio = 0.0;
  for (int i = 1; i <= 16; ++i) {
    const double theta = i * M_PI / 16.0;
    const double i_acc = accessible_information_rate(theta, params);
    const double gd = dephasing_rate_bound(theta, params);
    MiEstimate h1 = heterodyne_rate_bound(theta, 1.0, params, mc,
                                          seed + uint64_t(i) * 7919);
    MiEstimate he = heterodyne_rate_bound(theta, params.eta, params, mc,
                                          seed + uint64_t(i) * 104729);
    c.require(i_acc >= h1.nats - 3.0 * h1.stderr_nats,
              "theta=" + fmt(theta) + ": I_acc " + fmt(i_acc) +
                  " < heterodyne(1) " + fmt(h1.nats));
    c.require(
        h1.nats >= he.nats - 3.0 * (h1.stderr_nats + he.stderr_nats),
        "theta=" + fmt(theta) + ": heterodyne(1) " + fmt(h1.nats) +
            " < heterodyne(eta) " + fmt(he.nats));
    c.require(gd >= h1.nats - 3.0 * h1.stderr_nats,
              "theta=" + fmt(theta) + ": dephasing bound " + fmt(gd) +
                  " < heterodyne(1) " + fmt(h1.nats));
    if (h1.nats > 1e-9) {
      worst_ratio = std::max(worst_ratio, i_acc / h1.nats);
    }
  }
  c.require(worst_ratio >= 2.0,
            "max I_acc / heterodyne(1) ratio " + fmt(worst_ratio) + " < 2");
  c.note("max ratio " + fmt(worst_ratio));
  return c;
}

// ---------------------------------------------------------------- criterion 7

Check c7_jump_tracking(uint64_t seed) {
  Check c;
  SystemParams params = SystemParams::paper();
  const CombSpec comb = standard_comb(M_PI / 2, params.chi);
  // Records cover the full relaxation (~3 T_c), as in the monitored decay
  // traces: the early high-n stretch is the hardest to track (adjacent
  // separations are weakest and the jump hazard highest), the long low-n
  // tail has long plateaus.
  const int n_records = 100, n_windows = 300, window_periods = 21;
  const double tau = window_periods * params.comb_period();
  // Calibrated bank: templates and covariances measured from the same record
  // process the tracker will see (an idealized noise-free bank leaves a small
  // systematic displacement of the outcome means along the photon-number
  // ladder, which biases staircase transitions early).
  TemplateBank bank =
      empirical_bank(params, comb, 1000, window_periods, seed ^ 0x4a424bull);
  const size_t win = bank.templates.front().size();
  const std::vector<double> dist = truncated_poisson(20.0, params.n_max);
  const std::vector<double>& p0 = dist;  // tracker starts from the true prior
  JumpSimulator sim(params, comb);

  struct Stat {
    int samples = 0, correct = 0, jumps = 0, localized = 0;
  };
  std::vector<Stat> stats(n_records);
  parallel_for(n_records, [&](std::ptrdiff_t r) {
    TrajectoryResult traj =
        sim.run(dist, seed, uint64_t(r), n_windows * window_periods);
    // staircase read from the smoothed posterior: the forward filter lags
    // each jump by several windows at Gamma_m tau ~ 0.17
    PosteriorTrajectory post = smooth_track(traj.record, bank, params, p0);
    Stat st;
    for (int w = 3; w < n_windows; ++w) {
      // ground truth is the photon number occupying most of the window: a
      // window straddling a jump carries mostly pre-jump signal, and the
      // decoder is scored on what the window's record actually shows
      std::vector<int> cnt(params.n_max + 1, 0);
      for (size_t k = size_t(w) * win; k < size_t(w + 1) * win; ++k) {
        ++cnt[traj.n_path[k]];
      }
      const int truth =
          int(std::max_element(cnt.begin(), cnt.end()) - cnt.begin());
      ++st.samples;
      if (post.map_path[w] == truth) ++st.correct;
    }
    const double t_end = n_windows * tau;
    for (const auto& jump : traj.jumps) {
      if (jump.time < 3.0 * tau || jump.time > t_end - 2.0 * tau) continue;
      ++st.jumps;
      // localization: the decoded staircase's crossing of the jump's level
      // (first window where the path drops below `from`); single-photon
      // losses are monotone, so the crossing is unique per jump
      for (int w = 1; w < n_windows; ++w) {
        if (post.map_path[w - 1] >= jump.from && post.map_path[w] < jump.from) {
          if (std::abs(w * tau - jump.time) <= 2.0 * tau) ++st.localized;
          break;
        }
      }
    }
    stats[r] = st;
  });
  int samples = 0, correct = 0, jumps = 0, localized = 0;
  for (const auto& st : stats) {
    samples += st.samples;
    correct += st.correct;
    jumps += st.jumps;
    localized += st.localized;
  }
  const double acc = double(correct) / samples;
  const double loc = jumps > 0 ? double(localized) / jumps : 1.0;
  c.require(acc >= 0.90, "MAP accuracy " + fmt(acc) + " after 3 tau");
  c.require(loc >= 0.90, "jump localization " + fmt(loc) + " (" +
                             std::to_string(localized) + "/" +
                             std::to_string(jumps) + ")");
  c.note("MAP accuracy " + fmt(acc) + ", jumps localized " + fmt(loc) + " of " +
         std::to_string(jumps));
  return c;
}

// ---------------------------------------------------------------- criterion 8

Check c8_confidence_time(uint64_t seed) {
  Check c;
  SystemParams params = SystemParams::paper();
  const CombSpec comb = standard_comb(M_PI / 2, params.chi);
  const int window_periods = 21, n_windows = 30, records_per_group = 240;
  const double tau = window_periods * params.comb_period();
  TemplateBank bank = analytic_template_bank(params, comb, tau);
  attach_vacuum_covariances(bank, 1.0 / bank.sample_dt);
  JumpSimulator sim(params, comb);

  // keep nbar away from the n_max truncation: boundary states have a single
  // neighbor to discriminate against and reach confidence faster, which
  // would mask the jump-interruption trend
  const std::vector<double> nbars = {1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> taus;
  double pooled = 0.0;
  int pooled_n = 0;
  for (size_t g = 0; g < nbars.size(); ++g) {
    const auto dist = truncated_poisson(nbars[g], params.n_max);
    std::vector<VoltageRecord> records(records_per_group);
    parallel_for(records_per_group, [&](std::ptrdiff_t r) {
      records[r] = sim.run(dist, seed, uint64_t(g) * 100000 + uint64_t(r),
                           n_windows * window_periods)
                       .record;
    });
    ConfidencePoint pt = confidence_time(records, bank, params, 0.95, nbars[g]);
    taus.push_back(pt.tau_m);
    pooled += pt.tau_m * (pt.n_records - pt.n_censored);
    pooled_n += pt.n_records - pt.n_censored;
    c.note("nbar=" + fmt(nbars[g]) + ": tau_m=" + fmt(pt.tau_m) + " us (" +
           std::to_string(pt.n_censored) + " censored)");
  }
  const double headline = pooled / pooled_n;
  c.require(headline >= 10.0 && headline <= 40.0,
            "pooled tau_m(0.95) = " + fmt(headline) + " us outside [10, 40]");
  const double rho = spearman(nbars, taus);
  c.require(rho > 0.9, "rank correlation tau_m vs nbar = " + fmt(rho));
  return c;
}

// ---------------------------------------------------------------- criterion 9

Check c9_oracles(uint64_t seed) {
  Check c;
  SystemParams params = SystemParams::paper();

  // (a) accessible information vs brute-force measurement optimization
  for (double theta : {M_PI / 4, M_PI / 2, 3 * M_PI / 4, M_PI}) {
    const double s = std::abs(emitted_overlap(theta, params.chi * params.t_q));
    // two real unit vectors with overlap s; projective measurement at angle
    // phi; exhaustive scan plus local refinement
    auto mi_at = [&](double phi) {
      const double p1 = std::cos(phi) * std::cos(phi);
      const double a2 = s, b2 = std::sqrt(std::max(0.0, 1.0 - s * s));
      const double amp2 = std::cos(phi) * a2 + std::sin(phi) * b2;
      const double p2 = amp2 * amp2;
      return binary_entropy(0.5 * (p1 + p2)) -
             0.5 * binary_entropy(p1) - 0.5 * binary_entropy(p2);
    };
    double best = 0.0, best_phi = 0.0;
    for (int k = 0; k < 20000; ++k) {
      const double phi = k * M_PI / 20000.0;
      const double v = mi_at(phi);
      if (v > best) {
        best = v;
        best_phi = phi;
      }
    }
    double step = M_PI / 20000.0;
    for (int it = 0; it < 60; ++it) {  // local refinement
      step *= 0.7;
      for (double phi : {best_phi - step, best_phi + step}) {
        const double v = mi_at(phi);
        if (v > best) {
          best = v;
          best_phi = phi;
        }
      }
    }
    const double closed =
        accessible_information_rate(theta, params) * params.comb_period();
    c.require(std::abs(best - closed) < 1e-4,
              "accessible info mismatch " + fmt(std::abs(best - closed)) +
                  " nats at theta=" + fmt(theta));
  }

  // (b) Gaussian-mixture MI Monte Carlo vs 1-D quadrature
  {
    const double m0 = 0.0, m1 = 1.2, v0 = 1.0, v1 = 1.4;
    auto density = [&](double x, double m, double v) {
      return std::exp(-0.5 * (x - m) * (x - m) / v) /
             std::sqrt(2.0 * M_PI * v);
    };
    // Simpson quadrature of the mixture entropy
    const double lo = -14.0, hi = 16.0;
    const int steps = 200000;
    const double hstep = (hi - lo) / steps;
    double h_mix = 0.0;
    for (int k = 0; k <= steps; ++k) {
      const double x = lo + k * hstep;
      const double p = 0.5 * density(x, m0, v0) + 0.5 * density(x, m1, v1);
      const double f = p > 0.0 ? -p * std::log(p) : 0.0;
      const double w = (k == 0 || k == steps) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      h_mix += w * f;
    }
    h_mix *= hstep / 3.0;
    const double h_cond = 0.25 * (std::log(2.0 * M_PI * M_E * v0) +
                                  std::log(2.0 * M_PI * M_E * v1));
    const double mi_quad = h_mix - h_cond;
    MiEstimate mc = mutual_information_gaussian_mixture(
        {Eigen::VectorXd::Constant(1, m0), Eigen::VectorXd::Constant(1, m1)},
        {Eigen::MatrixXd::Constant(1, 1, v0),
         Eigen::MatrixXd::Constant(1, 1, v1)},
        {0.5, 0.5}, 20000000, seed);
    c.require(std::abs(mc.nats - mi_quad) < 1e-3,
              "mixture MI MC vs quadrature differ by " +
                  fmt(std::abs(mc.nats - mi_quad)) + " nats");
  }

  // (c) decay prior vs matrix exponential of the birth-death generator
  {
    const int n_max = 9;
    const double dt = 3.0, t_c = 200.0;
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
      gen(n, n) = -double(n) / t_c;
      if (n < n_max) gen(n, n + 1) = double(n + 1) / t_c;
    }
    Eigen::MatrixXd prop = (dt * gen).exp();
    std::vector<double> p = truncated_poisson(4.3, n_max);
    Eigen::VectorXd pv(n_max + 1);
    for (int n = 0; n <= n_max; ++n) pv(n) = p[n];
    const Eigen::VectorXd expected = prop * pv;
    const std::vector<double> got = decay_prior_step(p, dt, t_c);
    double max_err = 0.0;
    for (int n = 0; n <= n_max; ++n) {
      max_err = std::max(max_err, std::abs(got[n] - expected(n)));
    }
    c.require(max_err < 1e-10,
              "decay prior vs matrix exponential: " + fmt(max_err));
  }

  // (d) white-noise matched-filter covariance proportional to G
  {
    TemplateBank bank = analytic_template_bank(
        params, standard_comb(M_PI / 2, params.chi),
        21 * params.comb_period());
    const int n_states = bank.n_states();
    const int len = int(bank.templates.front().size());
    const int n_windows = 80000;  // Frobenius error ~ sqrt(2/N) per entry
    const double sigma = 2.0;
    const int block = 500, n_blocks = n_windows / block;
    std::vector<Eigen::MatrixXd> outer(n_blocks);
    std::vector<Eigen::VectorXd> sums(n_blocks);
    parallel_for(n_blocks, [&](std::ptrdiff_t b) {
      Eigen::MatrixXd so = Eigen::MatrixXd::Zero(n_states, n_states);
      Eigen::VectorXd sm = Eigen::VectorXd::Zero(n_states);
      Eigen::VectorXd m(n_states);
      std::vector<double> noise(len);
      for (int r = int(b) * block; r < int(b + 1) * block; ++r) {
        Philox rng(seed ^ 0x776e6f69ULL, uint64_t(r));
        for (int k = 0; k < len; ++k) noise[k] = sigma * rng.next_gaussian();
        for (int j = 0; j < n_states; ++j) {
          double acc = 0.0;
          for (int k = 0; k < len; ++k) acc += noise[k] * bank.templates[j][k];
          m(j) = acc * bank.sample_dt;
        }
        so.noalias() += m * m.transpose();
        sm += m;
      }
      outer[b] = so;
      sums[b] = sm;
    });
    Eigen::MatrixXd so = Eigen::MatrixXd::Zero(n_states, n_states);
    Eigen::VectorXd sm = Eigen::VectorXd::Zero(n_states);
    for (int b = 0; b < n_blocks; ++b) {
      so += outer[b];
      sm += sums[b];
    }
    Eigen::MatrixXd cov =
        (so - sm * sm.transpose() / n_windows) / double(n_windows - 1);
    Eigen::MatrixXd expected = sigma * sigma * bank.sample_dt * bank.gram;
    const double rel = (cov - expected).norm() / expected.norm();
    c.require(rel < 0.02, "white-noise covariance vs G: " + fmt(100 * rel) +
                              "% relative deviation");
    c.note("white-noise covariance deviation " + fmt(100 * rel) + "%");
  }
  return c;
}

// --------------------------------------------------------------- criterion 10

Check c10_determinism(uint64_t seed) {
  Check c;
  RunConfig config = preset_config("fast");
  config.experiment = Experiment::rates;
  config.n_trajectories = 100;
  config.seed = seed;
  config.has_seed = true;

  auto read_bytes = [](const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is),
                       std::istreambuf_iterator<char>());
  };

  const fs::path root = "acceptance_tmp";
  std::vector<std::string> contents;
  for (int workers : {1, 4}) {
    set_worker_count(workers);
    config.output_dir =
        (root / ("det_w" + std::to_string(workers))).string();
    run_experiment(config);
    contents.push_back(
        read_bytes(fs::path(config.output_dir) / "rates.csv"));
  }
  set_worker_count(0);
  c.require(!contents[0].empty(), "no CSV produced");
  c.require(contents[0] == contents[1],
            "rates.csv differs between 1 and 4 workers");
  std::error_code ec;
  fs::remove_all(root, ec);
  return c;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(uint64_t seed,
                                            const std::vector<int>& ids) {
  struct Entry {
    int id;
    const char* name;
    std::function<Check(uint64_t)> fn;
  };
  const std::vector<Entry> entries = {
      {1, "physics sanity (trace/hermiticity/positivity)", c1_physics_sanity},
      {2, "trajectory ensemble vs master equation", c2_sme_vs_lindblad},
      {3, "fluorescence kick structure and sign alternation",
       c3_fluorescence_structure},
      {4, "dephasing rate vs analytic bound", c4_dephasing_bound},
      {5, "empirical measurement rate", c5_measurement_rate},
      {6, "information-rate ordering", c6_information_ordering},
      {7, "quantum-jump tracking", c7_jump_tracking},
      {8, "confidence time", c8_confidence_time},
      {9, "oracle equivalences", c9_oracles},
      {10, "worker-count determinism", c10_determinism},
  };
  std::vector<CriterionResult> results;
  for (const auto& e : entries) {
    if (!ids.empty() &&
        std::find(ids.begin(), ids.end(), e.id) == ids.end()) {
      continue;
    }
    CriterionResult r;
    r.id = e.id;
    r.name = e.name;
    std::cerr << "[acceptance] criterion " << e.id << " (" << e.name
              << ")...\n";
    const auto start = Clock::now();
    try {
      Check c = e.fn(seed);
      r.pass = c.pass;
      r.detail = c.detail.str();
    } catch (const std::exception& ex) {
      r.pass = false;
      r.detail = std::string("exception: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    std::cerr << "[acceptance] criterion " << e.id << " "
              << (r.pass ? "PASS" : "FAIL") << " [" << fmt(r.seconds)
              << " s]\n";
    results.push_back(std::move(r));
  }
  return results;
}

int print_acceptance(const std::vector<CriterionResult>& results,
                     std::ostream& os) {
  int failures = 0;
  for (const auto& r : results) {
    os << "criterion " << r.id << ": " << (r.pass ? "PASS" : "FAIL") << " — "
       << r.name;
    if (!r.detail.empty()) os << " (" << r.detail << ")";
    os << " [" << fmt(r.seconds) << " s]\n";
    if (!r.pass) ++failures;
  }
  return failures;
}

}  // namespace combmon
