#include "combmon/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "combmon/parallel.hpp"

namespace combmon {

namespace {

const Complex kI(0.0, 1.0);

Operator expm_herm(const Operator& h, double scale) {
  // exp(-i h scale) for Hermitian h
  Eigen::SelfAdjointEigenSolver<Operator> es(h);
  Vec phases(h.rows());
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    phases(k) = std::exp(Complex(0.0, -es.eigenvalues()(k) * scale));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

SmeStep sme_step_impl(const Operator& rho, const Operator& h,
                      const Operator& l, double eta, Complex dw, double dt,
                      bool heterodyne) {
  Complex dy;
  if (heterodyne) {
    dy = std::sqrt(eta) * (rho * l).trace() * dt + dw;
  } else {
    dy = std::sqrt(eta) * ((rho * (l + l.adjoint())).trace()).real() * dt + dw;
  }
  Operator ll = l.adjoint() * l;
  Operator u = expm_herm(h, dt);
  Operator decay;
  {
    Eigen::SelfAdjointEigenSolver<Operator> es(ll);
    Vec e(ll.rows());
    for (Eigen::Index k = 0; k < ll.rows(); ++k) {
      e(k) = std::exp(-0.5 * dt * es.eigenvalues()(k));
    }
    decay = es.eigenvectors() * e.asDiagonal() * es.eigenvectors().adjoint();
  }
  Complex c = std::sqrt(eta) * (heterodyne ? std::conj(dy) : dy);
  Operator m = u * decay *
               (Operator::Identity(rho.rows(), rho.cols()) + c * l);
  Operator next = m * rho * m.adjoint() +
                  (1.0 - eta) * dt * (l * rho * l.adjoint());
  double tr = next.trace().real();
  if (tr < 1e-6) {
    throw std::runtime_error("sme_step: norm collapse, reduce dt");
  }
  next /= tr;
  return {0.5 * (next + next.adjoint()), dy};
}

}  // namespace

SmeStep sme_step_heterodyne(const Operator& rho, const Operator& h,
                            const Operator& l_meas, double eta, Complex dw,
                            double dt) {
  return sme_step_impl(rho, h, l_meas, eta, dw, dt, true);
}

SmeStep sme_step_homodyne(const Operator& rho, const Operator& h,
                          const Operator& l_meas, double eta, double dw,
                          double dt) {
  return sme_step_impl(rho, h, l_meas, eta, Complex(dw, 0.0), dt, false);
}

FixedNSimulator::FixedNSimulator(const SystemParams& params,
                                 const CombSpec& spec, int n, SimGrid grid,
                                 Unraveling unraveling)
    : params_(params), spec_(spec), n_(n), grid_(grid),
      unraveling_(unraveling) {
  if (grid_.steps_per_period % grid_.substeps_per_sample != 0) {
    throw std::invalid_argument("SimGrid: substeps must divide the period");
  }
  build_tables();
}

void FixedNSimulator::build_tables() {
  const double period = params_.comb_period();
  // shortest block of comb periods on which every tooth is periodic
  cache_periods_ = 0;
  for (int p = 1; p <= 64; ++p) {
    bool ok = true;
    for (int k = -spec_.k_teeth; k <= spec_.k_teeth; ++k) {
      double f = params_.omega_if + spec_.center_offset + k * spec_.delta_omega;
      double cycles = f * p * period / (2.0 * M_PI);
      if (std::abs(cycles - std::round(cycles)) > 1e-7) {
        ok = false;
        break;
      }
    }
    if (ok) {
      cache_periods_ = p;
      break;
    }
  }
  if (cache_periods_ == 0) {
    throw std::runtime_error(
        "FixedNSimulator: comb teeth not commensurate with the IF grid");
  }

  const double dt = grid_.step_dt(params_);
  decay_e_ = std::exp(-0.5 * dt / params_.t_q);
  const double energy = params_.omega_if + n_ * params_.chi;
  const int n_steps = cache_periods_ * grid_.steps_per_period;
  steps_.resize(n_steps);
  for (int s = 0; s < n_steps; ++s) {
    const double t_mid = (s + 0.5) * dt;
    const Complex w = comb_waveform_low_if(spec_, params_.omega_if, t_mid);
    // exact 2x2 unitary for H = energy |e><e| + (Re w sigma_y + Im w
    // sigma_x)/2, the RWA image of the comb: H_01 = b = -i w / 2
    const Complex b = -0.5 * kI * w;
    const double mean = 0.5 * energy;
    const double d = -0.5 * energy;
    const double lam = std::sqrt(d * d + std::norm(b));
    const Complex phase = std::exp(Complex(0.0, -mean * dt));
    double cosl = std::cos(lam * dt);
    double sindl = (lam < 1e-12) ? dt : std::sin(lam * dt) / lam;
    Step st;
    st.u00 = phase * (cosl - kI * sindl * d);
    st.u01 = phase * (-kI * sindl * b);
    st.u10 = phase * (-kI * sindl * std::conj(b));
    st.u11 = phase * (cosl + kI * sindl * d);
    // fold in the exact no-jump decay exp(-dt/2T_q |e><e|)
    st.u01 *= decay_e_;
    st.u11 *= decay_e_;
    steps_[s] = st;
  }
}

template <bool kHet>
Complex FixedNSimulator::advance(Complex rho[4], const Step& s, Complex dw,
                                 double sqrt_eta) const {
  const double dt = grid_.step_dt(params_);
  const double inv_sqrt_tq = 1.0 / std::sqrt(params_.t_q);
  Complex dy;
  Complex cfac;
  if constexpr (kHet) {
    dy = sqrt_eta * inv_sqrt_tq * rho[2] * dt + dw;  // Tr(rho sigma-) = rho10
    cfac = sqrt_eta * std::conj(dy) * inv_sqrt_tq;
  } else {
    dy = sqrt_eta * inv_sqrt_tq * 2.0 * rho[1].real() * dt + dw;
    cfac = sqrt_eta * dy * inv_sqrt_tq;
  }
  // M = U D (I + cfac sigma-): appends cfac * (first column) to the second
  const Complex a = s.u00, c = s.u10;
  const Complex b = s.u01 + cfac * s.u00;
  const Complex d = s.u11 + cfac * s.u10;
  const Complex t00 = a * rho[0] + b * rho[2];
  const Complex t01 = a * rho[1] + b * rho[3];
  const Complex t10 = c * rho[0] + d * rho[2];
  const Complex t11 = c * rho[1] + d * rho[3];
  Complex r00 = t00 * std::conj(a) + t01 * std::conj(b);
  Complex r01 = t00 * std::conj(c) + t01 * std::conj(d);
  Complex r10 = t10 * std::conj(a) + t11 * std::conj(b);
  Complex r11 = t10 * std::conj(c) + t11 * std::conj(d);
  const double eta = sqrt_eta * sqrt_eta;
  r00 += (1.0 - eta) * (dt / params_.t_q) * rho[3];
  const double tr = r00.real() + r11.real();
  if (tr < 1e-6) {
    throw std::runtime_error("FixedNSimulator: norm collapse, reduce dt");
  }
  rho[0] = r00 / tr;
  rho[1] = r01 / tr;
  rho[2] = r10 / tr;
  rho[3] = r11 / tr;
  return dy;
}

TrajectoryResult FixedNSimulator::run(uint64_t seed, uint64_t stream,
                                      int n_periods, bool want_sigma_x) const {
  const bool het = unraveling_ == Unraveling::heterodyne;
  const double dt = grid_.step_dt(params_);
  const double sample_dt = grid_.sample_dt(params_);
  const double sqrt_eta = std::sqrt(params_.eta);
  const int n_steps = n_periods * grid_.steps_per_period;
  const int sub = grid_.substeps_per_sample;
  const int n_samples = n_steps / sub;
  const int table = int(steps_.size());

  Philox rng(seed, stream);
  TrajectoryResult res;
  res.record.dt = sample_dt;
  res.record.n_true = n_;
  res.record.seed = seed;
  res.record.samples.resize(n_samples);
  if (want_sigma_x) {
    res.sigma_x.resize(n_samples);
    res.innovation.reserve(n_steps);
  }

  Complex rho[4] = {1.0, 0.0, 0.0, 0.0};  // ground state
  const double noise_sd = std::sqrt(het ? 0.5 * dt : dt);
  int s = 0;
  for (int i = 0; i < n_samples; ++i) {
    Complex dy_acc = 0.0;
    double sx_acc = 0.0;
    for (int j = 0; j < sub; ++j, ++s) {
      Complex dw = het ? Complex(noise_sd * rng.next_gaussian(),
                                 noise_sd * rng.next_gaussian())
                       : Complex(noise_sd * rng.next_gaussian(), 0.0);
      if (want_sigma_x) res.innovation.push_back(dw);
      if (het) {
        dy_acc += advance<true>(rho, steps_[s % table], dw, sqrt_eta);
      } else {
        dy_acc += advance<false>(rho, steps_[s % table], dw, sqrt_eta);
      }
      sx_acc += 2.0 * rho[1].real();
    }
    res.record.samples[i] =
        std::sqrt(res.record.gain) * dy_acc.real() / sample_dt;
    if (want_sigma_x) res.sigma_x[i] = sx_acc / sub;
  }
  return res;
}

std::vector<double> FixedNSimulator::mean_sigma_x_per_sample(
    int n_periods) const {
  const int sub = grid_.substeps_per_sample;
  const int n_steps = n_periods * grid_.steps_per_period;
  const int n_samples = n_steps / sub;
  const int table = int(steps_.size());
  std::vector<double> out(n_samples);
  Complex rho[4] = {1.0, 0.0, 0.0, 0.0};
  int s = 0;
  for (int i = 0; i < n_samples; ++i) {
    double sx_acc = 0.0;
    for (int j = 0; j < sub; ++j, ++s) {
      advance<false>(rho, steps_[s % table], 0.0, 0.0);
      sx_acc += 2.0 * rho[1].real();
    }
    out[i] = sx_acc / sub;
  }
  return out;
}

std::vector<double> FixedNSimulator::mean_record(int n_periods) const {
  std::vector<double> out = mean_sigma_x_per_sample(n_periods);
  const double scale = std::sqrt(params_.eta / params_.t_q);
  for (double& v : out) v *= scale;
  return out;
}

JumpSimulator::JumpSimulator(const SystemParams& params, const CombSpec& spec,
                             SimGrid grid)
    : params_(params), grid_(grid) {
  per_n_.reserve(params.n_max + 1);
  for (int n = 0; n <= params.n_max; ++n) {
    per_n_.emplace_back(params, spec, n, grid, Unraveling::homodyne);
  }
}

TrajectoryResult JumpSimulator::run(const std::vector<double>& initial_dist,
                                    uint64_t seed, uint64_t stream,
                                    int n_periods) const {
  const double dt = grid_.step_dt(params_);
  const double sample_dt = grid_.sample_dt(params_);
  const double sqrt_eta = std::sqrt(params_.eta);
  const int sub = grid_.substeps_per_sample;
  const int n_steps = n_periods * grid_.steps_per_period;
  const int n_samples = n_steps / sub;

  Philox rng(seed, stream);
  // initial photon number by CDF inversion
  double norm = 0.0;
  for (double p : initial_dist) norm += p;
  double u = rng.next_uniform() * norm;
  int n = 0;
  for (; n + 1 < int(initial_dist.size()); ++n) {
    if (u <= initial_dist[n]) break;
    u -= initial_dist[n];
  }
  n = std::min(n, params_.n_max);

  TrajectoryResult res;
  res.record.dt = sample_dt;
  res.record.n_true = -1;
  res.record.seed = seed;
  res.record.samples.resize(n_samples);
  res.n_path.resize(n_samples);

  // next loss time for the current occupation
  auto draw_jump = [&](int occ) {
    if (occ <= 0) return std::numeric_limits<double>::infinity();
    return -std::log(rng.next_uniform()) * params_.t_c / occ;
  };
  double t_next_jump = draw_jump(n);

  Complex rho[4] = {1.0, 0.0, 0.0, 0.0};
  const double noise_sd = std::sqrt(dt);
  int s = 0;
  for (int i = 0; i < n_samples; ++i) {
    Complex dy_acc = 0.0;
    for (int j = 0; j < sub; ++j, ++s) {
      double t = s * dt;
      if (t >= t_next_jump && n > 0) {
        res.jumps.push_back({t, n, n - 1});
        --n;
        t_next_jump = t + draw_jump(n);
      }
      const auto& sim = per_n_[n];
      const int table = int(sim.steps_.size());
      double dw = noise_sd * rng.next_gaussian();
      dy_acc += sim.advance<false>(rho, sim.steps_[s % table], Complex(dw, 0.0),
                                   sqrt_eta);
    }
    res.record.samples[i] =
        std::sqrt(res.record.gain) * dy_acc.real() / sample_dt;
    res.n_path[i] = n;
  }
  return res;
}

std::vector<double> ensemble_mean_record(const SystemParams& params,
                                         const CombSpec& spec, int n,
                                         int n_periods, int n_traj,
                                         uint64_t seed, bool serial) {
  FixedNSimulator sim(params, spec, n);
  if (n_traj == 0) {
    return sim.mean_record(n_periods);
  }
  const int block = 32;
  const int n_blocks = (n_traj + block - 1) / block;
  const int n_samples = n_periods * sim.grid().samples_per_period();
  std::vector<std::vector<double>> partial(n_blocks);
  parallel_for(n_blocks, [&](std::ptrdiff_t b) {
    std::vector<double> acc(n_samples, 0.0);
    const int lo = int(b) * block;
    const int hi = std::min(n_traj, lo + block);
    for (int i = lo; i < hi; ++i) {
      TrajectoryResult tr = sim.run(seed, uint64_t(i), n_periods);
      for (int k = 0; k < n_samples; ++k) acc[k] += tr.record.samples[k];
    }
    partial[b] = std::move(acc);
  }, serial);
  std::vector<double> mean(n_samples, 0.0);
  for (int b = 0; b < n_blocks; ++b) {
    for (int k = 0; k < n_samples; ++k) mean[k] += partial[b][k];
  }
  for (double& v : mean) v /= n_traj;
  return mean;
}

namespace {
int periods_from_duration(const SystemParams& params, double duration) {
  const double period = params.comb_period();
  const double n = duration / period;
  if (std::abs(n - std::round(n)) > 1e-6 * std::max(1.0, n)) {
    throw std::invalid_argument(
        "duration must be a multiple of the comb period pi/chi");
  }
  return int(std::round(n));
}
}  // namespace

TrajectoryResult simulate_record(const SystemParams& params,
                                 const CombSpec& spec, int n_true,
                                 double duration, uint64_t seed) {
  if (n_true > params.n_max) {
    throw std::invalid_argument("simulate_record: n_true exceeds N_max");
  }
  FixedNSimulator sim(params, spec, n_true);
  return sim.run(seed, 0, periods_from_duration(params, duration));
}

TrajectoryResult simulate_jump_record(const SystemParams& params,
                                      const CombSpec& spec,
                                      const std::vector<double>& initial_dist,
                                      double duration, uint64_t seed) {
  JumpSimulator sim(params, spec);
  return sim.run(initial_dist, seed, 0, periods_from_duration(params, duration));
}

std::vector<double> truncated_poisson(double nbar, int n_max) {
  std::vector<double> p(n_max + 1);
  double term = std::exp(-nbar);
  if (term == 0.0) term = 1e-300;  // renormalized below anyway
  double sum = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    p[n] = term;
    sum += term;
    term *= nbar / double(n + 1);
  }
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace combmon
