#include "combmon/dynamics.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Sparse>

namespace combmon {

namespace {
const Complex kI(0.0, 1.0);
}

void SystemParams::validate() const {
  if (t_q <= 0 || t_c <= 0 || t_c_phi <= 0) {
    throw std::invalid_argument("SystemParams: times must be > 0");
  }
  if (eta < 0.0 || eta > 1.0) {
    throw std::invalid_argument("SystemParams: eta must lie in [0, 1]");
  }
  if (n_trunc < n_max) {
    throw std::invalid_argument("SystemParams: n_trunc must be >= n_max");
  }
}

SystemParams SystemParams::paper() { return SystemParams{}; }

SystemParams SystemParams::paper_t22() {
  SystemParams p;
  p.t_q = 0.022;
  return p;
}

Operator TimeDependentHamiltonian::at(double t) const {
  if (!envelope) return static_part;
  Complex e = envelope(t);
  return static_part + e * drive_op +
         std::conj(e) * drive_op.adjoint();
}

namespace {

// Physical generators here are sparse (diagonal dispersive part, ladder
// drives and jump operators), so every product keeps one sparse factor:
// the right-hand side costs O(nnz * d) instead of O(d^3). Assumes rho
// Hermitian (true for rho0 and preserved by RK4 stages), which halves the
// products via X rho = (rho X+)+.
struct LindbladRhs {
  using Sparse = Eigen::SparseMatrix<Complex>;
  Sparse h0, drive, drive_adj;
  bool has_drive = false;
  std::function<Complex(double)> env;
  struct Diss {
    double rate;
    Sparse a, ada;  // jump operator and A+A
  };
  std::vector<Diss> diss;

  explicit LindbladRhs(const TimeDependentHamiltonian& ham,
                       const std::vector<RateOperator>& dissipators) {
    h0 = ham.static_part.sparseView(1e-300);
    if (ham.envelope) {
      has_drive = true;
      env = ham.envelope;
      drive = ham.drive_op.sparseView(1e-300);
      drive_adj = Operator(ham.drive_op.adjoint()).sparseView(1e-300);
    }
    for (const auto& [rate, a] : dissipators) {
      diss.push_back(
          {rate, a.sparseView(1e-300), Operator(a.adjoint() * a).sparseView(1e-300)});
    }
  }

  Operator operator()(const Operator& rho, double t) const {
    Operator h_rho = h0 * rho;
    if (has_drive) {
      const Complex e = env(t);
      h_rho.noalias() += e * (drive * rho);
      h_rho.noalias() += std::conj(e) * (drive_adj * rho);
    }
    Operator out = -kI * (h_rho - h_rho.adjoint());
    for (const auto& dj : diss) {
      const Operator a_rho = dj.a * rho;          // A rho
      const Operator jump = dj.a * a_rho.adjoint();  // (A (A rho)+) = (A rho A+)+
      const Operator anti = dj.ada * rho;         // A+A rho
      out.noalias() += dj.rate * jump.adjoint();
      out.noalias() -= (0.5 * dj.rate) * (anti + anti.adjoint());
    }
    return out;
  }
};

}  // namespace

std::vector<DensityMatrix> evolve_lindblad(
    const DensityMatrix& rho0, const TimeDependentHamiltonian& h,
    const std::vector<RateOperator>& dissipators,
    const std::vector<double>& t_grid, double dt, const LindbladOptions& opts) {
  LindbladRhs rhs(h, dissipators);
  Operator rho = rho0.op();

  std::vector<DensityMatrix> out;
  out.reserve(t_grid.size());
  double t = 0.0;
  size_t gi = 0;
  const double eps = 0.5 * dt;

  auto emit = [&](double now) {
    while (gi < t_grid.size() && t_grid[gi] <= now + eps) {
      Operator sym = 0.5 * (rho + rho.adjoint());
      if (opts.stats) {
        opts.stats->max_trace_drift = std::max(
            opts.stats->max_trace_drift, std::abs(rho.trace() - Complex(1.0)));
        opts.stats->max_herm_defect =
            std::max(opts.stats->max_herm_defect,
                     (rho - rho.adjoint()).cwiseAbs().maxCoeff());
      }
      if (opts.check_positivity || opts.stats) {
        Eigen::SelfAdjointEigenSolver<Operator> es(sym, Eigen::EigenvaluesOnly);
        if (opts.stats) {
          opts.stats->min_eigenvalue = std::min(
              opts.stats->min_eigenvalue, es.eigenvalues().minCoeff());
        }
        if (opts.check_positivity &&
            es.eigenvalues().minCoeff() < -opts.positivity_tol) {
          std::ostringstream msg;
          msg << "evolve_lindblad: positivity violated ("
              << es.eigenvalues().minCoeff() << ") at t=" << now
              << "; retry with dt <= " << dt / 4.0;
          throw std::runtime_error(msg.str());
        }
      }
      out.emplace_back(sym, 1e-6);
      ++gi;
    }
  };

  emit(t);
  const double t_end = t_grid.empty() ? 0.0 : t_grid.back();
  while (t < t_end - eps) {
    // classic RK4 with the Hamiltonian at t, t + dt/2 and t + dt
    Operator k1 = rhs(rho, t);
    Operator k2 = rhs(rho + 0.5 * dt * k1, t + 0.5 * dt);
    Operator k3 = rhs(rho + 0.5 * dt * k2, t + 0.5 * dt);
    Operator k4 = rhs(rho + dt * k3, t + dt);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += dt;
    emit(t);
  }
  return out;
}

DensityMatrix steady_state(const Operator& h,
                           const std::vector<RateOperator>& dissipators) {
  const Eigen::Index d = h.rows();
  const Eigen::Index d2 = d * d;
  // column-major vectorization: L = -i(I (x) H - H^T (x) I) + dissipators
  Operator liou = Operator::Zero(d2, d2);
  auto kron_into = [&](const Operator& a, const Operator& b, Complex w) {
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        if (a(i, j) == Complex(0.0)) continue;
        liou.block(i * d, j * d, d, d) += w * a(i, j) * b;
      }
    }
  };
  const Operator id = Operator::Identity(d, d);
  kron_into(id, h, -kI);
  kron_into(h.transpose(), id, kI);
  for (const auto& [rate, a] : dissipators) {
    Operator ada = a.adjoint() * a;
    kron_into(a.conjugate(), a, rate);
    kron_into(id, ada, -0.5 * rate);
    kron_into(ada.transpose(), id, -0.5 * rate);
  }

  Eigen::FullPivLU<Operator> lu(liou);
  lu.setThreshold(1e-9 * liou.cwiseAbs().maxCoeff());
  if (lu.dimensionOfKernel() != 1) {
    throw std::runtime_error("steady_state: Liouvillian null space is not "
                             "one-dimensional");
  }
  Vec v = lu.kernel().col(0);
  Operator rho = Eigen::Map<Operator>(v.data(), d, d);
  rho = 0.5 * (rho + rho.adjoint());
  Complex tr = rho.trace();
  if (std::abs(tr) < 1e-12) {
    throw std::runtime_error("steady_state: traceless kernel vector");
  }
  rho /= tr;
  return DensityMatrix(rho, 1e-7);
}

Complex reflection_coefficient(const SystemParams& params, double omega_drive,
                               double omega_rabi, int n) {
  if (omega_rabi <= 0.0) {
    throw std::invalid_argument("reflection_coefficient: Omega must be > 0");
  }
  PauliOps p = pauli_ops();
  const double detuning = omega_drive - (0.0 - n * params.chi);  // vs wq - n chi
  Operator excited = 0.5 * (Operator::Identity(2, 2) + p.sz);
  Operator h = -detuning * excited + (omega_rabi / 4.0) * p.sx;
  DensityMatrix ss = steady_state(h, {{1.0 / params.t_q, p.sm}});
  Complex sm = expectation(ss, p.sm);
  // <a_in> = -i Omega sqrt(T_q) / 4 pins r -> -1 on resonance for a purely
  // radiative qubit at weak drive.
  return 1.0 - sm * 4.0 * kI / (omega_rabi * params.t_q);
}

std::vector<DensityMatrix> evolve_cavity_kerr(const DensityMatrix& rho0,
                                              const SystemParams& params,
                                              const std::vector<double>& t_grid,
                                              double dt) {
  const int nt = int(rho0.dim()) - 1;
  Operator a = annihilation_op(nt);
  Operator num = a.adjoint() * a;
  TimeDependentHamiltonian h;
  h.static_part = -params.chi_cc * (a.adjoint() * a.adjoint() * a * a);
  return evolve_lindblad(rho0, h, {{2.0 / params.t_c_phi, num}}, t_grid, dt);
}

TimeDependentHamiltonian joint_comb_hamiltonian(const SystemParams& params,
                                                const CombSpec& spec) {
  PauliOps p = pauli_ops();
  const int nt = params.n_trunc;
  Operator a = tensor_embed(annihilation_op(nt), Subsystem::cavity, nt);
  Operator num = a.adjoint() * a;
  Operator sz = tensor_embed(p.sz, Subsystem::qubit, nt);
  Operator sp = tensor_embed(p.sm.adjoint(), Subsystem::qubit, nt);

  TimeDependentHamiltonian h;
  const Eigen::Index d = sz.rows();
  h.static_part =
      -0.5 * params.chi * (Operator::Identity(d, d) + sz) * num;
  h.drive_op = sp;
  h.envelope = [spec](double t) {
    return Complex(0.0, -0.5) * comb_envelope(spec, t);
  };
  return h;
}

TimeDependentHamiltonian fixed_n_hamiltonian(const SystemParams& params,
                                             const CombSpec& spec, int n) {
  PauliOps p = pauli_ops();
  TimeDependentHamiltonian h;
  h.static_part = Operator::Zero(2, 2);
  h.static_part(1, 1) = params.omega_if + n * params.chi;
  // H_drive = env sigma+ + h.c. with env = (i/2) conj(w): the RWA image of
  // the lab-frame comb, so H_01 = -i w / 2.
  h.drive_op = p.sm.adjoint();
  const double omega_if = params.omega_if;
  h.envelope = [spec, omega_if](double t) {
    return Complex(0.0, 0.5) *
           std::conj(comb_waveform_low_if(spec, omega_if, t));
  };
  return h;
}

}  // namespace combmon
