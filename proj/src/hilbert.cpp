#include "combmon/hilbert.hpp"

#include <cmath>

namespace combmon {

namespace {
const Complex kI(0.0, 1.0);
}

bool is_hermitian(const Operator& a, double tol) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff() < tol;
}

DensityMatrix::DensityMatrix(Operator op, double tolerance)
    : op_(std::move(op)), tol_(tolerance) {
  if (op_.rows() != op_.cols()) {
    throw std::invalid_argument("DensityMatrix: matrix not square");
  }
  if (std::abs(op_.trace() - Complex(1.0)) > tol_) {
    throw std::invalid_argument("DensityMatrix: trace deviates from 1 by " +
                                std::to_string(std::abs(op_.trace() - Complex(1.0))));
  }
  if (!is_hermitian(op_, 1e-10)) {
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Operator> es(op_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol_) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                std::to_string(es.eigenvalues().minCoeff()));
  }
}

Operator annihilation_op(int n_trunc) {
  if (n_trunc < 1) {
    throw std::invalid_argument("annihilation_op: n_trunc must be >= 1");
  }
  Operator a = Operator::Zero(n_trunc + 1, n_trunc + 1);
  for (int k = 0; k < n_trunc; ++k) {
    a(k, k + 1) = std::sqrt(double(k + 1));
  }
  return a;
}

PauliOps pauli_ops() {
  PauliOps p;
  p.sx = Operator::Zero(2, 2);
  p.sx(0, 1) = 1.0;
  p.sx(1, 0) = 1.0;
  p.sy = Operator::Zero(2, 2);
  p.sy(0, 1) = kI;
  p.sy(1, 0) = -kI;
  p.sz = Operator::Zero(2, 2);
  p.sz(0, 0) = -1.0;
  p.sz(1, 1) = 1.0;
  p.sm = (p.sx - kI * p.sy) / 2.0;
  return p;
}

namespace {
Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}
}  // namespace

Operator tensor_embed(const Operator& a, Subsystem which, int n_trunc) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("tensor_embed: operator not square");
  }
  const int nc = n_trunc + 1;
  if (which == Subsystem::qubit) {
    if (a.rows() != 2) {
      throw std::invalid_argument("tensor_embed: qubit operator must be 2x2");
    }
    return kron(a, Operator::Identity(nc, nc));
  }
  if (a.rows() != nc) {
    throw std::invalid_argument("tensor_embed: cavity operator dim mismatch");
  }
  return kron(Operator::Identity(2, 2), a);
}

Operator dissipator_apply(const Operator& a, const Operator& rho) {
  if (a.rows() != rho.rows()) {
    throw std::invalid_argument("dissipator_apply: dimension mismatch");
  }
  Operator ada = a.adjoint() * a;
  return a * rho * a.adjoint() - 0.5 * (ada * rho + rho * ada);
}

Complex expectation(const Operator& rho, const Operator& a) {
  if (a.rows() != rho.rows()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  return (rho * a).trace();
}

Operator fock_state(int n, int n_trunc) {
  Operator rho = Operator::Zero(n_trunc + 1, n_trunc + 1);
  rho(n, n) = 1.0;
  return rho;
}

Operator coherent_state(Complex alpha, int n_trunc) {
  Vec psi(n_trunc + 1);
  psi(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= n_trunc; ++n) {
    psi(n) = psi(n - 1) * alpha / std::sqrt(double(n));
  }
  psi.normalize();  // reabsorb truncation loss
  return psi * psi.adjoint();
}

Operator displacement_op(Complex alpha, int n_trunc) {
  // D(alpha) = exp(alpha a+ - alpha* a), via the Hermitian eigendecomposition
  // of i(alpha a+ - alpha* a).
  Operator a = annihilation_op(n_trunc);
  Operator gen = alpha * a.adjoint() - std::conj(alpha) * a;  // anti-Hermitian
  Eigen::SelfAdjointEigenSolver<Operator> es(kI * gen);
  Vec phases = (-kI * es.eigenvalues().cast<Complex>().array()).exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Operator parity_op(int n_trunc) {
  Operator p = Operator::Zero(n_trunc + 1, n_trunc + 1);
  for (int n = 0; n <= n_trunc; ++n) {
    p(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
  }
  return p;
}

Operator partial_trace_qubit(const Operator& rho_joint) {
  const Eigen::Index nc = rho_joint.rows() / 2;
  return rho_joint.topLeftCorner(nc, nc) + rho_joint.bottomRightCorner(nc, nc);
}

Operator partial_trace_cavity(const Operator& rho_joint) {
  const Eigen::Index nc = rho_joint.rows() / 2;
  Operator out = Operator::Zero(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out(i, j) = rho_joint.block(i * nc, j * nc, nc, nc).trace();
    }
  }
  return out;
}

std::vector<double> WignerGrid::axis() const {
  std::vector<double> xs;
  for (double x = -extent; x <= extent + 0.5 * step; x += step) {
    xs.push_back(x);
  }
  return xs;
}

double WignerMap::integral() const {
  return values.sum() * grid.step * grid.step;
}

WignerMap wigner_map(const DensityMatrix& rho_cavity, const WignerGrid& grid) {
  const int n_trunc = int(rho_cavity.dim()) - 1;
  const Operator parity = parity_op(n_trunc);
  const auto xs = grid.axis();
  const int n = int(xs.size());

  WignerMap w;
  w.grid = grid;
  w.values.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Complex alpha(xs[j], xs[i]);
      Operator d = displacement_op(alpha, n_trunc);
      Complex val = (d * parity * d.adjoint() * rho_cavity.op()).trace();
      w.values(i, j) = (2.0 / M_PI) * val.real();
    }
  }
  // The map should cover the state's support and resolve its fringes.
  w.coarse_grid_warning =
      grid.step > 0.25 || grid.extent < std::sqrt(double(n_trunc)) ||
      std::abs(w.integral() - 1.0) > 1e-2;
  return w;
}

double wigner_fock(int k, Complex alpha) {
  const double x = 4.0 * std::norm(alpha);
  // Laguerre recurrence L_0 = 1, L_1 = 1 - x.
  double lm1 = 1.0, l = 1.0 - x;
  if (k == 0) l = lm1;
  for (int j = 2; j <= k; ++j) {
    double next = ((2.0 * j - 1.0 - x) * l - (j - 1.0) * lm1) / double(j);
    lm1 = l;
    l = next;
  }
  double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return (2.0 / M_PI) * sign * std::exp(-2.0 * std::norm(alpha)) * l;
}

double fock_prob_from_wigner(const WignerMap& w, int k) {
  const auto xs = w.grid.axis();
  const int n = int(xs.size());
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      acc += w.values(i, j) * wigner_fock(k, Complex(xs[j], xs[i]));
    }
  }
  return M_PI * acc * w.grid.step * w.grid.step;
}

}  // namespace combmon
