#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

// Operator algebra, states and phase-space functions on the truncated
// qubit (x) cavity Hilbert space. Ordering convention: qubit index slow,
// cavity index fast, so joint dim = 2*(n_trunc+1). Ground state |0> sits
// at qubit index 0 and sigma_z|0> = -|0>.
namespace combmon {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kHermTol = 1e-12;

bool is_hermitian(const Operator& a, double tol = kHermTol);

// Density matrix with validated invariants: unit trace, Hermiticity,
// positivity down to -tolerance on the smallest eigenvalue.
class DensityMatrix {
 public:
  explicit DensityMatrix(Operator op, double tolerance = 1e-9);

  const Operator& op() const { return op_; }
  double tolerance() const { return tol_; }
  Eigen::Index dim() const { return op_.rows(); }

 private:
  Operator op_;
  double tol_;
};

struct PauliOps {
  Operator sx, sy, sz, sm;
};

enum class Subsystem { qubit, cavity };

// Ladder operator a on a cavity truncated at n_trunc photons (dim n_trunc+1).
Operator annihilation_op(int n_trunc);

PauliOps pauli_ops();

// Embeds a subsystem operator into the joint space as a (x) 1 or 1 (x) a.
Operator tensor_embed(const Operator& a, Subsystem which, int n_trunc);

// Lindblad dissipator image D_A(rho) = A rho A+ - 1/2 {A+A, rho}.
Operator dissipator_apply(const Operator& a, const Operator& rho);

Complex expectation(const Operator& rho, const Operator& a);
inline Complex expectation(const DensityMatrix& rho, const Operator& a) {
  return expectation(rho.op(), a);
}

// State builders (cavity subspace, dim n_trunc+1).
Operator fock_state(int n, int n_trunc);
Operator coherent_state(Complex alpha, int n_trunc);

Operator displacement_op(Complex alpha, int n_trunc);
Operator parity_op(int n_trunc);

// Partial traces for the fixed qubit (x) cavity ordering.
Operator partial_trace_qubit(const Operator& rho_joint);   // -> cavity op
Operator partial_trace_cavity(const Operator& rho_joint);  // -> qubit op

// Square phase-space lattice alpha = x + i*y, x,y in [-extent, extent].
struct WignerGrid {
  double extent = 6.0;
  double step = 0.1;
  std::vector<double> axis() const;
};

struct WignerMap {
  WignerGrid grid;
  Eigen::MatrixXd values;  // values(i, j) = W(axis[j] + i*axis[i])
  bool coarse_grid_warning = false;
  double integral() const;  // quadrature-rule integral over the lattice
};

// W(alpha) = (2/pi) Tr[D(alpha) P D(-alpha) rho], P the photon parity.
// Normalized so the vacuum peaks at 2/pi and the map integrates to 1.
WignerMap wigner_map(const DensityMatrix& rho_cavity, const WignerGrid& grid);

// Fock occupation from the overlap P_k = pi * Int W_rho W_|k><k| d2a.
double fock_prob_from_wigner(const WignerMap& w, int k);

// Closed-form Wigner map of |k><k|: (2/pi)(-1)^k exp(-2|a|^2) L_k(4|a|^2).
double wigner_fock(int k, Complex alpha);

}  // namespace combmon
