#include "combmon/drive.hpp"

#include <cmath>

namespace combmon {

void CombSpec::validate() const {
  if (k_teeth < 0) throw std::invalid_argument("CombSpec: K must be >= 0");
  if (omega < 0.0) {
    throw std::invalid_argument("CombSpec: Omega must be >= 0");
  }
  if (delta_omega <= 0.0) {
    throw std::invalid_argument("CombSpec: delta_omega must be > 0");
  }
  if (duration > 0.0) {
    const double periods = duration / period();
    if (std::abs(periods - std::round(periods)) > 1e-9 * periods) {
      throw std::invalid_argument(
          "CombSpec: duration must be a multiple of the comb period");
    }
  }
}

double dirichlet_kernel(int k_teeth, double delta_omega, double t) {
  const double x = 0.5 * delta_omega * t;
  const double denom = std::sin(x);
  const int n = 2 * k_teeth + 1;
  if (std::abs(denom) < 1e-9) {
    // limit at multiples of the period; expand both sines to first order
    return double(n) * std::cos(n * x) / std::cos(x);
  }
  return std::sin(n * x) / denom;
}

Complex comb_envelope(const CombSpec& spec, double t) {
  return spec.omega * std::exp(Complex(0.0, spec.center_offset * t)) *
         dirichlet_kernel(spec.k_teeth, spec.delta_omega, t);
}

double kick_angle(const CombSpec& spec) {
  return 2.0 * M_PI * spec.omega / spec.delta_omega;
}

CombSpec standard_comb(double theta, double chi) {
  CombSpec spec;
  spec.delta_omega = 2.0 * chi;
  spec.omega = theta * spec.delta_omega / (2.0 * M_PI);  // = theta chi / pi
  spec.k_teeth = 10;
  spec.center_offset = -4.0 * chi;
  return spec;
}

Complex comb_waveform_low_if(const CombSpec& spec, double omega_if, double t) {
  // sum_k e^{i (omega_if + center + k dw) t}
  //   = exp(i (omega_if + center) t) * D_K(t)
  return spec.omega * dirichlet_kernel(spec.k_teeth, spec.delta_omega, t) *
         std::exp(Complex(0.0, (omega_if + spec.center_offset) * t));
}

}  // namespace combmon
