#include "combmon/signal.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "json.hpp"

namespace combmon {

void TemplateBank::validate() const {
  if (templates.empty()) throw std::invalid_argument("TemplateBank: empty");
  const size_t len = templates.front().size();
  for (const auto& t : templates) {
    if (t.size() != len) {
      throw std::invalid_argument("TemplateBank: ragged templates");
    }
  }
  if (gram.rows() != n_states() || gram.cols() != n_states()) {
    throw std::invalid_argument("TemplateBank: Gram size mismatch");
  }
  if (!split_half) {
    if (!gram.isApprox(gram.transpose(), 1e-9)) {
      throw std::invalid_argument("TemplateBank: Gram not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    if (es.eigenvalues().minCoeff() < -1e-9 * std::abs(es.eigenvalues().maxCoeff())) {
      throw std::invalid_argument("TemplateBank: Gram not PSD");
    }
  }
  if (std::abs(len * sample_dt - tau) > 1e-6 * tau) {
    throw std::invalid_argument("TemplateBank: tau != length * dt");
  }
}

std::vector<Complex> analytic_signal(const std::vector<double>& x) {
  const int n = int(x.size());
  if (n < 4) throw std::invalid_argument("analytic_signal: need length >= 4");
  Eigen::FFT<double> fft;
  std::vector<Complex> freq(n), in(n), out(n);
  for (int i = 0; i < n; ++i) in[i] = x[i];
  fft.fwd(freq, in);
  // keep DC and (for even n) Nyquist, double the interior positive band,
  // drop the negative band
  const int half = n / 2;
  for (int k = 1; k < half; ++k) freq[k] *= 2.0;
  if (n % 2 == 1) freq[half] *= 2.0;
  for (int k = half + 1; k < n; ++k) freq[k] = 0.0;
  fft.inv(out, freq);
  return out;
}

std::pair<std::vector<double>, std::vector<double>> demodulate_quadratures(
    const std::vector<double>& v, double dt, int n, const SystemParams& params,
    double phase) {
  const double omega = params.omega_if + n * params.chi;
  if (M_PI / dt <= omega) {
    throw std::invalid_argument("demodulate_quadratures: undersampled input");
  }
  std::vector<Complex> z = analytic_signal(v);
  std::vector<double> i_out(v.size()), q_out(v.size());
  for (size_t k = 0; k < v.size(); ++k) {
    const Complex w = std::exp(Complex(0.0, -omega * k * dt + phase)) * z[k];
    i_out[k] = w.real();
    q_out[k] = -w.imag();
  }
  return {i_out, q_out};
}

double demodulation_phase(const std::vector<double>& v, double dt, int n,
                          const SystemParams& params) {
  const double omega = params.omega_if + n * params.chi;
  const size_t first_period =
      std::min(v.size(), size_t(std::lround(params.comb_period() / dt)));
  std::vector<Complex> z = analytic_signal(v);
  // I = Re(e^{i phi} u): the I energy is (1/2) sum |u|^2 + (1/2) Re(e^{2i phi}
  // sum u^2), maximal at phi = -arg(sum u^2) / 2
  Complex s = 0.0;
  for (size_t k = 0; k < first_period; ++k) {
    const Complex u = std::exp(Complex(0.0, -omega * k * dt)) * z[k];
    s += u * u;
  }
  return -0.5 * std::arg(s);
}

OutcomeVector matched_filter_outcomes(const VoltageRecord& v,
                                      const TemplateBank& bank) {
  const size_t len = bank.templates.front().size();
  if (v.samples.size() != len) {
    throw std::invalid_argument(
        "matched_filter_outcomes: window length != tau / dt");
  }
  if (std::abs(v.dt - bank.sample_dt) > 1e-9 * bank.sample_dt) {
    throw std::invalid_argument(
        "matched_filter_outcomes: sample grid misaligned with templates");
  }
  OutcomeVector out;
  out.tau = bank.tau;
  out.t = bank.tau;
  out.m.resize(bank.n_states());
  for (int j = 0; j < bank.n_states(); ++j) {
    double acc = 0.0, comp = 0.0;  // Kahan
    const auto& tpl = bank.templates[j];
    for (size_t k = 0; k < len; ++k) {
      const double term = v.samples[k] * tpl[k] - comp;
      const double next = acc + term;
      comp = (next - acc) - term;
      acc = next;
    }
    out.m(j) = acc * v.dt;
  }
  return out;
}

Eigen::MatrixXd gram_matrix(const std::vector<std::vector<double>>& templates,
                            double dt) {
  const int n = int(templates.size());
  Eigen::MatrixXd g(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      double acc = 0.0;
      for (size_t k = 0; k < templates[a].size(); ++k) {
        acc += templates[a][k] * templates[b][k];
      }
      g(a, b) = g(b, a) = acc * dt;
    }
  }
  return g;
}

namespace {

std::vector<double> mean_of(const std::vector<std::vector<double>>& records,
                            size_t begin, size_t end) {
  std::vector<double> mean(records.front().size(), 0.0);
  for (size_t r = begin; r < end; ++r) {
    for (size_t k = 0; k < mean.size(); ++k) mean[k] += records[r][k];
  }
  for (double& v : mean) v /= double(end - begin);
  return mean;
}

}  // namespace

Eigen::MatrixXd gram_matrix_split(
    const std::vector<std::vector<std::vector<double>>>& records_per_n,
    double dt) {
  const int n = int(records_per_n.size());
  std::vector<std::vector<double>> half_a(n), half_b(n);
  for (int j = 0; j < n; ++j) {
    const auto& recs = records_per_n[j];
    if (recs.size() < 2) {
      throw std::invalid_argument("gram_matrix_split: need >= 2 records per n");
    }
    half_a[j] = mean_of(recs, 0, recs.size() / 2);
    half_b[j] = mean_of(recs, recs.size() / 2, recs.size());
  }
  Eigen::MatrixXd g(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      double acc = 0.0;
      for (size_t k = 0; k < half_a[a].size(); ++k) {
        acc += half_a[a][k] * half_b[b][k];
      }
      g(a, b) = acc * dt;
    }
  }
  return 0.5 * (g + g.transpose());
}

GramInverse invert_gram(const Eigen::MatrixXd& gram) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 0.0) {
    throw std::invalid_argument("invert_gram: zero Gram matrix");
  }
  GramInverse out;
  out.condition = sv(0) / std::max(sv(sv.size() - 1), 1e-300);
  const double cutoff = sv(0) * 1e-12;
  Eigen::VectorXd inv_sv(sv.size());
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > cutoff) {
      inv_sv(k) = 1.0 / sv(k);
    } else {
      inv_sv(k) = 0.0;
      out.pseudo = true;
    }
  }
  out.inv = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
  return out;
}

Eigen::VectorXd normalized_outcomes(const OutcomeVector& m,
                                    const GramInverse& ginv) {
  return ginv.inv * m.m;
}

CovarianceSet covariance_matrices(
    const std::vector<std::vector<std::vector<double>>>& records_per_n,
    const TemplateBank& bank) {
  const int n = bank.n_states();
  CovarianceSet out;
  out.sigma.reserve(records_per_n.size());
  for (const auto& recs : records_per_n) {
    if (recs.size() < 2) {
      throw std::invalid_argument("covariance_matrices: need >= 2 records");
    }
    if (recs.size() < 100) out.wide_uncertainty = true;
    Eigen::MatrixXd samples(recs.size(), n);
    VoltageRecord v;
    v.dt = bank.sample_dt;
    for (size_t r = 0; r < recs.size(); ++r) {
      v.samples = recs[r];
      samples.row(r) = matched_filter_outcomes(v, bank).m.transpose();
    }
    Eigen::RowVectorXd mean = samples.colwise().mean();
    Eigen::MatrixXd centered = samples.rowwise() - mean;
    out.sigma.push_back(centered.transpose() * centered /
                        double(recs.size() - 1));
  }
  return out;
}

TemplateBank build_template_bank(
    const std::vector<std::vector<std::vector<double>>>& records_per_n,
    double tau, double dt, bool split_half) {
  TemplateBank bank;
  bank.tau = tau;
  bank.sample_dt = dt;
  bank.split_half = split_half;
  for (const auto& recs : records_per_n) {
    if (recs.empty()) {
      throw std::invalid_argument("build_template_bank: empty class");
    }
    bank.templates.push_back(mean_of(recs, 0, recs.size()));
  }
  bank.gram = split_half ? gram_matrix_split(records_per_n, dt)
                         : gram_matrix(bank.templates, dt);
  bank.covariances = covariance_matrices(records_per_n, bank).sigma;
  return bank;
}

TemplateBank analytic_template_bank(const SystemParams& params,
                                    const CombSpec& spec, double tau) {
  SimGrid grid;
  const double period = params.comb_period();
  const double n_p = tau / period;
  if (std::abs(n_p - std::round(n_p)) > 1e-6 * std::max(1.0, n_p)) {
    throw std::invalid_argument(
        "analytic_template_bank: tau must be a multiple of pi/chi");
  }
  const int n_periods = int(std::round(n_p));
  TemplateBank bank;
  bank.tau = tau;
  bank.sample_dt = grid.sample_dt(params);
  bank.split_half = false;
  for (int n = 0; n <= params.n_max; ++n) {
    FixedNSimulator sim(params, spec, n, grid);
    bank.templates.push_back(sim.mean_record(n_periods));
  }
  bank.gram = gram_matrix(bank.templates, bank.sample_dt);
  return bank;
}

void attach_vacuum_covariances(TemplateBank& bank, double noise_variance) {
  // white record noise of per-sample variance s2: Cov(m_j, m_k) = s2 dt G_jk
  bank.covariances.assign(bank.n_states(),
                          noise_variance * bank.sample_dt * bank.gram);
}

namespace {
constexpr uint32_t kBankMagic = 0x434d424bu;  // "CMBK"
constexpr uint32_t kBankVersion = 1;

void write_u32(std::ostream& os, uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_f64(std::ostream& os, const double* p, size_t count) {
  os.write(reinterpret_cast<const char*>(p), sizeof(double) * count);
}
uint32_t read_u32(std::istream& is) {
  uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
void read_f64(std::istream& is, double* p, size_t count) {
  is.read(reinterpret_cast<char*>(p), sizeof(double) * count);
}
}  // namespace

void save_template_bank(const TemplateBank& bank, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_template_bank: cannot open " + path);
  const uint32_t n = uint32_t(bank.n_states());
  const uint32_t len = uint32_t(bank.templates.front().size());
  write_u32(os, kBankMagic);
  write_u32(os, kBankVersion);
  write_u32(os, n);
  write_u32(os, len);
  write_u32(os, bank.split_half ? 1 : 0);
  write_u32(os, uint32_t(bank.covariances.size()));
  write_f64(os, &bank.tau, 1);
  write_f64(os, &bank.sample_dt, 1);
  for (const auto& t : bank.templates) write_f64(os, t.data(), len);
  write_f64(os, bank.gram.data(), size_t(n) * n);
  for (const auto& s : bank.covariances) write_f64(os, s.data(), size_t(n) * n);
  if (!os) throw std::runtime_error("save_template_bank: write failed");

  nlohmann::json meta{{"format", "template-bank"},
                      {"version", kBankVersion},
                      {"n_templates", n},
                      {"template_length", len},
                      {"tau_us", bank.tau},
                      {"sample_dt_us", bank.sample_dt},
                      {"split_half", bank.split_half},
                      {"payload", "binary float64, column-major matrices"}};
  std::ofstream js(path + ".json");
  js << meta.dump(2) << "\n";
}

TemplateBank load_template_bank(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_template_bank: cannot open " + path);
  if (read_u32(is) != kBankMagic) {
    throw std::runtime_error("load_template_bank: bad magic");
  }
  if (read_u32(is) != kBankVersion) {
    throw std::runtime_error("load_template_bank: unsupported version");
  }
  const uint32_t n = read_u32(is);
  const uint32_t len = read_u32(is);
  TemplateBank bank;
  bank.split_half = read_u32(is) != 0;
  const uint32_t n_cov = read_u32(is);
  read_f64(is, &bank.tau, 1);
  read_f64(is, &bank.sample_dt, 1);
  bank.templates.assign(n, std::vector<double>(len));
  for (auto& t : bank.templates) read_f64(is, t.data(), len);
  bank.gram.resize(n, n);
  read_f64(is, bank.gram.data(), size_t(n) * n);
  bank.covariances.assign(n_cov, Eigen::MatrixXd(n, n));
  for (auto& s : bank.covariances) read_f64(is, s.data(), size_t(n) * n);
  if (!is) throw std::runtime_error("load_template_bank: truncated file");
  return bank;
}

void export_gram_csv(const TemplateBank& bank, const std::string& path) {
  std::ofstream os(path);
  os.precision(17);
  const int n = bank.n_states();
  os << "matrix,row";
  for (int j = 0; j < n; ++j) os << ",c" << j;
  os << "\n";
  for (int r = 0; r < n; ++r) {
    os << "G," << r;
    for (int c = 0; c < n; ++c) os << "," << bank.gram(r, c);
    os << "\n";
  }
  for (size_t s = 0; s < bank.covariances.size(); ++s) {
    for (int r = 0; r < n; ++r) {
      os << "Sigma" << s << "," << r;
      for (int c = 0; c < n; ++c) os << "," << bank.covariances[s](r, c);
      os << "\n";
    }
  }
}

}  // namespace combmon
