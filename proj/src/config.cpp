#include "combmon/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace combmon {

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::fock_fluorescence: return "fock-fluorescence";
    case Experiment::jump_track: return "jump-track";
    case Experiment::rates: return "rates";
    case Experiment::dephasing: return "dephasing";
    case Experiment::confidence_time: return "confidence-time";
  }
  return "?";
}

std::optional<Experiment> parse_experiment(const std::string& name) {
  for (Experiment e : {Experiment::fock_fluorescence, Experiment::jump_track,
                       Experiment::rates, Experiment::dephasing,
                       Experiment::confidence_time}) {
    if (experiment_name(e) == name) return e;
  }
  return std::nullopt;
}

CombSpec RunConfig::comb() const {
  CombSpec spec = standard_comb(theta, params.chi);
  spec.k_teeth = comb_k_teeth;
  return spec;
}

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  if (name == "paper") {
    c.params = SystemParams::paper();
    c.n_trajectories = 10000;
  } else if (name == "paper_t22") {
    c.params = SystemParams::paper_t22();
    c.n_trajectories = 10000;
  } else if (name == "fast") {
    c.params = SystemParams::paper();
    c.n_trajectories = 200;
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  c.preset = name;
  return c;
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  try {
    size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_u64(const std::string& s, uint64_t& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto res = std::from_chars(b, e, out);
  return res.ec == std::errc() && res.ptr == e;
}

}  // namespace

ConfigResult validate_config(const std::string& text,
                             const std::string& preset) {
  ConfigResult out;
  RunConfig c;
  try {
    c = preset_config(preset);
  } catch (const std::exception& ex) {
    out.errors.push_back(ex.what());
    return out;
  }

  // first pass: an explicit preset line rebases the defaults
  std::istringstream pre(text);
  std::string line;
  while (std::getline(pre, line)) {
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.rfind("preset", 0) == 0) {
      const size_t eq = t.find('=');
      if (eq != std::string::npos) {
        try {
          c = preset_config(trim(t.substr(eq + 1)));
        } catch (const std::exception& ex) {
          out.errors.push_back(std::string("preset: ") + ex.what());
        }
      }
    }
  }

  std::istringstream is(text);
  std::string section;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        out.errors.push_back("line " + std::to_string(line_no) +
                             ": malformed section header");
        continue;
      }
      section = trim(t.substr(1, t.size() - 2));
      if (section != "params" && section != "comb" && section != "tolerances") {
        out.errors.push_back("unknown section [" + section + "]");
      }
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos) {
      out.errors.push_back("line " + std::to_string(line_no) +
                           ": expected key = value");
      continue;
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    auto need_double = [&](double& dst) {
      double v;
      if (parse_double(val, v)) {
        dst = v;
      } else {
        out.errors.push_back(section.empty()
                                 ? key + ": not a number"
                                 : section + "." + key + ": not a number");
      }
    };
    auto need_int = [&](int& dst) {
      double v;
      if (parse_double(val, v) && v == std::floor(v)) {
        dst = int(v);
      } else {
        out.errors.push_back(section + "." + key + ": not an integer");
      }
    };

    if (section.empty()) {
      if (key == "schema") {
        double v;
        if (!parse_double(val, v) || int(v) != 1) {
          out.errors.push_back("schema: unsupported version " + val);
        }
      } else if (key == "preset") {
        // handled in the first pass
      } else if (key == "experiment") {
        auto e = parse_experiment(val);
        if (e) {
          c.experiment = *e;
        } else {
          out.errors.push_back("experiment: unknown value " + val);
        }
      } else if (key == "seed") {
        uint64_t s;
        if (parse_u64(val, s)) {
          c.seed = s;
          c.has_seed = true;
        } else {
          out.errors.push_back("seed: not a 64-bit unsigned integer");
        }
      } else if (key == "output_dir") {
        c.output_dir = val;
      } else if (key == "n_trajectories") {
        double v;
        if (parse_double(val, v) && v == std::floor(v) && v > 0) {
          c.n_trajectories = int(v);
        } else {
          out.errors.push_back("n_trajectories: not a positive integer");
        }
      } else if (key == "theta") {
        need_double(c.theta);
      } else {
        out.errors.push_back("unknown key: " + key);
      }
    } else if (section == "params") {
      if (key == "chi_mhz") {
        double v = 0;
        need_double(v);
        if (v != 0) c.params.chi = 2.0 * M_PI * v;
      } else if (key == "t_q_us") {
        need_double(c.params.t_q);
      } else if (key == "t_c_us") {
        need_double(c.params.t_c);
      } else if (key == "t_c_phi_us") {
        need_double(c.params.t_c_phi);
      } else if (key == "chi_cc_mhz") {
        double v = 0;
        need_double(v);
        c.params.chi_cc = 2.0 * M_PI * v;
      } else if (key == "eta") {
        need_double(c.params.eta);
      } else if (key == "omega_if_mhz") {
        double v = 0;
        need_double(v);
        if (v != 0) c.params.omega_if = 2.0 * M_PI * v;
      } else if (key == "n_max") {
        need_int(c.params.n_max);
      } else if (key == "n_trunc") {
        need_int(c.params.n_trunc);
      } else {
        out.errors.push_back("params: unknown key " + key);
      }
    } else if (section == "comb") {
      if (key == "k_teeth") {
        need_int(c.comb_k_teeth);
      } else if (key == "delta_omega_over_chi") {
        double v = 0;
        need_double(v);
        if (v != 0 && std::abs(v - 2.0) > 1e-12) {
          out.errors.push_back(
              "comb.delta_omega_over_chi: only the standard spacing 2 is "
              "supported");
        }
      } else {
        out.errors.push_back("comb: unknown key " + key);
      }
    } else if (section == "tolerances") {
      double v = 0;
      need_double(v);
      c.tolerances[key] = v;
    }
  }

  // field ranges
  if (c.params.eta < 0.0 || c.params.eta > 1.0) {
    out.errors.push_back("params.eta: must lie in [0, 1]");
  }
  if (c.params.chi <= 0.0) out.errors.push_back("params.chi_mhz: must be > 0");
  if (c.params.t_q <= 0.0) out.errors.push_back("params.t_q_us: must be > 0");
  if (c.params.t_c <= 0.0) out.errors.push_back("params.t_c_us: must be > 0");
  if (c.params.t_c_phi <= 0.0) {
    out.errors.push_back("params.t_c_phi_us: must be > 0");
  }
  if (c.params.n_max < 1 || c.params.n_trunc < c.params.n_max) {
    out.errors.push_back("params.n_trunc: need n_trunc >= n_max >= 1");
  }
  if (c.comb_k_teeth < 1) out.errors.push_back("comb.k_teeth: must be >= 1");
  if (c.theta <= 0.0 || c.theta >= 2.0 * M_PI) {
    out.errors.push_back("theta: must lie in (0, 2 pi)");
  }
  if (!c.has_seed) {
    out.errors.push_back("seed: required (runs never seed from the clock)");
  }

  if (out.errors.empty()) out.config = c;
  return out;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "schema = " << c.schema << "\n";
  os << "preset = " << c.preset << "\n";
  os << "experiment = " << experiment_name(c.experiment) << "\n";
  os << "seed = " << c.seed << "\n";
  os << "output_dir = " << c.output_dir << "\n";
  os << "n_trajectories = " << c.n_trajectories << "\n";
  os << "theta = " << c.theta << "\n";
  os << "[params]\n";
  os << "chi_mhz = " << c.params.chi / (2.0 * M_PI) << "\n";
  os << "t_q_us = " << c.params.t_q << "\n";
  os << "t_c_us = " << c.params.t_c << "\n";
  os << "t_c_phi_us = " << c.params.t_c_phi << "\n";
  os << "chi_cc_mhz = " << c.params.chi_cc / (2.0 * M_PI) << "\n";
  os << "eta = " << c.params.eta << "\n";
  os << "omega_if_mhz = " << c.params.omega_if / (2.0 * M_PI) << "\n";
  os << "n_max = " << c.params.n_max << "\n";
  os << "n_trunc = " << c.params.n_trunc << "\n";
  os << "[comb]\n";
  os << "k_teeth = " << c.comb_k_teeth << "\n";
  if (!c.tolerances.empty()) {
    os << "[tolerances]\n";
    for (const auto& [k, v] : c.tolerances) os << k << " = " << v << "\n";
  }
  return os.str();
}

uint64_t config_hash(const RunConfig& c) {
  const std::string s = serialize_config(c);
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace combmon
