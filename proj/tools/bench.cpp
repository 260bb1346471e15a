// Benchmark: parallel ensemble kernel vs the serial reference path.
// Both paths must produce identical bytes; the benchmark asserts that
// while timing them.
#include <chrono>
#include <cstdint>
#include <cstring>
#include <iostream>

#include "combmon/parallel.hpp"
#include "combmon/trajectories.hpp"

using Clock = std::chrono::steady_clock;

int main(int argc, char** argv) {
  int n_traj = 256;
  if (argc > 1) n_traj = std::atoi(argv[1]);
  const uint64_t seed = 1234;

  combmon::SystemParams params = combmon::SystemParams::paper();
  const combmon::CombSpec comb =
      combmon::standard_comb(M_PI / 2, params.chi);
  const int n_periods = 21;

  auto time_run = [&](bool serial) {
    const auto start = Clock::now();
    std::vector<double> mean = combmon::ensemble_mean_record(
        params, comb, 1, n_periods, n_traj, seed, serial);
    const double s = std::chrono::duration<double>(Clock::now() - start).count();
    return std::make_pair(s, mean);
  };

  auto [t_warm, warm] = time_run(false);  // warm caches/threads
  auto [t_par, par] = time_run(false);
  auto [t_ser, ser] = time_run(true);

  const bool identical =
      par.size() == ser.size() &&
      std::memcmp(par.data(), ser.data(), par.size() * sizeof(double)) == 0;

  std::cout << "trajectories:      " << n_traj << "\n"
            << "serial reference:  " << t_ser << " s\n"
            << "parallel kernel:   " << t_par << " s\n"
            << "speedup:           " << t_ser / t_par << "x\n"
            << "bit-identical:     " << (identical ? "yes" : "NO") << "\n";
  return identical ? 0 : 1;
}
