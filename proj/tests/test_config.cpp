#include <doctest.h>

#include <algorithm>

#include "combmon/config.hpp"

using namespace combmon;

namespace {

bool has_error(const ConfigResult& r, const std::string& needle) {
  return std::any_of(r.errors.begin(), r.errors.end(),
                     [&](const std::string& e) {
                       return e.find(needle) != std::string::npos;
                     });
}

}  // namespace

TEST_CASE("presets") {
  RunConfig paper = preset_config("paper");
  CHECK(paper.params.t_q == doctest::Approx(0.023));
  CHECK(paper.n_trajectories == 10000);
  RunConfig t22 = preset_config("paper_t22");
  CHECK(t22.params.t_q == doctest::Approx(0.022));
  RunConfig fast = preset_config("fast");
  CHECK(fast.n_trajectories == 200);
  CHECK_THROWS(preset_config("nope"));
  // standard comb geometry is wired through
  const CombSpec comb = paper.comb();
  CHECK(comb.delta_omega == doctest::Approx(2.0 * paper.params.chi));
  CHECK(kick_angle(comb) == doctest::Approx(paper.theta));
}

TEST_CASE("serialize / validate round trip is exact") {
  RunConfig c = preset_config("paper");
  c.seed = 0xDEADBEEFCAFEF00DULL;
  c.has_seed = true;
  c.theta = 1.1780972450961724;
  c.experiment = Experiment::jump_track;
  c.n_trajectories = 777;
  c.output_dir = "elsewhere";
  c.params.eta = 0.185;

  ConfigResult parsed = validate_config(serialize_config(c));
  REQUIRE(parsed.errors.empty());
  REQUIRE(parsed.config.has_value());
  CHECK(serialize_config(*parsed.config) == serialize_config(c));
  CHECK(config_hash(*parsed.config) == config_hash(c));
  CHECK(parsed.config->seed == c.seed);
  CHECK(parsed.config->theta == c.theta);  // bitwise, precision-17 text
  CHECK(parsed.config->experiment == Experiment::jump_track);
}

TEST_CASE("a minimal config picks up preset defaults") {
  ConfigResult r = validate_config("seed = 42\n", "fast");
  REQUIRE(r.config.has_value());
  CHECK(r.config->seed == 42);
  CHECK(r.config->n_trajectories == 200);
  CHECK(r.config->params.chi == doctest::Approx(2.0 * M_PI * 5.25));
}

TEST_CASE("an explicit preset line beats the argument") {
  ConfigResult r = validate_config("preset = fast\nseed = 1\n", "paper");
  REQUIRE(r.config.has_value());
  CHECK(r.config->n_trajectories == 200);
}

TEST_CASE("rejection: unknown keys, missing seed, bad ranges") {
  CHECK(has_error(validate_config("seed = 1\nbogus = 2\n"), "unknown key"));
  CHECK(has_error(validate_config("seed = 1\n[weird]\nx = 1\n"),
                  "unknown section"));
  CHECK(has_error(validate_config(""), "seed: required"));
  CHECK(has_error(validate_config("seed = 1\n[params]\neta = 1.5\n"),
                  "params.eta: must lie in [0, 1]"));
  CHECK(has_error(validate_config("seed = 1\ntheta = 7.0\n"),
                  "theta: must lie in (0, 2 pi)"));
  CHECK(has_error(validate_config("seed = 1\nexperiment = frobnicate\n"),
                  "experiment: unknown value"));
  CHECK(has_error(
      validate_config("seed = 1\n[params]\nn_max = 9\nn_trunc = 5\n"),
      "n_trunc >= n_max"));
  // all errors are collected, not just the first
  ConfigResult multi =
      validate_config("bogus = 1\n[params]\neta = -2\n");
  CHECK(multi.errors.size() >= 3);
  CHECK(!multi.config.has_value());
}

TEST_CASE("experiment names round trip") {
  for (Experiment e :
       {Experiment::fock_fluorescence, Experiment::jump_track,
        Experiment::rates, Experiment::dephasing,
        Experiment::confidence_time}) {
    auto back = parse_experiment(experiment_name(e));
    REQUIRE(back.has_value());
    CHECK(*back == e);
  }
  CHECK(!parse_experiment("unknown").has_value());
}
