#include <doctest.h>

#include <vector>

#include "l2go/agd.hpp"
#include "l2go/bench.hpp"
#include "l2go/parallel.hpp"
#include "l2go/policy.hpp"
#include "l2go/presets.hpp"
#include "l2go/rng.hpp"

using namespace l2go;

TEST_SUITE("parallel") {

TEST_CASE("parallel_for fills slots identically to the serial loop") {
  const std::size_t n = 1000;
  std::vector<double> serial(n), parallel(n);
  auto body = [](std::size_t i) {
    auto rng = make_rng(1234, i);
    return gaussian_vector(rng, 4).sum();
  };
  parallel_for(n, [&](std::size_t i) { serial[i] = body(i); }, Exec::serial);
  parallel_for(n, [&](std::size_t i) { parallel[i] = body(i); }, Exec::parallel);
  CHECK(serial == parallel);
}

TEST_CASE("training loss is identical under both execution modes") {
  auto rng = make_rng(71, 0);
  const auto cases = make_gaussian_training_set(rng, 3, 4, 2, 2.0, 50.0, 3.0);
  const DNetParams params = DNetParams::defaults(5);
  CHECK(dnet_loss(cases, params, Exec::serial) ==
        dnet_loss(cases, params, Exec::parallel));
}

TEST_CASE("escape benchmarks are identical under both execution modes") {
  EscapeBenchConfig config;
  config.objective = {{"family", "preset"}, {"name", "escape_mixture_2d"}};
  config.runs = 10;
  config.seed = 5;
  config.escape.M = 12.0;
  config.exec = Exec::serial;
  const EscapeBenchResult serial = run_escape_benchmark(config);
  config.exec = Exec::parallel;
  const EscapeBenchResult parallel = run_escape_benchmark(config);
  REQUIRE(serial.raw.size() == parallel.raw.size());
  for (const auto& [name, samples] : serial.raw) {
    CHECK(samples == parallel.raw.at(name));
  }
}

TEST_CASE("policy training is identical under both execution modes") {
  auto f = make_preset("escape_mixture_2d", 0);
  const Vector x0 = refine_minimizer(*f, Vector::Zero(2));
  EscapeConfig cfg;
  cfg.M = 12.0;
  RLConfig rl;
  rl.E = 2;
  rl.N_T = 4;
  rl.P = 5;
  rl.exec = Exec::serial;
  const PolicyTrainResult serial = train_policy(*f, x0, cfg, rl, ScorerKind::fast, 3);
  rl.exec = Exec::parallel;
  const PolicyTrainResult parallel = train_policy(*f, x0, cfg, rl, ScorerKind::fast, 3);
  CHECK(serial.net == parallel.net);
  CHECK(serial.epoch_mean_reward == parallel.epoch_mean_reward);
}

}  // TEST_SUITE
