#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "srmax/ao_solver.hpp"
#include "srmax/batch.hpp"

using namespace srmax;

TEST_CASE("results come back in index order") {
  auto out = run_indexed<std::size_t>(64, [](std::size_t i) { return i * i; }, true);
  REQUIRE(out.size() == 64);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == i * i);
}

TEST_CASE("parallel pool reproduces the serial reference bit for bit") {
  auto task = [](std::size_t t) {
    ScenarioConfig config = make_uniform_config(6, 2, 2, 0.0, 500 + t);
    return solve(config, generate_channels(config)).first.sum_rate;
  };
  auto serial = run_indexed<double>(16, task, false);
  auto parallel = run_indexed<double>(16, task, true);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i] == parallel[i]);
  }
}

TEST_CASE("worker exceptions propagate") {
  auto task = [](std::size_t i) -> int {
    if (i == 7) throw std::runtime_error("boom");
    return static_cast<int>(i);
  };
  CHECK_THROWS_AS(run_indexed<int>(16, task, true), std::runtime_error);
  CHECK_THROWS_AS(run_indexed<int>(16, task, false), std::runtime_error);
}
