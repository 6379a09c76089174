// Compares the OpenMP worker pool against the serial reference on a batch of
// independent solves and verifies that both produce the same numbers.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "srmax/ao_solver.hpp"
#include "srmax/batch.hpp"

namespace {

double run_batch(arma::uword n_tx, arma::uword n_rx, arma::uword n_users, std::size_t trials,
                 bool parallel, std::vector<double>& rates) {
  auto start = std::chrono::steady_clock::now();
  rates = srmax::run_indexed<double>(
      trials,
      [&](std::size_t t) {
        srmax::ScenarioConfig config =
            srmax::make_uniform_config(n_tx, n_rx, n_users, 0.0, 1000 + t);
        return srmax::solve(config, srmax::generate_channels(config)).first.sum_rate;
      },
      parallel);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  arma::uword n_tx = 16, n_rx = 2, n_users = 2;
  std::size_t trials = 32;
  if (argc > 1) n_tx = std::stoul(argv[1]);
  if (argc > 2) trials = std::stoul(argv[2]);

#ifdef _OPENMP
  std::printf("threads available: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP, both runs are serial\n");
#endif
  std::printf("batch: %zu solves at N=%llu, M=%llu, K=%llu\n", trials,
              static_cast<unsigned long long>(n_tx), static_cast<unsigned long long>(n_rx),
              static_cast<unsigned long long>(n_users));

  std::vector<double> serial_rates, parallel_rates;
  double t_serial = run_batch(n_tx, n_rx, n_users, trials, false, serial_rates);
  double t_parallel = run_batch(n_tx, n_rx, n_users, trials, true, parallel_rates);

  double max_diff = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    max_diff = std::max(max_diff, std::abs(serial_rates[i] - parallel_rates[i]));
  }

  std::printf("serial reference: %8.3f s\n", t_serial);
  std::printf("openmp pool:      %8.3f s\n", t_parallel);
  std::printf("speedup:          %8.2fx\n", t_serial / t_parallel);
  std::printf("max |serial - parallel|: %g\n", max_diff);
  return max_diff == 0.0 ? 0 : 1;
}
