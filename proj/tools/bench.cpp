// Times each randomized verification suite under the serial trial runner and
// the OpenMP runner, and checks the two reports are identical, which is what
// the seeding scheme promises.

#include <chrono>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nnb/json_io.hpp"
#include "nnb/verify.hpp"

#include <omp.h>

namespace {

double run_timed(const nnb::BasisContext& ctx, const nnb::SuiteConfig& cfg,
                 nnb::VerifyReport& out) {
  auto t0 = std::chrono::steady_clock::now();
  out = nnb::run_suite(ctx, cfg);
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs OpenMP timing of the verification suites"};
  std::uint64_t trials = 400;
  std::uint64_t seed = 7;
  int threads = omp_get_max_threads();
  app.add_option("--trials", trials, "Trials per suite");
  app.add_option("--seed", seed, "Run seed");
  app.add_option("--threads", threads, "Parallel worker count")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  nnb::BasisContext ctx;
  std::vector<std::string> suites = {"fdd", "prop2", "projections", "chain",
                                     "disjoint-lp"};
  bool mismatch = false;

  std::cout << std::left << std::setw(14) << "suite" << std::right
            << std::setw(9) << "trials" << std::setw(12) << "serial_s"
            << std::setw(12) << "parallel_s" << std::setw(10) << "speedup"
            << "  agreement\n";
  for (const auto& suite : suites) {
    nnb::SuiteConfig cfg;
    cfg.suite = suite;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.threads = 1;
    nnb::VerifyReport serial, parallel;
    double ts = run_timed(ctx, cfg, serial);
    cfg.threads = threads;
    double tp = run_timed(ctx, cfg, parallel);
    bool same =
        nnb::report_to_json(serial) == nnb::report_to_json(parallel);
    mismatch = mismatch || !same;
    std::cout << std::left << std::setw(14) << suite << std::right
              << std::setw(9) << serial.trials << std::setw(12) << std::fixed
              << std::setprecision(3) << ts << std::setw(12) << tp
              << std::setw(10) << std::setprecision(2) << (tp > 0 ? ts / tp : 0)
              << "  " << (same ? "ok" : "MISMATCH") << '\n';
  }
  return mismatch ? 1 : 0;
}
