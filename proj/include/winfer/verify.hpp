#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "winfer/divergence.hpp"

// Randomized verification sweeps. Instance i draws from Rng(seed).split(i),
// so a suite's rows depend only on (instances, seed).
namespace winfer::verify {

struct Row {
  std::size_t instance = 0;
  std::string check;
  std::string detail;  // instance description
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // positive when the check holds with room to spare
  bool applicable = true;
  bool pass = true;
};

struct SuiteResult {
  std::string suite;
  std::size_t instances = 0;
  std::uint64_t seed = 0;
  std::vector<Row> rows;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::size_t skipped = 0;   // rows whose hypotheses do not hold
  std::size_t failures = 0;  // instances that raised a numerical error (check "numerical-failure")
  // Suite-specific headline, e.g. the largest |closed form - oracle|.
  std::string summary_name;
  double summary = 0.0;
};

// tv-oracle, chain, pinsker, bretagnolle-huber, nfold, bregman-kl,
// kl-expansion, expfam-golden
const std::vector<std::string>& suite_names();

// Throws invalid-argument for an unknown suite. as_printed checks the printed
// Bretagnolle-Huber bound instead of the tilted one and the printed closed
// forms in expfam-golden.
SuiteResult run_suite(const std::string& suite, std::size_t instances, std::uint64_t seed,
                      Convention conv = Convention::corrected);

}  // namespace winfer::verify
