#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace winfer {

// Seeded stream with cheap deterministic splitting: child streams are keyed
// by (parent seed, stream index) so serial and parallel runs agree.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  Rng split(std::uint64_t stream) const;
  std::uint64_t seed() const { return seed_; }

  double uniform();
  double normal();
  double exponential(double rate);
  double gamma(double shape, double rate);
  std::uint64_t poisson(double mean);
  // Index drawn from a cumulative distribution (last entry ~ 1).
  std::size_t categorical(const std::vector<double>& cdf);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Thread cap: WINFER_THREADS if set, otherwise hardware concurrency.
unsigned thread_count();

// Runs body(chunk) for chunk in [0, chunks) on up to thread_count() threads.
void parallel_for(std::size_t chunks, const std::function<void(std::size_t)>& body);

struct McEstimate {
  std::vector<double> mean;
  std::vector<double> std_error;
  std::size_t samples = 0;
};

// Monte Carlo means of k simultaneous outputs. Samples are split into fixed
// chunks with their own child streams and reduced in chunk order, so the
// result depends only on (samples, seed), never on the thread count.
McEstimate mc_means(std::size_t samples, std::uint64_t seed, std::size_t k,
                    const std::function<void(Rng&, std::span<double>)>& draw);

}  // namespace winfer
