#include "winfer/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "winfer/error.hpp"

namespace winfer {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(splitmix64(seed_ ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

double Rng::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

double Rng::exponential(double rate) {
  return std::exponential_distribution<double>(rate)(engine_);
}

double Rng::gamma(double shape, double rate) {
  return std::gamma_distribution<double>(shape, 1.0 / rate)(engine_);
}

std::uint64_t Rng::poisson(double mean) {
  return std::poisson_distribution<std::uint64_t>(mean)(engine_);
}

std::size_t Rng::categorical(const std::vector<double>& cdf) {
  double u = uniform() * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

unsigned thread_count() {
  if (const char* env = std::getenv("WINFER_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t chunks, const std::function<void(std::size_t)>& body) {
  unsigned nt = std::min<std::size_t>(thread_count(), chunks);
  if (nt <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> errors(nt);
  for (unsigned t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t c = t; c < chunks; c += nt) body(c);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

McEstimate mc_means(std::size_t samples, std::uint64_t seed, std::size_t k,
                    const std::function<void(Rng&, std::span<double>)>& draw) {
  if (samples < 1) throw Error(ErrorKind::invalid_argument, "mc-samples must be >= 1");
  constexpr std::size_t kChunk = 1 << 14;
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<long double> sum(chunks * k, 0.0L), sumsq(chunks * k, 0.0L);
  Rng master(seed);
  parallel_for(chunks, [&](std::size_t c) {
    Rng rng = master.split(c);
    std::vector<double> out(k);
    const std::size_t begin = c * kChunk, end = std::min(samples, begin + kChunk);
    for (std::size_t i = begin; i < end; ++i) {
      draw(rng, out);
      for (std::size_t j = 0; j < k; ++j) {
        sum[c * k + j] += out[j];
        sumsq[c * k + j] += static_cast<long double>(out[j]) * out[j];
      }
    }
  });
  McEstimate est;
  est.samples = samples;
  est.mean.assign(k, 0.0);
  est.std_error.assign(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    long double s = 0, s2 = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
      s += sum[c * k + j];
      s2 += sumsq[c * k + j];
    }
    const long double n = static_cast<long double>(samples);
    const long double m = s / n;
    long double var = (s2 / n - m * m) * n / std::max<long double>(1.0L, n - 1.0L);
    if (var < 0) var = 0;
    est.mean[j] = static_cast<double>(m);
    est.std_error[j] = static_cast<double>(std::sqrt(var / n));
  }
  return est;
}

}  // namespace winfer
