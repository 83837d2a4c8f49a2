#include "riskfix/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace riskfix {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::atomic<unsigned> g_max_threads{0};
thread_local bool t_inside_parallel = false;

}  // namespace

std::uint64_t child_seed(std::uint64_t base_seed, std::uint64_t index) {
  return splitmix64(splitmix64(base_seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

std::mt19937_64 make_engine(std::uint64_t base_seed, std::uint64_t index) {
  return std::mt19937_64(child_seed(base_seed, index));
}

Vector gaussian_vector(std::mt19937_64& engine, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = normal(engine);
  return out;
}

GaussianBank::GaussianBank(Eigen::Index n, int samples, std::uint64_t seed)
    : draws_(n, samples), seed_(seed) {
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t j) {
    auto engine = make_engine(seed, j);
    draws_.col(static_cast<Eigen::Index>(j)) = gaussian_vector(engine, n);
  });
}

Estimate summarize(std::span<const double> values) {
  const auto count = values.size();
  if (count == 0) return {};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(count);
  if (count == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = ss / static_cast<double>(count - 1);
  return {mean, std::sqrt(var / static_cast<double>(count))};
}

void set_max_threads(unsigned threads) { g_max_threads = threads; }

unsigned max_threads() {
  const unsigned requested = g_max_threads.load();
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const auto workers = std::min<std::size_t>(max_threads(), count);
  if (t_inside_parallel || workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      t_inside_parallel = true;
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace riskfix
