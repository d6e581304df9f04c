#pragma once

// Seed derivation and platform-independent random draws.
//
// std::normal_distribution and std::shuffle are implementation-defined, so
// everything that feeds a reproducible result goes through these helpers.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace spectralift::rng {

std::uint64_t splitmix64(std::uint64_t x);

/// Independent child seed for a named stream (e.g. "hsi-noise") of a parent seed.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view stream);
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

/// Uniform in [0, 1) with 53 random bits.
double to_unit(std::uint64_t bits);

/// Counter-based standard normal source: sample k depends only on (seed, k),
/// so any partition of the index range reproduces the same stream.
class CounterNormal {
 public:
  explicit CounterNormal(std::uint64_t seed) : seed_(seed) {}
  double operator()(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
};

/// Sequential engine with portable uniform/normal/shuffle helpers.
class Engine {
 public:
  explicit Engine(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }
  double uniform() { return to_unit(gen_()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  /// Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace spectralift::rng
