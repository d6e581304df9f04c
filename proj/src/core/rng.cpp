#include "spectralift/rng.hpp"

#include <cmath>
#include <numbers>

namespace spectralift::rng {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view stream) {
  // FNV-1a over the stream name, then mixed with the parent.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : stream) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return splitmix64(parent ^ splitmix64(h));
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return splitmix64(parent ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

double CounterNormal::operator()(std::uint64_t index) const {
  // Box-Muller on a pair of counter hashes; even indices take the cosine branch.
  const std::uint64_t pair = index >> 1;
  const std::uint64_t a = splitmix64(seed_ ^ splitmix64(2 * pair));
  const std::uint64_t b = splitmix64(seed_ ^ splitmix64(2 * pair + 1));
  const double u1 = 1.0 - to_unit(a);  // (0, 1]
  const double u2 = to_unit(b);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return (index & 1U) == 0 ? radius * std::cos(angle) : radius * std::sin(angle);
}

double Engine::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t Engine::below(std::uint64_t bound) {
  // Rejection sampling on the top of the range to avoid modulo bias.
  const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0} - (~std::uint64_t{0} % bound));
  std::uint64_t x = gen_();
  while (x >= limit) x = gen_();
  return x % bound;
}

}  // namespace spectralift::rng
