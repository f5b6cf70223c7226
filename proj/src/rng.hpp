#ifndef UREGM_RNG_HPP
#define UREGM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <vector>

namespace uregm {

// All randomness in the library flows through SplitMix64 streams. A stream is
// identified by a root seed plus a derivation path of 64-bit tags, so
// independent units of work (a tree, a fold, a generated row) each get their
// own stream and results do not depend on scheduling order.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0,1) with 53 bits of precision.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Unbiased uniform integer on [0, n). n must be > 0.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller; consumes exactly two uniform draws.
  double next_normal() {
    double u1 = next_double();
    double u2 = next_double();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  bool next_bool(double p) { return next_double() < p; }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Derives a child seed from (seed, path...). Associative-free mixing: each
// path element is folded through the SplitMix64 finalizer, so
// derive(s, {a, b}) != derive(s, {b, a}).
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = detail::mix64(seed ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t p : path) {
    h = detail::mix64(h ^ (p + 0x9e3779b97f4a7c15ULL));
  }
  return h;
}

inline SplitMix64 derive_stream(std::uint64_t seed,
                                std::initializer_list<std::uint64_t> path) {
  return SplitMix64(derive_seed(seed, path));
}

// Stream-derivation tags. Kept in one place so the seed fan-out is auditable.
namespace stream_tag {
inline constexpr std::uint64_t kSplit = 0x01;
inline constexpr std::uint64_t kKfold = 0x02;
inline constexpr std::uint64_t kGaInit = 0x03;
inline constexpr std::uint64_t kGaGen = 0x04;
inline constexpr std::uint64_t kGaFitness = 0x05;
inline constexpr std::uint64_t kOofLearner = 0x06;
inline constexpr std::uint64_t kRefit = 0x07;
inline constexpr std::uint64_t kTree = 0x08;
inline constexpr std::uint64_t kGenRow = 0x09;
}  // namespace stream_tag

// Fisher-Yates shuffle driven by the given stream.
template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace uregm

#endif
