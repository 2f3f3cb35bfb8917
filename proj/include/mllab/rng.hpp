#pragma once

#include <cstdint>
#include <string>

namespace mllab {

/// splitmix64: tiny, fully specified generator so identical seeds give
/// identical streams on every platform (std distributions are not
/// implementation-stable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

  bool coin() { return (next_u64() & 1) != 0; }

  /// Per-trial seed derived from a root seed; trials are independent and
  /// order-insensitive.
  static std::uint64_t derive(std::uint64_t root, std::uint64_t index) {
    Rng r(root ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    return r.next_u64();
  }

 private:
  std::uint64_t state_;
};

/// FNV-1a content hash used to pin fixtures to the inputs that produced them.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace mllab
