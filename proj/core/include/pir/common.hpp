#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace pir {

// Bad user-supplied parameters (CLI exit code 2).
class invalid_argument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Broken internal invariant or failed verification (CLI exit code 1).
class integrity_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic RNG wrapper. mt19937_64 has a portable, fully specified output
// sequence; the rejection sampler below avoids std::uniform_int_distribution,
// whose mapping is implementation-defined, so seeded runs agree across
// standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next() { return eng_(); }

  // Uniform in [0, n). Rejection sampling on the top of the 64-bit range.
  uint64_t below(uint64_t n) {
    if (n == 0) throw invalid_argument("Rng::below: n must be positive");
    const uint64_t limit = n * ((~uint64_t{0}) / n);
    uint64_t v = eng_();
    while (v >= limit) v = eng_();
    return v % n;
  }

 private:
  std::mt19937_64 eng_;
};

// splitmix64 finalizer; used to derive independent sub-seeds from
// (seed, lane, counter) without correlations between lanes.
inline uint64_t mix_seed(uint64_t seed, uint64_t lane, uint64_t counter = 0) {
  auto fin = [](uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return fin(fin(fin(seed) ^ lane) ^ counter);
}

// Exact nonnegative rational with normalized representation. Magnitudes here
// stay tiny (numerators bounded by N^M at desk scale), so int64 is plenty.
struct Rational {
  int64_t num = 0;
  int64_t den = 1;

  Rational() = default;
  Rational(int64_t n, int64_t d) : num(n), den(d) {
    if (den == 0) throw invalid_argument("Rational: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    const int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }

  friend bool operator==(const Rational&, const Rational&) = default;

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }
  double value() const { return double(num) / double(den); }
};

}  // namespace pir
