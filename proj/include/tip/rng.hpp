#ifndef TIP_RNG_HPP_
#define TIP_RNG_HPP_

#include <cstdint>
#include <cmath>

namespace tip
{

/// Deterministic random source. All distributions are implemented here rather
/// than with std:: distributions so that streams are identical across
/// standard library versions.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64()
  {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t uniform_int(std::uint64_t n)
  {
    // modulo bias is negligible for the ranges used here (n << 2^64)
    return next_u64() % n;
  }

  double normal(double mean = 0.0, double sigma = 1.0)
  {
    if (have_cached_) {
      have_cached_ = false;
      return mean + sigma * cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return mean + sigma * r * std::cos(theta);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Stable per-item substream derivation, e.g. one seed per scene.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index)
  {
    Rng r(seed ^ (0xd1b54a32d192ed03ULL * (index + 1)));
    return r.next_u64();
  }

private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace tip

#endif  // TIP_RNG_HPP_
