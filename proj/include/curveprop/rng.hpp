#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace curveprop {

// Stateless counter-based generator: every draw is a pure function of
// (seed, stream, index), so parallel workers reproduce serial results.
class CounterRng
{
public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
    : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  constexpr std::uint64_t bits(std::uint64_t index) const
  {
    return mix(key_ + index * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t index) const
  {
    return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
  }

  /// Standard complex normal (unit variance per component) via Box-Muller
  /// on draws 2*index and 2*index+1.
  std::complex<double> complex_normal(std::uint64_t index) const
  {
    const double u1 = 1.0 - uniform(2 * index); // (0, 1]
    const double u2 = uniform(2 * index + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

  /// Standard real normal from draws 2*index, 2*index+1.
  double normal(std::uint64_t index) const { return complex_normal(index).real(); }

private:
  static constexpr std::uint64_t mix(std::uint64_t z)
  {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

} // namespace curveprop
