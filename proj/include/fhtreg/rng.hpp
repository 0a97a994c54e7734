#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace fhtreg {

// SplitMix64 finalizer; used to turn (seed, stream) pairs into engine seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic random stream. A single 64-bit user seed expands into
/// independent substreams by a counter-based rule: substream k of seed s
/// seeds the engine with mix64(mix64(s) ^ mix64(k)). Replicate k of any
/// Monte Carlo loop always uses substream k, so results do not depend on
/// evaluation order or thread scheduling.
///
/// All variate transforms are implemented here rather than taken from
/// <random> because the standard leaves distribution algorithms
/// unspecified; this keeps every sampled law bit-reproducible.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(mix64(mix64(seed) ^ mix64(stream))) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform on [0,1), 53-bit mantissa
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

  // uniform on (0,1), safe as a log() argument
  double uniform_pos() {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller, second variate cached
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  bool bernoulli(double p) { return uniform() < p; }

  // Marsaglia-Tsang; shape < 1 handled by the boosting identity
  // G(a) = G(a+1) * U^{1/a}.
  double gamma(double shape, double scale) {
    if (shape <= 0.0 || scale <= 0.0) {
      throw std::invalid_argument("gamma variate requires shape > 0 and scale > 0");
    }
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
      double x;
      double v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
  }

  // index drawn from unnormalized nonnegative weights
  int categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace fhtreg
