#pragma once

// Counter-friendly pseudo-random streams for Monte Carlo runs.
//
// Reproducibility contract: a trial's entire randomness (channel draw,
// symbols, noise, any internal resampling) comes from one Rng seeded by
// stream_key(master_seed, point_index, trial_index).  Results are therefore
// independent of how trials are distributed over workers.  std::random
// engines/distributions are deliberately not used here: their output is not
// specified bit-exactly across standard library implementations.

#include <cmath>
#include <complex>
#include <cstdint>

namespace xmimo {

// 64-bit finalizer from the splitmix64 generator (Stafford's Mix13 variant).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Key for the (master, sweep point, trial) stream.  Point and trial are
// decorrelated with distinct odd multipliers before mixing so that nearby
// indices do not produce nearby states.
inline constexpr std::uint64_t stream_key(std::uint64_t master,
                                          std::uint64_t point,
                                          std::uint64_t trial) {
  std::uint64_t h = mix64(master ^ 0x6a09e667f3bcc909ULL);
  h = mix64(h ^ ((point + 1) * 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ ((trial + 1) * 0xc2b2ae3d27d4eb4fULL));
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Uniform index in [0, n); negligible multiply-shift bias (n << 2^64).
  std::uint64_t index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // One standard-normal pair via Box-Muller.  Always consumes exactly two
  // uniforms (no cached spare) so the draw sequence stays position-independent.
  void gaussian_pair(double& g1, double& g2) {
    // (0,1] for the log argument.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double w = 2.0 * M_PI * u2;
    g1 = r * std::cos(w);
    g2 = r * std::sin(w);
  }

  // Circularly-symmetric complex gaussian, unit total variance:
  // real and imaginary parts are N(0, 1/2).
  std::complex<double> cgauss() {
    double g1, g2;
    gaussian_pair(g1, g2);
    return {g1 * M_SQRT1_2, g2 * M_SQRT1_2};
  }

 private:
  std::uint64_t state_;
};

}  // namespace xmimo
