#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace desmr {

/// Deterministic random source. The engine is std::mt19937_64 (its output
/// sequence is fixed by the standard) and every distribution below is
/// implemented from raw uniforms with an explicit formula, so a given seed
/// produces bit-identical draws on any platform:
///   uniform      u = (engine() >> 11) * 2^-53                in [0,1)
///   normal       Box-Muller, sqrt(-2 ln u1) * {cos,sin}(2 pi u2)
///   exponential  -ln(1-u) / rate
///   cauchy       loc + scale * tan(pi * (u - 1/2))
///   student_t    z0 / sqrt((z1^2+...+zdf^2) / df)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0,1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * kPi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mu, double sigma) { return mu + sigma * normal(); }

  double exponential(double rate) {
    return -std::log(1.0 - uniform()) / rate;
  }

  double cauchy(double loc, double scale) {
    return loc + scale * std::tan(kPi * (uniform() - 0.5));
  }

  double student_t(int df) {
    const double z = normal();
    double chi2 = 0.0;
    for (int i = 0; i < df; ++i) {
      const double g = normal();
      chi2 += g * g;
    }
    return z / std::sqrt(chi2 / df);
  }

  /// Uniform integer in [0, n).
  int uniform_int(int n) {
    return static_cast<int>(uniform() * n) % n;
  }

  std::uint64_t raw() { return engine_(); }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace desmr
