#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace saddlescope {

/// Seeded random source with library-independent draws, so identical seeds
/// give identical streams everywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  double uniform01() {
    // 53-bit mantissa draw, independent of std distribution internals.
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double gaussian() {
    // Marsaglia polar method.
    for (;;) {
      double u = 2.0 * uniform01() - 1.0;
      double v = 2.0 * uniform01() - 1.0;
      double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  /// Uniform draw from the closed ball of given radius around the origin.
  std::vector<double> ball(int dim, double radius) {
    std::vector<double> v(dim);
    double nrm = 0.0;
    for (int i = 0; i < dim; ++i) {
      v[i] = gaussian();
      nrm += v[i] * v[i];
    }
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) return std::vector<double>(dim, 0.0);
    double r = radius * std::pow(uniform01(), 1.0 / dim);
    for (int i = 0; i < dim; ++i) v[i] *= r / nrm;
    return v;
  }

  /// Uniform direction on the unit sphere.
  std::vector<double> direction(int dim) {
    for (;;) {
      std::vector<double> v(dim);
      double nrm = 0.0;
      for (int i = 0; i < dim; ++i) {
        v[i] = gaussian();
        nrm += v[i] * v[i];
      }
      if (nrm > 1e-12) {
        nrm = std::sqrt(nrm);
        for (int i = 0; i < dim; ++i) v[i] /= nrm;
        return v;
      }
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace saddlescope
