#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "svi/types.hpp"

namespace svi {

/// Seeded generator shared by every audit; identical seeds give identical draws.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Vec box(int dim, double half_width) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = uniform(-half_width, half_width);
    return v;
  }

  Vec unit(int dim) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(dim);
    do {
      for (int i = 0; i < dim; ++i) v(i) = g(rng_);
    } while (v.norm() < 1e-12);
    return v.normalized();
  }

  /// Uniform in the closed ball of radius r (interior density).
  Vec ball(int dim, double r) {
    const double rho = r * std::pow(uniform(0.0, 1.0), 1.0 / std::max(dim, 1));
    return rho * unit(dim);
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace svi
