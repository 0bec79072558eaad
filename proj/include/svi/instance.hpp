#pragma once

#include <optional>
#include <vector>

#include "svi/maps.hpp"

namespace svi {

/// One affine piece <g_p, p> + <g_x, x> + c of a max-affine function.
struct AffinePiece {
  Vec g_p;
  Vec g_x;
  double c = 0.0;
};

/// phi(p, x) = max_k piece_k(p, x) + 1/2 z^T Q z,  z = (p, x).
class ConvexObjective {
 public:
  ConvexObjective() = default;
  ConvexObjective(std::vector<AffinePiece> pieces, std::optional<Mat> quadratic = std::nullopt);

  int param_dim() const { return s_; }
  int state_dim() const { return n_; }
  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  const std::optional<Mat>& quadratic() const { return q_; }
  /// True when the quadratic part is absent or identically zero.
  bool polyhedral() const;

  double piece_value(std::size_t k, const Vec& p, const Vec& x) const;
  double max_affine(const Vec& p, const Vec& x) const;
  double operator()(const Vec& p, const Vec& x) const;
  /// Gradient of the quadratic part, Q z (zero when absent).
  Vec quadratic_gradient(const Vec& p, const Vec& x) const;

 private:
  int s_ = 0, n_ = 0;
  std::vector<AffinePiece> pieces_;
  std::optional<Mat> q_;
};

/// A parametric problem  min_x phi(p, x)  subject to  F(p, x) in C.
struct ProblemInstance {
  ConvexObjective objective;
  SetValuedMap map;
  PolyhedralCone cone;

  ProblemInstance(ConvexObjective phi, SetValuedMap f, PolyhedralCone c);

  int s() const { return map.param_dim(); }
  int n() const { return map.state_dim(); }
  int m() const { return map.image_dim(); }
};

}  // namespace svi
