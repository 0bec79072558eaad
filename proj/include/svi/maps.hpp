#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "svi/cones.hpp"

namespace svi {

/// One affine generator (p, x) -> M p + L x + b.
struct AffineGenerator {
  Mat M;  // m x s
  Mat L;  // m x n
  Vec b;  // m
};

enum class MapKind { Fan, AffinePlusCone };

/// Replaces the image of generator i at (p, x); used to build non-affine
/// counterexamples in audits.
using GeneratorHook = std::function<Vec(std::size_t, const Vec&, const Vec&)>;

/// F(p, x) = conv{M_i p + L_i x + b_i}  (Fan)  or  g(p, x) + C  (AffinePlusCone).
/// An AffinePlusCone map is stored as a single generator (A_p, A_x, b).
class SetValuedMap {
 public:
  static SetValuedMap fan(std::vector<AffineGenerator> generators);
  static SetValuedMap affine_plus_cone(Mat a_p, Mat a_x, Vec b);

  MapKind kind() const { return kind_; }
  int param_dim() const { return s_; }
  int state_dim() const { return n_; }
  int image_dim() const { return m_; }
  const std::vector<AffineGenerator>& generators() const { return gens_; }

  /// All offsets zero and no hook: F(t p, t x) = t F(p, x).
  bool homogeneous() const;
  bool affine() const { return !hook_; }
  bool separable() const { return separable_; }

  Vec image(std::size_t i, const Vec& p, const Vec& x) const;

  SetValuedMap with_hook(GeneratorHook hook) const;
  /// Adds c to every generator offset.
  SetValuedMap translated(const Vec& c) const;
  /// max_i ||[M_i L_i]||_2, a Lipschitz constant for F in the Hausdorff metric.
  double lipschitz_bound() const;

  void mark_separable() { separable_ = true; }

 private:
  MapKind kind_ = MapKind::Fan;
  int s_ = 0, n_ = 0, m_ = 0;
  std::vector<AffineGenerator> gens_;
  GeneratorHook hook_;
  bool separable_ = false;
};

/// Fan -> conv{images}; AffinePlusCone -> {g(p,x)} + cone(generators of C).
GeneratorSet eval_map(const SetValuedMap& f, const PolyhedralCone& c, const Vec& p, const Vec& x);

/// Informational flags raised by an evaluation ("vertex_product_outer" for a
/// separable fan evaluated at a point with a negative coordinate).
std::vector<std::string> eval_warnings(const SetValuedMap& f, const Vec& p, const Vec& x);

/// H_A(x) = sum_i A_i x_i compiled to the fan of vertex products (s = 0).
SetValuedMap separable_fan(const std::vector<GeneratorSet>& blocks);

struct ConcavitySample {
  Vec p1, x1, p2, x2;
  double t = 0.0;
  double gap = 0.0;
};

struct ConcavityReport {
  std::vector<ConcavitySample> violations;
  double max_gap = 0.0;
  int samples = 0;
};

/// Samples (p1,x1), (p2,x2) in the box [-half_width, half_width] and t in
/// [0,1]; checks every generator point of F at the combination lies in
/// t F(p1,x1) + (1-t) F(p2,x2) + C. The gap is the LP membership residual.
ConcavityReport c_concavity_audit(const SetValuedMap& f, const PolyhedralCone& c, int sample_count, std::uint64_t seed,
                                  double half_width = 2.0, double tol = 1e-8);

/// Whether F(p,x) \ C is bounded. Fans are compact-valued, hence true.
bool c_boundedness_check(const SetValuedMap& f, const PolyhedralCone& c, const Vec& p, const Vec& x);

}  // namespace svi
