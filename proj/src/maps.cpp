#include "svi/maps.hpp"

#include <cmath>

#include "svi/sampling.hpp"

namespace svi {

namespace {

void check_generator(const AffineGenerator& g, int s, int n, int m) {
  if (g.M.rows() != m || g.M.cols() != s || g.L.rows() != m || g.L.cols() != n || g.b.size() != m) {
    throw Error("dim_mismatch", "generator blocks have inconsistent shapes");
  }
}

}  // namespace

SetValuedMap SetValuedMap::fan(std::vector<AffineGenerator> generators) {
  if (generators.empty()) throw Error("empty_fan", "a fan needs at least one generator");
  SetValuedMap f;
  f.kind_ = MapKind::Fan;
  f.m_ = static_cast<int>(generators.front().L.rows());
  f.s_ = static_cast<int>(generators.front().M.cols());
  f.n_ = static_cast<int>(generators.front().L.cols());
  for (const AffineGenerator& g : generators) check_generator(g, f.s_, f.n_, f.m_);
  f.gens_ = std::move(generators);
  return f;
}

SetValuedMap SetValuedMap::affine_plus_cone(Mat a_p, Mat a_x, Vec b) {
  SetValuedMap f;
  f.kind_ = MapKind::AffinePlusCone;
  f.m_ = static_cast<int>(a_x.rows());
  f.s_ = static_cast<int>(a_p.cols());
  f.n_ = static_cast<int>(a_x.cols());
  AffineGenerator g{std::move(a_p), std::move(a_x), std::move(b)};
  check_generator(g, f.s_, f.n_, f.m_);
  f.gens_.push_back(std::move(g));
  return f;
}

bool SetValuedMap::homogeneous() const {
  if (hook_) return false;
  for (const AffineGenerator& g : gens_) {
    if (g.b.size() > 0 && g.b.cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

Vec SetValuedMap::image(std::size_t i, const Vec& p, const Vec& x) const {
  if (p.size() != s_ || x.size() != n_) throw Error("dim_mismatch", "map argument has wrong length");
  if (hook_) return hook_(i, p, x);
  const AffineGenerator& g = gens_.at(i);
  Vec y = g.L * x + g.b;
  if (s_ > 0) y += g.M * p;
  return y;
}

SetValuedMap SetValuedMap::with_hook(GeneratorHook hook) const {
  SetValuedMap f = *this;
  f.hook_ = std::move(hook);
  return f;
}

SetValuedMap SetValuedMap::translated(const Vec& c) const {
  if (c.size() != m_) throw Error("dim_mismatch", "translation has wrong length");
  SetValuedMap f = *this;
  for (AffineGenerator& g : f.gens_) g.b += c;
  return f;
}

double SetValuedMap::lipschitz_bound() const {
  double l = 0.0;
  for (const AffineGenerator& g : gens_) {
    Mat joint(m_, s_ + n_);
    joint << g.M, g.L;
    if (joint.size() == 0) continue;
    l = std::max(l, Eigen::JacobiSVD<Mat>(joint).singularValues()(0));
  }
  return l;
}

GeneratorSet eval_map(const SetValuedMap& f, const PolyhedralCone& c, const Vec& p, const Vec& x) {
  if (c.dim() != f.image_dim()) throw Error("dim_mismatch", "cone and map image dimensions differ");
  GeneratorSet out(f.image_dim());
  for (std::size_t i = 0; i < f.generators().size(); ++i) out.points.push_back(f.image(i, p, x));
  if (f.kind() == MapKind::AffinePlusCone) out.rays = c.rays();
  return deduplicated(out);
}

std::vector<std::string> eval_warnings(const SetValuedMap& f, const Vec& /*p*/, const Vec& x) {
  std::vector<std::string> w;
  if (f.separable() && x.size() > 0 && x.minCoeff() < 0.0) w.emplace_back("vertex_product_outer");
  return w;
}

SetValuedMap separable_fan(const std::vector<GeneratorSet>& blocks) {
  if (blocks.empty()) throw Error("empty_fan", "separable fan needs at least one block");
  const int m = blocks.front().dim;
  const int n = static_cast<int>(blocks.size());
  for (const GeneratorSet& a : blocks) {
    if (a.dim != m) throw Error("dim_mismatch", "blocks differ in dimension");
    if (a.points.empty() || !a.rays.empty()) throw Error("noncompact_block", "blocks must be nonempty polytopes");
  }
  std::vector<AffineGenerator> gens;
  std::vector<std::size_t> choice(n, 0);
  for (;;) {
    AffineGenerator g{Mat(m, 0), Mat(m, n), Vec::Zero(m)};
    for (int i = 0; i < n; ++i) g.L.col(i) = blocks[i].points[choice[i]];
    gens.push_back(std::move(g));
    int i = n - 1;
    while (i >= 0 && ++choice[i] == blocks[i].points.size()) {
      choice[i] = 0;
      --i;
    }
    if (i < 0) break;
  }
  SetValuedMap f = SetValuedMap::fan(std::move(gens));
  f.mark_separable();
  return f;
}

ConcavityReport c_concavity_audit(const SetValuedMap& f, const PolyhedralCone& c, int sample_count, std::uint64_t seed,
                                  double half_width, double tol) {
  if (sample_count < 1) throw Error("invalid_argument", "sample_count must be >= 1");
  Sampler rng(seed);
  ConcavityReport rep;
  const int s = f.param_dim();
  const int n = f.state_dim();
  for (int k = 0; k < sample_count; ++k) {
    const Vec p1 = rng.box(s, half_width), x1 = rng.box(n, half_width);
    const Vec p2 = rng.box(s, half_width), x2 = rng.box(n, half_width);
    const double t = rng.uniform(0.0, 1.0);
    const GeneratorSet mid = eval_map(f, c, t * p1 + (1.0 - t) * p2, t * x1 + (1.0 - t) * x2);
    const GeneratorSet target =
        add_rays(minkowski_scale_sum(eval_map(f, c, p1, x1), eval_map(f, c, p2, x2), t), c.rays());
    double gap = 0.0;
    for (const Vec& y : mid.points) gap = std::max(gap, membership(target, y, tol).residual);
    ++rep.samples;
    rep.max_gap = std::max(rep.max_gap, gap);
    if (std::sqrt(static_cast<double>(f.image_dim())) * gap > tol) rep.violations.push_back({p1, x1, p2, x2, t, gap});
  }
  return rep;
}

bool c_boundedness_check(const SetValuedMap& f, const PolyhedralCone& c, const Vec& p, const Vec& x) {
  if (f.kind() == MapKind::Fan) return true;
  const Vec g = f.image(0, p, x);
  const int m = c.dim();
  for (const Vec& a : c.facets()) {
    if (a.dot(g) >= -tol::kFeas * (1.0 + g.norm())) continue;
    // Is the face {d in C : <a, d> = 0} more than {0}?  Probe each coordinate
    // direction over the face intersected with the unit box.
    PolyhedronH face = c.halfspaces();
    face.add_row(a, 0.0);
    for (int i = 0; i < m; ++i) {
      face.add_row(Vec::Unit(m, i), 1.0);
      face.add_row(-Vec::Unit(m, i), 1.0);
    }
    for (int i = 0; i < m; ++i) {
      for (double sgn : {1.0, -1.0}) {
        const LpResult lp = lp_solve(-sgn * Vec::Unit(m, i), face);
        if (lp.status == LpStatus::Optimal && -lp.value > 1e-9) return false;
      }
    }
  }
  return true;
}

}  // namespace svi
