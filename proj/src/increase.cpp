#include "svi/increase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "svi/sampling.hpp"

namespace svi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInteriorEps = 1e-6;
constexpr int kHullSamples = 20;

std::vector<Mat> certificate_operators(const SetValuedMap& f, FanVariable variable) {
  const auto& gens = f.generators();
  std::vector<Mat> ops;
  if (variable == FanVariable::Joint) {
    for (const AffineGenerator& g : gens) {
      if (g.b.size() > 0 && g.b.cwiseAbs().maxCoeff() > 0.0) {
        throw Error("not_homogeneous", "joint fan certificate needs zero offsets");
      }
      Mat op(f.image_dim(), f.param_dim() + f.state_dim());
      op << g.M, g.L;
      ops.push_back(std::move(op));
    }
  } else {
    for (const AffineGenerator& g : gens) {
      const bool same_m = g.M.size() == 0 || (g.M - gens.front().M).cwiseAbs().maxCoeff() == 0.0;
      const bool same_b = g.b.size() == 0 || (g.b - gens.front().b).cwiseAbs().maxCoeff() == 0.0;
      if (!same_m || !same_b) {
        throw Error("not_homogeneous", "state-only certificate needs a common M and b across generators");
      }
      ops.push_back(g.L);
    }
  }
  return ops;
}

// max t s.t. <a_j, G_i z> >= t for all i, j and z in [-1,1]^d.
std::optional<std::pair<Vec, double>> interior_witness(const std::vector<Mat>& ops, const PolyhedralCone& c) {
  const int d = static_cast<int>(ops.front().cols());
  PolyhedronH sys(d + 1);
  for (const Mat& g : ops) {
    for (const Vec& a : c.facets()) {
      Vec row(d + 1);
      row << -(g.transpose() * a), 1.0;
      sys.add_row(row, 0.0);
    }
  }
  for (int k = 0; k < d; ++k) {
    Vec e = Vec::Zero(d + 1);
    e(k) = 1.0;
    sys.add_row(e, 1.0);
    sys.add_row(-e, 1.0);
  }
  Vec obj = Vec::Zero(d + 1);
  obj(d) = -1.0;
  const LpResult lp = lp_solve(obj, sys);
  if (lp.status != LpStatus::Optimal) return std::nullopt;
  return std::make_pair(Vec(lp.point.head(d)), lp.point(d));
}

}  // namespace

const char* to_string(IncreaseMethod m) {
  switch (m) {
    case IncreaseMethod::FanAnalytic:
      return "fan_analytic";
    case IncreaseMethod::RotationAnalytic:
      return "rotation_analytic";
    case IncreaseMethod::NumericSampled:
      return "numeric_sampled";
    case IncreaseMethod::None:
      return "none";
  }
  return "?";
}

double open_covering_bound(const Mat& lam) {
  if (lam.size() == 0 || lam.rows() > lam.cols()) return 0.0;
  const Mat gram = lam * lam.transpose();
  const double lo = Eigen::SelfAdjointEigenSolver<Mat>(gram, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return std::sqrt(std::max(lo, 0.0));
}

IncreaseCertificate fan_increase_certificate(const SetValuedMap& f, const PolyhedralCone& c, FanVariable variable) {
  if (f.kind() != MapKind::Fan) throw Error("not_a_fan", "fan certificate needs a Fan map");
  const std::vector<Mat> ops = certificate_operators(f, variable);

  IncreaseCertificate cert;
  double eta = kInf;
  for (const Mat& g : ops) eta = std::min(eta, open_covering_bound(g));
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (std::size_t j = i + 1; j < ops.size(); ++j) {
      for (int k = 1; k <= kHullSamples; ++k) {
        const double s = static_cast<double>(k) / (kHullSamples + 1);
        eta = std::min(eta, open_covering_bound((1.0 - s) * ops[i] + s * ops[j]));
      }
    }
  }
  cert.eta = eta;
  if (!(eta > 0.0)) {
    cert.notes = "covering bound is zero";
    return cert;
  }
  const auto witness = interior_witness(ops, c);
  if (!witness || witness->second < kInteriorEps) {
    cert.notes = "no common interior direction";
    return cert;
  }
  cert.interior_witness = witness->first;
  cert.alpha_lower = eta + 1.0;
  cert.method = IncreaseMethod::FanAnalytic;
  cert.notes = variable == FanVariable::Joint ? "joint variable (p, x)" : "state variable x; offsets are a translation";
  return cert;
}

double rotation_increase_bound(int n, double lambda, double ell) {
  if (n < 2) throw Error("invalid_argument", "rotation bound needs n >= 2");
  if (ell < 0.0) throw Error("invalid_argument", "Lipschitz constant must be nonnegative");
  if (!(lambda > n)) throw Error("rescale_too_small", "need lambda > n");
  const double root = std::sqrt(static_cast<double>(n));
  if (!(ell < 1.0 - 1.0 / root)) throw Error("perturbation_too_large", "need ell < 1 - 1/sqrt(n)");
  return (1.0 - ell) * root;
}

namespace {

// Samples drawn once so that every alpha is judged on the same probes.
class IncreaseProbe {
 public:
  IncreaseProbe(const SetValuedMap& f, const PolyhedralCone& c, const Vec& p, const Vec& x0,
                const IncreaseCheckOptions& opts) {
    if (!(opts.delta > 0.0) || opts.radii < 1) throw Error("invalid_argument", "need delta > 0 and radii >= 1");
    const Excess e = excess_at(f, c, p, x0);
    if (!e.unbounded && e.value <= tol::kFeas) {
      throw Error("precondition_violated", "F(p, x0) already lies in C");
    }
    GeneratorSet target = eval_map(f, c, p, x0);
    try {
      if (f.kind() == MapKind::Fan) target = add_rays(target, c.rays());
      target_ = halfspaces_of(deduplicated(target));
    } catch (const Error& err) {
      throw Error("verification_unavailable", err.what());
    }

    Sampler rng(opts.seed);
    const int s = f.param_dim();
    const bool joint = opts.mode == IncreaseMode::Joint;
    const int d = joint ? s + f.state_dim() : f.state_dim();
    Vec z0(d);
    if (joint) {
      z0 << p, x0;
    } else {
      z0 = x0;
    }
    std::vector<Vec> moves;
    for (int k = 0; k < d; ++k) {
      moves.push_back(Vec::Unit(d, k));
      moves.push_back(-Vec::Unit(d, k));
    }
    for (int k = 0; k < opts.dirs; ++k) moves.push_back(rng.unit(d));

    const int m = f.image_dim();
    for (int k = 0; k < m; ++k) {
      pushes_.push_back(Vec::Unit(m, k));
      pushes_.push_back(-Vec::Unit(m, k));
    }
    for (int k = 0; k < opts.dirs; ++k) pushes_.push_back(rng.unit(m));

    for (int k = 1; k <= opts.radii; ++k) {
      Radius rad;
      rad.r = opts.delta * k / opts.radii;
      std::vector<Vec> us{z0};
      for (const Vec& w : moves) {
        us.push_back(z0 + rad.r * w);
        us.push_back(z0 + 0.5 * rad.r * w);
      }
      for (const Vec& u : us) {
        const Vec pu = joint ? Vec(u.head(s)) : p;
        const Vec xu = joint ? Vec(u.tail(f.state_dim())) : u;
        rad.images.push_back(eval_map(f, c, pu, xu).points);
      }
      radii_.push_back(std::move(rad));
    }
  }

  IncreaseCheckReport check(double alpha) const {
    IncreaseCheckReport rep;
    rep.worst_margin = kInf;
    rep.holds_at_sampling = true;
    for (const Radius& rad : radii_) {
      double best = -kInf;
      for (const std::vector<Vec>& ys : rad.images) {
        double worst_dist = 0.0;
        for (const Vec& y : ys) {
          for (const Vec& v : pushes_) {
            worst_dist = std::max(worst_dist, distance(y + alpha * rad.r * v));
            if (rad.r - worst_dist < best) break;
          }
          if (rad.r - worst_dist < best) break;
        }
        best = std::max(best, rad.r - worst_dist);
      }
      rep.worst_margin = std::min(rep.worst_margin, best);
      if (best < -1e-9 * (1.0 + rad.r)) rep.holds_at_sampling = false;
    }
    return rep;
  }

 private:
  struct Radius {
    double r = 0.0;
    std::vector<std::vector<Vec>> images;  // point generators of G(u) per candidate u
  };

  double distance(const Vec& y) const {
    if (target_.contains(y, 0.0)) return 0.0;
    return project_polyhedron(target_, y).distance;
  }

  PolyhedronH target_;
  std::vector<Vec> pushes_;
  std::vector<Radius> radii_;
};

std::optional<IncreaseCertificate> analytic_certificate(const SetValuedMap& f, const PolyhedralCone& c) {
  if (f.kind() != MapKind::Fan || !f.affine()) return std::nullopt;
  std::optional<IncreaseCertificate> best;
  for (FanVariable v : {FanVariable::StateOnly, FanVariable::Joint}) {
    try {
      IncreaseCertificate cert = fan_increase_certificate(f, c, v);
      if (cert.method == IncreaseMethod::None) continue;
      if (!best || *cert.alpha_lower < *best->alpha_lower) best = cert;
    } catch (const Error&) {
    }
  }
  return best;
}

// Largest alpha in (1, alpha_max] that passes, to within `resolution`; nullopt
// when even 1 + resolution fails.
std::optional<double> bisect_alpha(const IncreaseProbe& probe, double alpha_max, double resolution) {
  if (probe.check(alpha_max).holds_at_sampling) return alpha_max;
  double lo = 1.0 + resolution;
  if (!probe.check(lo).holds_at_sampling) return std::nullopt;
  double hi = alpha_max;
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    if (probe.check(mid).holds_at_sampling) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

IncreaseCheckReport verify_increase_numeric(const SetValuedMap& f, const PolyhedralCone& c, const Vec& p,
                                            const Vec& x0, double alpha, const IncreaseCheckOptions& opts) {
  if (!(alpha > 1.0)) throw Error("invalid_argument", "alpha must exceed 1");
  return IncreaseProbe(f, c, p, x0, opts).check(alpha);
}

AlphaFReport alpha_f_estimate(const SetValuedMap& f, const PolyhedralCone& c, std::span<const PointPX> grid,
                              const AlphaFOptions& opts) {
  if (grid.empty()) throw Error("invalid_argument", "grid is empty");
  std::optional<IncreaseCertificate> analytic;
  if (opts.method != AlphaMethod::Numeric) analytic = analytic_certificate(f, c);
  if (opts.method == AlphaMethod::Analytic && !analytic) {
    AlphaFReport rep;
    rep.status = "none";
    rep.method = "fan_analytic";
    rep.value = 1.0;
    return rep;
  }

  AlphaFReport rep;
  rep.value = kInf;
  rep.method = analytic ? "fan_analytic" : "numeric_sampled";
  for (const PointPX& pt : grid) {
    const Excess e = excess_at(f, c, pt.p, pt.x);
    if (!e.unbounded && e.value <= tol::kFeas) continue;
    ++rep.points_with_excess;
    double bound = 0.0;
    if (analytic) {
      bound = *analytic->alpha_lower;
    } else {
      const auto found = bisect_alpha(IncreaseProbe(f, c, pt.p, pt.x, opts.check), opts.alpha_max, opts.resolution);
      if (!found) {
        rep.status = "none";
        rep.value = 1.0;
        rep.worst = pt;
        return rep;
      }
      bound = *found;
    }
    if (bound < rep.value) {
      rep.value = bound;
      rep.worst = pt;
    }
  }
  rep.status = rep.points_with_excess == 0 ? "vacuous" : "certified";
  return rep;
}

}  // namespace svi
