#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "svi/poly_kernel.hpp"

namespace svi {

namespace {

// Exact projection onto the affine subspace of the active rows, accepted
// only if it is feasible and the multipliers are nonnegative (KKT).
std::optional<Vec> active_set_correction(const Mat& a, const Vec& b, const Vec& x, const std::vector<int>& active) {
  if (active.empty()) return std::nullopt;
  const int n = static_cast<int>(x.size());
  Mat aa(static_cast<int>(active.size()), n);
  Vec bb(static_cast<int>(active.size()));
  for (std::size_t i = 0; i < active.size(); ++i) {
    aa.row(static_cast<int>(i)) = a.row(active[i]);
    bb(static_cast<int>(i)) = b(active[i]);
  }
  const Mat gram = aa * aa.transpose();
  const Vec mu = gram.completeOrthogonalDecomposition().solve(aa * x - bb);
  if (mu.size() > 0 && mu.minCoeff() < -1e-10) return std::nullopt;
  const Vec z = x - aa.transpose() * mu;
  if ((aa * z - bb).cwiseAbs().maxCoeff() > 1e-11) return std::nullopt;
  if ((a * z - b).maxCoeff() > tol::kFeas) return std::nullopt;
  return z;
}

}  // namespace

Projection project_polyhedron(const PolyhedronH& region, const Vec& x) {
  if (x.size() != region.dim) throw Error("dim_mismatch", "projection point has wrong length");
  Projection quick;
  if (region.contains(x, 0.0)) {
    quick.point = x;
    return quick;
  }
  // If the projection onto one violated half-space lands in the region it is
  // the projection onto the region, since the region lies in that half-space.
  for (int j = 0; j < region.rows(); ++j) {
    const Vec a = region.normals.row(j).transpose();
    const double viol = a.dot(x) - region.offsets(j);
    const double nn = a.squaredNorm();
    if (viol <= 0.0 || nn == 0.0) continue;
    Vec z = x - (viol / nn) * a;
    if (region.contains(z, 1e-12)) {
      quick.distance = (x - z).norm();
      quick.point = std::move(z);
      return quick;
    }
  }
  if (!is_feasible(region)) throw Error("empty_region", "cannot project onto an empty polyhedron");

  // Unit-normalised half-spaces; zero rows are void once feasibility holds.
  std::vector<int> rows;
  for (int j = 0; j < region.rows(); ++j) {
    if (region.normals.row(j).norm() > 0.0) rows.push_back(j);
  }
  const int k = static_cast<int>(rows.size());
  Mat a(k, region.dim);
  Vec b(k);
  for (int i = 0; i < k; ++i) {
    const double s = region.normals.row(rows[i]).norm();
    a.row(i) = region.normals.row(rows[i]) / s;
    b(i) = region.offsets(rows[i]) / s;
  }

  Projection out;
  if (k == 0) {
    out.point = x;
    return out;
  }

  // Dykstra: for half-spaces the correction term is a multiple of the normal,
  // so only the scalar multipliers are stored.
  Vec z = x;
  Vec lambda = Vec::Zero(k);
  int sweeps = 0;
  for (; sweeps < tol::kDykstraSweeps; ++sweeps) {
    const Vec prev = z;
    for (int i = 0; i < k; ++i) {
      const double s = a.row(i).dot(z) + lambda(i) - b(i);
      const double next = std::max(0.0, s);
      z += (lambda(i) - next) * a.row(i).transpose();
      lambda(i) = next;
    }
    if ((z - prev).norm() < tol::kDykstraMove) {
      ++sweeps;
      break;
    }
  }

  std::vector<int> active;
  for (int i = 0; i < k; ++i) {
    if (lambda(i) > 1e-14) active.push_back(i);
  }
  auto polished = active_set_correction(a, b, x, active);
  if (!polished) {
    active.clear();
    for (int i = 0; i < k; ++i) {
      if (a.row(i).dot(z) >= b(i) - 1e-9) active.push_back(i);
    }
    polished = active_set_correction(a, b, x, active);
  }
  if (polished) z = *polished;

  out.point = z;
  out.distance = (x - z).norm();
  out.sweeps = sweeps;
  return out;
}

double distance_to_hull(std::span<const Vec> points, const Vec& y) {
  if (points.empty()) return std::numeric_limits<double>::infinity();
  const int m = static_cast<int>(points.size());
  std::vector<Vec> q;
  q.reserve(m);
  double scale = 0.0;
  for (const Vec& p : points) {
    q.push_back(p - y);
    scale = std::max(scale, q.back().squaredNorm());
  }
  if (scale == 0.0) return 0.0;

  // Wolfe's minimum-norm-point algorithm on conv{q_i}.
  int first = 0;
  for (int i = 1; i < m; ++i) {
    if (q[i].squaredNorm() < q[first].squaredNorm()) first = i;
  }
  std::vector<int> support{first};
  std::vector<double> weight{1.0};
  Vec x = q[first];
  const double eps = 1e-12;

  for (int major = 0; major < 10 * m + 100; ++major) {
    if (x.squaredNorm() <= eps * eps * scale) return 0.0;
    int j = 0;
    double best = q[0].dot(x);
    for (int i = 1; i < m; ++i) {
      const double v = q[i].dot(x);
      if (v < best) {
        best = v;
        j = i;
      }
    }
    if (best >= x.squaredNorm() - eps * scale) break;
    if (std::find(support.begin(), support.end(), j) != support.end()) break;
    support.push_back(j);
    weight.push_back(0.0);

    for (int minor = 0; minor < 10 * m + 100; ++minor) {
      const int s = static_cast<int>(support.size());
      Mat kkt = Mat::Zero(s + 1, s + 1);
      for (int a = 0; a < s; ++a) {
        for (int c = 0; c < s; ++c) kkt(a, c) = q[support[a]].dot(q[support[c]]);
        kkt(a, s) = 1.0;
        kkt(s, a) = 1.0;
      }
      Vec rhs = Vec::Zero(s + 1);
      rhs(s) = 1.0;
      const Vec sol = kkt.completeOrthogonalDecomposition().solve(rhs);
      const Vec v = sol.head(s);
      if (v.minCoeff() > eps) {
        for (int a = 0; a < s; ++a) weight[a] = v(a);
        break;
      }
      double theta = 1.0;
      for (int a = 0; a < s; ++a) {
        if (v(a) <= eps) theta = std::min(theta, weight[a] / (weight[a] - v(a)));
      }
      for (int a = 0; a < s; ++a) weight[a] = (1.0 - theta) * weight[a] + theta * v(a);
      std::vector<int> ns;
      std::vector<double> nw;
      for (int a = 0; a < s; ++a) {
        if (weight[a] > eps) {
          ns.push_back(support[a]);
          nw.push_back(weight[a]);
        }
      }
      if (ns.empty()) {
        ns.push_back(support[0]);
        nw.push_back(1.0);
      }
      support = std::move(ns);
      weight = std::move(nw);
    }
    x.setZero();
    double total = 0.0;
    for (std::size_t a = 0; a < support.size(); ++a) total += weight[a];
    for (std::size_t a = 0; a < support.size(); ++a) x += (weight[a] / total) * q[support[a]];
  }
  return x.norm();
}

double hausdorff_distance(const GeneratorSet& a, const GeneratorSet& b) {
  if (!a.is_bounded() || !b.is_bounded()) throw Error("unbounded_set", "Hausdorff distance needs polytopes");
  double h = 0.0;
  for (const Vec& p : a.points) h = std::max(h, distance_to_hull(b.points, p));
  for (const Vec& p : b.points) h = std::max(h, distance_to_hull(a.points, p));
  return h;
}

}  // namespace svi
