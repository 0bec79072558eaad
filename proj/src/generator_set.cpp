#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "svi/poly_kernel.hpp"

namespace svi {

GeneratorSet::GeneratorSet(int d, std::vector<Vec> pts, std::vector<Vec> rys)
    : dim(d), points(std::move(pts)), rays(std::move(rys)) {
  for (const Vec& v : points) {
    if (v.size() != dim) throw Error("dim_mismatch", "generator point has wrong length");
  }
  for (const Vec& v : rays) {
    if (v.size() != dim) throw Error("dim_mismatch", "generator ray has wrong length");
  }
}

PolyhedronH::PolyhedronH(Mat a, Vec b) : dim(static_cast<int>(a.cols())), normals(std::move(a)), offsets(std::move(b)) {
  if (normals.rows() != offsets.size()) throw Error("dim_mismatch", "normals/offsets row count differ");
}

void PolyhedronH::add_row(const Vec& normal, double offset) {
  if (normal.size() != dim) throw Error("dim_mismatch", "constraint normal has wrong length");
  const Eigen::Index r = normals.rows();
  normals.conservativeResize(r + 1, dim);
  offsets.conservativeResize(r + 1);
  normals.row(r) = normal.transpose();
  offsets(r) = offset;
}

void PolyhedronH::append(const PolyhedronH& other) {
  if (other.dim != dim) throw Error("dim_mismatch", "cannot stack systems of different dimension");
  const Eigen::Index r = normals.rows();
  normals.conservativeResize(r + other.normals.rows(), dim);
  offsets.conservativeResize(r + other.offsets.size());
  normals.bottomRows(other.normals.rows()) = other.normals;
  offsets.tail(other.offsets.size()) = other.offsets;
}

double PolyhedronH::max_violation(const Vec& x) const {
  if (rows() == 0) return -std::numeric_limits<double>::infinity();
  return (normals * x - offsets).maxCoeff();
}

bool PolyhedronH::contains(const Vec& x, double tol) const {
  for (int j = 0; j < rows(); ++j) {
    const double scale = 1.0 + std::abs(offsets(j));
    if (normals.row(j).dot(x) - offsets(j) > tol * scale) return false;
  }
  return true;
}

PolyhedronH PolyhedronH::infeasible(int d) {
  if (d < 1) throw Error("dim_mismatch", "infeasible system needs dimension >= 1");
  PolyhedronH h(d);
  Vec e = Vec::Zero(d);
  e(0) = 1.0;
  h.add_row(e, -1.0);
  h.add_row(-e, -1.0);
  return h;
}

// ---------------------------------------------------------------------------

MembershipResult membership(const GeneratorSet& set, const Vec& y, double tol) {
  if (y.size() != set.dim) throw Error("dim_mismatch", "membership query has wrong length");
  if (set.points.empty()) return {false, std::numeric_limits<double>::infinity()};

  const int d = set.dim;
  const int k = static_cast<int>(set.points.size());
  const int r = static_cast<int>(set.rays.size());
  const int nv = k + r + 1;  // weights then the residual bound t
  PolyhedronH sys(nv);
  Vec row(nv);
  for (int i = 0; i < k + r; ++i) {
    row.setZero();
    row(i) = -1.0;
    sys.add_row(row, 0.0);
  }
  row.setZero();
  row.head(k).setOnes();
  sys.add_row(row, 1.0);
  sys.add_row(-row, -1.0);
  for (int c = 0; c < d; ++c) {
    row.setZero();
    for (int i = 0; i < k; ++i) row(i) = set.points[i](c);
    for (int i = 0; i < r; ++i) row(k + i) = set.rays[i](c);
    row(nv - 1) = -1.0;
    sys.add_row(row, y(c));
    row.head(k + r) = -row.head(k + r);
    sys.add_row(row, -y(c));
  }
  Vec obj = Vec::Zero(nv);
  obj(nv - 1) = 1.0;
  const LpResult lp = lp_solve(obj, sys);
  if (lp.status != LpStatus::Optimal) return {false, std::numeric_limits<double>::infinity()};
  const double residual = std::max(0.0, lp.value);
  return {std::sqrt(static_cast<double>(d)) * residual <= tol, residual};
}

bool member(const GeneratorSet& set, const Vec& y, double tol) { return membership(set, y, tol).member; }

// ---------------------------------------------------------------------------

Mat null_space(const Mat& a, double rel_tol) {
  const int d = static_cast<int>(a.cols());
  if (a.rows() == 0) return Mat::Identity(d, d);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  const double top = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * std::max(1.0, top)) ++rank;
  }
  return svd.matrixV().rightCols(d - rank);
}

namespace {

// Calls fn(indices) for every k-subset of {0..n-1}.
template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

bool contains_close(const std::vector<Vec>& vs, const Vec& v, double tol) {
  return std::any_of(vs.begin(), vs.end(), [&](const Vec& w) { return (w - v).norm() <= tol * (1.0 + v.norm()); });
}

}  // namespace

GeneratorSet to_generators(const PolyhedronH& region) {
  const int d = region.dim;
  if (d > 4) throw Error("enumeration_dim_exceeded", "vertex enumeration supports dimension <= 4");
  const int k = region.rows();
  constexpr double kTol = 1e-9;

  // Row-normalised copy.
  Mat a = region.normals;
  Vec b = region.offsets;
  for (int i = 0; i < k; ++i) {
    const double s = a.row(i).norm();
    if (s > 0.0) {
      a.row(i) /= s;
      b(i) /= s;
    }
  }

  const Mat lineality = null_space(a);
  const int ell = static_cast<int>(lineality.cols());
  const int pointed_dim = d - ell;

  GeneratorSet out(d);
  if (!is_feasible(region)) return out;

  auto feasible = [&](const Vec& x) { return k == 0 || (a * x - b).maxCoeff() <= kTol * (1.0 + b.cwiseAbs().maxCoeff()); };

  // Vertices of the pointed slice {x in region, lineality^T x = 0}.
  if (pointed_dim == 0) {
    out.points.push_back(Vec::Zero(d));
  } else {
    for_each_subset(k, pointed_dim, [&](const std::vector<int>& s) {
      Mat sys(d, d);
      Vec rhs(d);
      for (int i = 0; i < pointed_dim; ++i) {
        sys.row(i) = a.row(s[i]);
        rhs(i) = b(s[i]);
      }
      for (int i = 0; i < ell; ++i) {
        sys.row(pointed_dim + i) = lineality.col(i).transpose();
        rhs(pointed_dim + i) = 0.0;
      }
      Eigen::FullPivLU<Mat> lu(sys);
      lu.setThreshold(1e-10);
      if (lu.rank() < d) return;
      const Vec x = lu.solve(rhs);
      if (feasible(x) && !contains_close(out.points, x, 1e-9)) out.points.push_back(x);
    });
  }

  // Extreme rays of the pointed recession cone.
  if (pointed_dim >= 1) {
    for_each_subset(k, pointed_dim - 1, [&](const std::vector<int>& s) {
      Mat sys(pointed_dim - 1 + ell, d);
      for (int i = 0; i < pointed_dim - 1; ++i) sys.row(i) = a.row(s[i]);
      for (int i = 0; i < ell; ++i) sys.row(pointed_dim - 1 + i) = lineality.col(i).transpose();
      const Mat ns = null_space(sys);
      if (ns.cols() != 1) return;
      for (double sign : {1.0, -1.0}) {
        const Vec r = sign * ns.col(0).normalized();
        if (k > 0 && (a * r).maxCoeff() > kTol) continue;
        if (!contains_close(out.rays, r, 1e-9)) out.rays.push_back(r);
      }
    });
  }
  for (int i = 0; i < ell; ++i) {
    out.rays.push_back(lineality.col(i));
    out.rays.push_back(-lineality.col(i));
  }
  return out;
}

// ---------------------------------------------------------------------------

GeneratorSet deduplicated(const GeneratorSet& set, double tol) {
  GeneratorSet out(set.dim);
  for (const Vec& p : set.points) {
    if (!contains_close(out.points, p, tol)) out.points.push_back(p);
  }
  for (const Vec& r : set.rays) {
    const double n = r.norm();
    if (n <= tol) continue;
    const Vec u = r / n;
    const bool dup = std::any_of(out.rays.begin(), out.rays.end(),
                                 [&](const Vec& w) { return (w.normalized() - u).norm() <= tol; });
    if (!dup) out.rays.push_back(r);
  }
  return out;
}

GeneratorSet minkowski_scale_sum(const GeneratorSet& a, const GeneratorSet& b, double t) {
  if (a.dim != b.dim) throw Error("dim_mismatch", "Minkowski operands differ in dimension");
  if (a.points.empty() || b.points.empty()) return GeneratorSet::empty(a.dim);
  if (t == 1.0) return a;
  if (t == 0.0) return b;
  GeneratorSet out(a.dim);
  out.points.reserve(a.points.size() * b.points.size());
  for (const Vec& u : a.points) {
    for (const Vec& v : b.points) out.points.push_back(t * u + (1.0 - t) * v);
  }
  out.rays = a.rays;
  out.rays.insert(out.rays.end(), b.rays.begin(), b.rays.end());
  return deduplicated(out);
}

GeneratorSet minkowski_sum(const GeneratorSet& a, const GeneratorSet& b) {
  if (a.dim != b.dim) throw Error("dim_mismatch", "Minkowski operands differ in dimension");
  if (a.points.empty() || b.points.empty()) return GeneratorSet::empty(a.dim);
  GeneratorSet out(a.dim);
  for (const Vec& u : a.points) {
    for (const Vec& v : b.points) out.points.push_back(u + v);
  }
  out.rays = a.rays;
  out.rays.insert(out.rays.end(), b.rays.begin(), b.rays.end());
  return deduplicated(out);
}

GeneratorSet add_rays(const GeneratorSet& a, std::span<const Vec> rays) {
  GeneratorSet out = a;
  for (const Vec& r : rays) {
    if (r.size() != a.dim) throw Error("dim_mismatch", "ray has wrong length");
    out.rays.push_back(r);
  }
  return deduplicated(out);
}

}  // namespace svi
