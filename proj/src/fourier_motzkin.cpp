#include <algorithm>
#include <cmath>
#include <vector>

#include "svi/poly_kernel.hpp"

namespace svi {

namespace {

struct Row {
  Vec a;
  double b;
};

// Scales to unit max-coefficient and zeroes coefficients below the drop
// threshold. Returns false for rows whose normal vanished.
bool normalise(Row& r) {
  for (Eigen::Index i = 0; i < r.a.size(); ++i) {
    if (std::abs(r.a(i)) < tol::kFmDrop) r.a(i) = 0.0;
  }
  const double s = r.a.cwiseAbs().maxCoeff();
  if (s == 0.0) return false;
  r.a /= s;
  r.b /= s;
  return true;
}

// Pairwise pruning: among rows with identical (normalised) normals keep the
// tightest offset.
void prune_parallel(std::vector<Row>& rows) {
  std::vector<Row> out;
  out.reserve(rows.size());
  for (Row& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Row& o) { return (o.a - r.a).cwiseAbs().maxCoeff() <= 1e-9; });
    if (it == out.end()) {
      out.push_back(std::move(r));
    } else {
      it->b = std::min(it->b, r.b);
    }
  }
  rows = std::move(out);
}

// LP-based redundancy removal, used only when the row count grows large.
void prune_redundant(std::vector<Row>& rows, const std::vector<bool>& alive_vars) {
  const int d = static_cast<int>(alive_vars.size());
  for (std::size_t j = 0; j < rows.size();) {
    PolyhedronH others(d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i != j) others.add_row(rows[i].a, rows[i].b);
    }
    // Relaxed copy of row j bounds the LP so redundancy is decidable.
    others.add_row(rows[j].a, rows[j].b + 1.0);
    const LpResult lp = lp_solve(-rows[j].a, others);
    if (lp.status == LpStatus::Optimal && -lp.value <= rows[j].b + 1e-9 * (1.0 + std::abs(rows[j].b))) {
      rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(j));
    } else {
      ++j;
    }
  }
}

}  // namespace

PolyhedronH fm_project(const PolyhedronH& system, std::span<const int> keep) {
  const int d = system.dim;
  if (d > tol::kFmMaxDim) throw Error("fm_dim_exceeded", "joint dimension " + std::to_string(d) + " above limit");
  std::vector<bool> kept(d, false);
  for (int k : keep) {
    if (k < 0 || k >= d) throw Error("dim_mismatch", "keep index out of range");
    kept[k] = true;
  }
  const int out_dim = static_cast<int>(keep.size());

  std::vector<Row> rows;
  for (int j = 0; j < system.rows(); ++j) {
    Row r{system.normals.row(j).transpose(), system.offsets(j)};
    if (!normalise(r)) {
      if (r.b < -tol::kFeas) return PolyhedronH::infeasible(std::max(out_dim, 1));
      continue;
    }
    rows.push_back(std::move(r));
  }
  prune_parallel(rows);

  std::vector<int> eliminate;
  for (int v = 0; v < d; ++v) {
    if (!kept[v]) eliminate.push_back(v);
  }

  while (!eliminate.empty()) {
    // Eliminate the variable with the fewest generated rows first.
    std::size_t pick = 0;
    long best_cost = -1;
    for (std::size_t e = 0; e < eliminate.size(); ++e) {
      long pos = 0, neg = 0;
      for (const Row& r : rows) {
        if (r.a(eliminate[e]) > 0.0) ++pos;
        if (r.a(eliminate[e]) < 0.0) ++neg;
      }
      const long cost = pos * neg - pos - neg;
      if (best_cost < 0 || cost < best_cost) {
        best_cost = cost;
        pick = e;
      }
    }
    const int v = eliminate[pick];
    eliminate.erase(eliminate.begin() + static_cast<std::ptrdiff_t>(pick));

    std::vector<Row> pos, neg, next;
    for (Row& r : rows) {
      if (r.a(v) > 0.0) {
        pos.push_back(std::move(r));
      } else if (r.a(v) < 0.0) {
        neg.push_back(std::move(r));
      } else {
        next.push_back(std::move(r));
      }
    }
    for (const Row& p : pos) {
      for (const Row& q : neg) {
        const double wp = -q.a(v);
        const double wq = p.a(v);
        Row c{wp * p.a + wq * q.a, wp * p.b + wq * q.b};
        c.a(v) = 0.0;
        if (!normalise(c)) {
          if (c.b < -tol::kFeas) return PolyhedronH::infeasible(std::max(out_dim, 1));
          continue;
        }
        next.push_back(std::move(c));
      }
    }
    prune_parallel(next);
    rows = std::move(next);
    if (rows.size() > 64) {
      std::vector<bool> alive(d, true);
      prune_redundant(rows, alive);
    }
  }

  PolyhedronH out(out_dim);
  for (const Row& r : rows) {
    Vec a(out_dim);
    for (int i = 0; i < out_dim; ++i) a(i) = r.a(keep[i]);
    out.add_row(a, r.b);
  }
  return out;
}

PolyhedronH halfspaces_of(const GeneratorSet& set) {
  const int m = set.dim;
  if (set.points.empty()) return PolyhedronH::infeasible(m);
  const int k = static_cast<int>(set.points.size());
  const int r = static_cast<int>(set.rays.size());
  const int nv = m + k + r;  // (y, nu, mu)
  PolyhedronH sys(nv);
  Vec row(nv);
  for (int c = 0; c < m; ++c) {
    row.setZero();
    row(c) = 1.0;
    for (int i = 0; i < k; ++i) row(m + i) = -set.points[i](c);
    for (int i = 0; i < r; ++i) row(m + k + i) = -set.rays[i](c);
    sys.add_row(row, 0.0);
    sys.add_row(-row, 0.0);
  }
  row.setZero();
  row.segment(m, k).setOnes();
  sys.add_row(row, 1.0);
  sys.add_row(-row, -1.0);
  for (int i = 0; i < k + r; ++i) {
    row.setZero();
    row(m + i) = -1.0;
    sys.add_row(row, 0.0);
  }
  std::vector<int> keep(m);
  for (int c = 0; c < m; ++c) keep[c] = c;
  return fm_project(sys, keep);
}

}  // namespace svi
