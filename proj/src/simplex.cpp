#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "svi/poly_kernel.hpp"

namespace svi {

namespace {

constexpr double kPivotEps = 1e-11;
constexpr double kCostEps = 1e-10;
constexpr double kRatioTie = 1e-12;

// Dense tableau for  min c^T u  s.t.  T u = rhs, u >= 0.
// The last row holds reduced costs, the last column the right-hand side.
class Tableau {
 public:
  Tableau(int rows, int cols) : t_(Mat::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

  int rows() const { return static_cast<int>(basis_.size()); }
  int cols() const { return static_cast<int>(t_.cols()) - 1; }
  double& at(int i, int j) { return t_(i, j); }
  double at(int i, int j) const { return t_(i, j); }
  double& rhs(int i) { return t_(i, cols()); }
  double rhs(int i) const { return t_(i, cols()); }
  double reduced_cost(int j) const { return t_(rows(), j); }
  double objective() const { return -t_(rows(), cols()); }
  std::vector<int>& basis() { return basis_; }
  const std::vector<int>& basis() const { return basis_; }

  void set_costs(const Vec& cost) {
    const int m = rows();
    t_.row(m).setZero();
    t_.row(m).head(cols()) = cost.transpose();
    for (int i = 0; i < m; ++i) {
      const double cb = cost(basis_[i]);
      if (cb != 0.0) t_.row(m) -= cb * t_.row(i);
    }
  }

  void pivot(int r, int j) {
    t_.row(r) /= t_(r, j);
    for (int i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, j);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    for (int i = 0; i < rows(); ++i) {
      if (rhs(i) < 0.0 && rhs(i) > -1e-12) rhs(i) = 0.0;
    }
    basis_[r] = j;
  }

 private:
  Mat t_;
  std::vector<int> basis_;
};

enum class PhaseOutcome { Optimal, Unbounded };

struct PhaseResult {
  PhaseOutcome outcome;
  int entering = -1;
};

// Bland's rule: smallest eligible entering index, ties in the ratio test
// broken by the smallest basic variable index.
PhaseResult run_phase(Tableau& tab, int allowed_cols, int& iterations, int max_iterations) {
  for (;;) {
    int entering = -1;
    for (int j = 0; j < allowed_cols; ++j) {
      if (tab.reduced_cost(j) < -kCostEps) {
        entering = j;
        break;
      }
    }
    if (entering < 0) return {PhaseOutcome::Optimal};

    int leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < tab.rows(); ++i) {
      const double a = tab.at(i, entering);
      if (a <= kPivotEps) continue;
      const double ratio = tab.rhs(i) / a;
      if (leaving < 0 || ratio < best_ratio - kRatioTie * (1.0 + std::abs(best_ratio))) {
        leaving = i;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + kRatioTie * (1.0 + std::abs(best_ratio)) &&
                 tab.basis()[i] < tab.basis()[leaving]) {
        leaving = i;
        best_ratio = std::min(best_ratio, ratio);
      }
    }
    if (leaving < 0) return {PhaseOutcome::Unbounded, entering};

    if (++iterations > max_iterations) throw Error("lp_stalled", "simplex iteration guard exceeded");
    tab.pivot(leaving, entering);
  }
}

}  // namespace

LpResult lp_solve(const Vec& objective, const PolyhedronH& region, const LpOptions& opts) {
  const int n = region.dim;
  if (objective.size() != n) throw Error("dim_mismatch", "objective length differs from region dimension");

  // Normalise rows; rows with a zero normal are either void or infeasible.
  std::vector<int> kept;
  std::vector<double> scale;
  for (int i = 0; i < region.rows(); ++i) {
    const double s = region.normals.row(i).cwiseAbs().maxCoeff();
    if (s <= 1e-300) {
      if (region.offsets(i) < -tol::kFeas) {
        LpResult r;
        r.status = LpStatus::Infeasible;
        return r;
      }
      continue;
    }
    kept.push_back(i);
    scale.push_back(s);
  }

  const double cscale = objective.size() > 0 ? objective.cwiseAbs().maxCoeff() : 0.0;
  if (kept.empty()) {
    LpResult res;
    if (cscale == 0.0) {
      res.status = LpStatus::Optimal;
      res.point = Vec::Zero(n);
    } else {
      res.status = LpStatus::Unbounded;
      res.direction = -objective.normalized();
    }
    return res;
  }
  const Vec c = cscale > 0.0 ? Vec(objective / cscale) : Vec(objective);

  const int m = static_cast<int>(kept.size());
  int n_art = 0;
  for (int r = 0; r < m; ++r) {
    if (region.offsets(kept[r]) < 0.0) ++n_art;
  }
  // Columns: x+ [0,n), x- [n,2n), slacks [2n,2n+m), artificials after.
  const int n_struct = 2 * n + m;
  const int n_cols = n_struct + n_art;
  Tableau tab(m, n_cols);
  int art = n_struct;
  for (int r = 0; r < m; ++r) {
    const int i = kept[r];
    const double b = region.offsets(i) / scale[r];
    const double sign = b < 0.0 ? -1.0 : 1.0;
    for (int k = 0; k < n; ++k) {
      const double a = region.normals(i, k) / scale[r];
      tab.at(r, k) = sign * a;
      tab.at(r, n + k) = -sign * a;
    }
    tab.at(r, 2 * n + r) = sign;
    tab.rhs(r) = sign * b;
    if (sign < 0.0) {
      tab.at(r, art) = 1.0;
      tab.basis()[r] = art++;
    } else {
      tab.basis()[r] = 2 * n + r;
    }
  }

  const int max_it = opts.max_iterations > 0 ? opts.max_iterations : 50 * (n_cols + m) + 1000;
  int iterations = 0;

  if (n_art > 0) {
    Vec phase1 = Vec::Zero(n_cols);
    phase1.tail(n_art).setOnes();
    tab.set_costs(phase1);
    run_phase(tab, n_cols, iterations, max_it);
    if (tab.objective() > 1e-9) {
      LpResult res;
      res.status = LpStatus::Infeasible;
      res.iterations = iterations;
      return res;
    }
    // Drive zero-level artificials out of the basis; rows that cannot pivot
    // are redundant and keep an inert artificial.
    for (int r = 0; r < m; ++r) {
      if (tab.basis()[r] < n_struct) continue;
      int best = -1;
      double best_abs = 1e-9;
      for (int j = 0; j < n_struct; ++j) {
        if (std::abs(tab.at(r, j)) > best_abs) {
          best = j;
          best_abs = std::abs(tab.at(r, j));
        }
      }
      if (best >= 0) {
        tab.pivot(r, best);
      } else {
        for (int j = 0; j < n_struct; ++j) tab.at(r, j) = 0.0;
        tab.rhs(r) = 0.0;
      }
    }
  }

  Vec phase2 = Vec::Zero(n_cols);
  phase2.head(n) = c;
  phase2.segment(n, n) = -c;
  tab.set_costs(phase2);
  const PhaseResult pr = run_phase(tab, n_struct, iterations, max_it);

  LpResult res;
  res.iterations = iterations;
  if (pr.outcome == PhaseOutcome::Unbounded) {
    Vec d = Vec::Zero(n_cols);
    d(pr.entering) = 1.0;
    for (int r = 0; r < m; ++r) d(tab.basis()[r]) = -tab.at(r, pr.entering);
    Vec dx = d.head(n) - d.segment(n, n);
    res.status = LpStatus::Unbounded;
    res.direction = dx / dx.norm();
    return res;
  }

  Vec u = Vec::Zero(n_cols);
  for (int r = 0; r < m; ++r) u(tab.basis()[r]) = tab.rhs(r);
  res.status = LpStatus::Optimal;
  res.point = u.head(n) - u.segment(n, n);
  res.value = objective.dot(res.point);
  return res;
}

bool is_feasible(const PolyhedronH& region) {
  return lp_solve(Vec::Zero(region.dim), region).status != LpStatus::Infeasible;
}

}  // namespace svi
