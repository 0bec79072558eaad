#include "svi/instance.hpp"

#include <limits>

namespace svi {

ConvexObjective::ConvexObjective(std::vector<AffinePiece> pieces, std::optional<Mat> quadratic)
    : pieces_(std::move(pieces)), q_(std::move(quadratic)) {
  if (pieces_.empty()) throw Error("objective_pieces", "objective needs at least one affine piece");
  s_ = static_cast<int>(pieces_.front().g_p.size());
  n_ = static_cast<int>(pieces_.front().g_x.size());
  for (const AffinePiece& pc : pieces_) {
    if (pc.g_p.size() != s_ || pc.g_x.size() != n_) throw Error("dim_mismatch", "objective pieces differ in shape");
  }
  if (q_) {
    const int d = s_ + n_;
    if (q_->rows() != d || q_->cols() != d) throw Error("dim_mismatch", "quadratic term must be (s+n) x (s+n)");
    if ((*q_ - q_->transpose()).cwiseAbs().maxCoeff() > 1e-12) throw Error("objective_quadratic", "Q must be symmetric");
    if (d > 0 && Eigen::SelfAdjointEigenSolver<Mat>(*q_).eigenvalues().minCoeff() < -1e-10) {
      throw Error("objective_quadratic", "Q must be positive semidefinite");
    }
  }
}

bool ConvexObjective::polyhedral() const { return !q_ || q_->cwiseAbs().maxCoeff() == 0.0; }

double ConvexObjective::piece_value(std::size_t k, const Vec& p, const Vec& x) const {
  const AffinePiece& pc = pieces_.at(k);
  return pc.g_p.dot(p) + pc.g_x.dot(x) + pc.c;
}

double ConvexObjective::max_affine(const Vec& p, const Vec& x) const {
  double v = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pieces_.size(); ++k) v = std::max(v, piece_value(k, p, x));
  return v;
}

double ConvexObjective::operator()(const Vec& p, const Vec& x) const {
  double v = max_affine(p, x);
  if (q_) {
    Vec z(s_ + n_);
    z << p, x;
    v += 0.5 * z.dot(*q_ * z);
  }
  return v;
}

Vec ConvexObjective::quadratic_gradient(const Vec& p, const Vec& x) const {
  Vec z(s_ + n_);
  z << p, x;
  if (!q_) return Vec::Zero(s_ + n_);
  return *q_ * z;
}

ProblemInstance::ProblemInstance(ConvexObjective phi, SetValuedMap f, PolyhedralCone c)
    : objective(std::move(phi)), map(std::move(f)), cone(std::move(c)) {
  if (objective.param_dim() != map.param_dim() || objective.state_dim() != map.state_dim()) {
    throw Error("dim_mismatch", "objective and map disagree on (s, n)");
  }
  if (cone.dim() != map.image_dim()) throw Error("dim_mismatch", "cone and map disagree on m");
}

}  // namespace svi
