#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "svi/feasibility.hpp"

namespace svi {

enum class IncreaseMethod { FanAnalytic, RotationAnalytic, NumericSampled, None };

const char* to_string(IncreaseMethod m);

/// Lower bound on the C-increase constant of a map at (every point of) its domain.
struct IncreaseCertificate {
  std::optional<double> alpha_lower;  // > 1 whenever method != None
  IncreaseMethod method = IncreaseMethod::None;
  double eta = 0.0;  // covering bound, fan certificates only
  std::optional<Vec> interior_witness;
  std::string notes;
};

/// sur(L) = min over unit y of |L^T y| = sqrt(lambda_min(L L^T)), 0 when L
/// has more rows than columns or is rank-deficient.
double open_covering_bound(const Mat& lam);

/// Which variable a fan certificate treats as the argument.
enum class FanVariable {
  Joint,      // z = (p, x); generators [M_i L_i]; needs b_i = 0
  StateOnly,  // z = x; generators L_i; needs all M_i and all b_i equal
};

/// eta = min of sur over the generators and 20 interior points per generator
/// pair; an LP looks for z in [-1,1]^d with <a_j, G_i z> >= 1e-6 for all i, j.
/// Success gives alpha_lower = eta + 1. Throws Error("not_a_fan") for
/// AffinePlusCone maps and Error("not_homogeneous") when the structural
/// requirement of the chosen variable fails.
IncreaseCertificate fan_increase_certificate(const SetValuedMap& f, const PolyhedralCone& c,
                                             FanVariable variable = FanVariable::Joint);

/// (1 - ell) sqrt(n) for lambda O + H with O orthogonal and H ell-Lipschitz.
/// Errors: "rescale_too_small" (lambda <= n), "perturbation_too_large"
/// (ell >= 1 - 1/sqrt(n)), "invalid_argument" (n < 2 or ell < 0).
double rotation_increase_bound(int n, double lambda, double ell);

enum class IncreaseMode {
  State,  // G = F(p, .) around x0
  Joint,  // G = F around (p, x0)
};

struct IncreaseCheckOptions {
  double delta = 0.5;
  int radii = 4;
  int dirs = 4;
  std::uint64_t seed = 1;
  IncreaseMode mode = IncreaseMode::State;
};

struct IncreaseCheckReport {
  bool holds_at_sampling = false;
  double worst_margin = 0.0;  // min over r of the best u's  r - max dist
};

/// Samples the inclusion B(G(u), alpha r) in B(G(x0) + C, r) for
/// r = delta k / radii. Throws Error("precondition_violated") when
/// F(p, x0) is already inside C and Error("verification_unavailable") when the
/// target set cannot be put in H-form.
IncreaseCheckReport verify_increase_numeric(const SetValuedMap& f, const PolyhedralCone& c, const Vec& p,
                                            const Vec& x0, double alpha, const IncreaseCheckOptions& opts = {});

enum class AlphaMethod { Auto, Analytic, Numeric };

struct AlphaFOptions {
  AlphaMethod method = AlphaMethod::Auto;
  double alpha_max = 10.0;
  double resolution = 1e-3;
  IncreaseCheckOptions check;
};

struct AlphaFReport {
  double value = 0.0;          // +inf when vacuous
  std::string status;          // "certified", "none" or "vacuous"
  std::string label = "grid_restricted";
  std::string method;          // "fan_analytic" or "numeric_sampled"
  int points_with_excess = 0;
  std::optional<PointPX> worst;
};

/// Infimum over grid points with positive excess of a per-point increase
/// lower bound (an analytic fan certificate when one exists, else bisection
/// on alpha with verify_increase_numeric).
AlphaFReport alpha_f_estimate(const SetValuedMap& f, const PolyhedralCone& c, std::span<const PointPX> grid,
                              const AlphaFOptions& opts = {});

}  // namespace svi
