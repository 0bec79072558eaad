#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace svi {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Error carrying a stable machine-readable code (e.g. "lp_stalled").
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& detail)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}
  explicit Error(std::string code) : std::runtime_error(code), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

namespace tol {
inline constexpr double kFeas = 1e-9;        // constraint satisfaction
inline constexpr double kProj = 1e-8;        // projection accuracy
inline constexpr double kMember = 1e-9;      // default membership tolerance
inline constexpr double kActive = 1e-7;      // relative activity of pieces / generators
inline constexpr double kFmDrop = 1e-12;     // Fourier-Motzkin coefficient drop
inline constexpr int kFmMaxDim = 8;
inline constexpr double kDykstraMove = 1e-10;
inline constexpr int kDykstraSweeps = 100000;
}  // namespace tol

}  // namespace svi
