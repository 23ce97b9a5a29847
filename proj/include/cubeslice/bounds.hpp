#pragma once

#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cubeslice/densities.hpp"
#include "cubeslice/grassmann.hpp"
#include "cubeslice/rng.hpp"

namespace cubeslice {

struct BallIntegral {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
};

/// I(p) = (1/pi) int_R |sin t / t|^p dt for p >= 2.
///
/// The integral over [0, N pi] is done period by period; the rest uses the
/// period mean mu_p of |sin|^p, leaving a remainder of at most
/// p (pi/2)^2 (N pi)^{-p-1} that is charged to the error.
BallIntegral ball_integral(double p, double tol);

/// (n/(n-k))^{(n-k)/2}
double block_constant(int n, int k);
/// 2^{k/2}
double paired_constant(int k);
/// Smaller of the two constants; the paired one only applies when k <= n/2.
double min_constant(int n, int k);

struct FrameConstant {
  double product = 0.0;  // prod a_i^{-a_i^2}, with 0^0 = 1
  double bound = 0.0;    // (n/(n-k))^{(n-k)/2}
};

/// Needs a_i in [0,1] and sum a_i^2 = n - k within 1e-8.
FrameConstant frame_constant_check(const Eigen::VectorXd& a, int k);
/// Same with k = n - round(sum a_i^2).
FrameConstant frame_constant_check(const Eigen::VectorXd& a);

/// (n/(n-k))^{(n-k)/2} prod z_i^{beta_i}, beta_i = |P_H e_i|^2, k = codim H.
double bound_box1(const Subspace& H, const Eigen::VectorXd& z);
/// 2^{k/2} prod z_j^{beta_j} with beta from box2_exponents(H); k <= n/2.
double bound_box2(const Subspace& H, const Eigen::VectorXd& z);

enum class BoundBranch { Block, Paired };

const char* to_string(BoundBranch b);

struct BoundReport {
  double bound_value = 0.0;
  double constant = 0.0;
  BoundBranch branch = BoundBranch::Block;
  ExponentAssignment exponents;                       // gamma of the active branch
  ExponentAssignment block_exponents;                 // gamma_i = |P_E e_i|^2
  std::optional<ExponentAssignment> paired_exponents;  // 1 - beta(E^perp), k <= n/2 only
  double block_constant = 0.0;
  std::optional<double> paired_constant;

  /// constant * prod c_i^{gamma_i} from the stored fields.
  double recompute(const Eigen::VectorXd& c) const;
};

/// Bound on sup pi_E(f) for f = prod f_i with sup f_i = c_i.
BoundReport bound_main(const Subspace& E, const Eigen::VectorXd& c);

/// Normal density with the given mean and variance.
struct Gaussian {
  double mean = 0.0;
  double variance = 1.0;
  double operator()(double x) const;
};

using BLDensity = std::variant<StepDensity, Gaussian>;

/// Unit vectors u_i (rows) and weights c_i > 0 with sum c_i u_i u_i^T = I_d.
class BLSystem {
 public:
  BLSystem(Eigen::MatrixXd directions, Eigen::VectorXd weights);

  int dim() const { return static_cast<int>(directions_.cols()); }
  int size() const { return static_cast<int>(directions_.rows()); }
  const Eigen::MatrixXd& directions() const { return directions_; }
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  Eigen::MatrixXd directions_;
  Eigen::VectorXd weights_;
};

/// Three unit vectors in the plane at 120 degrees with c_i = 2/3.
BLSystem mercedes_system();

/// v_i standard Gaussian, whitened by (sum v v^T)^{-1/2}; u_i = v_i/|v_i|,
/// c_i = |v_i|^2.
BLSystem random_bl_system(Rng& rng, int d, int m);

struct BLCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double lhs_error = 0.0;
  bool converged = true;
};

/// lhs = int_{R^d} prod f_i(<u_i, x>)^{c_i} dx, rhs = prod (int f_i)^{c_i}.
/// Step densities are integrated exactly on polytope pieces; any Gaussian
/// factor switches to nested adaptive quadrature. d <= 3.
BLCheck bl_check(const BLSystem& system, const std::vector<BLDensity>& densities, double tol);

}  // namespace cubeslice
