#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cubeslice/bounds.hpp"
#include "cubeslice/densities.hpp"
#include "cubeslice/grassmann.hpp"
#include "cubeslice/parallel.hpp"
#include "cubeslice/slabs.hpp"

namespace cubeslice {

/// pi_E(f) at the point of E with coordinates x in E's basis.
struct MarginalQuery {
  ProductDensity f;
  Subspace E;
  Eigen::VectorXd x;
};

/// Evaluates pi_E(f)(x) = int_{R^{n-k}} prod f_i(X_i + <y, w_i>) dy, where
/// X = E x and w_i are the rows of an orthonormal basis of E^perp. Factors
/// with w_i = 0 are constants f_i(X_i); the others are integrated exactly
/// as step functions of linear forms (n - k <= 3).
class MarginalEvaluator {
 public:
  MarginalEvaluator(const ProductDensity& f, const Subspace& E);

  double operator()(const Eigen::VectorXd& x) const;

  int dim() const { return k_; }
  int codim() const { return static_cast<int>(frame_.cols()); }

 private:
  ProductDensity f_;
  Eigen::MatrixXd basis_;  // n x k
  Eigen::MatrixXd frame_;  // n x (n-k), rows w_i
  std::vector<bool> constant_;
  int k_;
};

double marginal_at(const MarginalQuery& q, double tol);

/// Stratified Monte Carlo over the box in R^{n-k} that contains the support
/// of y -> prod f_i(X_i + <y, w_i>). `bandwidth > 0` replaces the box
/// half-widths (same center) by that value.
McEstimate marginal_mc(const MarginalQuery& q, std::size_t samples, double bandwidth,
                       std::uint64_t seed, unsigned workers = 1);

struct GridSup {
  double value = 0.0;          // max of evaluated values: a lower bound for the sup
  Eigen::VectorXd argmax;      // E-coordinates of the best point
  std::size_t evaluations = 0;
  int refinement_levels = 0;
};

/// Default grid: centered at the support midpoints mapped into E, radius
/// half the support diagonal, points per axis 41/15/9/7/5 for k = 1/2/3/4/more.
struct GridSpec {
  Eigen::VectorXd center;
  double radius = 0.0;
  double step = 0.0;
};
GridSpec default_grid(const ProductDensity& f, const Subspace& E);

inline constexpr std::size_t kGridBudget = 2'000'000;

/// Max of pi_E(f) over a cubic grid, then local 3^k stencil climbing from
/// the best point with the step halved while the gain per level is at least
/// tol (relative). Throws when the grid exceeds kGridBudget points.
GridSup marginal_grid_sup(const ProductDensity& f, const Subspace& E, const GridSpec& grid,
                          double tol, unsigned workers = 1);
GridSup marginal_grid_sup(const ProductDensity& f, const Subspace& E, double grid_radius,
                          double grid_step, double tol, unsigned workers = 1);

struct TheoremRecord {
  double sup_lower_bound = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // sup_lower_bound / bound - 1
  bool pass = false;
  BoundReport report;
};

/// Grid sup of pi_E(f) against bound_main with c_i = sup f_i.
TheoremRecord verify_main_theorem(const ProductDensity& f, const Subspace& E, double tol,
                                  unsigned workers = 1);

struct RogozinRecord {
  double sup_lb = 0.0;
  double cube_section = 0.0;
  bool pass = false;
};

/// Grid sup of the marginal on the line spanned by theta against
/// |Q_n ∩ theta^perp|. f must be in the unit class.
RogozinRecord rogozin_check(const ProductDensity& f, const Eigen::VectorXd& theta, double tol,
                            unsigned workers = 1);

struct SmallBallRecord {
  double estimate = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  bool vacuous = false;  // bound >= 1
  bool pass = false;     // estimate <= bound + 3 std_error
};

/// P(|P_E X - z| <= eps sqrt(k)) for X ~ f, by inverse-CDF sampling, with
/// the bound (C sqrt(2 e pi) eps)^k, C = min_constant(n, k)^{1/k}.
SmallBallRecord small_ball(const ProductDensity& f, const Subspace& E, const Eigen::VectorXd& z,
                           double eps, std::size_t samples, std::uint64_t seed,
                           unsigned workers = 1);

}  // namespace cubeslice
