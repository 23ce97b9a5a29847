#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cubeslice/rng.hpp"

namespace cubeslice {

/// Raised when a density or other value object fails one of its invariants;
/// `invariant()` names the violated rule.
class InvariantError : public std::invalid_argument {
 public:
  InvariantError(std::string invariant, const std::string& detail)
      : std::invalid_argument(invariant + ": " + detail), invariant_(std::move(invariant)) {}
  const std::string& invariant() const { return invariant_; }

 private:
  std::string invariant_;
};

struct Piece {
  double lo;
  double hi;
  double value;

  friend bool operator==(const Piece&, const Piece&) = default;
};

/// Nonnegative piecewise-constant function on R with bounded support.
///
/// Canonical form: pieces sorted by position, zero-valued pieces dropped,
/// touching pieces with equal values merged. Values are taken on half-open
/// intervals [lo, hi) when evaluating pointwise.
class StepDensity {
 public:
  StepDensity() = default;
  explicit StepDensity(std::vector<Piece> pieces);

  /// value * 1_[lo, hi)
  static StepDensity indicator(double lo, double hi, double value = 1.0);

  const std::vector<Piece>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }

  double operator()(double x) const;

  double support_lo() const;
  double support_hi() const;

  /// Unit integral within tol.
  bool is_normalized(double tol = 1e-12) const;
  /// Throws InvariantError("normalized") unless the integral is 1 within tol.
  void require_normalized(double tol = 1e-12) const;

  StepDensity shifted(double offset) const;

  friend bool operator==(const StepDensity&, const StepDensity&) = default;

 private:
  std::vector<Piece> pieces_;
};

double l1_norm(const StepDensity& f);
double sup_norm(const StepDensity& f);
/// L^p norm for p >= 1; p = infinity gives the sup norm.
double lp_norm(const StepDensity& f, double p);

/// |{f > t}| for t >= 0.
double level_set_measure(const StepDensity& f, double t);

/// Symmetric decreasing rearrangement f^*.
StepDensity rearrange(const StepDensity& f);

/// Layer-cake evaluation of int_0^{sup f} |{f > t}| dt as a finite sum.
double layer_cake_integral(const StepDensity& f);

/// Random normalized density with at most `max_pieces` pieces and sup norm
/// at most `bound`.
StepDensity random_density(Rng& rng, int max_pieces, double bound);

/// c/s f(x s/c) with s = sup f: same integral, sup norm c.
StepDensity with_sup_norm(const StepDensity& f, double c);

/// Inverse of the (piecewise-linear) distribution function of a normalized
/// density, for u in [0, 1).
double inverse_cdf(const StepDensity& f, double u);

/// f(x) = prod_i f_i(x_i).
class ProductDensity {
 public:
  ProductDensity() = default;
  explicit ProductDensity(std::vector<StepDensity> factors);

  /// n copies of the indicator of [-1/2, 1/2]: the unit cube Q_n.
  static ProductDensity cube(int n);

  int dim() const { return static_cast<int>(factors_.size()); }
  const std::vector<StepDensity>& factors() const { return factors_; }
  const StepDensity& factor(int i) const { return factors_[static_cast<std::size_t>(i)]; }

  double operator()(const Eigen::VectorXd& x) const;

  /// Every factor has unit integral and sup norm at most 1 (within tol).
  bool in_unit_class(double tol = 1e-12) const;
  /// Throws InvariantError naming the first violated class condition.
  void require_unit_class(double tol = 1e-12) const;

  Eigen::VectorXd sup_norms() const;
  Eigen::VectorXd support_midpoints() const;

 private:
  std::vector<StepDensity> factors_;
};

}  // namespace cubeslice
