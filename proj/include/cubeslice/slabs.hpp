#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cubeslice {

/// One piece of a step function of a linear form: weight on lo <= <w,y> <= hi.
struct SlabPiece {
  double lo;
  double hi;
  double weight;
};

/// A step function y -> sum_p weight_p 1[lo_p <= <w,y> <= hi_p] on R^d.
struct SlabFactor {
  Eigen::VectorXd w;
  std::vector<SlabPiece> pieces;
};

/// Integral over R^d of the product of the given slab factors, for d in
/// {1, 2, 3}. Every term of the expanded product is the weight times the
/// volume of a convex polytope; these volumes are computed exactly (up to
/// rounding) by clipping, sharing clipped regions across terms.
///
/// The directions w must span R^d, otherwise the integral is unbounded and
/// std::invalid_argument is thrown.
double integrate_slab_product(std::span<const SlabFactor> factors, int dim);

/// Volume of the polytope {y in R^d : A y <= b}, d in {1, 2, 3}, clipped to
/// the axis box [-half_width, half_width]. Used as a building block and as a
/// test oracle.
double clipped_polytope_volume(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                               const Eigen::VectorXd& half_width);

}  // namespace cubeslice
