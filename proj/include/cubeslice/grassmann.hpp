#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "cubeslice/rng.hpp"

namespace cubeslice {

/// A linear subspace of R^n, stored as an n x k matrix with orthonormal
/// columns. Also used for complements and for single directions (k = 1).
class Subspace {
 public:
  Subspace() = default;

  /// Wraps an orthonormal basis; throws std::invalid_argument when the
  /// columns are not orthonormal to within `tol` (max entry of B^T B - I).
  explicit Subspace(Eigen::MatrixXd basis, double tol = 1e-12);

  /// Orthonormalizes the columns of `vectors` (which must be independent).
  static Subspace spanned_by(const Eigen::MatrixXd& vectors);

  /// span{e_i : i in indices}, 0-based.
  static Subspace coordinate(int n, std::initializer_list<int> indices);

  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const Eigen::MatrixXd& basis() const { return basis_; }

  Eigen::MatrixXd projector() const { return basis_ * basis_.transpose(); }
  double orthonormality_defect() const;

 private:
  Eigen::MatrixXd basis_;
};

/// Max-entry distance between the orthogonal projectors of two subspaces.
double projector_distance(const Subspace& a, const Subspace& b);

/// Tight frame w_1..w_n in R^d (rows of `vectors`) with sum w_i w_i^T = I_d.
struct Frame {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd norms;

  int dim() const { return static_cast<int>(vectors.cols()); }
  int size() const { return static_cast<int>(vectors.rows()); }

  /// u_i = w_i / a_i is undefined when a_i vanishes.
  bool has_direction(int i, double zero_tol = 1e-14) const { return norms(i) > zero_tol; }
  Eigen::VectorXd direction(int i) const;

  /// Max entry of sum w_i w_i^T - I_d.
  double tightness_defect() const;
};

/// Exponents beta_i in [0,1] with a prescribed sum.
struct ExponentAssignment {
  Eigen::VectorXd betas;
  double target_sum = 0.0;

  /// Throws std::logic_error when an exponent leaves [0,1] or the sum is off.
  void validate(double tol = 1e-10) const;
  /// 1 - beta_i, with target n - target_sum.
  ExponentAssignment complement() const;
};

Subspace orthonormal_complement(const Subspace& E);

/// Haar-distributed element of G_{n,k}: QR of an n x k standard Gaussian
/// matrix, with signs fixed so that R has a positive diagonal.
Subspace haar_sample(int n, int k, Rng& rng);

/// w_i = V^T e_i where the columns of V span E^perp.
Frame frame_of_complement(const Subspace& E);

/// gamma_i = |P_E e_i|^2, summing to dim E.
ExponentAssignment projection_weights(const Subspace& E);

/// Exponents for the 2^{k/2} box bound on a subspace H of codimension k
/// (k <= n/2). Uses beta_j = 1 - |P_{H^perp} e_j|^2 when every such norm is at
/// most 1/sqrt(2); otherwise drops the coordinate with the largest norm
/// (beta_i = 0) and recurses on the projection of H onto e_i^perp.
ExponentAssignment box2_exponents(const Subspace& H);

struct ProjectionCheck {
  double lhs;  // |b_i| |A|_k
  double rhs;  // |P_i A|_k
};

/// For the parallelepiped A spanned by the columns of `generators` inside
/// b^perp, compares |b_i| |A| with the volume of its projection onto e_i^perp.
ProjectionCheck parallelepiped_projection_check(const Eigen::VectorXd& b,
                                                const Eigen::MatrixXd& generators, int i);

struct SearchResult {
  Subspace best;
  double value = 0.0;
  int restart = -1;
};

/// Random-restart local search for the maximum of `objective` over G_{n,k}.
/// Each restart starts from a Haar sample of its own substream and takes
/// random tangent steps, re-orthonormalizing and accepting improvements;
/// the step halves after 10 consecutive failures. Restarts may run in
/// parallel and are merged by value (lowest restart index on ties).
SearchResult grassmann_search_max(const std::function<double(const Subspace&)>& objective, int n,
                                  int k, int restarts, int steps, std::uint64_t seed,
                                  unsigned workers = 1);

}  // namespace cubeslice
