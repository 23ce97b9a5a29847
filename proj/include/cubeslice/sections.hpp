#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "cubeslice/grassmann.hpp"
#include "cubeslice/parallel.hpp"

namespace cubeslice {

/// Normal coordinates below this magnitude are treated as exactly zero by
/// the hyperplane routes; they are factored out of the section instead.
inline constexpr double kZeroCoordinate = 1e-10;

/// Axis-aligned box prod_i [-z_i/2, z_i/2].
class Box {
 public:
  explicit Box(Eigen::VectorXd sides);
  static Box cube(int n) { return Box(Eigen::VectorXd::Ones(n)); }

  int dim() const { return static_cast<int>(sides_.size()); }
  const Eigen::VectorXd& sides() const { return sides_; }
  double side(int i) const { return sides_(i); }
  double volume() const { return sides_.prod(); }
  Box scaled(double factor) const { return Box(sides_ * factor); }

 private:
  Eigen::VectorXd sides_;
};

struct SectionResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

/// |B ∩ a^perp| through Fourier inversion of the characteristic function of
/// <X, a> for X uniform on B:
///   |B ∩ a^perp| = |B| / pi * int_0^inf prod_j sinc(z_j a_j t / 2) dt.
/// The head [0, T] is integrated between zeros of the fastest factor; the
/// tail is summed exactly after expanding the sines into exponentials and
/// rotating each contour into the upper half plane.
SectionResult hyperplane_section_sinc(const Box& box, const Eigen::VectorXd& a, double tol);

/// |B ∩ a^perp| from the density at zero of sum_j z_j a_j U_j (U_j uniform on
/// [-1/2, 1/2]), a signed sum of truncated powers over the 2^n vertices.
/// Every |a_j| must exceed kZeroCoordinate; n <= 24.
double hyperplane_section_exact(const Box& box, const Eigen::VectorXd& a);

/// Exact route after factoring out coordinates with |a_j| <= kZeroCoordinate
/// (each contributes its full side length); a single remaining coordinate
/// gives the facet volume.
double hyperplane_section(const Box& box, const Eigen::VectorXd& a);

/// |B ∩ H| = int prod_i 1[|<y, w_i>| <= z_i/2] dy with w_i the rows of an
/// orthonormal basis of H. H is split into coordinate blocks on which its
/// projector decouples; each block must have dimension <= 3 and is
/// integrated exactly.
SectionResult section_quadrature(const Box& box, const Subspace& H, double tol);

/// Monte Carlo estimate of |B ∩ H| in any dimension: hit-or-miss over a
/// bounding box in H-coordinates, stratified along the first axis.
McEstimate section_mc(const Box& box, const Subspace& H, std::size_t samples,
                      std::uint64_t seed, unsigned workers = 1);

/// E_0 in G_{n,k} whose complement is spanned by n-k disjoint block diagonals
/// (1,...,1)/sqrt(n/(n-k)); needs (n-k) | n.
Subspace sharp_block_subspace(int n, int k);

/// E_0 in G_{n,k} whose complement holds the k pair diagonals
/// (e_{2i-1} + e_{2i})/sqrt(2) and the remaining n-2k coordinate vectors.
Subspace sharp_paired_subspace(int n, int k);

}  // namespace cubeslice
