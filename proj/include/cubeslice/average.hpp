#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "cubeslice/densities.hpp"
#include "cubeslice/grassmann.hpp"
#include "cubeslice/parallel.hpp"
#include "cubeslice/sections.hpp"

namespace cubeslice {

/// Monte Carlo average over Haar E in G_{n,k}. Sample s uses the subspace
/// drawn from substream(seed, s), so two averages with the same seed see the
/// same subspaces.
struct GrassmannAverage {
  int n = 0;
  int k = 0;
  double power = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  SampleMoments raw;  // moments of the per-sample integrand values
};

/// Mean of pi_E(f)(0)^n; needs normalized factors and n - k <= 3.
GrassmannAverage avg_marginal_power(const ProductDensity& f, int k, std::size_t subspace_samples,
                                    double inner_tol, std::uint64_t seed, unsigned workers = 1);

/// Mean of pi_E(1_{Q_n})(0)^n = |Q_n ∩ E^perp|^n.
GrassmannAverage cube_avg_power(int n, int k, std::size_t subspace_samples, std::uint64_t seed,
                                unsigned workers = 1);

struct PropAvgRecord {
  GrassmannAverage lhs;  // f side
  GrassmannAverage rhs;  // cube side
  double paired_mean = 0.0;  // mean of lhs_s - rhs_s
  double paired_se = 0.0;
  double combined_se = 0.0;  // sqrt(se_lhs^2 + se_rhs^2)
  bool pass = false;         // paired_mean <= 3 paired_se
};

/// Both sides of the average comparison on common subspace samples.
PropAvgRecord prop_avg_check(const ProductDensity& f, int k, std::size_t samples, double tol,
                             std::uint64_t seed, unsigned workers = 1);

/// Volume of the unit ball in R^d.
double unit_ball_volume(int d);

/// (omega_n / omega_k) (E |K ∩ E|^n)^{1/n} over Haar E in G_{n,k}, with the
/// delta-method standard error. `section` returns |K ∩ E| for a k-dim E.
GrassmannAverage dual_affine_quermass(int n, int k,
                                      const std::function<double(const Subspace&)>& section,
                                      std::size_t samples, std::uint64_t seed,
                                      unsigned workers = 1);

/// Same for K a box: segments in closed form for k = 1, exact polytope
/// volumes for k <= 3, section_mc beyond.
GrassmannAverage dual_affine_quermass(const Box& K, int k, std::size_t samples,
                                      std::uint64_t seed, unsigned workers = 1);

struct GrinbergRecord {
  GrassmannAverage phi_K;
  GrassmannAverage phi_SK;
  double difference = 0.0;  // phi_K - phi_SK
  double combined_se = 0.0;
  double paired_se = 0.0;
  bool pass = false;  // |difference| <= 3 combined_se
};

/// Compares the quermassintegral of Q_n and S Q_n for diagonal S with
/// |det S| = 1, both estimated from the same subspace samples.
GrinbergRecord grinberg_check(const Eigen::VectorXd& diag, int k, std::size_t samples,
                              std::uint64_t seed, unsigned workers = 1);

}  // namespace cubeslice
