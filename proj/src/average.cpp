#include "cubeslice/average.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubeslice/marginals.hpp"

namespace cubeslice {
namespace {

double power_of(double v, double p) {
  if (v < 0.0) throw std::logic_error("negative section or marginal value");
  return v == 0.0 ? 0.0 : std::exp(p * std::log(v));
}

void require_samples(std::size_t samples) {
  if (samples < 1000) throw std::invalid_argument("Grassmann averages need at least 1000 samples");
}

// value(E) for the Haar subspace of each sample index.
std::vector<double> per_sample(int n, int k, std::size_t samples, std::uint64_t seed,
                               unsigned workers,
                               const std::function<double(const Subspace&)>& value) {
  std::vector<double> out(samples);
  parallel_for(samples, workers, [&](std::size_t s) {
    Rng rng = substream(seed, s);
    out[s] = value(haar_sample(n, k, rng));
  });
  return out;
}

GrassmannAverage summarize(int n, int k, double power, std::size_t samples, std::uint64_t seed,
                           const std::vector<double>& values) {
  GrassmannAverage a{n, k, power, samples, seed, 0.0, 0.0, sample_moments(values)};
  a.estimate = a.raw.mean;
  a.std_error = a.raw.std_error;
  return a;
}

double cube_marginal_at_zero(const Subspace& E) {
  const int n = E.ambient_dim();
  const Box cube = Box::cube(n);
  if (E.dim() == 1) return hyperplane_section(cube, E.basis().col(0));
  return section_quadrature(cube, orthonormal_complement(E), 1e-10).value;
}

double box_section(const Box& K, const Subspace& E, std::uint64_t seed) {
  if (E.dim() == 1) {
    double length = std::numeric_limits<double>::infinity();
    for (int i = 0; i < K.dim(); ++i) {
      const double t = std::abs(E.basis()(i, 0));
      if (t > 0.0) length = std::min(length, K.side(i) / t);
    }
    return length;
  }
  try {
    return section_quadrature(K, E, 1e-10).value;
  } catch (const std::invalid_argument&) {
    return section_mc(K, E, 20000, seed).estimate;
  }
}

// (omega_n/omega_k) m^{1/n} from the n-th powers of the sections.
GrassmannAverage quermass_from(int n, int k, std::size_t samples, std::uint64_t seed,
                               const std::vector<double>& powers) {
  GrassmannAverage a = summarize(n, k, n, samples, seed, powers);
  const double ratio = unit_ball_volume(n) / unit_ball_volume(k);
  const double m = a.raw.mean;
  a.estimate = ratio * std::pow(m, 1.0 / n);
  a.std_error = m > 0.0 ? ratio * std::pow(m, 1.0 / n - 1.0) * a.raw.std_error / n : 0.0;
  return a;
}

}  // namespace

GrassmannAverage avg_marginal_power(const ProductDensity& f, int k, std::size_t subspace_samples,
                                    double inner_tol, std::uint64_t seed, unsigned workers) {
  const int n = f.dim();
  if (k < 1 || k >= n) throw std::invalid_argument("average needs 1 <= k < n");
  if (n - k > 3) throw std::invalid_argument("average needs n - k <= 3");
  require_samples(subspace_samples);
  if (!(inner_tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  for (const auto& fi : f.factors()) fi.require_normalized();
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(k);
  const auto values = per_sample(n, k, subspace_samples, seed, workers, [&](const Subspace& E) {
    return power_of(MarginalEvaluator(f, E)(origin), n);
  });
  return summarize(n, k, n, subspace_samples, seed, values);
}

GrassmannAverage cube_avg_power(int n, int k, std::size_t subspace_samples, std::uint64_t seed,
                                unsigned workers) {
  if (k < 1 || k >= n) throw std::invalid_argument("average needs 1 <= k < n");
  require_samples(subspace_samples);
  const auto values = per_sample(n, k, subspace_samples, seed, workers, [&](const Subspace& E) {
    return power_of(cube_marginal_at_zero(E), n);
  });
  return summarize(n, k, n, subspace_samples, seed, values);
}

PropAvgRecord prop_avg_check(const ProductDensity& f, int k, std::size_t samples, double tol,
                             std::uint64_t seed, unsigned workers) {
  const int n = f.dim();
  if (k < 1 || k >= n) throw std::invalid_argument("average needs 1 <= k < n");
  if (n - k > 3) throw std::invalid_argument("average needs n - k <= 3");
  require_samples(samples);
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  f.require_unit_class();

  // Both sides go through the same marginal engine, so f = cube factors
  // gives identical per-sample values.
  const ProductDensity cube = ProductDensity::cube(n);
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(k);
  std::vector<double> lhs(samples), rhs(samples), diff(samples);
  parallel_for(samples, workers, [&](std::size_t s) {
    Rng rng = substream(seed, s);
    const Subspace E = haar_sample(n, k, rng);
    lhs[s] = power_of(MarginalEvaluator(f, E)(origin), n);
    rhs[s] = power_of(MarginalEvaluator(cube, E)(origin), n);
    diff[s] = lhs[s] - rhs[s];
  });
  PropAvgRecord r;
  r.lhs = summarize(n, k, n, samples, seed, lhs);
  r.rhs = summarize(n, k, n, samples, seed, rhs);
  const SampleMoments d = sample_moments(diff);
  r.paired_mean = d.mean;
  r.paired_se = d.std_error;
  r.combined_se = std::hypot(r.lhs.std_error, r.rhs.std_error);
  r.pass = r.paired_mean <= 3.0 * r.paired_se;
  return r;
}

double unit_ball_volume(int d) {
  if (d < 0) throw std::invalid_argument("ball dimension must be >= 0");
  return std::exp(0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d + 1.0));
}

GrassmannAverage dual_affine_quermass(int n, int k,
                                      const std::function<double(const Subspace&)>& section,
                                      std::size_t samples, std::uint64_t seed, unsigned workers) {
  if (k < 1 || k >= n) throw std::invalid_argument("quermassintegral needs 1 <= k < n");
  require_samples(samples);
  const auto values = per_sample(n, k, samples, seed, workers,
                                 [&](const Subspace& E) { return power_of(section(E), n); });
  return quermass_from(n, k, samples, seed, values);
}

GrassmannAverage dual_affine_quermass(const Box& K, int k, std::size_t samples,
                                      std::uint64_t seed, unsigned workers) {
  return dual_affine_quermass(
      K.dim(), k, [&](const Subspace& E) { return box_section(K, E, seed); }, samples, seed,
      workers);
}

GrinbergRecord grinberg_check(const Eigen::VectorXd& diag, int k, std::size_t samples,
                              std::uint64_t seed, unsigned workers) {
  const int n = static_cast<int>(diag.size());
  if (std::abs(std::abs(diag.prod()) - 1.0) > 1e-12)
    throw std::invalid_argument("S is not volume preserving: |det S| = " +
                                std::to_string(std::abs(diag.prod())));
  const Box cube = Box::cube(n);
  const Box image(diag.cwiseAbs());

  if (k < 1 || k >= n) throw std::invalid_argument("quermassintegral needs 1 <= k < n");
  require_samples(samples);
  std::vector<double> xs(samples), ys(samples);
  parallel_for(samples, workers, [&](std::size_t s) {
    Rng rng = substream(seed, s);
    const Subspace E = haar_sample(n, k, rng);
    xs[s] = power_of(box_section(cube, E, seed), n);
    ys[s] = power_of(box_section(image, E, seed), n);
  });
  GrinbergRecord r;
  r.phi_K = quermass_from(n, k, samples, seed, xs);
  r.phi_SK = quermass_from(n, k, samples, seed, ys);
  r.difference = r.phi_K.estimate - r.phi_SK.estimate;
  r.combined_se = std::hypot(r.phi_K.std_error, r.phi_SK.std_error);

  // Delta method on the paired samples.
  const double ratio = unit_ball_volume(n) / unit_ball_volume(k);
  const double gx = r.phi_K.raw.mean > 0.0
                        ? ratio * std::pow(r.phi_K.raw.mean, 1.0 / n - 1.0) / n
                        : 0.0;
  const double gy = r.phi_SK.raw.mean > 0.0
                        ? ratio * std::pow(r.phi_SK.raw.mean, 1.0 / n - 1.0) / n
                        : 0.0;
  std::vector<double> lin(samples);
  for (std::size_t s = 0; s < samples; ++s) lin[s] = gx * xs[s] - gy * ys[s];
  r.paired_se = sample_moments(lin).std_error;
  r.pass = std::abs(r.difference) <= 3.0 * r.combined_se;
  return r;
}

}  // namespace cubeslice
