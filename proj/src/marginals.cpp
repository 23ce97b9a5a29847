#include "cubeslice/marginals.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "cubeslice/sections.hpp"

namespace cubeslice {
namespace {

void require_compatible(const ProductDensity& f, const Subspace& E) {
  if (f.dim() != E.ambient_dim())
    throw std::invalid_argument("density has " + std::to_string(f.dim()) +
                                " factors but the subspace lives in R^" +
                                std::to_string(E.ambient_dim()));
  if (E.dim() < 1 || E.dim() >= E.ambient_dim())
    throw std::invalid_argument("marginal needs 1 <= k < n");
}

int points_per_axis(int k) {
  switch (k) {
    case 1: return 41;
    case 2: return 15;
    case 3: return 9;
    case 4: return 7;
    default: return 5;
  }
}

}  // namespace

MarginalEvaluator::MarginalEvaluator(const ProductDensity& f, const Subspace& E)
    : f_(f), basis_(E.basis()), k_(E.dim()) {
  require_compatible(f, E);
  frame_ = orthonormal_complement(E).basis();
  if (frame_.cols() > 3)
    throw std::invalid_argument("deterministic marginal needs n - k <= 3; use marginal_mc");
  constant_.resize(static_cast<std::size_t>(f.dim()));
  for (int i = 0; i < f.dim(); ++i) constant_[i] = frame_.row(i).norm() <= 1e-12;
}

double MarginalEvaluator::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != k_) throw std::invalid_argument("point has the wrong dimension for E");
  const Eigen::VectorXd X = basis_ * x;
  double scale = 1.0;
  std::vector<SlabFactor> factors;
  for (int i = 0; i < f_.dim(); ++i) {
    if (constant_[i]) {
      scale *= f_.factor(i)(X(i));
      if (scale == 0.0) return 0.0;
      continue;
    }
    SlabFactor sf{frame_.row(i).transpose(), {}};
    for (const Piece& p : f_.factor(i).pieces())
      sf.pieces.push_back({p.lo - X(i), p.hi - X(i), p.value});
    if (sf.pieces.empty()) return 0.0;
    factors.push_back(std::move(sf));
  }
  return scale * integrate_slab_product(factors, codim());
}

double marginal_at(const MarginalQuery& q, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  return MarginalEvaluator(q.f, q.E)(q.x);
}

McEstimate marginal_mc(const MarginalQuery& q, std::size_t samples, double bandwidth,
                       std::uint64_t seed, unsigned workers) {
  require_compatible(q.f, q.E);
  if (samples < 1000) throw std::invalid_argument("marginal_mc needs at least 1000 samples");
  if (q.x.size() != q.E.dim()) throw std::invalid_argument("point has the wrong dimension for E");
  const ProductDensity& f = q.f;
  const int n = f.dim();
  const Eigen::MatrixXd W = orthonormal_complement(q.E).basis();
  const int d = static_cast<int>(W.cols());
  const Eigen::VectorXd X = q.E.basis() * q.x;

  // y = sum_i w_i <w_i, y> with <w_i, y> confined to supp f_i - X_i.
  Eigen::VectorXd center = Eigen::VectorXd::Zero(d), half = Eigen::VectorXd::Zero(d);
  double constant = 1.0;
  for (int i = 0; i < n; ++i) {
    const StepDensity& fi = f.factor(i);
    if (fi.empty()) return {0.0, 0.0, samples};
    if (W.row(i).norm() <= 1e-12) {
      constant *= fi(X(i));
      continue;
    }
    const double lo = fi.support_lo() - X(i), hi = fi.support_hi() - X(i);
    center += 0.5 * (lo + hi) * W.row(i).transpose();
    half += 0.5 * (hi - lo) * W.row(i).transpose().cwiseAbs();
  }
  if (constant == 0.0) return {0.0, 0.0, samples};
  if (bandwidth > 0.0) half.setConstant(bandwidth);
  const double region = (2.0 * half).prod();

  std::vector<double> values(samples);
  const double strata = static_cast<double>(samples);
  parallel_for(samples, workers, [&](std::size_t s) {
    Rng rng = substream(seed, s);
    Eigen::VectorXd y(d);
    y(0) = center(0) + half(0) * (2.0 * (static_cast<double>(s) + uniform01(rng)) / strata - 1.0);
    for (int j = 1; j < d; ++j) y(j) = center(j) + half(j) * (2.0 * uniform01(rng) - 1.0);
    double v = constant;
    for (int i = 0; i < n && v != 0.0; ++i)
      if (W.row(i).norm() > 1e-12) v *= f.factor(i)(X(i) + W.row(i).dot(y));
    values[s] = region * v;
  });
  const SampleMoments m = sample_moments(values);
  return {m.mean, m.std_error, samples};
}

GridSpec default_grid(const ProductDensity& f, const Subspace& E) {
  require_compatible(f, E);
  double diag2 = 0.0;
  for (const auto& fi : f.factors()) diag2 += std::pow(fi.support_hi() - fi.support_lo(), 2);
  GridSpec g;
  g.center = E.basis().transpose() * f.support_midpoints();
  g.radius = 0.5 * std::sqrt(diag2);
  g.step = 2.0 * g.radius / (points_per_axis(E.dim()) - 1);
  return g;
}

GridSup marginal_grid_sup(const ProductDensity& f, const Subspace& E, const GridSpec& grid,
                          double tol, unsigned workers) {
  if (!(grid.radius > 0.0) || !(grid.step > 0.0))
    throw std::invalid_argument("grid radius and step must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const MarginalEvaluator eval(f, E);
  const int k = E.dim();
  if (grid.center.size() != k) throw std::invalid_argument("grid center has the wrong dimension");

  const long half_count = static_cast<long>(std::floor(grid.radius / grid.step + 1e-9));
  const long per_axis = 2 * half_count + 1;
  double total = 1.0;
  for (int j = 0; j < k; ++j) total *= static_cast<double>(per_axis);
  if (total > static_cast<double>(kGridBudget))
    throw std::invalid_argument("grid of " + std::to_string(total) + " points exceeds the budget");
  const std::size_t count = static_cast<std::size_t>(total);

  auto point = [&](std::size_t index) {
    Eigen::VectorXd x(k);
    for (int j = 0; j < k; ++j) {
      const long digit = static_cast<long>(index % static_cast<std::size_t>(per_axis));
      index /= static_cast<std::size_t>(per_axis);
      x(j) = grid.center(j) + grid.step * static_cast<double>(digit - half_count);
    }
    return x;
  };
  std::vector<double> values(count);
  parallel_for(count, workers, [&](std::size_t i) { values[i] = eval(point(i)); });

  GridSup out;
  std::size_t best = 0;
  for (std::size_t i = 1; i < count; ++i)
    if (values[i] > values[best]) best = i;
  out.value = values[best];
  out.argmax = point(best);
  out.evaluations = count;

  // Stencil climbing with offsets in {-1, 0, 1}^k \ {0}.
  std::size_t stencil = 1;
  for (int j = 0; j < k; ++j) stencil *= 3;
  double h = 0.5 * grid.step;
  constexpr int kMinLevels = 6, kMaxLevels = 30;
  for (int level = 0; level < kMaxLevels; ++level) {
    double gained = 0.0;
    for (int move = 0; move < 64; ++move) {
      std::vector<double> around(stencil, -1.0);
      std::vector<Eigen::VectorXd> at(stencil);
      parallel_for(stencil, workers, [&](std::size_t s) {
        Eigen::VectorXd x = out.argmax;
        std::size_t code = s;
        bool centre = true;
        for (int j = 0; j < k; ++j) {
          const int off = static_cast<int>(code % 3) - 1;
          code /= 3;
          centre = centre && off == 0;
          x(j) += h * off;
        }
        if (centre) return;
        around[s] = eval(x);
        at[s] = std::move(x);
      });
      out.evaluations += stencil - 1;
      std::size_t pick = stencil;
      double top = out.value;
      for (std::size_t s = 0; s < stencil; ++s)
        if (around[s] > top) {
          top = around[s];
          pick = s;
        }
      if (pick == stencil) break;
      gained += top - out.value;
      out.value = top;
      out.argmax = at[pick];
    }
    out.refinement_levels = level + 1;
    if (level + 1 >= kMinLevels && gained <= tol * out.value) break;
    h *= 0.5;
  }
  return out;
}

GridSup marginal_grid_sup(const ProductDensity& f, const Subspace& E, double grid_radius,
                          double grid_step, double tol, unsigned workers) {
  GridSpec g = default_grid(f, E);
  g.radius = grid_radius;
  g.step = grid_step;
  return marginal_grid_sup(f, E, g, tol, workers);
}

TheoremRecord verify_main_theorem(const ProductDensity& f, const Subspace& E, double tol,
                                  unsigned workers) {
  TheoremRecord r;
  r.report = bound_main(E, f.sup_norms());
  r.bound = r.report.bound_value;
  r.sup_lower_bound = marginal_grid_sup(f, E, default_grid(f, E), tol, workers).value;
  r.slack = r.sup_lower_bound / r.bound - 1.0;
  r.pass = r.sup_lower_bound <= r.bound * (1.0 + tol);
  return r;
}

RogozinRecord rogozin_check(const ProductDensity& f, const Eigen::VectorXd& theta, double tol,
                            unsigned workers) {
  f.require_unit_class();
  if (theta.size() != f.dim()) throw std::invalid_argument("theta has the wrong dimension");
  const Eigen::VectorXd unit = theta.normalized();
  const Subspace line{Eigen::MatrixXd(unit)};
  RogozinRecord r;
  r.sup_lb = marginal_grid_sup(f, line, default_grid(f, line), tol, workers).value;
  r.cube_section = hyperplane_section(Box::cube(f.dim()), unit);
  r.pass = r.sup_lb <= r.cube_section * (1.0 + tol);
  return r;
}

SmallBallRecord small_ball(const ProductDensity& f, const Subspace& E, const Eigen::VectorXd& z,
                           double eps, std::size_t samples, std::uint64_t seed, unsigned workers) {
  require_compatible(f, E);
  f.require_unit_class();
  if (!(eps > 0.0)) throw std::invalid_argument("small_ball needs eps > 0");
  if (samples < 1000) throw std::invalid_argument("small_ball needs at least 1000 samples");
  const int n = f.dim(), k = E.dim();
  if (z.size() != k) throw std::invalid_argument("center has the wrong dimension for E");

  const double radius = eps * std::sqrt(static_cast<double>(k));
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<std::size_t> hits(blocks, 0);
  const Eigen::MatrixXd Bt = E.basis().transpose();
  parallel_for(blocks, workers, [&](std::size_t b) {
    Eigen::VectorXd x(n);
    const std::size_t end = std::min(samples, (b + 1) * kBlock);
    for (std::size_t s = b * kBlock; s < end; ++s) {
      Rng rng = substream(seed, s);
      for (int i = 0; i < n; ++i) x(i) = inverse_cdf(f.factor(i), uniform01(rng));
      if ((Bt * x - z).norm() <= radius) ++hits[b];
    }
  });
  std::size_t total = 0;
  for (std::size_t h : hits) total += h;

  SmallBallRecord r;
  const double N = static_cast<double>(samples);
  r.estimate = static_cast<double>(total) / N;
  r.std_error = std::sqrt(r.estimate * (1.0 - r.estimate) / N);
  const double C = std::pow(min_constant(n, k), 1.0 / k);
  r.bound = std::pow(C * std::sqrt(2.0 * std::numbers::e * std::numbers::pi) * eps, k);
  r.vacuous = r.bound >= 1.0;
  r.pass = r.estimate <= r.bound + 3.0 * r.std_error;
  return r;
}

}  // namespace cubeslice
