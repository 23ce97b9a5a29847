#include "cubeslice/bounds.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "cubeslice/quadrature.hpp"
#include "cubeslice/slabs.hpp"

namespace cubeslice {
namespace {

double weighted_product(const Eigen::VectorXd& c, const Eigen::VectorXd& gamma) {
  double v = 1.0;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (gamma(i) != 0.0) v *= std::pow(c(i), gamma(i));
  return v;
}

void require_sides(const Subspace& H, const Eigen::VectorXd& z) {
  if (z.size() != H.ambient_dim()) throw std::invalid_argument("side count does not match n");
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (!(z(i) > 0.0)) throw std::invalid_argument("box sides must be positive");
}

}  // namespace

BallIntegral ball_integral(double p, double tol) {
  if (!(p >= 2.0)) throw std::invalid_argument("ball_integral needs p >= 2");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  constexpr double pi = std::numbers::pi;

  // Smallest N with (2/pi) p (pi/2)^2 (N pi)^{-p-1} <= tol/4.
  const double remainder_coef = (2.0 / pi) * p * 0.25 * pi * pi;
  const double T_min = std::pow(4.0 * remainder_coef / tol, 1.0 / (p + 1.0));
  const long periods = std::max<long>(1, static_cast<long>(std::ceil(T_min / pi)));
  const double T = periods * pi;

  auto integrand = [p](double t) {
    if (t < 1e-4) return std::pow(1.0 - t * t / 6.0, p);
    return std::pow(std::abs(std::sin(t) / t), p);
  };
  BallIntegral out;
  out.converged = true;
  const double piece_tol = 0.25 * tol * (pi / 2.0) / static_cast<double>(periods);
  double head = 0.0;
  for (long j = 0; j < periods; ++j) {
    const auto q = integrate(integrand, j * pi, (j + 1) * pi, piece_tol, 1e-15);
    head += q.value;
    out.error += q.error;
    out.converged = out.converged && q.converged;
  }
  const double mu = std::exp(std::lgamma(0.5 * (p + 1.0)) - std::lgamma(0.5 * p + 1.0)) /
                    std::sqrt(pi);
  const double tail = mu * std::pow(T, 1.0 - p) / (p - 1.0);
  out.value = (2.0 / pi) * (head + tail);
  out.error = (2.0 / pi) * out.error + remainder_coef * std::pow(T, -p - 1.0);
  out.converged = out.converged && out.error <= tol;
  return out;
}

double block_constant(int n, int k) {
  if (k < 1 || k >= n) throw std::invalid_argument("block_constant needs 1 <= k < n");
  const double m = n - k;
  return std::pow(n / m, m / 2.0);
}

double paired_constant(int k) { return std::pow(2.0, k / 2.0); }

double min_constant(int n, int k) {
  const double first = block_constant(n, k);
  return 2 * k <= n ? std::min(first, paired_constant(k)) : first;
}

FrameConstant frame_constant_check(const Eigen::VectorXd& a, int k) {
  const int n = static_cast<int>(a.size());
  if (k < 1 || k >= n) throw std::invalid_argument("frame_constant_check needs 1 <= k < n");
  for (int i = 0; i < n; ++i)
    if (!(a(i) >= -1e-12 && a(i) <= 1.0 + 1e-12))
      throw std::invalid_argument("frame norm " + std::to_string(i) + " outside [0,1]");
  if (std::abs(a.squaredNorm() - (n - k)) > 1e-8)
    throw std::invalid_argument("frame norms do not satisfy sum a_i^2 = n - k");
  double log_product = 0.0;
  for (int i = 0; i < n; ++i) {
    const double ai = std::clamp(a(i), 0.0, 1.0);
    if (ai > 0.0) log_product -= ai * ai * std::log(ai);
  }
  return {std::exp(log_product), block_constant(n, k)};
}

FrameConstant frame_constant_check(const Eigen::VectorXd& a) {
  const int k = static_cast<int>(a.size()) - static_cast<int>(std::lround(a.squaredNorm()));
  return frame_constant_check(a, k);
}

double bound_box1(const Subspace& H, const Eigen::VectorXd& z) {
  require_sides(H, z);
  const int n = H.ambient_dim(), k = n - H.dim();
  const Eigen::VectorXd beta = H.basis().rowwise().squaredNorm().cwiseMin(1.0);
  return block_constant(n, k) * weighted_product(z, beta);
}

double bound_box2(const Subspace& H, const Eigen::VectorXd& z) {
  require_sides(H, z);
  const int k = H.ambient_dim() - H.dim();
  const ExponentAssignment beta = box2_exponents(H);
  return paired_constant(k) * weighted_product(z, beta.betas);
}

const char* to_string(BoundBranch b) { return b == BoundBranch::Block ? "block" : "paired"; }

double BoundReport::recompute(const Eigen::VectorXd& c) const {
  return constant * weighted_product(c, exponents.betas);
}

BoundReport bound_main(const Subspace& E, const Eigen::VectorXd& c) {
  const int n = E.ambient_dim(), k = E.dim();
  if (k < 1 || k >= n) throw std::invalid_argument("bound_main needs 1 <= k < n");
  if (c.size() != n) throw std::invalid_argument("sup-norm count does not match n");
  for (int i = 0; i < n; ++i)
    if (!(c(i) > 0.0)) throw std::invalid_argument("sup norms must be positive");

  BoundReport r;
  r.block_exponents = projection_weights(E);
  r.block_constant = block_constant(n, k);
  r.branch = BoundBranch::Block;
  r.constant = r.block_constant;
  r.exponents = r.block_exponents;
  if (2 * k <= n) {
    r.paired_exponents = box2_exponents(orthonormal_complement(E)).complement();
    r.paired_constant = paired_constant(k);
    if (*r.paired_constant < r.block_constant) {
      r.branch = BoundBranch::Paired;
      r.constant = *r.paired_constant;
      r.exponents = *r.paired_exponents;
    }
  }
  r.bound_value = r.recompute(c);
  return r;
}

double Gaussian::operator()(double x) const {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

BLSystem::BLSystem(Eigen::MatrixXd directions, Eigen::VectorXd weights)
    : directions_(std::move(directions)), weights_(std::move(weights)) {
  const int d = dim(), m = size();
  if (d < 1) throw std::invalid_argument("BL system needs d >= 1");
  if (weights_.size() != m) throw std::invalid_argument("BL system needs one weight per vector");
  if (m < d) throw std::invalid_argument("BL system needs m >= d");
  Eigen::MatrixXd frame = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < m; ++i) {
    if (!(weights_(i) > 0.0)) throw std::invalid_argument("BL weights must be positive");
    if (std::abs(directions_.row(i).norm() - 1.0) > 1e-12)
      throw std::invalid_argument("BL vector " + std::to_string(i) + " is not a unit vector");
    frame += weights_(i) * directions_.row(i).transpose() * directions_.row(i);
  }
  if ((frame - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("BL system violates sum c_i u_i u_i^T = I");
}

BLSystem mercedes_system() {
  Eigen::MatrixXd u(3, 2);
  for (int i = 0; i < 3; ++i) {
    const double angle = std::numbers::pi / 2.0 + i * 2.0 * std::numbers::pi / 3.0;
    u(i, 0) = std::cos(angle);
    u(i, 1) = std::sin(angle);
  }
  return BLSystem(u, Eigen::VectorXd::Constant(3, 2.0 / 3.0));
}

BLSystem random_bl_system(Rng& rng, int d, int m) {
  if (d < 1 || m < d) throw std::invalid_argument("random_bl_system needs 1 <= d <= m");
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd v(m, d);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j) v(i, j) = gauss(rng);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v.transpose() * v);
  v = v * eig.operatorInverseSqrt();  // rows v_i -> S^{-1/2} v_i (S symmetric)
  const Eigen::VectorXd c = v.rowwise().squaredNorm();
  for (int i = 0; i < m; ++i) v.row(i) /= std::sqrt(c(i));
  return BLSystem(v, c);
}

BLCheck bl_check(const BLSystem& system, const std::vector<BLDensity>& densities, double tol) {
  const int d = system.dim(), m = system.size();
  if (d > 3) throw std::invalid_argument("bl_check supports d <= 3");
  if (static_cast<int>(densities.size()) != m)
    throw std::invalid_argument("bl_check needs one density per vector");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const Eigen::VectorXd& c = system.weights();

  BLCheck out;
  out.rhs = 1.0;
  bool all_steps = true;
  for (int i = 0; i < m; ++i) {
    if (const auto* f = std::get_if<StepDensity>(&densities[i])) {
      out.rhs *= std::pow(l1_norm(*f), c(i));
    } else {
      all_steps = false;  // Gaussians integrate to 1
    }
  }

  if (all_steps) {
    std::vector<SlabFactor> factors;
    for (int i = 0; i < m; ++i) {
      SlabFactor sf{system.directions().row(i).transpose(), {}};
      for (const Piece& p : std::get<StepDensity>(densities[i]).pieces())
        sf.pieces.push_back({p.lo, p.hi, std::pow(p.value, c(i))});
      factors.push_back(std::move(sf));
    }
    out.lhs = integrate_slab_product(factors, d);
    return out;
  }

  auto value = [&](const Eigen::VectorXd& x) {
    double v = 1.0;
    for (int i = 0; i < m && v != 0.0; ++i) {
      const double t = system.directions().row(i).dot(x);
      const double fi = std::visit([t](const auto& f) { return f(t); }, densities[i]);
      v *= fi == 0.0 ? 0.0 : std::pow(fi, c(i));
    }
    return v;
  };
  Eigen::VectorXd x(d);
  const double abs_tol = 0.1 * tol * out.rhs;
  std::function<double(int)> level = [&](int axis) -> double {
    auto inner = [&](double t) {
      x(axis) = t;
      return axis + 1 == d ? value(x) : level(axis + 1);
    };
    const double scale = std::pow(0.1, d - 1 - axis);
    const auto q = integrate_real_line(inner, abs_tol * scale, 0.1 * tol * scale);
    if (axis == 0) out.lhs_error = q.error;
    out.converged = out.converged && q.converged;
    return q.value;
  };
  out.lhs = level(0);
  return out;
}

}  // namespace cubeslice
