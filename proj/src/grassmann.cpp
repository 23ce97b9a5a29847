#include "cubeslice/grassmann.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubeslice/parallel.hpp"

namespace cubeslice {
namespace {

// Thin Q factor of `m` with the sign convention diag(R) > 0.
Eigen::MatrixXd orthonormal_factor(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows(), k = m.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < k; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

double rank_margin(const Eigen::MatrixXd& m) {
  if (m.cols() == 0) return 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  return s(s.size() - 1) / std::max(s(0), 1e-300);
}

}  // namespace

Subspace::Subspace(Eigen::MatrixXd basis, double tol) : basis_(std::move(basis)) {
  if (basis_.cols() > basis_.rows())
    throw std::invalid_argument("subspace dimension exceeds ambient dimension");
  if (orthonormality_defect() > tol)
    throw std::invalid_argument("subspace basis is not orthonormal (defect " +
                                std::to_string(orthonormality_defect()) + ")");
}

Subspace Subspace::spanned_by(const Eigen::MatrixXd& vectors) {
  if (vectors.cols() > vectors.rows())
    throw std::invalid_argument("more spanning vectors than ambient dimension");
  if (rank_margin(vectors) < 1e-12) throw std::invalid_argument("spanning vectors are dependent");
  return Subspace(orthonormal_factor(vectors));
}

Subspace Subspace::coordinate(int n, std::initializer_list<int> indices) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(indices.size()));
  int col = 0;
  for (int i : indices) {
    if (i < 0 || i >= n) throw std::invalid_argument("coordinate index out of range");
    b(i, col++) = 1.0;
  }
  return Subspace(std::move(b));
}

double Subspace::orthonormality_defect() const {
  if (basis_.cols() == 0) return 0.0;
  const Eigen::MatrixXd g = basis_.transpose() * basis_;
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

double projector_distance(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw std::invalid_argument("ambient dimensions differ");
  return (a.projector() - b.projector()).cwiseAbs().maxCoeff();
}

Eigen::VectorXd Frame::direction(int i) const {
  if (!has_direction(i)) throw std::domain_error("frame vector " + std::to_string(i) + " is zero");
  return vectors.row(i).transpose() / norms(i);
}

double Frame::tightness_defect() const {
  const Eigen::MatrixXd s = vectors.transpose() * vectors;
  return (s - Eigen::MatrixXd::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

void ExponentAssignment::validate(double tol) const {
  for (Eigen::Index i = 0; i < betas.size(); ++i)
    if (!(betas(i) >= 0.0 && betas(i) <= 1.0))
      throw std::logic_error("exponent " + std::to_string(i) + " outside [0,1]");
  if (std::abs(betas.sum() - target_sum) > tol)
    throw std::logic_error("exponents do not sum to " + std::to_string(target_sum));
}

ExponentAssignment ExponentAssignment::complement() const {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(betas.size());
  return {ones - betas, static_cast<double>(betas.size()) - target_sum};
}

Subspace orthonormal_complement(const Subspace& E) {
  const int n = E.ambient_dim(), k = E.dim();
  if (k == 0) return Subspace(Eigen::MatrixXd::Identity(n, n));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(E.basis());
  const Eigen::MatrixXd q = qr.householderQ();
  return Subspace(q.rightCols(n - k));
}

Subspace haar_sample(int n, int k, Rng& rng) {
  if (n < 1 || k < 1 || k > n)
    throw std::invalid_argument("haar_sample needs 1 <= k <= n (got n=" + std::to_string(n) +
                                ", k=" + std::to_string(k) + ")");
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd g(n, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = gauss(rng);
  return Subspace(orthonormal_factor(g));
}

Frame frame_of_complement(const Subspace& E) {
  const int n = E.ambient_dim(), k = E.dim();
  if (k >= n) throw std::invalid_argument("frame_of_complement needs k < n");
  Frame f;
  f.vectors = orthonormal_complement(E).basis();
  f.norms = f.vectors.rowwise().norm();
  return f;
}

ExponentAssignment projection_weights(const Subspace& E) {
  const int n = E.ambient_dim(), k = E.dim();
  if (k < 1 || k >= n) throw std::invalid_argument("projection_weights needs 1 <= k < n");
  Eigen::VectorXd g = E.basis().rowwise().squaredNorm();
  g = g.cwiseMin(1.0);
  return {g, static_cast<double>(k)};
}

ExponentAssignment box2_exponents(const Subspace& H) {
  const int n = H.ambient_dim();
  const int k = n - H.dim();
  if (k < 1 || 2 * k > n)
    throw std::invalid_argument("box2_exponents needs codimension 1 <= k <= n/2 (got k=" +
                                std::to_string(k) + ", n=" + std::to_string(n) + ")");
  // |P_{H^perp} e_j|^2 = 1 - |P_H e_j|^2
  const Eigen::VectorXd a2 =
      (Eigen::VectorXd::Ones(n) - H.basis().rowwise().squaredNorm()).cwiseMax(0.0);
  Eigen::Index top = 0;
  const double a2max = a2.maxCoeff(&top);  // first index on ties

  ExponentAssignment out{Eigen::VectorXd(n), static_cast<double>(n - k)};
  if (a2max <= 0.5 + 1e-12) {
    out.betas = (Eigen::VectorXd::Ones(n) - a2).cwiseMax(0.5).cwiseMin(1.0);
    return out;
  }
  const int i = static_cast<int>(top);
  if (k == 1) {
    out.betas.setOnes();
    out.betas(i) = 0.0;
    return out;
  }
  // P_i restricted to H is injective since e_i is not in H (a_i > 0).
  Eigen::MatrixXd reduced(n - 1, H.dim());
  reduced << H.basis().topRows(i), H.basis().bottomRows(n - 1 - i);
  if (rank_margin(reduced) < 1e-10)
    throw std::logic_error("box2_exponents: projection onto e_i^perp is not injective on H");
  const ExponentAssignment sub = box2_exponents(Subspace::spanned_by(reduced));
  out.betas << sub.betas.head(i), 0.0, sub.betas.tail(n - 1 - i);
  return out;
}

ProjectionCheck parallelepiped_projection_check(const Eigen::VectorXd& b,
                                                const Eigen::MatrixXd& generators, int i) {
  const Eigen::Index n = b.size();
  if (generators.rows() != n) throw std::invalid_argument("generators have the wrong dimension");
  if (i < 0 || i >= n) throw std::invalid_argument("coordinate index out of range");
  if (std::abs(b.norm() - 1.0) > 1e-10) throw std::invalid_argument("b is not a unit vector");
  for (Eigen::Index j = 0; j < generators.cols(); ++j) {
    const double scale = std::max(1.0, generators.col(j).norm());
    if (std::abs(b.dot(generators.col(j))) > 1e-10 * scale)
      throw std::invalid_argument("generator " + std::to_string(j) + " is not orthogonal to b");
  }
  if (generators.cols() == 0 || rank_margin(generators) < 1e-12)
    throw std::invalid_argument("generators are rank deficient");

  const double gram_det = (generators.transpose() * generators).determinant();
  Eigen::MatrixXd projected = generators;
  projected.row(i).setZero();
  const double projected_det = (projected.transpose() * projected).determinant();
  return {std::abs(b(i)) * std::sqrt(std::max(gram_det, 0.0)),
          std::sqrt(std::max(projected_det, 0.0))};
}

SearchResult grassmann_search_max(const std::function<double(const Subspace&)>& objective, int n,
                                  int k, int restarts, int steps, std::uint64_t seed,
                                  unsigned workers) {
  if (restarts < 1 || steps < 1) throw std::invalid_argument("restarts and steps must be >= 1");
  if (n < 1 || k < 1 || k > n) throw std::invalid_argument("search needs 1 <= k <= n");

  std::vector<SearchResult> results(static_cast<std::size_t>(restarts));
  parallel_for(results.size(), workers, [&](std::size_t r) {
    Rng rng = substream(seed, r);
    std::normal_distribution<double> gauss;
    Subspace current = haar_sample(n, k, rng);
    double best = objective(current);
    double sigma = 0.5;
    int failures = 0;
    for (int step = 0; step < steps; ++step) {
      Eigen::MatrixXd z(n, k);
      for (int j = 0; j < k; ++j)
        for (int i = 0; i < n; ++i) z(i, j) = gauss(rng);
      const Eigen::MatrixXd& b = current.basis();
      Eigen::MatrixXd tangent = z - b * (b.transpose() * z);
      const double norm = tangent.norm();
      if (norm == 0.0) continue;
      Subspace candidate(orthonormal_factor(b + (sigma / norm) * tangent));
      const double value = objective(candidate);
      if (value > best) {
        best = value;
        current = std::move(candidate);
        failures = 0;
      } else if (++failures == 10) {
        sigma *= 0.5;
        failures = 0;
      }
    }
    results[r] = {std::move(current), best, static_cast<int>(r)};
  });

  std::size_t winner = 0;
  for (std::size_t r = 1; r < results.size(); ++r)
    if (results[r].value > results[winner].value) winner = r;
  return results[winner];
}

}  // namespace cubeslice
