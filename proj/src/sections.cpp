#include "cubeslice/sections.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubeslice/quadrature.hpp"
#include "cubeslice/slabs.hpp"

namespace cubeslice {
namespace {

void require_normal(const Box& box, const Eigen::VectorXd& a) {
  if (a.size() != box.dim()) throw std::invalid_argument("normal has the wrong dimension");
  if (!a.allFinite()) throw std::invalid_argument("normal has non-finite entries");
  if (std::abs(a.norm() - 1.0) > 1e-12) throw std::invalid_argument("normal is not a unit vector");
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// Components of the graph on coordinates with an edge wherever the
// projector couples two coordinates.
std::vector<std::vector<int>> coupled_blocks(const Eigen::MatrixXd& P) {
  const int n = static_cast<int>(P.rows());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(P(i, j)) > 1e-12) parent[find(i)] = find(j);
  std::vector<std::vector<int>> blocks;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[r]].push_back(i);
  }
  return blocks;
}

}  // namespace

Box::Box(Eigen::VectorXd sides) : sides_(std::move(sides)) {
  if (sides_.size() < 1) throw std::invalid_argument("box needs at least one side");
  for (Eigen::Index i = 0; i < sides_.size(); ++i)
    if (!(sides_(i) > 0.0) || !std::isfinite(sides_(i)))
      throw std::invalid_argument("box side " + std::to_string(i) + " must be positive");
}

SectionResult hyperplane_section_sinc(const Box& box, const Eigen::VectorXd& a, double tol) {
  require_normal(box, a);
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

  std::vector<double> alpha;
  int single = -1;
  for (int j = 0; j < box.dim(); ++j) {
    if (std::abs(a(j)) <= kZeroCoordinate) continue;
    alpha.push_back(0.5 * box.side(j) * std::abs(a(j)));
    single = j;
  }
  const int m = static_cast<int>(alpha.size());
  if (m == 1) return {box.volume() / box.side(single), 0.0, true};

  // Rescale t so the fastest factor is sin(s)/s; its zeros are multiples of pi.
  const double amax = *std::max_element(alpha.begin(), alpha.end());
  std::vector<double> beta(m);
  double tail_scale = 1.0;  // prod 1/beta_j
  for (int j = 0; j < m; ++j) {
    beta[j] = alpha[j] / amax;
    tail_scale /= beta[j];
  }
  const double bmin = *std::min_element(beta.begin(), beta.end());
  const double prefactor = box.volume() / (std::numbers::pi * amax);
  const double tol_j = tol / prefactor;

  auto integrand = [&](double s) {
    double v = 1.0;
    for (double b : beta) v *= sinc(b * s);
    return v;
  };

  // Crude majorant of the tail: int_T^inf prod 1/(beta_j s) ds.
  auto crude_tail = [&](double T) { return tail_scale * std::pow(T, 1.0 - m) / (m - 1); };
  long periods = std::max<long>(20, std::lround(std::ceil(10.0 / (std::numbers::pi * bmin))));
  periods = std::min<long>(periods, 20000);
  const bool expand = crude_tail(periods * std::numbers::pi) > 0.25 * tol_j;
  if (expand && m > 20)
    throw std::invalid_argument("sinc route: tail expansion needs at most 20 nonzero coordinates");

  SectionResult out;
  const double piece_tol = 0.5 * tol_j / static_cast<double>(periods);
  double head = 0.0;
  for (long p = 0; p < periods; ++p) {
    const auto q = integrate(integrand, p * std::numbers::pi, (p + 1) * std::numbers::pi,
                             piece_tol, 1e-14);
    head += q.value;
    out.error += q.error;
    out.converged = out.converged && q.converged;
  }

  const double T = periods * std::numbers::pi;
  double tail = 0.0;
  if (!expand) {
    out.error += crude_tail(T);
  } else {
    // prod sin(beta_j s) = (2i)^{-m} sum_eps (prod eps_j) exp(i omega_eps s).
    using cd = std::complex<double>;
    cd unit = 1.0;
    for (int j = 0; j < m; ++j) unit /= cd(0.0, 2.0);
    double zero_weight = 0.0;
    std::vector<cd> coef;
    std::vector<double> omega;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
      double w = 0.0;
      for (int j = 0; j < m; ++j) w += (mask >> j & 1) ? -beta[j] : beta[j];
      const cd s = (std::popcount(mask) % 2 ? -1.0 : 1.0) * unit;
      if (w == 0.0) {
        zero_weight += s.real();
      } else if (w > 0.0) {
        coef.push_back(s * std::exp(cd(0.0, w * T)));
        omega.push_back(w);
      }
    }
    // int_T^inf s^{-m} e^{i w s} ds = i e^{i w T} int_0^inf (T + iu)^{-m} e^{-w u} du
    auto rotated = [&](double u) {
      cd g = 0.0;
      for (std::size_t e = 0; e < coef.size(); ++e) g += coef[e] * std::exp(-omega[e] * u);
      return g * std::pow(cd(T, u), -m);
    };
    const auto q = integrate_to_infinity(rotated, 0.0, 0.125 * tol_j / tail_scale, 1e-13);
    tail = tail_scale * (zero_weight * std::pow(T, 1.0 - m) / (m - 1) +
                         2.0 * (cd(0.0, 1.0) * q.value).real());
    out.error += 2.0 * tail_scale * q.error;
    out.converged = out.converged && q.converged;
  }

  out.value = prefactor * (head + tail);
  out.error *= prefactor;
  out.converged = out.converged && out.error <= tol;
  return out;
}

double hyperplane_section_exact(const Box& box, const Eigen::VectorXd& a) {
  require_normal(box, a);
  const int m = box.dim();
  if (m > 24) throw std::invalid_argument("exact section route is limited to n <= 24");
  for (int j = 0; j < m; ++j)
    if (std::abs(a(j)) <= kZeroCoordinate)
      throw std::invalid_argument("normal coordinate " + std::to_string(j) +
                                  " is zero; factor it out first");

  std::vector<long double> c(m);
  long double half = 0.0L, denom = 1.0L;
  for (int j = 0; j < m; ++j) {
    c[j] = static_cast<long double>(box.side(j)) * std::abs(static_cast<long double>(a(j)));
    half += c[j];
    denom *= std::abs(static_cast<long double>(a(j)));
  }
  half *= 0.5L;
  for (int j = 2; j < m; ++j) denom *= j;

  // Neumaier-compensated sum of (-1)^|eps| (half - sum eps_j c_j)_+^{m-1}.
  long double sum = 0.0L, comp = 0.0L;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    long double s = half;
    for (int j = 0; j < m; ++j)
      if (mask >> j & 1) s -= c[j];
    if (!(s > 0.0L)) continue;
    long double term = 1.0L;
    for (int p = 1; p < m; ++p) term *= s;
    if (std::popcount(mask) % 2) term = -term;
    const long double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return static_cast<double>((sum + comp) / denom);
}

double hyperplane_section(const Box& box, const Eigen::VectorXd& a) {
  require_normal(box, a);
  std::vector<int> kept;
  double factor = 1.0;
  for (int j = 0; j < box.dim(); ++j) {
    if (std::abs(a(j)) <= kZeroCoordinate)
      factor *= box.side(j);
    else
      kept.push_back(j);
  }
  if (kept.size() == 1) return factor;
  Eigen::VectorXd sides(kept.size()), normal(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    sides(i) = box.side(kept[i]);
    normal(i) = a(kept[i]);
  }
  normal.normalize();
  return factor * hyperplane_section_exact(Box(sides), normal);
}

SectionResult section_quadrature(const Box& box, const Subspace& H, double tol) {
  if (H.ambient_dim() != box.dim()) throw std::invalid_argument("subspace and box dimensions differ");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const Eigen::MatrixXd P = H.projector();

  double volume = 1.0;
  for (const auto& block : coupled_blocks(P)) {
    const int size = static_cast<int>(block.size());
    double trace = 0.0;
    for (int i : block) trace += P(i, i);
    const int dim = static_cast<int>(std::lround(trace));
    if (dim == 0) continue;
    if (dim > 3)
      throw std::invalid_argument("section block of dimension " + std::to_string(dim) +
                                  " exceeds 3; use section_mc");
    Eigen::MatrixXd local(size, size);
    for (int r = 0; r < size; ++r)
      for (int s = 0; s < size; ++s) local(r, s) = P(block[r], block[s]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(local);
    const Eigen::MatrixXd U = eig.eigenvectors().rightCols(dim);

    std::vector<SlabFactor> factors;
    for (int r = 0; r < size; ++r) {
      const Eigen::VectorXd w = U.row(r).transpose();
      if (w.norm() <= 1e-12) continue;
      const double h = 0.5 * box.side(block[r]);
      factors.push_back({w, {{-h, h, 1.0}}});
    }
    volume *= integrate_slab_product(factors, dim);
  }
  return {volume, 0.0, true};
}

McEstimate section_mc(const Box& box, const Subspace& H, std::size_t samples, std::uint64_t seed,
                      unsigned workers) {
  if (H.ambient_dim() != box.dim()) throw std::invalid_argument("subspace and box dimensions differ");
  if (samples < 100) throw std::invalid_argument("section_mc needs at least 100 samples");
  const int d = H.dim();
  const Eigen::MatrixXd& W = H.basis();  // rows are the frame vectors w_i
  if (d == 0) return {1.0, 0.0, samples};

  Eigen::VectorXd half = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < box.dim(); ++i) half += 0.5 * box.side(i) * W.row(i).transpose().cwiseAbs();
  if (!(half.minCoeff() > 0.0)) return {0.0, 0.0, samples};
  const double region = (2.0 * half).prod();

  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<std::size_t> hits(blocks, 0);
  const double strata = static_cast<double>(samples);
  parallel_for(blocks, workers, [&](std::size_t b) {
    Eigen::VectorXd y(d);
    const std::size_t end = std::min(samples, (b + 1) * kBlock);
    for (std::size_t s = b * kBlock; s < end; ++s) {
      Rng rng = substream(seed, s);
      y(0) = half(0) * (2.0 * (static_cast<double>(s) + uniform01(rng)) / strata - 1.0);
      for (int j = 1; j < d; ++j) y(j) = half(j) * (2.0 * uniform01(rng) - 1.0);
      bool inside = true;
      for (int i = 0; i < box.dim() && inside; ++i)
        inside = std::abs(W.row(i).dot(y)) <= 0.5 * box.side(i);
      if (inside) ++hits[b];
    }
  });
  const std::size_t total = std::accumulate(hits.begin(), hits.end(), std::size_t{0});
  const double p = static_cast<double>(total) / strata;
  return {region * p, region * std::sqrt(p * (1.0 - p) / strata), samples};
}

Subspace sharp_block_subspace(int n, int k) {
  if (k < 1 || k >= n) throw std::invalid_argument("sharp_block_subspace needs 1 <= k < n");
  const int blocks = n - k;
  if (n % blocks != 0)
    throw std::invalid_argument("sharp_block_subspace needs n - k to divide n");
  const int size = n / blocks;
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, blocks);
  for (int b = 0; b < blocks; ++b) V.block(b * size, b, size, 1).setConstant(1.0 / std::sqrt(size));
  return orthonormal_complement(Subspace(V));
}

Subspace sharp_paired_subspace(int n, int k) {
  if (k < 1 || 2 * k > n) throw std::invalid_argument("sharp_paired_subspace needs 1 <= k <= n/2");
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, k);
  for (int i = 0; i < k; ++i) {
    B(2 * i, i) = std::numbers::sqrt2 / 2.0;
    B(2 * i + 1, i) = -std::numbers::sqrt2 / 2.0;
  }
  return Subspace(B);
}

}  // namespace cubeslice
