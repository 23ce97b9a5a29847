#include "doctest.h"

#include <cmath>

#include "cubeslice/grassmann.hpp"

using namespace cubeslice;

namespace {

double gram_volume(const Eigen::MatrixXd& g) {
  return std::sqrt(std::max(0.0, (g.transpose() * g).determinant()));
}

}  // namespace

TEST_SUITE("grassmann") {

TEST_CASE("subspace construction") {
  Eigen::MatrixXd b(3, 2);
  b << 1, 0, 0, 1, 0, 0;
  CHECK_NOTHROW(Subspace{b});
  b(0, 1) = 0.1;
  CHECK_THROWS_AS(Subspace{b}, std::invalid_argument);
  const Subspace s = Subspace::spanned_by(b);
  CHECK(s.orthonormality_defect() < 1e-14);
  const Subspace c = Subspace::coordinate(4, {1, 3});
  CHECK(c.projector()(1, 1) == 1.0);
  CHECK(c.projector()(0, 0) == 0.0);
}

TEST_CASE("Haar samples are orthonormal and reproducible") {
  for (int n = 2; n <= 8; ++n)
    for (int k = 1; k < n; ++k) {
      Rng a = substream(11, static_cast<std::uint64_t>(n * 10 + k));
      Rng b = substream(11, static_cast<std::uint64_t>(n * 10 + k));
      const Subspace e = haar_sample(n, k, a);
      CHECK(e.ambient_dim() == n);
      CHECK(e.dim() == k);
      CHECK(e.orthonormality_defect() < 1e-13);
      CHECK(projector_distance(e, haar_sample(n, k, b)) == 0.0);
    }
}

TEST_CASE("Haar measure: E |P_E e_1|^2 = k/n") {
  const int n = 5, k = 2, samples = 20000;
  double sum = 0.0, sq = 0.0;
  for (int s = 0; s < samples; ++s) {
    Rng rng = substream(12, static_cast<std::uint64_t>(s));
    const double v = haar_sample(n, k, rng).projector()(0, 0);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / samples;
  const double se = std::sqrt((sq / samples - mean * mean) / samples);
  CHECK(std::abs(mean - 0.4) < 4.0 * se);
}

TEST_CASE("complement and frame") {
  Rng rng = substream(13, 0);
  const Subspace e = haar_sample(6, 2, rng);
  const Subspace c = orthonormal_complement(e);
  CHECK(c.dim() == 4);
  CHECK((e.projector() + c.projector() - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-13);
  const Frame f = frame_of_complement(e);
  CHECK(f.size() == 6);
  CHECK(f.dim() == 4);
  CHECK(f.tightness_defect() < 1e-13);
  CHECK(f.norms.squaredNorm() == doctest::Approx(4.0));
  for (int i = 0; i < 6; ++i) CHECK(f.direction(i).norm() == doctest::Approx(1.0));
}

TEST_CASE("projection weights") {
  Rng rng = substream(14, 0);
  const Subspace e = haar_sample(7, 3, rng);
  const ExponentAssignment g = projection_weights(e);
  CHECK_NOTHROW(g.validate());
  CHECK(g.betas.sum() == doctest::Approx(3.0));
  const ExponentAssignment h = g.complement();
  CHECK_NOTHROW(h.validate());
  CHECK(h.target_sum == doctest::Approx(4.0));
  ExponentAssignment bad{Eigen::VectorXd::Constant(2, 1.5), 3.0};
  CHECK_THROWS_AS(bad.validate(), std::logic_error);
}

TEST_CASE("box2 exponents are valid on random subspaces") {
  for (int t = 0; t < 200; ++t) {
    Rng rng = substream(15, static_cast<std::uint64_t>(t));
    const int n = 2 + t % 8;
    const int k = 1 + t % std::max(1, n / 2);  // codimension, k <= n/2
    if (2 * k > n) continue;
    const Subspace h = haar_sample(n, n - k, rng);
    const ExponentAssignment b = box2_exponents(h);
    CHECK_NOTHROW(b.validate(1e-9));
    CHECK(b.betas.sum() == doctest::Approx(n - k).epsilon(1e-9));
  }
}

TEST_CASE("projection lemma against Gram determinants") {
  for (int t = 0; t < 200; ++t) {
    Rng rng = substream(16, static_cast<std::uint64_t>(t));
    const int n = 3 + t % 4;
    const int k = 1 + t % (n - 1);
    const Eigen::VectorXd b = haar_sample(n, 1, rng).basis().col(0);
    const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n) - b * b.transpose();
    Eigen::MatrixXd g = p * haar_sample(n, k, rng).basis();
    const int i = t % n;
    Eigen::MatrixXd gi = g;
    gi.row(i).setZero();
    const ProjectionCheck pc = parallelepiped_projection_check(b, g, i);
    CHECK(pc.lhs == doctest::Approx(std::abs(b(i)) * gram_volume(g)).epsilon(1e-10));
    CHECK(pc.rhs == doctest::Approx(gram_volume(gi)).epsilon(1e-10));
    CHECK(pc.lhs <= pc.rhs * (1.0 + 1e-9));
  }
}

TEST_CASE("local search finds a coordinate line") {
  const auto objective = [](const Subspace& e) { return e.projector()(0, 0); };
  const SearchResult r = grassmann_search_max(objective, 4, 1, 4, 300, 17);
  CHECK(r.value > 0.999);
  const SearchResult again = grassmann_search_max(objective, 4, 1, 4, 300, 17, 3);
  CHECK(again.value == r.value);
  CHECK(again.restart == r.restart);
}

}
