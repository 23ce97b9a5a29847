#include "doctest.h"

#include <cmath>

#include "cubeslice/grassmann.hpp"
#include "cubeslice/sections.hpp"

using namespace cubeslice;

namespace {

// Irwin-Hall density of a sum of n independent U[0,1] variables.
double irwin_hall(int n, double x) {
  double s = 0.0, binom = 1.0;
  for (int j = 0; j <= n; ++j) {
    if (x > j) s += (j % 2 ? -1.0 : 1.0) * binom * std::pow(x - j, n - 1);
    binom = binom * (n - j) / (j + 1);
  }
  return s / std::tgamma(n);
}

Eigen::VectorXd diagonal(int n) { return Eigen::VectorXd::Ones(n) / std::sqrt(double(n)); }

Subspace hyperplane(const Eigen::VectorXd& a) {
  Eigen::MatrixXd m(a.size(), 1);
  m.col(0) = a.normalized();
  return orthonormal_complement(Subspace(m));
}

}  // namespace

TEST_SUITE("sections") {

TEST_CASE("box validation") {
  CHECK_THROWS_AS(Box(Eigen::Vector2d(1.0, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(Box(Eigen::Vector2d(1.0, -2.0)), std::invalid_argument);
  CHECK(Box(Eigen::Vector3d(2, 3, 5)).volume() == 30.0);
}

TEST_CASE("diagonal sections match the Irwin-Hall density") {
  for (int n = 2; n <= 12; ++n) {
    const double oracle = std::sqrt(double(n)) * irwin_hall(n, n / 2.0);
    CHECK(hyperplane_section(Box::cube(n), diagonal(n)) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(hyperplane_section_sinc(Box::cube(n), diagonal(n), 1e-11).value ==
          doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("closed-form values") {
  CHECK(hyperplane_section(Box::cube(2), diagonal(2)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(hyperplane_section(Box::cube(3), diagonal(3)) == doctest::Approx(1.299038105676658).epsilon(1e-14));
  CHECK(hyperplane_section(Box::cube(4), Eigen::Vector4d::Constant(0.5)) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("zero coordinates factor out") {
  const Box b(Eigen::Vector3d(2.0, 3.0, 5.0));
  CHECK(hyperplane_section(b, Eigen::Vector3d(1.0, 0.0, 0.0)) == doctest::Approx(15.0));
  CHECK(hyperplane_section_sinc(b, Eigen::Vector3d(0.0, 1.0, 0.0), 1e-10).value == doctest::Approx(10.0));
  const Eigen::Vector3d a(std::sqrt(0.5), std::sqrt(0.5), 0.0);
  CHECK(hyperplane_section(b, a) == doctest::Approx(5.0 * hyperplane_section(Box(Eigen::Vector2d(2.0, 3.0)),
                                                                             Eigen::Vector2d(a(0), a(1)))));
  CHECK_THROWS(hyperplane_section_exact(b, Eigen::Vector3d(1.0, 0.0, 0.0)));
}

TEST_CASE("normals must be unit vectors") {
  CHECK_THROWS_AS(hyperplane_section(Box::cube(2), Eigen::Vector2d(1.0, 1.0)), std::invalid_argument);
}

TEST_CASE("sinc and exact routes agree on random boxes") {
  for (int t = 0; t < 60; ++t) {
    Rng rng = substream(41, static_cast<std::uint64_t>(t));
    const int n = 2 + t % 9;
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = 0.3 + 2.0 * uniform01(rng);
    const Eigen::VectorXd a = haar_sample(n, 1, rng).basis().col(0);
    const SectionResult s = hyperplane_section_sinc(Box(z), a, 1e-10);
    CHECK(s.converged);
    CHECK(s.value == doctest::Approx(hyperplane_section(Box(z), a)).epsilon(1e-9));
  }
}

TEST_CASE("hyperplane sections scale with the box") {
  Rng rng = substream(42, 0);
  const Eigen::VectorXd a = haar_sample(5, 1, rng).basis().col(0);
  CHECK(hyperplane_section(Box::cube(5).scaled(2.0), a) ==
        doctest::Approx(16.0 * hyperplane_section(Box::cube(5), a)));
}

TEST_CASE("central sections of the cube stay below sqrt 2") {
  for (int t = 0; t < 500; ++t) {
    Rng rng = substream(43, static_cast<std::uint64_t>(t));
    const int n = 2 + t % 9;
    const double v = hyperplane_section(Box::cube(n), haar_sample(n, 1, rng).basis().col(0));
    CHECK(v <= std::sqrt(2.0) + 1e-12);
  }
}

TEST_CASE("quadrature matches the exact hyperplane route") {
  for (int t = 0; t < 40; ++t) {
    Rng rng = substream(44, static_cast<std::uint64_t>(t));
    const int n = 2 + t % 3;
    const Eigen::VectorXd a = haar_sample(n, 1, rng).basis().col(0);
    CHECK(section_quadrature(Box::cube(n), hyperplane(a), 1e-10).value ==
          doctest::Approx(hyperplane_section(Box::cube(n), a)).epsilon(1e-11));
  }
}

TEST_CASE("Monte Carlo agrees with quadrature") {
  Rng rng = substream(45, 0);
  const Subspace h = haar_sample(4, 2, rng);
  const Box b(Eigen::Vector4d(1.0, 2.0, 0.5, 1.5));
  const double exact = section_quadrature(b, h, 1e-10).value;
  const McEstimate mc = section_mc(b, h, 200000, 9);
  CHECK(std::abs(mc.estimate - exact) < 4.0 * mc.std_error);
  CHECK(section_mc(b, h, 200000, 9, 4).estimate == mc.estimate);
}

TEST_CASE("quadrature rejects blocks above dimension 3") {
  Rng rng = substream(46, 0);
  CHECK_THROWS(section_quadrature(Box::cube(6), haar_sample(6, 4, rng), 1e-8));
}

TEST_CASE("sharp constructions") {
  const Subspace block = sharp_block_subspace(6, 4);
  CHECK(block.dim() == 4);
  CHECK(section_quadrature(Box::cube(6), orthonormal_complement(block), 1e-10).value == doctest::Approx(3.0));
  const Subspace paired = sharp_paired_subspace(6, 2);
  CHECK(paired.dim() == 2);
  CHECK(section_quadrature(Box::cube(6), orthonormal_complement(paired), 1e-10).value == doctest::Approx(2.0));
  CHECK(section_quadrature(Box::cube(4), orthonormal_complement(sharp_block_subspace(4, 2)), 1e-10).value ==
        doctest::Approx(2.0));
  CHECK_THROWS(sharp_block_subspace(5, 3));
}

}
