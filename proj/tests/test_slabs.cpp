#include "doctest.h"

#include <cmath>

#include "cubeslice/grassmann.hpp"
#include "cubeslice/slabs.hpp"

using namespace cubeslice;

namespace {

std::vector<SlabFactor> cube_factors(const Eigen::MatrixXd& rows) {
  std::vector<SlabFactor> out;
  for (int i = 0; i < rows.rows(); ++i)
    out.push_back({rows.row(i).transpose(), {{-0.5, 0.5, 1.0}}});
  return out;
}

}  // namespace

TEST_SUITE("slabs") {

TEST_CASE("clipped polytope volumes") {
  Eigen::MatrixXd a(1, 2);
  a << 1.0, 1.0;
  const Eigen::VectorXd half = Eigen::Vector2d(0.5, 0.5);
  CHECK(clipped_polytope_volume(a, Eigen::VectorXd::Zero(1), half) == doctest::Approx(0.5));
  CHECK(clipped_polytope_volume(a, Eigen::VectorXd::Constant(1, -0.5), half) == doctest::Approx(0.125));
  CHECK(clipped_polytope_volume(a, Eigen::VectorXd::Constant(1, -2.0), half) == 0.0);
  Eigen::MatrixXd a3(1, 3);
  a3 << 1.0, 1.0, 1.0;
  // Corner simplex x + y + z <= -1 inside [-1/2, 1/2]^3: legs 1/2.
  CHECK(clipped_polytope_volume(a3, Eigen::VectorXd::Constant(1, -1.0), Eigen::Vector3d::Constant(0.5)) ==
        doctest::Approx(1.0 / 48.0));
}

TEST_CASE("rotated cube keeps unit volume") {
  for (int d = 1; d <= 3; ++d) {
    Rng rng = substream(31, static_cast<std::uint64_t>(d));
    const Subspace r = haar_sample(d, d, rng);
    const auto f = cube_factors(r.basis());
    CHECK(integrate_slab_product(f, d) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("hexagonal section of Q3") {
  // Rows of an orthonormal basis of (1,1,1)^perp.
  Eigen::MatrixXd w(3, 2);
  w << 1 / std::sqrt(2.0), 1 / std::sqrt(6.0), -1 / std::sqrt(2.0), 1 / std::sqrt(6.0), 0.0, -2 / std::sqrt(6.0);
  CHECK(integrate_slab_product(cube_factors(w), 2) == doctest::Approx(3.0 * std::sqrt(3.0) / 4.0).epsilon(1e-13));
}

TEST_CASE("weighted pieces expand linearly") {
  std::vector<SlabFactor> f{{Eigen::VectorXd::Constant(1, 1.0), {{0.0, 1.0, 2.0}, {1.0, 3.0, 0.5}}},
                            {Eigen::VectorXd::Constant(1, 0.5), {{-1.0, 1.0, 3.0}}}};
  // On [0, 2]: 2 * 3 on [0,1], 0.5 * 3 on [1,2].
  CHECK(integrate_slab_product(f, 1) == doctest::Approx(6.0 + 1.5));
}

TEST_CASE("directions must span") {
  Eigen::MatrixXd w(2, 2);
  w << 1.0, 0.0, 2.0, 0.0;
  CHECK_THROWS_AS(integrate_slab_product(cube_factors(w), 2), std::invalid_argument);
}

}
