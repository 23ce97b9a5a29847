#include "doctest.h"

#include <cmath>

#include "cubeslice/average.hpp"
#include "cubeslice/bounds.hpp"
#include "cubeslice/grassmann.hpp"
#include "cubeslice/marginals.hpp"
#include "cubeslice/sections.hpp"

using namespace cubeslice;

namespace {

const double kS = 1.0 / std::sqrt(2.0);

Subspace line(const Eigen::VectorXd& v) {
  Eigen::MatrixXd m(v.size(), 1);
  m.col(0) = v.normalized();
  return Subspace(m);
}

}  // namespace

TEST_SUITE("grassmann") {

TEST_CASE("complements in the plane") {
  CHECK(projector_distance(orthonormal_complement(Subspace::coordinate(2, {0})), Subspace::coordinate(2, {1})) <
        1e-15);
  CHECK(projector_distance(orthonormal_complement(line(Eigen::Vector2d(1, 1))), line(Eigen::Vector2d(1, -1))) <
        1e-15);
}

TEST_CASE("frames of coordinate and diagonal subspaces") {
  const Frame f = frame_of_complement(Subspace::coordinate(5, {0, 1}));
  for (int i = 0; i < 2; ++i) CHECK(f.norms(i) == doctest::Approx(0.0));
  for (int i = 2; i < 5; ++i) CHECK(f.norms(i) == doctest::Approx(1.0));
  CHECK(f.tightness_defect() < 1e-15);
  const Frame d = frame_of_complement(line(Eigen::Vector2d(1, 1)));
  CHECK(d.dim() == 1);
  CHECK(std::abs(d.vectors(0, 0)) == doctest::Approx(kS));
  CHECK(d.vectors(0, 0) == doctest::Approx(-d.vectors(1, 0)));
  CHECK(d.norms.squaredNorm() == doctest::Approx(1.0));
}

TEST_CASE("projection weights of coordinate and diagonal subspaces") {
  const ExponentAssignment c = projection_weights(Subspace::coordinate(4, {0, 1}));
  CHECK(c.betas(0) == doctest::Approx(1.0));
  CHECK(c.betas(1) == doctest::Approx(1.0));
  CHECK(c.betas(2) == doctest::Approx(0.0));
  CHECK(c.betas(3) == doctest::Approx(0.0));
  const ExponentAssignment d = projection_weights(line(Eigen::Vector2d(1, 1)));
  CHECK(d.betas(0) == doctest::Approx(0.5));
  CHECK(d.betas(1) == doctest::Approx(0.5));
}

TEST_CASE("box2 exponents: base cases") {
  const ExponentAssignment b = box2_exponents(orthonormal_complement(Subspace::coordinate(4, {0})));
  CHECK(b.betas(0) == doctest::Approx(0.0));
  for (int i = 1; i < 4; ++i) CHECK(b.betas(i) == doctest::Approx(1.0));
  const ExponentAssignment g = box2_exponents(line(Eigen::Vector2d(1, -1)));
  CHECK(g.betas(0) == doctest::Approx(0.5));
  CHECK(g.betas(1) == doctest::Approx(0.5));
}

TEST_CASE("projection lemma: planar equality and vanishing coordinate") {
  Eigen::MatrixXd a(2, 1);
  a << kS, -kS;
  const ProjectionCheck eq = parallelepiped_projection_check(Eigen::Vector2d(kS, kS), a, 0);
  CHECK(eq.lhs == doctest::Approx(kS));
  CHECK(eq.rhs == doctest::Approx(kS));
  Eigen::MatrixXd g(3, 1);
  g << 0.0, 0.6, 0.8;
  const ProjectionCheck z = parallelepiped_projection_check(Eigen::Vector3d(1, 0, 0), g, 1);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs >= 0.0);
}

TEST_CASE("local search over cube sections") {
  const auto hyper = [](const Subspace& t) { return hyperplane_section(Box::cube(4), t.basis().col(0)); };
  const SearchResult r = grassmann_search_max(hyper, 4, 1, 32, 400, 5);
  CHECK(r.value >= std::sqrt(2.0) - 1e-3);
  double best = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (double s : {1.0, -1.0}) {
        Eigen::Vector4d d = Eigen::Vector4d::Zero();
        d(i) = kS;
        d(j) = s * kS;
        best = std::max(best, std::abs(d.dot(r.best.basis().col(0))));
      }
  CHECK(best >= 0.999);

  CHECK(grassmann_search_max([](const Subspace&) { return 1.0; }, 3, 1, 2, 10, 1).value == 1.0);

  const ProductDensity cube = ProductDensity::cube(4);
  const auto plane = [&](const Subspace& e) { return MarginalEvaluator(cube, e)(Eigen::VectorXd::Zero(2)); };
  CHECK(grassmann_search_max(plane, 4, 2, 16, 400, 6).value >= 2.0 - 1e-3);
}

}

TEST_SUITE("densities") {

TEST_CASE("norms of simple indicators") {
  const StepDensity u = StepDensity::indicator(0.0, 1.0);
  CHECK(l1_norm(u) == 1.0);
  CHECK(sup_norm(u) == 1.0);
  CHECK(lp_norm(u, 2.0) == 1.0);
  const StepDensity t = StepDensity::indicator(0.0, 0.5, 2.0);
  CHECK(l1_norm(t) == 1.0);
  CHECK(sup_norm(t) == 2.0);
  CHECK(lp_norm(t, 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(level_set_measure(t, 1.0) == 0.5);
  CHECK(level_set_measure(t, sup_norm(t)) == 0.0);
}

TEST_CASE("rearrangement examples") {
  CHECK(rearrange(StepDensity::indicator(0.0, 0.5, 2.0)) == StepDensity::indicator(-0.25, 0.25, 2.0));
  const StepDensity two({{0.0, 0.5, 1.5}, {0.5, 1.0, 0.5}});
  const StepDensity want({{-0.5, -0.25, 0.5}, {-0.25, 0.25, 1.5}, {0.25, 0.5, 0.5}});
  const StepDensity got = rearrange(two);
  REQUIRE(got.pieces().size() == want.pieces().size());
  for (std::size_t i = 0; i < got.pieces().size(); ++i) {
    CHECK(got.pieces()[i].lo == doctest::Approx(want.pieces()[i].lo));
    CHECK(got.pieces()[i].hi == doctest::Approx(want.pieces()[i].hi));
    CHECK(got.pieces()[i].value == doctest::Approx(want.pieces()[i].value));
  }
}

TEST_CASE("single-piece random density") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng a = substream(s, 0), b = substream(s, 0);
    const StepDensity f = random_density(a, 1, 1.0);
    CHECK(f == random_density(b, 1, 1.0));
    REQUIRE(f.pieces().size() == 1);
    CHECK(f.pieces()[0].hi - f.pieces()[0].lo >= 1.0 - 1e-12);
    CHECK(f.pieces()[0].value <= 1.0);
  }
}

}

TEST_SUITE("sections") {

TEST_CASE("facet sections") {
  for (int n = 2; n <= 10; ++n) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(0) = 1.0;
    CHECK(hyperplane_section(Box::cube(n), e) == 1.0);
    CHECK(hyperplane_section_sinc(Box::cube(n), e, 1e-10).value == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("exact route closed forms") {
  CHECK(std::abs(hyperplane_section_exact(Box::cube(2), Eigen::Vector2d(kS, kS)) - std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(hyperplane_section_exact(Box::cube(4), Eigen::Vector4d::Constant(0.5)) - 4.0 / 3.0) < 1e-10);
}

TEST_CASE("quadrature closed forms") {
  const Subspace block = orthonormal_complement(sharp_block_subspace(4, 2));
  CHECK(std::abs(section_quadrature(Box::cube(4), block, 1e-10).value - 2.0) < 1e-6);
  CHECK(section_quadrature(Box(Eigen::Vector3d(1, 2, 3)), Subspace::coordinate(3, {1, 2}), 1e-10).value ==
        doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("Monte Carlo rectangle") {
  Eigen::MatrixXd b(3, 2);
  b << kS, 0, -kS, 0, 0, 1;
  const McEstimate mc = section_mc(Box::cube(3), Subspace(b), 100000, 21);
  // The bounding box is the rectangle itself, so every sample hits.
  CHECK(std::abs(mc.estimate - std::sqrt(2.0)) <= 3.0 * mc.std_error + 1e-12);
}

TEST_CASE("small sharp constructions") {
  const Subspace b21 = sharp_block_subspace(2, 1);
  CHECK(projector_distance(orthonormal_complement(b21), line(Eigen::Vector2d(1, 1))) < 1e-15);
  CHECK(section_quadrature(Box::cube(2), orthonormal_complement(b21), 1e-10).value ==
        doctest::Approx(std::sqrt(2.0)));
  CHECK(section_quadrature(Box::cube(2), orthonormal_complement(sharp_paired_subspace(2, 1)), 1e-10).value ==
        doctest::Approx(std::sqrt(2.0)));
  CHECK(std::abs(section_quadrature(Box::cube(4), orthonormal_complement(sharp_paired_subspace(4, 2)), 1e-10).value -
                 2.0) < 1e-6);
  CHECK(std::abs(section_quadrature(Box::cube(6), orthonormal_complement(sharp_block_subspace(6, 4)), 1e-10).value -
                 3.0) < 1e-6);
  CHECK(block_constant(6, 4) < paired_constant(4));
}

}

TEST_SUITE("bounds") {

TEST_CASE("planar frame constants") {
  const FrameConstant eq = frame_constant_check(Eigen::Vector2d(kS, kS), 1);
  CHECK(eq.product == doctest::Approx(std::sqrt(2.0)));
  CHECK(eq.bound == doctest::Approx(std::sqrt(2.0)));
  const FrameConstant c = frame_constant_check(Eigen::Vector2d(1.0, 0.0), 1);
  CHECK(c.product == 1.0);
}

TEST_CASE("box bounds: unit cube and planar case") {
  Rng rng = substream(91, 0);
  for (int k = 1; k < 5; ++k)
    CHECK(bound_box1(haar_sample(5, 5 - k, rng), Eigen::VectorXd::Ones(5)) ==
          doctest::Approx(block_constant(5, k)));
  const Subspace h = line(Eigen::Vector2d(1, -1));
  const Eigen::Vector2d z(1.0, 4.0);
  CHECK(bound_box2(h, z) == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(section_quadrature(Box(z), h, 1e-12).value == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("main bound worked cases") {
  const Subspace diag = line(Eigen::Vector2d(1, 1));
  CHECK(bound_main(diag, Eigen::Vector2d(1, 1)).bound_value == doctest::Approx(std::sqrt(2.0)));
  CHECK(bound_main(sharp_block_subspace(6, 4), Eigen::VectorXd::Ones(6)).bound_value == doctest::Approx(3.0));
  const BoundReport r = bound_main(diag, Eigen::Vector2d(1, 4));
  CHECK(r.bound_value == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(r.exponents.betas(0) == doctest::Approx(0.5));
  CHECK(r.exponents.betas(1) == doctest::Approx(0.5));
}

}

TEST_SUITE("marginals") {

TEST_CASE("marginal worked cases") {
  for (int n = 2; n <= 4; ++n)
    for (int k = 1; k < n; ++k) {
      Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n, k);
      CHECK(std::abs(marginal_at({ProductDensity::cube(n), Subspace(b), Eigen::VectorXd::Zero(k)}, 1e-12) - 1.0) <
            1e-10);
    }
  CHECK(std::abs(marginal_at({ProductDensity::cube(2), line(Eigen::Vector2d(1, 1)), Eigen::VectorXd::Zero(1)}, 1e-12) -
                 std::sqrt(2.0)) < 1e-8);
  const ProductDensity t(std::vector<StepDensity>(2, StepDensity::indicator(0.0, 0.5, 2.0)));
  CHECK(std::abs(marginal_at({t, Subspace::coordinate(2, {0}), Eigen::VectorXd::Constant(1, 0.25)}, 1e-12) - 2.0) <
        1e-10);
}

TEST_CASE("grid sup of the planar diagonal") {
  const double tol = 1e-8;
  const Subspace diag = line(Eigen::Vector2d(1, 1));
  const GridSup g = marginal_grid_sup(ProductDensity::cube(2), diag, default_grid(ProductDensity::cube(2), diag), tol);
  CHECK(g.value >= std::sqrt(2.0) - 1e-6);
  CHECK(g.value <= std::sqrt(2.0) + tol);
  const TheoremRecord r = verify_main_theorem(ProductDensity::cube(2), diag, 1e-4);
  CHECK(r.bound == doctest::Approx(std::sqrt(2.0)));
  CHECK(r.slack <= 1e-4);
}

TEST_CASE("Rogozin with uniform factors on [0,1] along e1") {
  const ProductDensity u(std::vector<StepDensity>(3, StepDensity::indicator(0.0, 1.0)));
  const RogozinRecord r = rogozin_check(u, Eigen::Vector3d(1, 0, 0), 1e-8);
  CHECK(r.sup_lb == doctest::Approx(1.0));
  CHECK(r.cube_section == 1.0);
}

}

TEST_SUITE("average") {

TEST_CASE("three-dimensional cube average is bounded by Ball's constant") {
  const GrassmannAverage a = cube_avg_power(3, 1, 5000, 31);
  CHECK(a.estimate > 0.0);
  CHECK(a.estimate <= std::pow(std::sqrt(2.0), 3) + 3.0 * a.std_error);
  CHECK(cube_avg_power(3, 1, 5000, 31).estimate == a.estimate);
}

}
