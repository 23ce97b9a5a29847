#include "doctest.h"

#include <cmath>

#include "cubeslice/bounds.hpp"
#include "cubeslice/quadrature.hpp"
#include "cubeslice/sections.hpp"

using namespace cubeslice;

namespace {

// (1/pi) int_R (sin t / t)^n dt for integer n, from the finite alternating sum.
double sinc_power_oracle(int n) {
  double s = 0.0, binom = 1.0;
  for (int k = 0; 2 * k <= n; ++k) {
    s += (k % 2 ? -1.0 : 1.0) * binom * std::pow(n - 2 * k, n - 1);
    binom = binom * (n - k) / (k + 1);
  }
  return s / (std::pow(2.0, n - 1) * std::tgamma(n));
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("ball integral at even integers") {
  for (int p : {2, 4, 6, 8, 10}) {
    const BallIntegral b = ball_integral(p, 1e-11);
    CHECK(b.converged);
    CHECK(b.value == doctest::Approx(sinc_power_oracle(p)).epsilon(1e-10));
    CHECK(b.error < 1e-10);
  }
  CHECK(sinc_power_oracle(4) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(sinc_power_oracle(6) == doctest::Approx(11.0 / 20.0).epsilon(1e-15));
}

TEST_CASE("ball integral at non-even p against brute-force quadrature") {
  // (2/pi) int_0^{T} |sin t/t|^p dt period by period; the neglected tail is
  // below (2/pi) T^{1-p}/(p-1) < 1e-8 for T = 4000 pi and p >= 3.
  for (double p : {3.0, 4.5, 5.0}) {
    double s = 0.0;
    for (int j = 0; j < 4000; ++j)
      s += integrate([p](double t) { return t == 0.0 ? 1.0 : std::pow(std::abs(std::sin(t) / t), p); }, j * M_PI,
                     (j + 1) * M_PI, 1e-14)
               .value;
    CHECK(ball_integral(p, 1e-11).value == doctest::Approx(2.0 * s / M_PI).epsilon(2e-8));
  }
  const double p = 7.3;
  double s = 0.0;
  for (int j = 0; j < 200; ++j)
    s += integrate([p](double t) { return t == 0.0 ? 1.0 : std::pow(std::abs(std::sin(t) / t), p); }, j * M_PI,
                   (j + 1) * M_PI, 1e-14)
             .value;
  CHECK(ball_integral(p, 1e-11).value == doctest::Approx(2.0 * s / M_PI).epsilon(1e-10));
}

TEST_CASE("ball integral stays below sqrt(2/p)") {
  for (double p = 2.05; p < 400.0; p *= 1.3) {
    const BallIntegral b = ball_integral(p, 1e-10);
    CHECK(b.value + b.error < std::sqrt(2.0 / p));
  }
  CHECK_THROWS(ball_integral(1.5, 1e-8));
}

TEST_CASE("constants") {
  CHECK(block_constant(6, 4) == doctest::Approx(3.0));
  CHECK(block_constant(2, 1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(paired_constant(2) == doctest::Approx(2.0));
  CHECK(min_constant(6, 2) == doctest::Approx(2.0));
  CHECK(min_constant(6, 4) == doctest::Approx(3.0));
  // k > n/2: only the block constant applies.
  CHECK(min_constant(3, 2) == doctest::Approx(block_constant(3, 2)));
  for (int n = 2; n <= 30; ++n)
    for (int k = 1; k < n; ++k) CHECK(block_constant(n, k) <= std::pow(std::exp(1.0), k / 2.0) + 1e-12);
}

TEST_CASE("frame constant is maximal at equal norms") {
  const int n = 5, k = 2;
  const FrameConstant eq = frame_constant_check(Eigen::VectorXd::Constant(n, std::sqrt(3.0 / 5.0)), k);
  CHECK(eq.product == doctest::Approx(eq.bound).epsilon(1e-14));
  Eigen::VectorXd a(5);
  a << 1.0, 1.0, 1.0, 0.0, 0.0;
  const FrameConstant coord = frame_constant_check(a);
  CHECK(coord.product == 1.0);
  CHECK(coord.bound == doctest::Approx(block_constant(5, 2)));
  CHECK_THROWS(frame_constant_check(Eigen::VectorXd::Constant(3, 0.9), 1));
}

TEST_CASE("box bounds dominate coordinate sections") {
  const Eigen::VectorXd z = Eigen::Vector4d(0.5, 2.0, 3.0, 1.5);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(4, 2);
  b(0, 0) = 1.0;
  b(2, 1) = 1.0;
  const Subspace h(b);
  CHECK(bound_box1(h, z) == doctest::Approx(block_constant(4, 2) * 1.5));
  CHECK(bound_box2(h, z) >= 1.5 - 1e-12);
  CHECK(section_quadrature(Box(z), h, 1e-12).value == doctest::Approx(1.5));
}

TEST_CASE("main bound: branch choice and stored exponents") {
  const Subspace block = sharp_block_subspace(6, 4);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(6);
  const BoundReport r = bound_main(block, ones);
  CHECK(r.branch == BoundBranch::Block);
  CHECK(r.bound_value == doctest::Approx(3.0));
  CHECK(r.paired_exponents.has_value() == false);
  CHECK(r.exponents.betas.sum() == doctest::Approx(4.0));

  const BoundReport p = bound_main(sharp_paired_subspace(6, 2), ones);
  CHECK(p.branch == BoundBranch::Paired);
  REQUIRE(p.paired_exponents.has_value());
  REQUIRE(p.paired_constant.has_value());
  CHECK(*p.paired_constant == doctest::Approx(2.0));
  CHECK(p.block_constant == doctest::Approx(2.25));
  CHECK(p.bound_value == doctest::Approx(2.0));
  CHECK_NOTHROW(p.paired_exponents->validate(1e-9));

  Rng rng = substream(51, 0);
  const Subspace e = haar_sample(5, 3, rng);
  Eigen::VectorXd c(5);
  c << 0.5, 1.0, 2.0, 4.0, 1.5;
  const BoundReport g = bound_main(e, c);
  CHECK(g.recompute(c) == doctest::Approx(g.bound_value).epsilon(1e-14));
  // Homogeneity: scaling c scales the bound by t^k.
  CHECK(bound_main(e, 2.0 * c).bound_value == doctest::Approx(8.0 * g.bound_value));
  CHECK(std::string(to_string(BoundBranch::Paired)) == "paired");
}

TEST_CASE("tie between branches goes to the block constant") {
  // n = 2, k = 1: both constants equal sqrt 2.
  const BoundReport r = bound_main(Subspace::coordinate(2, {0}), Eigen::Vector2d(1.0, 3.0));
  CHECK(r.branch == BoundBranch::Block);
  CHECK(r.bound_value == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("Brascamp-Lieb systems") {
  CHECK_THROWS(BLSystem(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1.0, 0.5)));
  const BLSystem m = mercedes_system();
  CHECK(m.size() == 3);
  CHECK(m.weights().sum() == doctest::Approx(2.0));
  Rng rng = substream(52, 0);
  const BLSystem r = random_bl_system(rng, 2, 4);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < 4; ++i) s += r.weights()(i) * r.directions().row(i).transpose() * r.directions().row(i);
  CHECK((s - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Gaussian extremizers at any common variance") {
  for (double v : {0.3, 1.0, 4.0}) {
    const BLCheck r = bl_check(mercedes_system(), std::vector<BLDensity>(3, Gaussian{0.0, v}), 1e-10);
    CHECK(r.converged);
    CHECK(r.lhs == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(r.rhs == doctest::Approx(1.0));
  }
  // Different variances give strict inequality.
  const BLCheck s =
      bl_check(mercedes_system(), {Gaussian{0.0, 0.2}, Gaussian{0.0, 1.0}, Gaussian{0.0, 5.0}}, 1e-10);
  CHECK(s.lhs < s.rhs - 1e-3);
}

TEST_CASE("step systems: exact engine and inequality") {
  const BLSystem ortho(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Ones(2));
  const StepDensity f({{-1.0, 0.0, 0.3}, {0.0, 1.0, 0.7}});
  const BLCheck eq = bl_check(ortho, {f, f}, 1e-12);
  CHECK(eq.lhs == doctest::Approx(1.0).epsilon(1e-14));
  for (int t = 0; t < 30; ++t) {
    Rng rng = substream(53, static_cast<std::uint64_t>(t));
    const BLSystem sys = random_bl_system(rng, 1 + t % 2, 3);
    std::vector<BLDensity> fs;
    for (int i = 0; i < 3; ++i) fs.push_back(random_density(rng, 3, 2.0).shifted(0.0));
    const BLCheck r = bl_check(sys, fs, 1e-10);
    CHECK(r.lhs <= r.rhs * (1.0 + 1e-9));
  }
}

}
