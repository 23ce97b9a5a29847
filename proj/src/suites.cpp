#include "cubeslice/suites.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "cubeslice/average.hpp"
#include "cubeslice/bounds.hpp"
#include "cubeslice/grassmann.hpp"
#include "cubeslice/marginals.hpp"
#include "cubeslice/parallel.hpp"
#include "cubeslice/sections.hpp"

namespace cubeslice {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr std::size_t kMaxListedFailures = 20;

using Clock = std::chrono::steady_clock;

class Checks {
 public:
  void add(const std::string& name, bool ok, json detail = json::object()) {
    detail["name"] = name;
    detail["pass"] = ok;
    checks_.push_back(std::move(detail));
    if (!ok) failures_.push_back(name);
  }
  bool pass() const { return failures_.empty(); }

  SuiteResult finish(int criterion, const char* name, const SuiteOptions& opt,
                     Clock::time_point start) const {
    SuiteResult r{criterion, name, pass(), json::object()};
    r.report["criterion"] = criterion;
    r.report["name"] = name;
    r.report["seed"] = opt.seed;
    r.report["pass"] = r.pass;
    r.report["checks"] = checks_;
    r.report["failures"] = failures_;
    if (opt.timing)
      r.report["runtime_ms"] =
          std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    return r;
  }

 private:
  json checks_ = json::array();
  json failures_ = json::array();
};

// Generator for trial t of the suite with the given criterion number.
Rng trial_rng(const SuiteOptions& opt, int criterion, std::size_t trial) {
  return substream(mix64(opt.seed + static_cast<std::uint64_t>(criterion)), trial);
}

std::uint64_t sub_seed(const SuiteOptions& opt, int criterion, std::uint64_t salt) {
  return mix64(mix64(opt.seed + static_cast<std::uint64_t>(criterion)) ^ mix64(salt));
}

Eigen::VectorXd haar_direction(int n, Rng& rng) { return haar_sample(n, 1, rng).basis().col(0); }

// Indices of failing trials, capped for the report.
json failing_trials(const std::vector<char>& ok) {
  json out = json::array();
  for (std::size_t t = 0; t < ok.size() && out.size() < kMaxListedFailures; ++t)
    if (!ok[t]) out.push_back(t);
  return out;
}

std::size_t count_failures(const std::vector<char>& ok) {
  std::size_t c = 0;
  for (char v : ok) c += v ? 0 : 1;
  return c;
}

double max_of(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace

ProductDensity random_unit_product(Rng& rng, int n, int max_pieces) {
  std::vector<StepDensity> factors;
  for (int i = 0; i < n; ++i) factors.push_back(random_density(rng, max_pieces, 1.0));
  return ProductDensity(std::move(factors));
}

SuiteResult suite_ball_integral(const SuiteOptions& opt) {
  const auto start = Clock::now();
  constexpr double kTol = 1e-10, kValueTol = 1e-8;
  Checks checks;

  const BallIntegral i2 = ball_integral(2.0, kTol), i4 = ball_integral(4.0, kTol);
  checks.add("I(2) = 1", std::abs(i2.value - 1.0) <= kValueTol,
             {{"value", i2.value}, {"error", i2.error}, {"tolerance", kValueTol}});
  checks.add("I(4) = 2/3", std::abs(i4.value - 2.0 / 3.0) <= kValueTol,
             {{"value", i4.value}, {"error", i4.error}, {"tolerance", kValueTol}});

  constexpr int kPoints = 50;
  std::vector<double> ps(kPoints), values(kPoints), errors(kPoints);
  parallel_for(kPoints, opt.workers, [&](std::size_t j) {
    ps[j] = std::exp(std::log(2.0) + (std::log(100.0) - std::log(2.0)) * j / (kPoints - 1));
    if (j == 0) ps[j] = 2.0;
    if (j + 1 == kPoints) ps[j] = 100.0;
    const BallIntegral b = ball_integral(ps[j], kTol);
    values[j] = b.value;
    errors[j] = b.error;
  });
  std::vector<char> ok(kPoints);
  double min_margin_interior = std::numeric_limits<double>::infinity();
  json rows = json::array();
  for (int j = 0; j < kPoints; ++j) {
    const double margin = std::sqrt(2.0 / ps[j]) - values[j];
    // Strict inequality for p > 2 must survive the quadrature error; p = 2
    // is the equality case.
    ok[j] = j == 0 ? margin >= -kValueTol : margin > errors[j];
    if (j > 0) min_margin_interior = std::min(min_margin_interior, margin);
    rows.push_back({ps[j], values[j], std::sqrt(2.0 / ps[j]), margin});
  }
  checks.add("I(p) <= sqrt(2/p) on 50 log-spaced p in [2, 100]", count_failures(ok) == 0,
             {{"violations", count_failures(ok)},
              {"failing_points", failing_trials(ok)},
              {"min_margin_p_gt_2", min_margin_interior},
              {"rows_p_I_bound_margin", rows}});
  return checks.finish(1, "ball-integral", opt, start);
}

SuiteResult suite_cube_sections(const SuiteOptions& opt) {
  const auto start = Clock::now();
  constexpr double kAgreeTol = 1e-8, kSincTol = 1e-10;
  Checks checks;

  constexpr int kDirections = 100;
  std::vector<double> diffs(kDirections);
  std::vector<char> conv(kDirections);
  parallel_for(kDirections, opt.workers, [&](std::size_t t) {
    Rng rng = trial_rng(opt, 2, t);
    const int n = 2 + static_cast<int>(t % 7);
    const Eigen::VectorXd a = haar_direction(n, rng);
    const Box cube = Box::cube(n);
    const SectionResult s = hyperplane_section_sinc(cube, a, kSincTol);
    diffs[t] = std::abs(s.value - hyperplane_section(cube, a));
    conv[t] = s.converged;
  });
  checks.add("sinc and exact routes agree on 100 random directions, n <= 8",
             max_of(diffs) <= kAgreeTol && count_failures(conv) == 0,
             {{"max_abs_difference", max_of(diffs)},
              {"tolerance", kAgreeTol},
              {"unconverged", count_failures(conv)}});

  const Eigen::Vector3d d3 = Eigen::Vector3d::Ones().normalized();
  const double q3 = hyperplane_section(Box::cube(3), d3);
  const double q3_sinc = hyperplane_section_sinc(Box::cube(3), d3, kSincTol).value;
  const double hexagon = 3.0 * std::sqrt(3.0) / 4.0;
  checks.add("Q3 main diagonal section = 3 sqrt(3)/4",
             std::abs(q3 - hexagon) <= 1e-8 && std::abs(q3_sinc - hexagon) <= 1e-8,
             {{"exact", q3}, {"sinc", q3_sinc}, {"expected", hexagon}});

  const Eigen::Vector2d d2 = Eigen::Vector2d::Ones().normalized();
  const double q2 = hyperplane_section(Box::cube(2), d2);
  const double q2_sinc = hyperplane_section_sinc(Box::cube(2), d2, kSincTol).value;
  checks.add("Q2 diagonal section = sqrt(2)",
             std::abs(q2 - kSqrt2) <= 1e-9 && std::abs(q2_sinc - kSqrt2) <= 1e-9,
             {{"exact", q2}, {"sinc", q2_sinc}});

  constexpr std::size_t kHaar = 10000;
  json per_n = json::array();
  bool all_below = true;
  for (int n = 2; n <= 8; ++n) {
    std::vector<double> vals(kHaar);
    parallel_for(kHaar, opt.workers, [&](std::size_t s) {
      Rng rng = substream(sub_seed(opt, 2, static_cast<std::uint64_t>(n)), s);
      vals[s] = hyperplane_section(Box::cube(n), haar_direction(n, rng));
    });
    const double mx = max_of(vals);
    all_below = all_below && mx <= kSqrt2 + 1e-8;
    per_n.push_back({{"n", n}, {"max_section", mx}, {"samples", kHaar}});
  }
  checks.add("10^4 Haar directions per n in 2..8 stay below sqrt(2) + 1e-8", all_below,
             {{"per_n", per_n}});
  return checks.finish(2, "cube-sections", opt, start);
}

SuiteResult suite_sharpness(const SuiteOptions& opt) {
  const auto start = Clock::now();
  constexpr double kTol = 1e-4;
  Checks checks;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(6);

  const Subspace block = sharp_block_subspace(6, 4);
  const double block_section =
      section_quadrature(Box::cube(6), orthonormal_complement(block), 1e-10).value;
  const BoundReport block_bound = bound_main(block, ones);
  checks.add("block construction (6,4): section 3 = active bound",
             std::abs(block_section - 3.0) <= kTol && block_bound.branch == BoundBranch::Block &&
                 std::abs(block_bound.bound_value - 3.0) <= 1e-12 &&
                 std::abs(block_section - block_bound.bound_value) <= kTol,
             {{"section", block_section},
              {"bound", block_bound.bound_value},
              {"branch", to_string(block_bound.branch)}});

  const Subspace paired = sharp_paired_subspace(6, 2);
  const double paired_section =
      section_quadrature(Box::cube(6), orthonormal_complement(paired), 1e-10).value;
  const BoundReport paired_bound = bound_main(paired, ones);
  checks.add("paired construction (6,2): section 2 = active bound",
             std::abs(paired_section - 2.0) <= kTol &&
                 paired_bound.branch == BoundBranch::Paired &&
                 std::abs(paired_bound.bound_value - 2.0) <= 1e-12 &&
                 std::abs(paired_section - paired_bound.bound_value) <= kTol,
             {{"section", paired_section},
              {"bound", paired_bound.bound_value},
              {"branch", to_string(paired_bound.branch)},
              {"block_constant", paired_bound.block_constant}});

  // The same values through the marginal of the cube density at 0.
  const double block_marginal =
      MarginalEvaluator(ProductDensity::cube(6), block)(Eigen::VectorXd::Zero(4));
  checks.add("block construction through the marginal at 0",
             std::abs(block_marginal - 3.0) <= kTol, {{"marginal", block_marginal}});
  return checks.finish(3, "sharpness", opt, start);
}

SuiteResult suite_main_theorem(const SuiteOptions& opt) {
  const auto start = Clock::now();
  constexpr int kTrials = 500;
  constexpr double kTol = 1e-4;
  Checks checks;

  std::vector<double> slack(kTrials);
  std::vector<char> ok(kTrials);
  std::vector<int> dims(kTrials);
  parallel_for(kTrials, opt.workers, [&](std::size_t t) {
    Rng rng = trial_rng(opt, 4, t);
    const int n = 2 + static_cast<int>(t % 4);
    std::uniform_int_distribution<int> pick_k(std::max(1, n - 3), n - 1);
    const int k = pick_k(rng);
    std::vector<StepDensity> factors;
    for (int i = 0; i < n; ++i) {
      StepDensity f = random_density(rng, 4, 1.0);
      if (t % 2 == 1) f = with_sup_norm(f, 0.5 + 3.5 * uniform01(rng));
      factors.push_back(std::move(f));
    }
    const ProductDensity f(std::move(factors));
    const Subspace E = haar_sample(n, k, rng);
    const TheoremRecord r = verify_main_theorem(f, E, kTol);
    slack[t] = r.slack;
    ok[t] = r.pass;
    dims[t] = n * 10 + k;
  });
  std::size_t unit = 0;
  for (int t = 0; t < kTrials; t += 2) ++unit;
  checks.add("500 random (f, E), n <= 5, n - k <= 3: sup <= bound (1 + 1e-4)",
             count_failures(ok) == 0,
             {{"violations", count_failures(ok)},
              {"failing_trials", failing_trials(ok)},
              {"max_slack", max_of(slack)},
              {"unit_sup_trials", unit},
              {"general_sup_trials", kTrials - unit}});

  Eigen::MatrixXd diag(2, 1);
  diag << 1.0, 1.0;
  const TheoremRecord sharp =
      verify_main_theorem(ProductDensity::cube(2), Subspace(diag / kSqrt2), kTol);
  checks.add("cube density on the diagonal attains the bound",
             sharp.pass && std::abs(sharp.slack) <= kTol,
             {{"sup_lower_bound", sharp.sup_lower_bound}, {"bound", sharp.bound}});
  return checks.finish(4, "main-theorem", opt, start);
}

SuiteResult suite_box_bounds(const SuiteOptions& opt) {
  const auto start = Clock::now();
  constexpr int kTrials = 500;
  constexpr int kFrames = 10000;
  Checks checks;

  std::vector<double> ratio1(kTrials), ratio2(kTrials, 0.0);
  std::vector<char> ok1(kTrials), ok2(kTrials);
  std::vector<char> has2(kTrials, 0);
  parallel_for(kTrials, opt.workers, [&](std::size_t t) {
    Rng rng = trial_rng(opt, 5, t);
    const int n = 2 + static_cast<int>(t % 5);
    std::uniform_int_distribution<int> pick_dim(1, std::min(3, n - 1));
    const int dim_h = pick_dim(rng);
    const int k = n - dim_h;
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = std::exp(std::log(0.2) + std::log(15.0) * uniform01(rng));
    const Subspace H = haar_sample(n, dim_h, rng);
    const double section = section_quadrature(Box(z), H, 1e-10).value;
    const double b1 = bound_box1(H, z);
    ratio1[t] = section / b1;
    ok1[t] = section <= b1 * (1.0 + 1e-6);
    ok2[t] = true;
    if (2 * k <= n) {
      const double b2 = bound_box2(H, z);
      has2[t] = 1;
      ratio2[t] = section / b2;
      ok2[t] = section <= b2 * (1.0 + 1e-6);
    }
  });
  std::size_t count2 = 0;
  for (char h : has2) count2 += h;
  checks.add("section <= block box bound (1 + 1e-6) on 500 instances", count_failures(ok1) == 0,
             {{"violations", count_failures(ok1)},
              {"failing_trials", failing_trials(ok1)},
              {"max_ratio", max_of(ratio1)}});
  checks.add("section <= 2^{k/2} box bound (1 + 1e-6) where k <= n/2", count_failures(ok2) == 0,
             {{"violations", count_failures(ok2)},
              {"failing_trials", failing_trials(ok2)},
              {"instances", count2},
              {"max_ratio", max_of(ratio2)}});

  std::vector<char> okf(kFrames);
  std::vector<double> fr(kFrames);
  parallel_for(kFrames, opt.workers, [&](std::size_t t) {
    Rng rng = substream(sub_seed(opt, 5, 1), t);
    const int n = 2 + static_cast<int>(t % 9);
    std::uniform_int_distribution<int> pick_k(1, n - 1);
    const int k = pick_k(rng);
    const Subspace H = haar_sample(n, n - k, rng);
    const Eigen::VectorXd a = H.basis().rowwise().norm();
    const FrameConstant fc = frame_constant_check(a, k);
    fr[t] = fc.product / fc.bound;
    okf[t] = fc.product <= fc.bound * (1.0 + 1e-10);
  });
  checks.add("frame constant bound on 10^4 Haar frames, n <= 10", count_failures(okf) == 0,
             {{"violations", count_failures(okf)}, {"max_ratio", max_of(fr)}});
  return checks.finish(5, "box-bounds", opt, start);
}

SuiteResult suite_rogozin(const SuiteOptions& opt) {
  const auto start = Clock::now();
  constexpr int kTrials = 200;
  constexpr double kTol = 1e-4;
  Checks checks;

  std::vector<double> ratio(kTrials);
  std::vector<char> ok(kTrials);
  parallel_for(kTrials, opt.workers, [&](std::size_t t) {
    Rng rng = trial_rng(opt, 6, t);
    const int n = 2 + static_cast<int>(t % 3);
    const ProductDensity f = random_unit_product(rng, n);
    const RogozinRecord r = rogozin_check(f, haar_direction(n, rng), kTol);
    ratio[t] = r.sup_lb / r.cube_section;
    ok[t] = r.pass;
  });
  checks.add("200 random (f, theta), n <= 4: sup <= |Q_n ∩ theta^perp| (1 + 1e-4)",
             count_failures(ok) == 0,
             {{"violations", count_failures(ok)},
              {"failing_trials", failing_trials(ok)},
              {"max_ratio", max_of(ratio)}});

  const RogozinRecord eq = rogozin_check(ProductDensity::cube(2), Eigen::Vector2d(1.0, 1.0), kTol);
  checks.add("equality for the cube density on the diagonal",
             std::abs(eq.sup_lb - eq.cube_section) <= 1e-6 &&
                 std::abs(eq.cube_section - kSqrt2) <= 1e-12,
             {{"sup_lb", eq.sup_lb}, {"cube_section", eq.cube_section}});
  return checks.finish(6, "rogozin", opt, start);
}

SuiteResult suite_average(const SuiteOptions& opt) {
  const auto start = Clock::now();
  constexpr std::size_t kSamples = 100000;
  constexpr int kRandom = 20;
  Checks checks;
  const double four_over_pi = 4.0 / std::numbers::pi;

  const GrassmannAverage cube = cube_avg_power(2, 1, kSamples, sub_seed(opt, 7, 0), opt.workers);
  checks.add("cube side (n=2, k=1) reproduces 4/pi within 3 SE",
             std::abs(cube.estimate - four_over_pi) <= 3.0 * cube.std_error,
             {{"estimate", cube.estimate},
              {"std_error", cube.std_error},
              {"expected", four_over_pi},
              {"at_least_one_minus_3se", cube.estimate >= 1.0 - 3.0 * cube.std_error}});

  const ProductDensity half_cube(std::vector<StepDensity>(2, StepDensity::indicator(-0.25, 0.25, 2.0)));
  const GrassmannAverage scaled =
      avg_marginal_power(half_cube, 1, kSamples, 1e-10, sub_seed(opt, 7, 1), opt.workers);
  checks.add("factors 2·1[-1/4,1/4] reproduce 16/pi within 3 SE",
             std::abs(scaled.estimate - 4.0 * four_over_pi) <= 3.0 * scaled.std_error,
             {{"estimate", scaled.estimate},
              {"std_error", scaled.std_error},
              {"expected", 4.0 * four_over_pi}});

  json records = json::array();
  bool all = true;
  for (int t = 0; t < kRandom; ++t) {
    Rng rng = trial_rng(opt, 7, static_cast<std::size_t>(t));
    const ProductDensity f = random_unit_product(rng, 2);
    const PropAvgRecord r =
        prop_avg_check(f, 1, kSamples, 1e-10, sub_seed(opt, 7, 100 + t), opt.workers);
    all = all && r.pass;
    records.push_back({{"lhs", r.lhs.estimate},
                       {"rhs", r.rhs.estimate},
                       {"paired_mean", r.paired_mean},
                       {"paired_se", r.paired_se},
                       {"pass", r.pass}});
  }
  checks.add("20 random f in F_2, k=1: lhs <= rhs + 3 paired SE", all, {{"records", records}});

  Rng rng3 = trial_rng(opt, 7, 1000);
  const ProductDensity f3 = random_unit_product(rng3, 3);
  const PropAvgRecord r3 = prop_avg_check(f3, 1, kSamples, 1e-10, sub_seed(opt, 7, 3), opt.workers);
  checks.add("n=3, k=1 random f: lhs <= rhs + 3 paired SE", r3.pass,
             {{"lhs", r3.lhs.estimate},
              {"rhs", r3.rhs.estimate},
              {"paired_mean", r3.paired_mean},
              {"paired_se", r3.paired_se},
              {"combined_se", r3.combined_se}});

  // Spread factors: recorded only.
  const ProductDensity spread(std::vector<StepDensity>(2, StepDensity::indicator(-2.0, 2.0, 0.25)));
  const PropAvgRecord rs = prop_avg_check(spread, 1, 10000, 1e-10, sub_seed(opt, 7, 4), opt.workers);
  checks.add("spread factors (recorded margin)", rs.pass,
             {{"lhs", rs.lhs.estimate},
              {"rhs", rs.rhs.estimate},
              {"margin_in_combined_se", (rs.rhs.estimate - rs.lhs.estimate) / rs.combined_se}});
  return checks.finish(7, "average", opt, start);
}

SuiteResult suite_grinberg(const SuiteOptions& opt) {
  const auto start = Clock::now();
  constexpr std::size_t kSamples = 100000;
  Checks checks;
  auto record = [](const GrinbergRecord& r) {
    return json{{"phi_K", r.phi_K.estimate},   {"se_K", r.phi_K.std_error},
                {"phi_SK", r.phi_SK.estimate}, {"se_SK", r.phi_SK.std_error},
                {"difference", r.difference},  {"combined_se", r.combined_se},
                {"paired_se", r.paired_se}};
  };

  const GrinbergRecord a =
      grinberg_check(Eigen::Vector3d(2.0, 0.5, 1.0), 1, kSamples, sub_seed(opt, 8, 0), opt.workers);
  checks.add("n=3, k=1, S=diag(2,1/2,1)", a.pass, record(a));

  Eigen::VectorXd d4(4);
  d4 << 2.0, 0.5, 3.0, 1.0 / 3.0;
  const GrinbergRecord b = grinberg_check(d4, 2, kSamples, sub_seed(opt, 8, 1), opt.workers);
  checks.add("n=4, k=2, S=diag(2,1/2,3,1/3)", b.pass, record(b));

  const GrinbergRecord id =
      grinberg_check(Eigen::Vector3d::Ones(), 1, 10000, sub_seed(opt, 8, 2), opt.workers);
  checks.add("S = I gives identical estimates", id.difference == 0.0, record(id));
  return checks.finish(8, "grinberg", opt, start);
}

SuiteResult suite_brascamp_lieb(const SuiteOptions& opt) {
  const auto start = Clock::now();
  constexpr int kRandom = 100;
  Checks checks;

  {
    Rng rng = trial_rng(opt, 9, 100000);
    const BLSystem ortho(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Ones(2));
    const std::vector<BLDensity> fs{random_density(rng, 4, 2.0), random_density(rng, 4, 2.0)};
    const BLCheck r = bl_check(ortho, fs, 1e-10);
    checks.add("orthonormal system: lhs = rhs", std::abs(r.lhs - r.rhs) <= 1e-12 * r.rhs,
               {{"lhs", r.lhs}, {"rhs", r.rhs}});
  }
  {
    const BLCheck r = bl_check(mercedes_system(), std::vector<BLDensity>(3, Gaussian{}), 1e-9);
    checks.add("three directions at 120 degrees, identical Gaussians: lhs = rhs",
               std::abs(r.lhs - r.rhs) <= 1e-6 && r.converged,
               {{"lhs", r.lhs}, {"rhs", r.rhs}, {"lhs_error", r.lhs_error}});
  }

  std::vector<double> ratio(kRandom);
  std::vector<char> ok(kRandom);
  parallel_for(kRandom, opt.workers, [&](std::size_t t) {
    Rng rng = trial_rng(opt, 9, t);
    const int d = 1 + static_cast<int>(t % 2);
    std::uniform_int_distribution<int> pick_m(d + 1, 4);
    const int m = pick_m(rng);
    const BLSystem sys = random_bl_system(rng, d, m);
    std::vector<BLDensity> fs;
    for (int i = 0; i < m; ++i) {
      const StepDensity f = random_density(rng, 4, 2.0);
      fs.push_back(f.shifted(-0.5 * (f.support_lo() + f.support_hi())));
    }
    const BLCheck r = bl_check(sys, fs, 1e-10);
    ratio[t] = r.lhs / r.rhs;
    ok[t] = r.lhs <= r.rhs * (1.0 + 1e-6);
  });
  checks.add("100 random step systems, d <= 2, m <= 4: lhs <= rhs (1 + 1e-6)",
             count_failures(ok) == 0,
             {{"violations", count_failures(ok)},
              {"failing_trials", failing_trials(ok)},
              {"max_ratio", max_of(ratio)}});
  return checks.finish(9, "brascamp-lieb", opt, start);
}

SuiteResult suite_projection_lemma(const SuiteOptions& opt) {
  const auto start = Clock::now();
  constexpr int kTrials = 1000;
  Checks checks;

  std::vector<double> ratio(kTrials);
  std::vector<char> ok(kTrials);
  parallel_for(kTrials, opt.workers, [&](std::size_t t) {
    Rng rng = trial_rng(opt, 10, t);
    std::uniform_int_distribution<int> pick_n(2, 6);
    const int n = pick_n(rng);
    std::uniform_int_distribution<int> pick_k(1, n - 1), pick_i(0, n - 1);
    const int k = pick_k(rng);
    const Eigen::VectorXd b = haar_direction(n, rng);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd g(n, k);
    for (int c = 0; c < k; ++c) {
      for (int r = 0; r < n; ++r) g(r, c) = gauss(rng);
      g.col(c) -= b * b.dot(g.col(c));
    }
    const ProjectionCheck pc = parallelepiped_projection_check(b, g, pick_i(rng));
    ratio[t] = pc.rhs > 0.0 ? pc.lhs / pc.rhs : 0.0;
    ok[t] = pc.lhs <= pc.rhs * (1.0 + 1e-9);
  });
  checks.add("10^3 random parallelepipeds: |b_i||A| <= |P_i A| (1 + 1e-9)",
             count_failures(ok) == 0,
             {{"violations", count_failures(ok)},
              {"failing_trials", failing_trials(ok)},
              {"max_ratio", max_of(ratio)}});
  return checks.finish(10, "projection-lemma", opt, start);
}

SuiteResult suite_small_ball(const SuiteOptions& opt) {
  const auto start = Clock::now();
  constexpr int kConfigs = 100;
  constexpr std::size_t kSamples = 20000;
  Checks checks;

  std::vector<char> ok(kConfigs), vacuous(kConfigs);
  std::vector<double> ratio(kConfigs);
  parallel_for(kConfigs, opt.workers, [&](std::size_t t) {
    Rng rng = trial_rng(opt, 11, t);
    const int n = 2 + static_cast<int>(t % 4);
    const int k = std::min(n - 1, 1 + static_cast<int>((t / 4) % 2));
    const ProductDensity f = random_unit_product(rng, n);
    const Subspace E = haar_sample(n, k, rng);
    Eigen::VectorXd z = E.basis().transpose() * f.support_midpoints();
    for (int j = 0; j < k; ++j) z(j) += 0.2 * (2.0 * uniform01(rng) - 1.0);
    const double eps = std::exp(std::log(0.01) + std::log(20.0) * uniform01(rng));
    const SmallBallRecord r = small_ball(f, E, z, eps, kSamples, sub_seed(opt, 11, t));
    ok[t] = r.pass;
    vacuous[t] = r.vacuous;
    ratio[t] = r.estimate / r.bound;
  });
  std::size_t vac = 0;
  for (char v : vacuous) vac += v;
  checks.add("100 random configurations: estimate <= bound + 3 SE", count_failures(ok) == 0,
             {{"violations", count_failures(ok)},
              {"failing_trials", failing_trials(ok)},
              {"vacuous_bounds", vac},
              {"max_estimate_over_bound", max_of(ratio)}});

  const double eps = 0.2;
  const SmallBallRecord c = small_ball(ProductDensity::cube(3), Subspace::coordinate(3, {0}),
                                       Eigen::VectorXd::Zero(1), eps, 100000,
                                       sub_seed(opt, 11, 1000000), opt.workers);
  checks.add("uniform cube, coordinate E: probability 2 eps within 3 SE",
             std::abs(c.estimate - 2.0 * eps) <= 3.0 * c.std_error && c.pass,
             {{"estimate", c.estimate},
              {"std_error", c.std_error},
              {"expected", 2.0 * eps},
              {"bound", c.bound}});
  return checks.finish(11, "small-ball", opt, start);
}

const std::vector<SuiteEntry>& suite_table() {
  static const std::vector<SuiteEntry> table = {
      {1, "ball-integral", suite_ball_integral},   {2, "cube-sections", suite_cube_sections},
      {3, "sharpness", suite_sharpness},           {4, "main-theorem", suite_main_theorem},
      {5, "box-bounds", suite_box_bounds},         {6, "rogozin", suite_rogozin},
      {7, "average", suite_average},               {8, "grinberg", suite_grinberg},
      {9, "brascamp-lieb", suite_brascamp_lieb},   {10, "projection-lemma", suite_projection_lemma},
      {11, "small-ball", suite_small_ball},
  };
  return table;
}

SuiteResult suite_determinism(const SuiteOptions& opt, unsigned other_workers) {
  const auto start = Clock::now();
  Checks checks;
  for (const SuiteEntry& e : suite_table()) {
    SuiteOptions a = opt, b = opt;
    a.workers = 1;
    b.workers = other_workers;
    const std::string ra = dump_report(strip_timing(e.run(a).report));
    const std::string rb = dump_report(strip_timing(e.run(b).report));
    checks.add(std::string(e.name) + ": workers 1 vs " + std::to_string(other_workers), ra == rb,
               {{"criterion", e.criterion}, {"bytes", ra.size()}});
  }
  return checks.finish(12, "determinism", opt, start);
}

SuiteResult verify_campaign(const VerifyConfig& cfg, const SuiteOptions& opt) {
  const auto start = Clock::now();
  if (cfg.n < 2 || cfg.k < 1 || cfg.k >= cfg.n)
    throw std::invalid_argument("verify needs 1 <= k < n");
  if (cfg.trials < 1) throw std::invalid_argument("verify needs at least one trial");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  for (const auto& f : cfg.densities)
    if (f.dim() != cfg.n)
      throw std::invalid_argument("density file has " + std::to_string(f.dim()) +
                                  " factors, expected " + std::to_string(cfg.n));

  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  std::vector<TheoremRecord> records(trials);
  parallel_for(trials, opt.workers, [&](std::size_t t) {
    Rng rng = substream(opt.seed, t);
    const ProductDensity f =
        cfg.densities.empty() ? random_unit_product(rng, cfg.n) : cfg.densities[t % cfg.densities.size()];
    records[t] = verify_main_theorem(f, haar_sample(cfg.n, cfg.k, rng), cfg.tol);
  });

  json list = json::array(), failures = json::array();
  double max_slack = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    const TheoremRecord& r = records[t];
    const json rec{{"trial", t},
                   {"sup_lower_bound", r.sup_lower_bound},
                   {"bound", r.bound},
                   {"slack", r.slack},
                   {"branch", to_string(r.report.branch)},
                   {"pass", r.pass}};
    list.push_back(rec);
    if (!r.pass) failures.push_back(rec);
    max_slack = std::max(max_slack, r.slack);
  }
  SuiteResult out{0, "verify", failures.empty(), json::object()};
  out.report["params"] = {{"n", cfg.n},
                          {"k", cfg.k},
                          {"tol", cfg.tol},
                          {"density_files", cfg.densities.size()}};
  out.report["seed"] = opt.seed;
  out.report["trials"] = cfg.trials;
  out.report["records"] = std::move(list);
  out.report["failures"] = std::move(failures);
  out.report["max_slack"] = max_slack;
  if (opt.timing)
    out.report["runtime_ms"] =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return out;
}

}  // namespace cubeslice
