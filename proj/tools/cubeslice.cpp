#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "cubeslice/average.hpp"
#include "cubeslice/bounds.hpp"
#include "cubeslice/grassmann.hpp"
#include "cubeslice/io.hpp"
#include "cubeslice/marginals.hpp"
#include "cubeslice/sections.hpp"
#include "cubeslice/suites.hpp"

namespace fs = std::filesystem;
using namespace cubeslice;

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kIo = 3 };

using Clock = std::chrono::steady_clock;

struct Common {
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  bool no_timing = false;
  std::string out;
};

void add_common(CLI::App* app, Common& c, bool with_out = true) {
  app->add_option("--workers", c.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
  app->add_flag("--no-timing", c.no_timing, "Omit runtime_ms from reports");
  if (with_out) app->add_option("--out", c.out, "Write the JSON report here");
}

Eigen::VectorXd parse_list(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v))
      throw std::invalid_argument(std::string(flag) + ": cannot parse '" + item + "'");
    values.push_back(v);
  }
  if (values.empty()) throw std::invalid_argument(std::string(flag) + " is empty");
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

json stamp(json report, const char* command) {
  report["command"] = command;
  report["version"] = kVersion;
  report["schema"] = kReportSchema;
  return report;
}

// Prints or writes the report, then returns the exit code for `pass`.
int finish(const json& report, const Common& c, bool pass, const std::string& summary) {
  const std::string text = dump_report(report);
  if (c.out.empty()) {
    std::cout << text;
  } else {
    write_atomic(c.out, text);
  }
  std::cerr << summary << '\n';
  return pass ? kOk : kFailed;
}

ProductDensity load_product(const std::string& path) { return product_from_json(read_json_file(path)); }

std::string fixed(double v) { return format_double(v); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Marginal densities of product measures: evaluators and verification campaigns"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // verify
  Common verify_c;
  VerifyConfig vcfg;
  std::uint64_t verify_seed = 42;
  std::string densities_dir;
  auto* verify = app.add_subcommand("verify", "Main theorem campaign on Haar subspaces");
  verify->add_option("--n", vcfg.n)->check(CLI::Range(2, 12));
  verify->add_option("--k", vcfg.k)->check(CLI::Range(1, 11));
  verify->add_option("--trials", vcfg.trials)->check(CLI::PositiveNumber);
  verify->add_option("--seed", verify_seed);
  verify->add_option("--tol", vcfg.tol)->check(CLI::PositiveNumber);
  verify->add_option("--densities-dir", densities_dir, "Directory of product density JSON files");
  add_common(verify, verify_c);

  // rogozin
  Common rog_c;
  int rog_n = 3, rog_trials = 200;
  std::uint64_t rog_seed = 42;
  double rog_tol = 1e-4;
  std::string rog_theta, rog_density;
  auto* rogozin = app.add_subcommand("rogozin", "Marginal sup on lines against cube sections");
  rogozin->add_option("--n", rog_n)->check(CLI::Range(2, 12));
  rogozin->add_option("--trials", rog_trials)->check(CLI::PositiveNumber);
  rogozin->add_option("--seed", rog_seed);
  rogozin->add_option("--tol", rog_tol)->check(CLI::PositiveNumber);
  rogozin->add_option("--theta", rog_theta, "Single direction, comma separated");
  rogozin->add_option("--density", rog_density, "Product density file (default: random per trial)");
  add_common(rogozin, rog_c);

  // sections
  Common sec_c;
  std::string sec_mode = "exact", sec_sides, sec_normal, sec_subspace;
  double sec_tol = 1e-8;
  std::size_t sec_samples = 100000;
  std::uint64_t sec_seed = 42;
  auto* sections = app.add_subcommand("sections", "Central section of a box");
  sections->add_option("--mode", sec_mode)->check(CLI::IsMember({"sinc", "exact", "quad", "mc"}));
  sections->add_option("--sides", sec_sides, "Side lengths, comma separated")->required();
  sections->add_option("--normal", sec_normal, "Hyperplane normal, comma separated");
  sections->add_option("--subspace", sec_subspace, "Section subspace file (quad, mc)");
  sections->add_option("--tol", sec_tol)->check(CLI::PositiveNumber);
  sections->add_option("--samples", sec_samples)->check(CLI::Range(std::size_t{100}, std::size_t{1} << 40));
  sections->add_option("--seed", sec_seed);
  add_common(sections, sec_c);

  // ball-integral
  Common ball_c;
  double p_min = 2.0, p_max = 100.0, ball_tol = 1e-9;
  int ball_steps = 50;
  std::string ball_csv, ball_spacing = "linear";
  auto* ball = app.add_subcommand("ball-integral", "Curve of the sinc power integral against sqrt(2/p)");
  ball->add_option("--p-min", p_min)->check(CLI::Range(2.0, 1e6));
  ball->add_option("--p-max", p_max)->check(CLI::Range(2.0, 1e6));
  ball->add_option("--steps", ball_steps)->check(CLI::Range(1, 100000));
  ball->add_option("--tol", ball_tol)->check(CLI::PositiveNumber);
  ball->add_option("--spacing", ball_spacing)->check(CLI::IsMember({"linear", "log"}));
  ball->add_option("--csv", ball_csv, "CSV path (default: stdout)");
  add_common(ball, ball_c, false);

  // bl-check
  Common bl_c;
  std::string bl_system = "mercedes";
  int bl_d = 2, bl_m = 3, bl_pieces = 4;
  bool bl_gaussian = false;
  double bl_tol = 1e-9;
  std::uint64_t bl_seed = 42;
  auto* bl = app.add_subcommand("bl-check", "Normalized Brascamp-Lieb inequality on one system");
  bl->add_option("--system", bl_system)->check(CLI::IsMember({"mercedes", "orthonormal", "random"}));
  bl->add_option("--d", bl_d)->check(CLI::Range(1, 3));
  bl->add_option("--m", bl_m)->check(CLI::Range(1, 8));
  bl->add_option("--pieces", bl_pieces, "Maximum pieces per random step density")->check(CLI::Range(1, 16));
  bl->add_flag("--gaussian", bl_gaussian, "Use identical standard Gaussians");
  bl->add_option("--tol", bl_tol)->check(CLI::PositiveNumber);
  bl->add_option("--seed", bl_seed);
  add_common(bl, bl_c);

  // average
  Common avg_c;
  int avg_n = 2, avg_k = 1;
  std::size_t avg_samples = 100000;
  std::uint64_t avg_seed = 7;
  double avg_tol = 1e-10;
  std::string avg_density;
  auto* average = app.add_subcommand("average", "Grassmann average of marginal powers against the cube");
  average->add_option("--n", avg_n)->check(CLI::Range(2, 12));
  average->add_option("--k", avg_k)->check(CLI::Range(1, 11));
  average->add_option("--samples", avg_samples)->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
  average->add_option("--seed", avg_seed);
  average->add_option("--tol", avg_tol)->check(CLI::PositiveNumber);
  average->add_option("--density", avg_density, "Product density file (default: cube)");
  add_common(average, avg_c);

  // grinberg
  Common grin_c;
  int grin_n = 3, grin_k = 1;
  std::string grin_diag = "2,0.5,1";
  std::size_t grin_samples = 100000;
  std::uint64_t grin_seed = 7;
  auto* grinberg = app.add_subcommand("grinberg", "Quermassintegral of Q_n and S Q_n");
  grinberg->add_option("--n", grin_n)->check(CLI::Range(2, 12));
  grinberg->add_option("--k", grin_k)->check(CLI::Range(1, 11));
  grinberg->add_option("--diag", grin_diag);
  grinberg->add_option("--samples", grin_samples)->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
  grinberg->add_option("--seed", grin_seed);
  add_common(grinberg, grin_c);

  // small-ball
  Common sb_c;
  int sb_n = 3, sb_k = 1;
  std::string sb_eps = "0.2", sb_density, sb_subspace, sb_z, sb_csv;
  std::size_t sb_samples = 100000;
  std::uint64_t sb_seed = 42;
  auto* small = app.add_subcommand("small-ball", "Small-ball probability of a projected product");
  small->add_option("--n", sb_n)->check(CLI::Range(1, 12));
  small->add_option("--k", sb_k)->check(CLI::Range(1, 12));
  small->add_option("--eps", sb_eps, "Radius or comma-separated radii");
  small->add_option("--density", sb_density, "Product density file (default: cube)");
  small->add_option("--subspace", sb_subspace, "Subspace file (default: first k coordinates)");
  small->add_option("--z", sb_z, "Center in E coordinates (default: 0)");
  small->add_option("--samples", sb_samples)->check(CLI::Range(std::size_t{1000}, std::size_t{1} << 40));
  small->add_option("--seed", sb_seed);
  small->add_option("--csv", sb_csv, "Write (eps, probability, bound) rows here");
  add_common(small, sb_c);

  // search-max
  Common sm_c;
  int sm_n = 4, sm_k = 2, sm_restarts = 16, sm_steps = 400;
  std::uint64_t sm_seed = 42;
  auto* search = app.add_subcommand("search-max", "Local search for the largest cube section |Q_n ∩ E^perp|");
  search->add_option("--n", sm_n)->check(CLI::Range(2, 12));
  search->add_option("--k", sm_k)->check(CLI::Range(1, 11));
  search->add_option("--restarts", sm_restarts)->check(CLI::Range(1, 100000));
  search->add_option("--steps", sm_steps)->check(CLI::Range(1, 10000000));
  search->add_option("--seed", sm_seed);
  add_common(search, sm_c);

  // densities-validate
  std::vector<std::string> validate_files;
  auto* validate = app.add_subcommand("densities-validate", "Check density files against the invariants");
  validate->add_option("files", validate_files)->required();

  // acceptance
  Common acc_c;
  std::uint64_t acc_seed = 42;
  std::vector<int> acc_criteria;
  std::string acc_dir;
  unsigned acc_other = 8;
  auto* acceptance = app.add_subcommand("acceptance", "Run the verification suites");
  acceptance->add_option("--seed", acc_seed);
  acceptance->add_option("--criteria", acc_criteria, "Criterion numbers 1-12 (default: all)")
      ->check(CLI::Range(1, 12))
      ->delimiter(',');
  acceptance->add_option("--report-dir", acc_dir, "Write one JSON report per criterion here");
  acceptance->add_option("--other-workers", acc_other, "Worker count compared against 1")
      ->check(CLI::Range(2u, 1024u));
  add_common(acceptance, acc_c, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*verify) {
      if (vcfg.k >= vcfg.n) throw std::invalid_argument("--k must be smaller than --n");
      if (!densities_dir.empty()) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(densities_dir))
          if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty()) throw IoError("no .json files in " + densities_dir);
        for (const auto& p : files) vcfg.densities.push_back(load_product(p.string()));
      }
      SuiteOptions opt{verify_seed, verify_c.workers, !verify_c.no_timing};
      const SuiteResult r = verify_campaign(vcfg, opt);
      return finish(stamp(r.report, "verify"), verify_c, r.pass,
                    "verify: " + std::to_string(vcfg.trials) + " trials, " +
                        std::to_string(r.report["failures"].size()) + " failures, max slack " +
                        fixed(r.report["max_slack"].get<double>()));
    }

    if (*rogozin) {
      const auto start = Clock::now();
      const bool fixed_f = !rog_density.empty();
      const ProductDensity given = fixed_f ? load_product(rog_density) : ProductDensity::cube(rog_n);
      const int n = fixed_f ? given.dim() : rog_n;
      json records = json::array(), failures = json::array();
      int trials = rog_theta.empty() ? rog_trials : 1;
      std::vector<RogozinRecord> out(static_cast<std::size_t>(trials));
      std::vector<Eigen::VectorXd> thetas(out.size());
      parallel_for(out.size(), rog_c.workers, [&](std::size_t t) {
        Rng rng = substream(rog_seed, t);
        const ProductDensity f = fixed_f || !rog_theta.empty() ? given : random_unit_product(rng, n);
        thetas[t] = rog_theta.empty() ? haar_sample(n, 1, rng).basis().col(0).eval()
                                      : parse_list(rog_theta, "--theta");
        out[t] = rogozin_check(f, thetas[t], rog_tol);
      });
      for (std::size_t t = 0; t < out.size(); ++t) {
        json rec{{"trial", t},
                 {"theta", std::vector<double>(thetas[t].data(), thetas[t].data() + thetas[t].size())},
                 {"sup_lb", out[t].sup_lb},
                 {"cube_section", out[t].cube_section},
                 {"pass", out[t].pass}};
        if (!out[t].pass) failures.push_back(rec);
        records.push_back(std::move(rec));
      }
      json report{{"params", {{"n", n}, {"tol", rog_tol}, {"density", rog_density}}},
                  {"seed", rog_seed},
                  {"trials", trials},
                  {"records", records},
                  {"failures", failures}};
      if (!rog_c.no_timing) report["runtime_ms"] = elapsed_ms(start);
      return finish(stamp(report, "rogozin"), rog_c, failures.empty(),
                    "rogozin: " + std::to_string(trials) + " checks, " +
                        std::to_string(failures.size()) + " failures");
    }

    if (*sections) {
      const auto start = Clock::now();
      const Box box(parse_list(sec_sides, "--sides"));
      const int n = box.dim();
      Subspace H = Subspace::coordinate(n, {0});
      Eigen::VectorXd normal;
      if (!sec_subspace.empty()) {
        H = subspace_from_json(read_json_file(sec_subspace));
        if (H.ambient_dim() != n) throw std::invalid_argument("--subspace has the wrong ambient dimension");
      } else {
        if (sec_normal.empty()) throw std::invalid_argument("--normal or --subspace is required");
        normal = parse_list(sec_normal, "--normal");
        if (normal.size() != n) throw std::invalid_argument("--normal and --sides differ in length");
        if (!(normal.norm() > 0.0)) throw std::invalid_argument("--normal must be nonzero");
        normal.normalize();
        Eigen::MatrixXd nm(n, 1);
        nm.col(0) = normal;
        H = orthonormal_complement(Subspace(nm));
      }
      double value = 0.0, err = 0.0;
      bool converged = true;
      if (sec_mode == "sinc" || sec_mode == "exact") {
        if (normal.size() == 0) {
          if (H.dim() != n - 1) throw std::invalid_argument("sinc and exact modes need a hyperplane");
          normal = orthonormal_complement(H).basis().col(0);
        }
        if (sec_mode == "sinc") {
          const SectionResult s = hyperplane_section_sinc(box, normal, sec_tol);
          value = s.value;
          err = s.error;
          converged = s.converged;
        } else {
          value = hyperplane_section(box, normal);
        }
      } else if (sec_mode == "quad") {
        const SectionResult s = section_quadrature(box, H, sec_tol);
        value = s.value;
        err = s.error;
      } else {
        const McEstimate s = section_mc(box, H, sec_samples, sec_seed, sec_c.workers);
        value = s.estimate;
        err = s.std_error;
      }
      json report{{"mode", sec_mode}, {"value", value}, {"error_bound_or_se", err}, {"converged", converged}};
      if (sec_mode == "mc") {
        report["seed"] = sec_seed;
        report["samples"] = sec_samples;
      }
      if (!sec_c.no_timing) report["runtime_ms"] = elapsed_ms(start);
      return finish(stamp(report, "sections"), sec_c, converged,
                    "sections (" + sec_mode + "): " + fixed(value));
    }

    if (*ball) {
      if (p_max < p_min) throw std::invalid_argument("--p-max must be at least --p-min");
      if (ball_steps == 1 && p_max != p_min)
        throw std::invalid_argument("--steps 1 needs --p-min equal to --p-max");
      std::vector<double> ps(static_cast<std::size_t>(ball_steps));
      for (int j = 0; j < ball_steps; ++j) {
        const double t = ball_steps == 1 ? 0.0 : static_cast<double>(j) / (ball_steps - 1);
        ps[j] = ball_spacing == "log" ? std::exp(std::log(p_min) + t * (std::log(p_max) - std::log(p_min)))
                                      : p_min + t * (p_max - p_min);
      }
      ps.front() = p_min;
      ps.back() = p_max;
      std::vector<std::vector<double>> rows(ps.size());
      std::vector<char> converged(ps.size());
      parallel_for(ps.size(), ball_c.workers, [&](std::size_t j) {
        const BallIntegral b = ball_integral(ps[j], ball_tol);
        const double bound = std::sqrt(2.0 / ps[j]);
        rows[j] = {ps[j], b.value, bound, bound - b.value};
        converged[j] = b.converged;
      });
      const std::string csv = format_csv({"p", "I", "sqrt(2/p)", "margin"}, rows);
      if (ball_csv.empty()) {
        std::cout << csv;
      } else {
        write_atomic(ball_csv, csv);
      }
      bool ok = true;
      for (std::size_t j = 0; j < rows.size(); ++j) ok = ok && converged[j] && rows[j][3] >= -ball_tol;
      std::cerr << "ball-integral: " << rows.size() << " points, "
                << (ok ? "all below sqrt(2/p)" : "bound violated or unconverged") << '\n';
      return ok ? kOk : kFailed;
    }

    if (*bl) {
      const auto start = Clock::now();
      Rng rng = substream(bl_seed, 0);
      BLSystem sys = mercedes_system();
      if (bl_system == "orthonormal") {
        sys = BLSystem(Eigen::MatrixXd::Identity(bl_d, bl_d), Eigen::VectorXd::Ones(bl_d));
      } else if (bl_system == "random") {
        if (bl_m < bl_d) throw std::invalid_argument("--m must be at least --d");
        sys = random_bl_system(rng, bl_d, bl_m);
      }
      std::vector<BLDensity> fs;
      for (int i = 0; i < sys.size(); ++i) {
        if (bl_gaussian) {
          fs.emplace_back(Gaussian{});
        } else {
          const StepDensity f = random_density(rng, bl_pieces, 2.0);
          fs.emplace_back(f.shifted(-0.5 * (f.support_lo() + f.support_hi())));
        }
      }
      const BLCheck r = bl_check(sys, fs, bl_tol);
      const bool pass = r.converged && r.lhs <= r.rhs * (1.0 + 1e-6);
      json report{{"system", bl_system},
                  {"d", sys.dim()},
                  {"m", sys.size()},
                  {"seed", bl_seed},
                  {"gaussian", bl_gaussian},
                  {"lhs", r.lhs},
                  {"rhs", r.rhs},
                  {"lhs_error", r.lhs_error},
                  {"converged", r.converged},
                  {"pass", pass}};
      if (!bl_c.no_timing) report["runtime_ms"] = elapsed_ms(start);
      return finish(stamp(report, "bl-check"), bl_c, pass,
                    "bl-check: lhs " + fixed(r.lhs) + ", rhs " + fixed(r.rhs));
    }

    if (*average) {
      const auto start = Clock::now();
      const ProductDensity f = avg_density.empty() ? ProductDensity::cube(avg_n) : load_product(avg_density);
      if (avg_k >= f.dim()) throw std::invalid_argument("--k must be smaller than the dimension");
      const PropAvgRecord r = prop_avg_check(f, avg_k, avg_samples, avg_tol, avg_seed, avg_c.workers);
      json report{{"params", {{"n", f.dim()}, {"k", avg_k}, {"samples", avg_samples}, {"density", avg_density}}},
                  {"seed", avg_seed},
                  {"estimates", {{"lhs", r.lhs.estimate}, {"rhs", r.rhs.estimate}, {"paired_mean", r.paired_mean}}},
                  {"std_errors", {{"lhs", r.lhs.std_error}, {"rhs", r.rhs.std_error}, {"paired", r.paired_se}, {"combined", r.combined_se}}},
                  {"pass", r.pass}};
      if (!avg_c.no_timing) report["runtime_ms"] = elapsed_ms(start);
      return finish(stamp(report, "average"), avg_c, r.pass,
                    "average: lhs " + fixed(r.lhs.estimate) + ", rhs " + fixed(r.rhs.estimate));
    }

    if (*grinberg) {
      const auto start = Clock::now();
      const Eigen::VectorXd diag = parse_list(grin_diag, "--diag");
      if (diag.size() != grin_n) throw std::invalid_argument("--diag must have n entries");
      if (grin_k >= grin_n) throw std::invalid_argument("--k must be smaller than --n");
      const GrinbergRecord r = grinberg_check(diag, grin_k, grin_samples, grin_seed, grin_c.workers);
      json report{{"params", {{"n", grin_n}, {"k", grin_k}, {"samples", grin_samples}, {"diag", grin_diag}}},
                  {"seed", grin_seed},
                  {"estimates", {{"phi_K", r.phi_K.estimate}, {"phi_SK", r.phi_SK.estimate}, {"difference", r.difference}}},
                  {"std_errors", {{"phi_K", r.phi_K.std_error}, {"phi_SK", r.phi_SK.std_error}, {"combined", r.combined_se}, {"paired", r.paired_se}}},
                  {"pass", r.pass}};
      if (!grin_c.no_timing) report["runtime_ms"] = elapsed_ms(start);
      return finish(stamp(report, "grinberg"), grin_c, r.pass,
                    "grinberg: difference " + fixed(r.difference) + ", combined SE " + fixed(r.combined_se));
    }

    if (*small) {
      const auto start = Clock::now();
      const ProductDensity f = sb_density.empty() ? ProductDensity::cube(sb_n) : load_product(sb_density);
      const int n = f.dim();
      Subspace E = Subspace::coordinate(n, {0});
      if (!sb_subspace.empty()) {
        E = subspace_from_json(read_json_file(sb_subspace));
      } else {
        if (sb_k > n) throw std::invalid_argument("--k exceeds the dimension");
        E = Subspace(Eigen::MatrixXd::Identity(n, sb_k));
      }
      if (E.ambient_dim() != n) throw std::invalid_argument("subspace and density dimensions differ");
      const Eigen::VectorXd z = sb_z.empty() ? Eigen::VectorXd::Zero(E.dim()) : parse_list(sb_z, "--z");
      if (z.size() != E.dim()) throw std::invalid_argument("--z must have k entries");
      const Eigen::VectorXd eps = parse_list(sb_eps, "--eps");
      json records = json::array();
      std::vector<std::vector<double>> rows;
      bool pass = true;
      for (Eigen::Index i = 0; i < eps.size(); ++i) {
        const SmallBallRecord r = small_ball(f, E, z, eps(i), sb_samples,
                                             mix64(sb_seed ^ static_cast<std::uint64_t>(i)), sb_c.workers);
        pass = pass && r.pass;
        records.push_back({{"eps", eps(i)},
                           {"estimate", r.estimate},
                           {"std_error", r.std_error},
                           {"bound", r.bound},
                           {"vacuous", r.vacuous},
                           {"pass", r.pass}});
        rows.push_back({eps(i), r.estimate, r.bound});
      }
      if (!sb_csv.empty()) emit_curve({"eps", "probability", "bound"}, rows, sb_csv);
      json report{{"params", {{"n", n}, {"k", E.dim()}, {"samples", sb_samples}, {"density", sb_density}}},
                  {"seed", sb_seed},
                  {"records", records},
                  {"pass", pass}};
      if (!sb_c.no_timing) report["runtime_ms"] = elapsed_ms(start);
      return finish(stamp(report, "small-ball"), sb_c, pass,
                    "small-ball: " + std::to_string(eps.size()) + " radii, " + (pass ? "all below the bound" : "bound exceeded"));
    }

    if (*search) {
      const auto start = Clock::now();
      if (sm_k >= sm_n) throw std::invalid_argument("--k must be smaller than --n");
      if (sm_n - sm_k > 3) throw std::invalid_argument("search-max needs n - k <= 3");
      const ProductDensity cube = ProductDensity::cube(sm_n);
      const auto objective = [&](const Subspace& E) {
        return MarginalEvaluator(cube, E)(Eigen::VectorXd::Zero(sm_k));
      };
      const SearchResult r = grassmann_search_max(objective, sm_n, sm_k, sm_restarts, sm_steps, sm_seed, sm_c.workers);
      const double bound = min_constant(sm_n, sm_k);
      const bool pass = r.value <= bound * (1.0 + 1e-9);
      json report{{"params", {{"n", sm_n}, {"k", sm_k}, {"restarts", sm_restarts}, {"steps", sm_steps}}},
                  {"seed", sm_seed},
                  {"best_value", r.value},
                  {"best_restart", r.restart},
                  {"best_subspace", to_json(r.best)},
                  {"bound", bound},
                  {"pass", pass}};
      if (!sm_c.no_timing) report["runtime_ms"] = elapsed_ms(start);
      return finish(stamp(report, "search-max"), sm_c, pass,
                    "search-max: best " + fixed(r.value) + ", bound " + fixed(bound));
    }

    if (*validate) {
      bool ok = true;
      for (const auto& path : validate_files) {
        try {
          const ProductDensity f = load_product(path);
          std::cout << path << ": ok (" << f.dim() << " factor" << (f.dim() == 1 ? "" : "s") << ")\n";
        } catch (const InvariantError& e) {
          ok = false;
          std::cout << path << ": invalid [" << e.invariant() << "] " << e.what() << '\n';
        }
      }
      return ok ? kOk : kFailed;
    }

    if (*acceptance) {
      std::vector<int> wanted = acc_criteria;
      if (wanted.empty())
        for (int c = 1; c <= 12; ++c) wanted.push_back(c);
      const SuiteOptions opt{acc_seed, acc_c.workers, !acc_c.no_timing};
      bool all = true;
      for (int c : wanted) {
        const auto start = Clock::now();
        SuiteResult r = c == 12 ? suite_determinism(opt, acc_other) : suite_table()[static_cast<std::size_t>(c - 1)].run(opt);
        all = all && r.pass;
        std::printf("criterion %2d %-18s %s  (%.1f s)\n", c, r.name.c_str(), r.pass ? "PASS" : "FAIL",
                    elapsed_ms(start) / 1000.0);
        std::fflush(stdout);
        if (!acc_dir.empty()) {
          fs::create_directories(acc_dir);
          write_atomic(fs::path(acc_dir) / ("criterion_" + std::to_string(c) + ".json"),
                       dump_report(stamp(r.report, "acceptance")));
        }
      }
      return all ? kOk : kFailed;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
