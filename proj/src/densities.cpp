#include "cubeslice/densities.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace cubeslice {
namespace {

// Distinct positive values in decreasing order with the measure of the
// corresponding super-level sets {f >= v_j}.
struct Levels {
  std::vector<double> values;
  std::vector<double> measures;
};

Levels levels_of(const StepDensity& f) {
  std::vector<double> vals;
  for (const auto& p : f.pieces()) vals.push_back(p.value);
  std::sort(vals.begin(), vals.end(), std::greater<>());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  Levels lv;
  lv.values = vals;
  double cumulative = 0.0;
  for (double v : vals) {
    for (const auto& p : f.pieces())
      if (p.value == v) cumulative += p.hi - p.lo;
    lv.measures.push_back(cumulative);
  }
  return lv;
}

bool is_symmetric_decreasing(const std::vector<Piece>& ps) {
  const std::size_t m = ps.size();
  if (m == 0) return true;
  if (m % 2 == 0) return false;
  for (std::size_t i = 0; i + 1 < m; ++i)
    if (ps[i].hi != ps[i + 1].lo) return false;
  for (std::size_t i = 0; i < m; ++i) {
    const Piece& mirror = ps[m - 1 - i];
    if (ps[i].lo != -mirror.hi || ps[i].value != mirror.value) return false;
  }
  for (std::size_t i = 0; i < m / 2; ++i)
    if (!(ps[i].value < ps[i + 1].value)) return false;
  return true;
}

}  // namespace

StepDensity::StepDensity(std::vector<Piece> pieces) {
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Piece& p = pieces[i];
    const std::string where = "piece " + std::to_string(i);
    if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || !std::isfinite(p.value))
      throw InvariantError("finite", where + " has a non-finite entry");
    if (!(p.lo < p.hi)) throw InvariantError("lo < hi", where + " has lo >= hi");
    if (p.value < 0.0) throw InvariantError("nonnegative", where + " has a negative value");
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i)
    if (pieces[i].hi > pieces[i + 1].lo)
      throw InvariantError("non-overlapping", "pieces starting at " + std::to_string(pieces[i].lo) +
                                                  " and " + std::to_string(pieces[i + 1].lo) +
                                                  " overlap");
  for (const Piece& p : pieces) {
    if (p.value == 0.0) continue;
    if (!pieces_.empty() && pieces_.back().hi == p.lo && pieces_.back().value == p.value)
      pieces_.back().hi = p.hi;
    else
      pieces_.push_back(p);
  }
}

StepDensity StepDensity::indicator(double lo, double hi, double value) {
  return StepDensity({{lo, hi, value}});
}

double StepDensity::operator()(double x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const Piece& p) { return v < p.lo; });
  if (it == pieces_.begin()) return 0.0;
  --it;
  return x < it->hi ? it->value : 0.0;
}

double StepDensity::support_lo() const {
  if (pieces_.empty()) throw std::domain_error("empty density has no support");
  return pieces_.front().lo;
}

double StepDensity::support_hi() const {
  if (pieces_.empty()) throw std::domain_error("empty density has no support");
  return pieces_.back().hi;
}

bool StepDensity::is_normalized(double tol) const { return std::abs(l1_norm(*this) - 1.0) <= tol; }

void StepDensity::require_normalized(double tol) const {
  if (!is_normalized(tol))
    throw InvariantError("normalized", "integral is " + std::to_string(l1_norm(*this)));
}

StepDensity StepDensity::shifted(double offset) const {
  std::vector<Piece> ps = pieces_;
  for (auto& p : ps) {
    p.lo += offset;
    p.hi += offset;
  }
  return StepDensity(std::move(ps));
}

double l1_norm(const StepDensity& f) {
  double s = 0.0;
  for (const auto& p : f.pieces()) s += (p.hi - p.lo) * p.value;
  return s;
}

double sup_norm(const StepDensity& f) {
  double s = 0.0;
  for (const auto& p : f.pieces()) s = std::max(s, p.value);
  return s;
}

double lp_norm(const StepDensity& f, double p) {
  if (std::isinf(p) && p > 0) return sup_norm(f);
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm needs p >= 1");
  double s = 0.0;
  for (const auto& piece : f.pieces()) s += (piece.hi - piece.lo) * std::pow(piece.value, p);
  return std::pow(s, 1.0 / p);
}

double level_set_measure(const StepDensity& f, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("level_set_measure needs t >= 0");
  double s = 0.0;
  for (const auto& p : f.pieces())
    if (p.value > t) s += p.hi - p.lo;
  return s;
}

StepDensity rearrange(const StepDensity& f) {
  if (is_symmetric_decreasing(f.pieces())) return f;
  const Levels lv = levels_of(f);
  std::vector<Piece> out;
  double inner = 0.0;
  for (std::size_t j = 0; j < lv.values.size(); ++j) {
    const double outer = 0.5 * lv.measures[j];
    if (j == 0) {
      out.push_back({-outer, outer, lv.values[j]});
    } else if (outer > inner) {
      out.push_back({-outer, -inner, lv.values[j]});
      out.push_back({inner, outer, lv.values[j]});
    }
    inner = std::max(inner, outer);
  }
  return StepDensity(std::move(out));
}

double layer_cake_integral(const StepDensity& f) {
  const Levels lv = levels_of(f);
  double s = 0.0;
  for (std::size_t j = 0; j < lv.values.size(); ++j) {
    const double next = j + 1 < lv.values.size() ? lv.values[j + 1] : 0.0;
    s += (lv.values[j] - next) * lv.measures[j];
  }
  return s;
}

StepDensity random_density(Rng& rng, int max_pieces, double bound) {
  if (max_pieces < 1) throw std::invalid_argument("random_density needs max_pieces >= 1");
  if (!(bound > 0.0)) throw std::invalid_argument("random_density needs bound > 0");
  std::uniform_int_distribution<int> count(1, max_pieces);
  const int m = count(rng);
  std::vector<double> values(m), lengths(m), gaps(m, 0.0);
  double mass = 0.0;
  for (int p = 0; p < m; ++p) {
    values[p] = bound * (0.1 + 0.9 * uniform01(rng));
    lengths[p] = 0.2 + uniform01(rng);
    if (p > 0 && uniform01(rng) < 0.5) gaps[p] = 0.5 * uniform01(rng);
    mass += values[p] * lengths[p];
  }
  // Scale lengths (not values) so the sup norm stays below the bound.
  double width = 0.0;
  for (int p = 0; p < m; ++p) {
    lengths[p] /= mass;
    width += lengths[p] + gaps[p];
  }
  double x = -0.5 * width + (2.0 * uniform01(rng) - 1.0);
  std::vector<Piece> pieces;
  for (int p = 0; p < m; ++p) {
    x += gaps[p];
    pieces.push_back({x, x + lengths[p], values[p]});
    x += lengths[p];
  }
  StepDensity f(std::move(pieces));
  f.require_normalized(1e-12);
  return f;
}

StepDensity with_sup_norm(const StepDensity& f, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("with_sup_norm needs c > 0");
  if (f.empty()) return f;
  const double ratio = sup_norm(f) / c;
  std::vector<Piece> ps = f.pieces();
  for (auto& p : ps) {
    p.lo *= ratio;
    p.hi *= ratio;
    p.value /= ratio;
  }
  return StepDensity(std::move(ps));
}

double inverse_cdf(const StepDensity& f, double u) {
  if (f.empty()) throw std::domain_error("inverse_cdf of an empty density");
  double cumulative = 0.0;
  for (const auto& p : f.pieces()) {
    const double mass = (p.hi - p.lo) * p.value;
    if (cumulative + mass > u) return std::min(p.hi, p.lo + (u - cumulative) / p.value);
    cumulative += mass;
  }
  return f.pieces().back().hi;
}

ProductDensity::ProductDensity(std::vector<StepDensity> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw InvariantError("n >= 1", "product density needs a factor");
}

ProductDensity ProductDensity::cube(int n) {
  if (n < 1) throw std::invalid_argument("cube dimension must be >= 1");
  return ProductDensity(std::vector<StepDensity>(static_cast<std::size_t>(n),
                                                 StepDensity::indicator(-0.5, 0.5)));
}

double ProductDensity::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw std::invalid_argument("point has the wrong dimension");
  double v = 1.0;
  for (int i = 0; i < dim() && v != 0.0; ++i) v *= factor(i)(x(i));
  return v;
}

bool ProductDensity::in_unit_class(double tol) const {
  try {
    require_unit_class(tol);
    return true;
  } catch (const InvariantError&) {
    return false;
  }
}

void ProductDensity::require_unit_class(double tol) const {
  for (int i = 0; i < dim(); ++i) {
    const StepDensity& f = factor(i);
    if (!f.is_normalized(tol))
      throw InvariantError("normalized", "factor " + std::to_string(i) + " has integral " +
                                             std::to_string(l1_norm(f)));
    if (sup_norm(f) > 1.0 + tol)
      throw InvariantError("sup <= 1", "factor " + std::to_string(i) + " has sup norm " +
                                           std::to_string(sup_norm(f)));
  }
}

Eigen::VectorXd ProductDensity::sup_norms() const {
  Eigen::VectorXd c(dim());
  for (int i = 0; i < dim(); ++i) c(i) = sup_norm(factor(i));
  return c;
}

Eigen::VectorXd ProductDensity::support_midpoints() const {
  Eigen::VectorXd m(dim());
  for (int i = 0; i < dim(); ++i) m(i) = 0.5 * (factor(i).support_lo() + factor(i).support_hi());
  return m;
}

}  // namespace cubeslice
