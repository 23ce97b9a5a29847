#include "cubeslice/slabs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace cubeslice {
namespace {

using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXd;

class Interval1 {
 public:
  Interval1(const VectorXd& half, double /*eps*/) : lo_(-half(0)), hi_(half(0)) {}

  std::pair<double, double> range(const VectorXd& w) const {
    const double a = w(0) * lo_, b = w(0) * hi_;
    return {std::min(a, b), std::max(a, b)};
  }
  void clip(const VectorXd& w, double c) {
    if (w(0) > 0.0) {
      hi_ = std::min(hi_, c / w(0));
    } else if (w(0) < 0.0) {
      lo_ = std::max(lo_, c / w(0));
    } else if (c < 0.0) {
      hi_ = lo_;
    }
  }
  bool empty() const { return !(hi_ > lo_); }
  double volume() const { return empty() ? 0.0 : hi_ - lo_; }

 private:
  double lo_, hi_;
};

class Polygon2 {
 public:
  Polygon2(const VectorXd& half, double eps) : eps_(eps) {
    const double x = half(0), y = half(1);
    pts_ = {{-x, -y}, {x, -y}, {x, y}, {-x, y}};
  }

  std::pair<double, double> range(const VectorXd& w) const {
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (const auto& p : pts_) {
      const double v = w(0) * p(0) + w(1) * p(1);
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    return {mn, mx};
  }

  void clip(const VectorXd& w, double c) {
    const Vector2d n(w(0), w(1));
    const double tol = eps_ * n.norm();
    double dmin = std::numeric_limits<double>::infinity(), dmax = -dmin;
    for (const auto& p : pts_) {
      const double d = n.dot(p) - c;
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
    }
    if (dmax <= tol) return;
    if (dmin >= -tol) {
      pts_.clear();
      return;
    }
    std::vector<Vector2d> out;
    out.reserve(pts_.size() + 2);
    const std::size_t m = pts_.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Vector2d& cur = pts_[i];
      const Vector2d& nxt = pts_[(i + 1) % m];
      const double dc = n.dot(cur) - c, dn = n.dot(nxt) - c;
      if (dc <= 0.0) out.push_back(cur);
      if ((dc <= 0.0) != (dn <= 0.0)) {
        const double t = dc / (dc - dn);
        out.push_back(cur + t * (nxt - cur));
      }
    }
    pts_ = std::move(out);
    if (pts_.size() < 3) pts_.clear();
  }

  bool empty() const { return pts_.size() < 3; }

  double volume() const {
    if (empty()) return 0.0;
    double twice = 0.0;
    const std::size_t m = pts_.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Vector2d& p = pts_[i];
      const Vector2d& q = pts_[(i + 1) % m];
      twice += p(0) * q(1) - p(1) * q(0);
    }
    return 0.5 * std::abs(twice);
  }

 private:
  std::vector<Vector2d> pts_;
  double eps_;
};

// Convex polyhedron as a list of convex faces, each a cyclically ordered
// vertex loop. Orientation is not tracked: volume uses unsigned tetrahedra
// from an interior reference point.
class Polyhedron3 {
 public:
  Polyhedron3(const VectorXd& half, double eps) : eps_(eps) {
    const double x = half(0), y = half(1), z = half(2);
    const Vector3d v[8] = {{-x, -y, -z}, {x, -y, -z}, {x, y, -z}, {-x, y, -z},
                           {-x, -y, z},  {x, -y, z},  {x, y, z},  {-x, y, z}};
    faces_ = {{v[0], v[1], v[2], v[3]}, {v[4], v[5], v[6], v[7]}, {v[0], v[1], v[5], v[4]},
              {v[2], v[3], v[7], v[6]}, {v[1], v[2], v[6], v[5]}, {v[0], v[3], v[7], v[4]}};
  }

  std::pair<double, double> range(const VectorXd& w) const {
    const Vector3d n(w(0), w(1), w(2));
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (const auto& f : faces_)
      for (const auto& p : f) {
        const double v = n.dot(p);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
    return {mn, mx};
  }

  void clip(const VectorXd& w, double c) {
    const Vector3d n(w(0), w(1), w(2));
    const double nn = n.norm();
    if (nn == 0.0) {
      if (c < 0.0) faces_.clear();
      return;
    }
    const double tol = eps_ * nn;
    // A plane that only touches the body (up to tol) leaves it unchanged;
    // clipping would duplicate the face lying on it.
    double dmin = std::numeric_limits<double>::infinity(), dmax = -dmin;
    for (const auto& f : faces_)
      for (const auto& p : f) {
        const double d = n.dot(p) - c;
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
      }
    if (dmax <= tol) return;
    if (dmin >= -tol) {
      faces_.clear();
      return;
    }
    std::vector<std::vector<Vector3d>> out;
    out.reserve(faces_.size() + 1);
    std::vector<Vector3d> cap;
    for (const auto& face : faces_) {
      std::vector<Vector3d> poly;
      poly.reserve(face.size() + 2);
      const std::size_t m = face.size();
      for (std::size_t i = 0; i < m; ++i) {
        const Vector3d& cur = face[i];
        const Vector3d& nxt = face[(i + 1) % m];
        const double dc = n.dot(cur) - c, dn = n.dot(nxt) - c;
        if (dc <= 0.0) {
          poly.push_back(cur);
          if (dc >= -tol) cap.push_back(cur);
        }
        if ((dc <= 0.0) != (dn <= 0.0)) {
          const double t = dc / (dc - dn);
          const Vector3d p = cur + t * (nxt - cur);
          poly.push_back(p);
          cap.push_back(p);
        }
      }
      if (poly.size() >= 3) out.push_back(std::move(poly));
    }
    if (out.empty()) {
      faces_.clear();
      return;
    }
    if (cap.size() >= 3) {
      Vector3d centroid = Vector3d::Zero();
      for (const auto& p : cap) centroid += p;
      centroid /= static_cast<double>(cap.size());
      const Vector3d unit = n / nn;
      Vector3d e1 = unit.unitOrthogonal();
      Vector3d e2 = unit.cross(e1);
      std::vector<std::pair<double, Vector3d>> ordered;
      ordered.reserve(cap.size());
      for (const auto& p : cap) {
        const Vector3d d = p - centroid;
        ordered.emplace_back(std::atan2(d.dot(e2), d.dot(e1)), p);
      }
      std::sort(ordered.begin(), ordered.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::vector<Vector3d> loop;
      for (const auto& [angle, p] : ordered) {
        if (loop.empty() || (p - loop.back()).norm() > eps_) loop.push_back(p);
      }
      while (loop.size() > 1 && (loop.front() - loop.back()).norm() <= eps_) loop.pop_back();
      if (loop.size() >= 3) out.push_back(std::move(loop));
    }
    faces_ = std::move(out);
    if (faces_.size() < 4) faces_.clear();
  }

  bool empty() const { return faces_.empty(); }

  double volume() const {
    if (empty()) return 0.0;
    Vector3d ref = Vector3d::Zero();
    std::size_t count = 0;
    for (const auto& f : faces_)
      for (const auto& p : f) {
        ref += p;
        ++count;
      }
    ref /= static_cast<double>(count);
    double six_vol = 0.0;
    for (const auto& f : faces_) {
      const Vector3d a = f[0] - ref;
      for (std::size_t j = 1; j + 1 < f.size(); ++j) {
        six_vol += std::abs(a.dot((f[j] - ref).cross(f[j + 1] - ref)));
      }
    }
    return six_vol / 6.0;
  }

 private:
  std::vector<std::vector<Vector3d>> faces_;
  double eps_;
};

template <class Region>
void accumulate(std::span<const SlabFactor> factors, std::size_t level, const Region& region,
                double weight, double& total) {
  if (level == factors.size()) {
    total += weight * region.volume();
    return;
  }
  const SlabFactor& f = factors[level];
  const auto [mn, mx] = region.range(f.w);
  for (const SlabPiece& p : f.pieces) {
    if (p.weight == 0.0 || p.hi <= mn || p.lo >= mx) continue;
    Region child = region;
    if (p.lo > mn) child.clip(-f.w, -p.lo);
    if (p.hi < mx && !child.empty()) child.clip(f.w, p.hi);
    if (child.empty()) continue;
    accumulate(factors, level + 1, child, weight * p.weight, total);
  }
}

template <class Region>
double run(std::span<const SlabFactor> factors, const VectorXd& half) {
  const double eps = 1e-12 * half.maxCoeff();
  Region start(half, eps);
  double total = 0.0;
  accumulate(factors, 0, start, 1.0, total);
  return total;
}

double dispatch(std::span<const SlabFactor> factors, const VectorXd& half, int dim) {
  switch (dim) {
    case 1: return run<Interval1>(factors, half);
    case 2: return run<Polygon2>(factors, half);
    case 3: return run<Polyhedron3>(factors, half);
    default: throw std::invalid_argument("slab integration supports dimensions 1 to 3");
  }
}

}  // namespace

double integrate_slab_product(std::span<const SlabFactor> factors, int dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("slab integration supports dimensions 1 to 3");
  if (factors.empty()) throw std::invalid_argument("slab integration needs at least one factor");

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& f : factors) {
    if (f.w.size() != dim) throw std::invalid_argument("slab direction has wrong dimension");
    if (f.pieces.empty()) return 0.0;
    gram += f.w * f.w.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const double top = eig.eigenvalues().maxCoeff();
  if (!(top > 0.0) || eig.eigenvalues().minCoeff() <= 1e-14 * top)
    throw std::invalid_argument("slab directions do not span the integration space");
  const Eigen::MatrixXd gram_inv = eig.operatorInverseSqrt() * eig.operatorInverseSqrt();

  // Every y in the support satisfies y = G^{-1} sum_f w_f <w_f, y> with
  // |<w_f, y>| bounded by the pieces of f.
  VectorXd half = VectorXd::Zero(dim);
  for (const auto& f : factors) {
    double reach = 0.0;
    for (const auto& p : f.pieces) reach = std::max({reach, std::abs(p.lo), std::abs(p.hi)});
    half += (gram_inv * f.w).cwiseAbs() * reach;
  }
  if (!(half.minCoeff() > 0.0)) return 0.0;
  half = half * (1.0 + 1e-9) + VectorXd::Constant(dim, 1e-300);

  std::vector<std::size_t> order(factors.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return factors[a].pieces.size() < factors[b].pieces.size();
  });
  std::vector<SlabFactor> sorted;
  sorted.reserve(factors.size());
  for (std::size_t i : order) sorted.push_back(factors[i]);
  return dispatch(sorted, half, dim);
}

double clipped_polytope_volume(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                               const Eigen::VectorXd& half_width) {
  const int dim = static_cast<int>(A.cols());
  if (b.size() != A.rows() || half_width.size() != dim)
    throw std::invalid_argument("polytope constraint sizes do not match");
  auto clip_all = [&](auto region) {
    for (Eigen::Index r = 0; r < A.rows() && !region.empty(); ++r)
      region.clip(A.row(r).transpose(), b(r));
    return region.volume();
  };
  const double eps = 1e-12 * half_width.maxCoeff();
  switch (dim) {
    case 1: return clip_all(Interval1(half_width, eps));
    case 2: return clip_all(Polygon2(half_width, eps));
    case 3: return clip_all(Polyhedron3(half_width, eps));
    default: throw std::invalid_argument("polytope volume supports dimensions 1 to 3");
  }
}

}  // namespace cubeslice
