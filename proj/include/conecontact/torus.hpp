// Flat-torus models T^m = (R/2piZ)^m, affine torus self-maps, and sample grids.
#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace conecontact {

inline constexpr int kMaxDim = 6;
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Frequency vector in Z^m, padded with zeros above the model dimension.
using Freq = std::array<int, kMaxDim>;

inline Freq zero_freq() { return Freq{}; }

inline int freq_sup_norm(const Freq& f) {
  int n = 0;
  for (int v : f) n = std::max(n, std::abs(v));
  return n;
}

inline Freq negate(const Freq& f) {
  Freq g{};
  for (int i = 0; i < kMaxDim; ++i) g[i] = -f[i];
  return g;
}

// Canonical representative of the {f, -f} pair: f itself when its first
// nonzero entry is positive (or f = 0).
inline bool freq_is_canonical(const Freq& f) {
  for (int v : f) {
    if (v > 0) return true;
    if (v < 0) return false;
  }
  return true;
}

struct TorusModel {
  int dim = 1;
  int band = 0;
  std::optional<int> t_axis;

  TorusModel() = default;
  TorusModel(int dim_, int band_, std::optional<int> t_axis_ = std::nullopt)
      : dim(dim_), band(band_), t_axis(t_axis_) {
    if (dim < 1 || dim > kMaxDim)
      throw std::invalid_argument("TorusModel: dim must be in [1, 6]");
    if (band < 0) throw std::invalid_argument("TorusModel: band must be >= 0");
    if (t_axis && (*t_axis < 0 || *t_axis >= dim))
      throw std::invalid_argument("TorusModel: t_axis out of range");
  }

  bool same_space(const TorusModel& o) const {
    return dim == o.dim && t_axis == o.t_axis;
  }
  bool operator==(const TorusModel& o) const {
    return dim == o.dim && band == o.band && t_axis == o.t_axis;
  }

  // S^1 x (this torus): prepends the circle coordinate at index 0.
  TorusModel extended_with_circle() const {
    if (t_axis) throw std::invalid_argument("TorusModel: already has a circle factor");
    return TorusModel(dim + 1, band, 0);
  }
  // Drops the circle factor (t_axis must be 0 by convention).
  TorusModel base_model() const {
    if (!t_axis || *t_axis != 0)
      throw std::invalid_argument("TorusModel: no leading circle factor to drop");
    return TorusModel(dim - 1, band, std::nullopt);
  }
};

inline double wrap_angle(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0) y += kTwoPi;
  // fmod can return exactly 2pi after the correction branch
  if (y >= kTwoPi) y -= kTwoPi;
  return y;
}

inline Eigen::VectorXd wrap_point(const Eigen::VectorXd& p) {
  Eigen::VectorXd q(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) q[i] = wrap_angle(p[i]);
  return q;
}

// Affine self-map x -> Lx + tau of the torus, with an attached sign for
// skew-invariant structures (sign -1 realizes the eta action).
struct TorusAction {
  Eigen::MatrixXi linear;
  Eigen::VectorXd translation;
  int sign = +1;

  TorusAction() = default;
  TorusAction(Eigen::MatrixXi linear_, Eigen::VectorXd translation_, int sign_ = +1);

  int dim() const { return static_cast<int>(linear.rows()); }
  static TorusAction identity(int dim);
  static TorusAction translate(const Eigen::VectorXd& tau, int sign = +1);

  Eigen::VectorXd apply(const Eigen::VectorXd& p) const;
  // this followed by... composition (this âˆ˜ other)(x) = this(other(x)).
  TorusAction compose(const TorusAction& other) const;
};

// Exact integer determinant for m <= 6.
long long integer_det(const Eigen::MatrixXi& m);

// Uniform sample grid: points_per_axis[i] equally spaced angles on axis i.
struct GridSpec {
  std::vector<int> points_per_axis;

  GridSpec() = default;
  explicit GridSpec(std::vector<int> ppa) : points_per_axis(std::move(ppa)) {
    for (int n : points_per_axis)
      if (n < 1) throw std::invalid_argument("GridSpec: axis count must be >= 1");
  }
  static GridSpec uniform(int dim, int n) {
    return GridSpec(std::vector<int>(static_cast<size_t>(dim), n));
  }

  int dim() const { return static_cast<int>(points_per_axis.size()); }
  size_t size() const {
    size_t s = 1;
    for (int n : points_per_axis) s *= static_cast<size_t>(n);
    return s;
  }
  Eigen::VectorXd point(size_t index) const {
    Eigen::VectorXd p(dim());
    for (int a = 0; a < dim(); ++a) {
      size_t n = static_cast<size_t>(points_per_axis[static_cast<size_t>(a)]);
      p[a] = kTwoPi * static_cast<double>(index % n) / static_cast<double>(n);
      index /= n;
    }
    return p;
  }
  // Index of the grid point nearest to p; throws if p is farther than tol
  // from every grid point (grid not closed under the requested motion).
  size_t locate(const Eigen::VectorXd& p, double tol = 1e-9) const;
};

// Deterministic splitmix64-based generator; identical streams on every
// platform, unlike the standard <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Standard normal via Box-Muller.
  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }
  Eigen::VectorXd unit_vector(int dim) {
    Eigen::VectorXd v(dim);
    do {
      for (int i = 0; i < dim; ++i) v[i] = gaussian();
    } while (v.norm() < 1e-6);
    return v / v.norm();
  }
  Eigen::VectorXd point_on_torus(int dim) {
    Eigen::VectorXd p(dim);
    for (int i = 0; i < dim; ++i) p[i] = uniform(0.0, kTwoPi);
    return p;
  }

 private:
  std::uint64_t state_;
};

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

}  // namespace conecontact
