// Pointwise exterior algebra over R^m: bivectors, grade-k multivectors,
// antisymmetric 2-form matrices, Pfaffians, and the Schubert sweep.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace conecontact {

// Strictly increasing multi-index encoded as a bitmask over coordinates.
using IndexMask = std::uint8_t;

inline int mask_grade(IndexMask m) { return __builtin_popcount(m); }

// Sign of inserting dx^j in front of dx^I (j not in I): (-1)^#{i in I : i < j}.
inline int insertion_sign(int j, IndexMask mask) {
  int below = __builtin_popcount(mask & ((1u << j) - 1u));
  return (below % 2 == 0) ? 1 : -1;
}

// Shuffle sign of dx^I wedge dx^J for disjoint masks.
int shuffle_sign(IndexMask a, IndexMask b);

std::vector<int> mask_to_indices(IndexMask m);
IndexMask indices_to_mask(const std::vector<int>& idx);
std::vector<IndexMask> all_masks_of_grade(int dim, int grade);

// Element of Lambda^2 R^m with entries b_ij for i < j.
class Bivector {
 public:
  explicit Bivector(int dim);

  int dim() const { return dim_; }
  double& at(int i, int j);
  double at(int i, int j) const;  // signed lookup, works for i > j too
  double norm() const;
  bool is_zero(double tol = 1e-14) const;

  Bivector operator*(double s) const;
  Bivector operator+(const Bivector& o) const;
  Bivector operator-(const Bivector& o) const;

  // Coefficients in the fixed i<j order, for LP columns and serialization.
  const std::vector<double>& packed() const { return entries_; }
  std::vector<double>& packed() { return entries_; }
  static int packed_size(int dim) { return dim * (dim - 1) / 2; }
  static int packed_index(int dim, int i, int j);

  // Pushforward along a linear map: L(u) ^ L(v) extended bilinearly.
  Bivector pushforward(const Eigen::MatrixXd& L) const;

 private:
  int dim_;
  std::vector<double> entries_;
};

Bivector wedge_vectors(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// Grade-k multivector, sparse over sorted multi-indices.
class KVector {
 public:
  KVector(int dim, int grade);
  static KVector from_bivector(const Bivector& b);
  static KVector from_vectors(const std::vector<Eigen::VectorXd>& vs);
  static KVector basis_element(int dim, IndexMask mask);  // e_I
  static KVector top(int dim);                            // e_1 ^ ... ^ e_m

  int dim() const { return dim_; }
  int grade() const { return grade_; }
  double component(IndexMask mask) const;
  void add(IndexMask mask, double value);
  const std::map<IndexMask, double>& components() const { return comps_; }

 private:
  int dim_;
  int grade_;
  std::map<IndexMask, double> comps_;
};

// Antisymmetric matrix of a 2-form: Omega(i, j) = omega(e_i, e_j).
class TwoFormMatrix {
 public:
  explicit TwoFormMatrix(const Eigen::MatrixXd& m, double tol = 1e-12);
  static TwoFormMatrix from_bivector_pairing(const Bivector&) = delete;

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Eigen::MatrixXd& matrix() const { return mat_; }
  double operator()(int i, int j) const { return mat_(i, j); }

 private:
  Eigen::MatrixXd mat_;
};

// Pfaffian by Parlett-Reid tridiagonalization with pivoting.
// Pf of the standard block form diag([[0,1],[-1,0]], ...) is +1.
double pfaffian(const TwoFormMatrix& omega);

struct SchubertWitness {
  double angle = 0;                 // v = cos(angle) u1 + sin(angle) u2
  Eigen::VectorXd w;                // second leg of the decomposable bivector
  std::vector<double> weights;      // nonnegative, sum 1, over generators
};

// Sweeps v(angle) over [0, pi) on a uniform grid and, per angle, solves the
// feasibility problem  v ^ w = sum_i lambda_i g_i,  lambda >= 0, sum = 1,
// accepting only nonzero combinations. Returns the first witness found.
// An empty result is resolution-limited, not a proof of emptiness.
std::optional<SchubertWitness> schubert_intersects(
    const std::vector<Bivector>& generators,
    const Eigen::VectorXd& tau1, const Eigen::VectorXd& tau2,
    int resolution = 360);

}  // namespace conecontact
