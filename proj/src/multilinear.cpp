#include "conecontact/multilinear.hpp"

#include <cmath>
#include <stdexcept>

namespace conecontact {

int shuffle_sign(IndexMask a, IndexMask b) {
  if (a & b) throw std::invalid_argument("shuffle_sign: masks not disjoint");
  // count inversions: pairs (i in a, j in b) with i > j
  int inv = 0;
  for (int j = 0; j < 8; ++j) {
    if (!(b & (1u << j))) continue;
    inv += __builtin_popcount(a & ~((1u << (j + 1)) - 1u));
  }
  return (inv % 2 == 0) ? 1 : -1;
}

std::vector<int> mask_to_indices(IndexMask m) {
  std::vector<int> idx;
  for (int i = 0; i < 8; ++i)
    if (m & (1u << i)) idx.push_back(i);
  return idx;
}

IndexMask indices_to_mask(const std::vector<int>& idx) {
  IndexMask m = 0;
  for (int i : idx) {
    IndexMask bit = static_cast<IndexMask>(1u << i);
    if (m & bit) throw std::invalid_argument("indices_to_mask: repeated index");
    m |= bit;
  }
  return m;
}

std::vector<IndexMask> all_masks_of_grade(int dim, int grade) {
  std::vector<IndexMask> out;
  for (IndexMask m = 0; m < (1u << dim); ++m)
    if (mask_grade(m) == grade) out.push_back(m);
  return out;
}

Bivector::Bivector(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("Bivector: dim must be >= 1");
  entries_.assign(static_cast<size_t>(packed_size(dim)), 0.0);
}

int Bivector::packed_index(int dim, int i, int j) {
  if (i < 0 || j < 0 || i >= dim || j >= dim || i >= j)
    throw std::invalid_argument("Bivector: bad index pair");
  // row-major over pairs (i, j), i < j
  return i * dim - i * (i + 1) / 2 + (j - i - 1);
}

double& Bivector::at(int i, int j) {
  return entries_[static_cast<size_t>(packed_index(dim_, i, j))];
}

double Bivector::at(int i, int j) const {
  if (i == j) return 0.0;
  if (i < j) return entries_[static_cast<size_t>(packed_index(dim_, i, j))];
  return -entries_[static_cast<size_t>(packed_index(dim_, j, i))];
}

double Bivector::norm() const {
  double s = 0;
  for (double v : entries_) s += v * v;
  return std::sqrt(s);
}

bool Bivector::is_zero(double tol) const {
  for (double v : entries_)
    if (std::abs(v) > tol) return false;
  return true;
}

Bivector Bivector::operator*(double s) const {
  Bivector r(*this);
  for (double& v : r.entries_) v *= s;
  return r;
}

Bivector Bivector::operator+(const Bivector& o) const {
  if (dim_ != o.dim_) throw std::invalid_argument("Bivector: dim mismatch");
  Bivector r(*this);
  for (size_t k = 0; k < entries_.size(); ++k) r.entries_[k] += o.entries_[k];
  return r;
}

Bivector Bivector::operator-(const Bivector& o) const {
  return *this + o * -1.0;
}

Bivector Bivector::pushforward(const Eigen::MatrixXd& L) const {
  if (L.rows() != dim_ || L.cols() != dim_)
    throw std::invalid_argument("Bivector: pushforward dimension mismatch");
  Bivector r(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j) {
      double s = 0;
      for (int a = 0; a < dim_; ++a)
        for (int b = a + 1; b < dim_; ++b)
          s += at(a, b) * (L(i, a) * L(j, b) - L(i, b) * L(j, a));
      r.at(i, j) = s;
    }
  return r;
}

Bivector wedge_vectors(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size())
    throw std::invalid_argument("wedge_vectors: dimension mismatch");
  Bivector b(static_cast<int>(u.size()));
  for (int i = 0; i < b.dim(); ++i)
    for (int j = i + 1; j < b.dim(); ++j) b.at(i, j) = u[i] * v[j] - u[j] * v[i];
  return b;
}

KVector::KVector(int dim, int grade) : dim_(dim), grade_(grade) {
  if (dim < 1 || grade < 0 || grade > dim)
    throw std::invalid_argument("KVector: bad dim/grade");
}

KVector KVector::from_bivector(const Bivector& b) {
  KVector k(b.dim(), 2);
  for (int i = 0; i < b.dim(); ++i)
    for (int j = i + 1; j < b.dim(); ++j) {
      double v = b.at(i, j);
      if (v != 0.0) k.add(static_cast<IndexMask>((1u << i) | (1u << j)), v);
    }
  return k;
}

KVector KVector::from_vectors(const std::vector<Eigen::VectorXd>& vs) {
  if (vs.empty()) throw std::invalid_argument("KVector: empty vector list");
  int dim = static_cast<int>(vs[0].size());
  int grade = static_cast<int>(vs.size());
  KVector k(dim, grade);
  for (IndexMask mask : all_masks_of_grade(dim, grade)) {
    auto rows = mask_to_indices(mask);
    Eigen::MatrixXd minor(grade, grade);
    for (int r = 0; r < grade; ++r)
      for (int c = 0; c < grade; ++c) minor(r, c) = vs[static_cast<size_t>(c)][rows[static_cast<size_t>(r)]];
    double det = minor.determinant();
    if (det != 0.0) k.add(mask, det);
  }
  return k;
}

KVector KVector::basis_element(int dim, IndexMask mask) {
  KVector k(dim, mask_grade(mask));
  k.add(mask, 1.0);
  return k;
}

KVector KVector::top(int dim) {
  return basis_element(dim, static_cast<IndexMask>((1u << dim) - 1u));
}

double KVector::component(IndexMask mask) const {
  auto it = comps_.find(mask);
  return it == comps_.end() ? 0.0 : it->second;
}

void KVector::add(IndexMask mask, double value) {
  if (mask_grade(mask) != grade_)
    throw std::invalid_argument("KVector: component grade mismatch");
  comps_[mask] += value;
}

TwoFormMatrix::TwoFormMatrix(const Eigen::MatrixXd& m, double tol) : mat_(m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("TwoFormMatrix: square matrix required");
  if ((m + m.transpose()).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("TwoFormMatrix: matrix not antisymmetric");
  // store the exactly antisymmetric part
  mat_ = 0.5 * (m - m.transpose().eval());
}

double pfaffian(const TwoFormMatrix& omega) {
  const int n = omega.dim();
  if (n % 2 != 0) throw std::invalid_argument("pfaffian: odd dimension");
  if (n == 0) return 1.0;
  Eigen::MatrixXd a = omega.matrix();
  double result = 1.0;
  for (int k = 0; k + 1 < n; k += 2) {
    // pivot: largest |a(i, k)| among i > k
    int kp = k + 1;
    for (int i = k + 2; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(kp, k))) kp = i;
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      result = -result;
    }
    double piv = a(k, k + 1);
    if (piv == 0.0) return 0.0;
    result *= piv;
    if (k + 2 < n) {
      Eigen::VectorXd tau = a.block(k, k + 2, 1, n - k - 2).transpose() / piv;
      for (int i = k + 2; i < n; ++i)
        for (int j = k + 2; j < n; ++j)
          a(i, j) += tau[i - k - 2] * a(j, k + 1) - tau[j - k - 2] * a(i, k + 1);
    }
  }
  return result;
}

}  // namespace conecontact
