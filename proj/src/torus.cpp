#include "conecontact/torus.hpp"

namespace conecontact {

long long integer_det(const Eigen::MatrixXi& m) {
  const int n = static_cast<int>(m.rows());
  if (n != m.cols()) throw std::invalid_argument("integer_det: square matrix required");
  if (n == 1) return m(0, 0);
  long long det = 0;
  Eigen::MatrixXi minor(n - 1, n - 1);
  for (int j = 0; j < n; ++j) {
    for (int r = 1; r < n; ++r) {
      int cc = 0;
      for (int c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = m(r, c);
      }
    }
    long long cof = static_cast<long long>(m(0, j)) * integer_det(minor);
    det += (j % 2 == 0) ? cof : -cof;
  }
  return det;
}

TorusAction::TorusAction(Eigen::MatrixXi linear_, Eigen::VectorXd translation_, int sign_)
    : linear(std::move(linear_)), translation(std::move(translation_)), sign(sign_) {
  if (linear.rows() != linear.cols())
    throw std::invalid_argument("TorusAction: linear part must be square");
  if (translation.size() != linear.rows())
    throw std::invalid_argument("TorusAction: translation dimension mismatch");
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("TorusAction: sign must be +1 or -1");
  long long det = integer_det(linear);
  if (det != 1 && det != -1)
    throw std::invalid_argument("TorusAction: linear part must be unimodular");
}

TorusAction TorusAction::identity(int dim) {
  return TorusAction(Eigen::MatrixXi::Identity(dim, dim), Eigen::VectorXd::Zero(dim), +1);
}

TorusAction TorusAction::translate(const Eigen::VectorXd& tau, int sign) {
  int dim = static_cast<int>(tau.size());
  return TorusAction(Eigen::MatrixXi::Identity(dim, dim), tau, sign);
}

Eigen::VectorXd TorusAction::apply(const Eigen::VectorXd& p) const {
  if (p.size() != translation.size())
    throw std::invalid_argument("TorusAction: point dimension mismatch");
  Eigen::VectorXd q = linear.cast<double>() * p + translation;
  return wrap_point(q);
}

TorusAction TorusAction::compose(const TorusAction& other) const {
  if (dim() != other.dim())
    throw std::invalid_argument("TorusAction: dimension mismatch in compose");
  return TorusAction(linear * other.linear,
                     linear.cast<double>() * other.translation + translation,
                     sign * other.sign);
}

size_t GridSpec::locate(const Eigen::VectorXd& p, double tol) const {
  if (p.size() != dim()) throw std::invalid_argument("GridSpec: point dimension mismatch");
  size_t index = 0;
  size_t stride = 1;
  for (int a = 0; a < dim(); ++a) {
    size_t n = static_cast<size_t>(points_per_axis[static_cast<size_t>(a)]);
    double step = kTwoPi / static_cast<double>(n);
    double x = wrap_angle(p[a]);
    auto k = static_cast<long long>(std::llround(x / step));
    double err = std::abs(x - static_cast<double>(k) * step);
    // nearest grid angle may wrap around 2pi
    err = std::min(err, std::abs(x - kTwoPi));
    if (err > tol)
      throw std::runtime_error("GridSpec: point does not lie on the grid");
    index += stride * static_cast<size_t>(k % static_cast<long long>(n));
    stride *= n;
  }
  return index;
}

}  // namespace conecontact
