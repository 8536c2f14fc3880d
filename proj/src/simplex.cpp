#include "conecontact/simplex.hpp"

#include <cmath>

namespace conecontact {

SimplexTableau::SimplexTableau(Eigen::MatrixXd a, Eigen::VectorXd b, std::vector<int> basis,
                               double pivot_tol)
    : original_(std::move(a)), basis_(std::move(basis)), pivot_tol_(pivot_tol) {
  const int m = static_cast<int>(original_.rows());
  const int n = static_cast<int>(original_.cols());
  if (b.size() != m) throw std::invalid_argument("SimplexTableau: rhs size mismatch");
  if (static_cast<int>(basis_.size()) != m)
    throw std::invalid_argument("SimplexTableau: basis size mismatch");
  if (m > 0 && b.minCoeff() < 0)
    throw std::invalid_argument("SimplexTableau: rhs must be nonnegative");
  for (int i = 0; i < m; ++i) {
    for (int r = 0; r < m; ++r) {
      double expect = (r == i) ? 1.0 : 0.0;
      if (std::abs(original_(r, basis_[static_cast<size_t>(i)]) - expect) > 1e-12)
        throw std::invalid_argument("SimplexTableau: basis columns are not an identity");
    }
  }
  tab_.resize(m, n + 1);
  tab_.leftCols(n) = original_;
  tab_.col(n) = b;
}

void SimplexTableau::pivot(int row, int col) {
  tab_.row(row) /= tab_(row, col);
  for (int r = 0; r < rows(); ++r) {
    if (r == row) continue;
    double factor = tab_(r, col);
    if (factor != 0.0) tab_.row(r) -= factor * tab_.row(row);
  }
  basis_[static_cast<size_t>(row)] = col;
}

SimplexTableau::Status SimplexTableau::minimize(const Eigen::VectorXd& cost, long max_pivots,
                                                const std::vector<bool>* blocked) {
  const int m = rows();
  const int n = cols();
  if (cost.size() != n) throw std::invalid_argument("SimplexTableau: cost size mismatch");
  unbounded_col_ = -1;
  long pivots = 0;
  // Dantzig pricing while progress is made; after a run of degenerate pivots
  // switch to Bland's rule, which cannot cycle, until the objective moves.
  constexpr int kBlandAfter = 25;
  int degenerate_streak = 0;
  for (;;) {
    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i) cb[i] = cost[basis_[static_cast<size_t>(i)]];
    const bool bland = degenerate_streak >= kBlandAfter;
    int enter = -1;
    double best_rj = -pivot_tol_;
    for (int j = 0; j < n; ++j) {
      if (blocked && (*blocked)[static_cast<size_t>(j)]) continue;
      double rj = cost[j] - cb.dot(tab_.col(j));
      if (rj < best_rj) {
        enter = j;
        if (bland) break;
        best_rj = rj;
      }
    }
    if (enter < 0) return Status::Optimal;

    int leave = -1;
    double best_ratio = 0;
    for (int i = 0; i < m; ++i) {
      double aij = tab_(i, enter);
      if (aij <= pivot_tol_) continue;
      double ratio = tab_(i, n) / aij;
      if (leave < 0 || ratio < best_ratio - 1e-15 ||
          (std::abs(ratio - best_ratio) <= 1e-15 &&
           basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(leave)])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave < 0) {
      unbounded_col_ = enter;
      return Status::Unbounded;
    }
    if (best_ratio <= 1e-15) {
      ++degenerate_streak;
    } else {
      degenerate_streak = 0;
    }
    pivot(leave, enter);
    if (++pivots > max_pivots)
      throw SimplexIterationLimit("simplex iteration limit exceeded (" +
                                  std::to_string(max_pivots) + " pivots)");
  }
}

Eigen::VectorXd SimplexTableau::primal() const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(cols());
  for (int i = 0; i < rows(); ++i) x[basis_[static_cast<size_t>(i)]] = tab_(i, cols());
  return x;
}

Eigen::VectorXd SimplexTableau::unbounded_ray() const {
  if (unbounded_col_ < 0)
    throw std::logic_error("SimplexTableau: no unbounded direction recorded");
  Eigen::VectorXd d = Eigen::VectorXd::Zero(cols());
  d[unbounded_col_] = 1.0;
  for (int i = 0; i < rows(); ++i)
    d[basis_[static_cast<size_t>(i)]] = std::max(0.0, -tab_(i, unbounded_col_));
  return d;
}

double SimplexTableau::objective(const Eigen::VectorXd& cost) const {
  return cost.dot(primal());
}

Eigen::VectorXd SimplexTableau::dual(const Eigen::VectorXd& cost) const {
  const int m = rows();
  Eigen::MatrixXd bmat(m, m);
  Eigen::VectorXd cb(m);
  for (int i = 0; i < m; ++i) {
    bmat.col(i) = original_.col(basis_[static_cast<size_t>(i)]);
    cb[i] = cost[basis_[static_cast<size_t>(i)]];
  }
  return bmat.transpose().colPivHouseholderQr().solve(cb);
}

FeasibilityResult phase1_feasible(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                  long max_pivots, double pivot_tol, double feas_tol) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (b.size() != m) throw std::invalid_argument("phase1_feasible: rhs size mismatch");

  // normalize row signs so the rhs is nonnegative, then append artificials
  Eigen::VectorXd signs(m);
  Eigen::MatrixXd ext(m, n + m);
  Eigen::VectorXd rhs(m);
  for (int i = 0; i < m; ++i) {
    signs[i] = (b[i] < 0) ? -1.0 : 1.0;
    ext.row(i).head(n) = signs[i] * a.row(i);
    rhs[i] = signs[i] * b[i];
  }
  ext.rightCols(m) = Eigen::MatrixXd::Identity(m, m);

  std::vector<int> basis(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) basis[static_cast<size_t>(i)] = n + i;

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(n + m);
  cost.tail(m).setOnes();

  SimplexTableau tab(ext, rhs, basis, pivot_tol);
  if (tab.minimize(cost, max_pivots) == SimplexTableau::Status::Unbounded)
    throw std::runtime_error("phase1_feasible: phase-1 objective cannot be unbounded");

  FeasibilityResult res;
  res.phase1_objective = tab.objective(cost);
  if (res.phase1_objective <= feas_tol) {
    res.feasible = true;
    Eigen::VectorXd full = tab.primal();
    res.x = full.head(n).cwiseMax(0.0);
  } else {
    res.feasible = false;
    Eigen::VectorXd pi = tab.dual(cost);
    // undo the row sign normalization
    res.dual = signs.asDiagonal() * pi;
  }
  return res;
}

double l1_distance_to_cone(const Eigen::MatrixXd& h, const Eigen::VectorXd& g,
                           long max_pivots) {
  const int m = static_cast<int>(h.rows());
  const int n = static_cast<int>(h.cols());
  if (g.size() != m) throw std::invalid_argument("l1_distance_to_cone: size mismatch");
  if (max_pivots < 0) max_pivots = 10L * (m + n + 2 * m) + 100;

  // variables: mu (n), residual split a+ (m), a- (m); rows H mu + a+ - a- = g
  Eigen::MatrixXd ext(m, n + 2 * m);
  ext.leftCols(n) = h;
  ext.middleCols(n, m) = Eigen::MatrixXd::Identity(m, m);
  ext.rightCols(m) = -Eigen::MatrixXd::Identity(m, m);

  // make rhs nonnegative by flipping rows; the a+/a- pair absorbs the flip
  Eigen::VectorXd rhs(m);
  std::vector<int> basis(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    if (g[i] < 0) {
      ext.row(i) = -ext.row(i);
      rhs[i] = -g[i];
      basis[static_cast<size_t>(i)] = n + m + i;  // a- column, now +1 in this row
    } else {
      rhs[i] = g[i];
      basis[static_cast<size_t>(i)] = n + i;
    }
  }

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(n + 2 * m);
  cost.tail(2 * m).setOnes();

  SimplexTableau tab(ext, rhs, basis);
  if (tab.minimize(cost, max_pivots) == SimplexTableau::Status::Unbounded)
    throw std::runtime_error("l1_distance_to_cone: objective cannot be unbounded");
  return tab.objective(cost);
}

}  // namespace conecontact
