// Dense full-tableau simplex with Bland's anti-cycling rule. Deterministic:
// fixed column ordering, smallest-index entering rule, smallest-basis-index
// tie break in the ratio test.
#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace conecontact {

struct SimplexIterationLimit : std::runtime_error {
  explicit SimplexIterationLimit(const std::string& what) : std::runtime_error(what) {}
};

class SimplexTableau {
 public:
  enum class Status { Optimal, Unbounded };

  // A is m x n with b >= 0; basis names one column per row and those columns
  // must form an identity submatrix (a basic feasible start).
  SimplexTableau(Eigen::MatrixXd a, Eigen::VectorXd b, std::vector<int> basis,
                 double pivot_tol = 1e-9);

  // Minimizes cost^T x with Dantzig pricing and a Bland anti-cycling
  // fallback on degenerate streaks. Columns marked in `blocked` never enter
  // the basis. Throws SimplexIterationLimit past max_pivots.
  Status minimize(const Eigen::VectorXd& cost, long max_pivots,
                  const std::vector<bool>* blocked = nullptr);

  // Improving ray at an Unbounded exit: d >= 0 with A d = 0 and cost^T d < 0.
  Eigen::VectorXd unbounded_ray() const;

  Eigen::VectorXd primal() const;
  double objective(const Eigen::VectorXd& cost) const;
  // Simplex multipliers at the current basis: solves B^T pi = c_B against the
  // original columns.
  Eigen::VectorXd dual(const Eigen::VectorXd& cost) const;
  const std::vector<int>& basis() const { return basis_; }

  int rows() const { return static_cast<int>(tab_.rows()); }
  int cols() const { return static_cast<int>(tab_.cols()) - 1; }

 private:
  void pivot(int row, int col);

  Eigen::MatrixXd original_;
  Eigen::MatrixXd tab_;  // m x (n+1), last column is the rhs
  std::vector<int> basis_;
  double pivot_tol_;
  int unbounded_col_ = -1;
};

struct FeasibilityResult {
  bool feasible = false;
  Eigen::VectorXd x;     // x >= 0 with A x = b (within residual), when feasible
  Eigen::VectorXd dual;  // pi with pi^T A <= tol and pi^T b > 0, when infeasible
  double phase1_objective = 0;
};

// Phase-1 simplex for A x = b, x >= 0 (b of any sign; rows are normalized
// internally). Exactly one of the two outcomes is produced.
FeasibilityResult phase1_feasible(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                  long max_pivots, double pivot_tol = 1e-9,
                                  double feas_tol = 1e-9);

// min over mu >= 0 of || g - H mu ||_1, by LP with signed artificial pairs.
double l1_distance_to_cone(const Eigen::MatrixXd& h, const Eigen::VectorXd& g,
                           long max_pivots = -1);

}  // namespace conecontact
