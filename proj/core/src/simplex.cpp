#include "lambda_infer/simplex.h"

#include <cmath>
#include <limits>
#include <vector>

#include "lambda_infer/errors.h"

namespace lambda_infer {

namespace {

constexpr double k_pivot_eps = 1e-12;

class Tableau {
 public:
  Tableau(Eigen::MatrixXd t, std::vector<int> basis) : t_{std::move(t)}, basis_{std::move(basis)} {}

  auto rows() const -> int { return static_cast<int>(t_.rows()) - 1; }
  auto cols() const -> int { return static_cast<int>(t_.cols()) - 1; }
  auto rhs(int r) const -> double { return t_(r, cols()); }
  auto basis() const -> const std::vector<int>& { return basis_; }
  auto matrix() -> Eigen::MatrixXd& { return t_; }

  // Sets the objective row to reduced costs of `cost` (length cols()).
  auto price(const Eigen::VectorXd& cost) -> void {
    auto m = rows();
    t_.row(m).setZero();
    t_.row(m).head(cols()) = cost.transpose();
    for (int r = 0; r < m; ++r) {
      auto cb = cost(basis_[r]);
      if (cb != 0.0) t_.row(m) -= cb * t_.row(r);
    }
  }

  // Runs primal simplex over columns with allowed[j]; returns false at the limit.
  auto optimise(const std::vector<bool>& allowed, double tolerance) -> bool {
    auto m = rows();
    auto n = cols();
    auto limit = 50 * (m + n) + 1000;
    auto stall = 0;
    auto last_objective = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < limit; ++iter) {
      auto bland = stall > 50;
      auto entering = -1;
      auto best = -tolerance;
      for (int j = 0; j < n; ++j) {
        if (!allowed[j]) continue;
        auto d = t_(m, j);
        if (d < best) {
          entering = j;
          if (bland) break;
          best = d;
        }
      }
      if (entering < 0) return true;
      auto leaving = -1;
      auto best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m; ++r) {
        auto a = t_(r, entering);
        if (a <= k_pivot_eps) continue;
        auto ratio = rhs(r) / a;
        if (ratio < best_ratio - 1e-15 ||
            (leaving >= 0 && std::abs(ratio - best_ratio) <= 1e-15 &&
             basis_[r] < basis_[leaving])) {
          best_ratio = ratio;
          leaving = r;
        }
      }
      if (leaving < 0) throw Numerical_error{"linear program is unbounded", 0.0};
      pivot(leaving, entering);
      auto objective = -t_(m, n);
      stall = (objective < last_objective - 1e-14) ? 0 : stall + 1;
      last_objective = objective;
    }
    return false;
  }

  auto pivot(int r, int c) -> void {
    t_.row(r) /= t_(r, c);
    for (int i = 0; i < t_.rows(); ++i) {
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    }
    basis_[r] = c;
  }

 private:
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
};

}  // namespace

auto solve_lp(const Lp_problem& problem, double tolerance) -> Lp_result {
  auto n = static_cast<int>(problem.c.size());
  auto m_ub = static_cast<int>(problem.a_ub.rows());
  auto m_eq = static_cast<int>(problem.a_eq.rows());
  if ((m_ub > 0 && problem.a_ub.cols() != n) || (m_eq > 0 && problem.a_eq.cols() != n) ||
      problem.b_ub.size() != m_ub || problem.b_eq.size() != m_eq) {
    throw Domain_error{"linear program dimensions do not match"};
  }
  auto m = m_ub + m_eq;
  // Columns: x (n), slacks (m_ub), artificials (m).
  auto slack0 = n;
  auto art0 = n + m_ub;
  auto cols = n + m_ub + m;
  auto t = Eigen::MatrixXd::Zero(m + 1, cols + 1).eval();
  auto basis = std::vector<int>(m);
  for (int r = 0; r < m; ++r) {
    auto is_ub = r < m_ub;
    auto row = is_ub ? problem.a_ub.row(r).eval() : problem.a_eq.row(r - m_ub).eval();
    auto b = is_ub ? problem.b_ub(r) : problem.b_eq(r - m_ub);
    auto sign = b < 0.0 ? -1.0 : 1.0;
    t.row(r).head(n) = sign * row;
    if (is_ub) t(r, slack0 + r) = sign;
    t(r, art0 + r) = 1.0;
    t(r, cols) = sign * b;
    basis[r] = art0 + r;
  }
  auto tableau = Tableau{std::move(t), std::move(basis)};

  auto result = Lp_result{};
  auto allowed = std::vector<bool>(cols, true);
  auto phase1 = Eigen::VectorXd::Zero(cols).eval();
  phase1.tail(m).setOnes();
  tableau.price(phase1);
  if (!tableau.optimise(allowed, tolerance)) {
    result.status = Lp_status::iteration_limit;
    return result;
  }
  auto residual = 0.0;
  for (int r = 0; r < m; ++r) {
    if (tableau.basis()[r] >= art0) residual += std::abs(tableau.rhs(r));
  }
  result.infeasibility = residual;
  auto scale = 1.0 + problem.b_ub.cwiseAbs().sum() + problem.b_eq.cwiseAbs().sum();
  if (residual > tolerance * scale) {
    result.status = Lp_status::infeasible;
    return result;
  }
  // Drive remaining (zero-level) artificials out of the basis where possible.
  for (int r = 0; r < m; ++r) {
    if (tableau.basis()[r] < art0) continue;
    for (int j = 0; j < art0; ++j) {
      if (std::abs(tableau.matrix()(r, j)) > 1e-9) {
        tableau.pivot(r, j);
        break;
      }
    }
  }
  for (int j = art0; j < cols; ++j) allowed[j] = false;
  auto cost = Eigen::VectorXd::Zero(cols).eval();
  cost.head(n) = problem.c;
  tableau.price(cost);
  if (!tableau.optimise(allowed, tolerance)) {
    result.status = Lp_status::iteration_limit;
    return result;
  }
  result.x = Eigen::VectorXd::Zero(n);
  for (int r = 0; r < m; ++r) {
    auto b = tableau.basis()[r];
    if (b < n) result.x(b) = std::max(0.0, tableau.rhs(r));
  }
  result.objective = problem.c.dot(result.x);
  result.status = Lp_status::optimal;
  return result;
}

}  // namespace lambda_infer
