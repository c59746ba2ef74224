#pragma once

#include <Eigen/Dense>

namespace lambda_infer {

// minimise c.x  subject to  a_ub x <= b_ub,  a_eq x = b_eq,  x >= 0.
struct Lp_problem {
  Eigen::VectorXd c;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
};

enum class Lp_status { optimal, infeasible, iteration_limit };

struct Lp_result {
  Lp_status status = Lp_status::infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  double infeasibility = 0.0;  // phase-one residual
};

// Dense two-phase primal simplex (Dantzig pricing, Bland's rule after stalls).
auto solve_lp(const Lp_problem& problem, double tolerance = 1e-9) -> Lp_result;

}  // namespace lambda_infer
