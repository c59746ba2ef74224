#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lambda_infer/discrete_measure.h"
#include "lambda_infer/measure.h"

namespace lambda_infer {

// (-1)^sign lambda_index <= bound.
struct Moment_constraint {
  int index;
  int sign;  // 0 or 1
  double bound;
};

// traces[i] holds samples of lambda_{i+3}.  For each requested index, the pair
// lambda_i <= hi and -lambda_i <= -lo from the central type-7 quantile interval.
auto constraints_from_samples(const std::vector<std::vector<double>>& traces, double level,
                              const std::vector<int>& indices) -> std::vector<Moment_constraint>;

// Left side of a constraint for a measure given by its raw moments.
auto constraint_value(const Moment_constraint& constraint, const Discrete_measure& nu) -> double;
auto satisfies(const std::vector<Moment_constraint>& constraints, const Discrete_measure& nu,
               double tolerance = 1e-9) -> bool;

struct Functional {
  std::string name;
  std::function<double(double)> q;
};

auto exp_decay_functional() -> Functional;                   // e^{-r}
auto indicator_functional(double a, double b) -> Functional;  // 1{a <= r <= b}
auto monomial_functional(int power) -> Functional;            // r^power
// Piecewise-linear interpolation of values on a uniform grid over [0, 1].
auto tabulated_functional(std::vector<double> values) -> Functional;
// exp | indicator:a,b | monomial:j
auto parse_functional(const std::string& spec) -> Functional;

auto evaluate_functional(const Functional& q, const Discrete_measure& nu) -> double;

enum class Extremum_mode { min, max };

struct Extremum {
  double value;
  Discrete_measure witness;
  int refinements = 0;
};

// Optimises E_nu[q] over probability measures on [0, 1] satisfying the
// constraints: a linear program over weights on a uniform grid, then local
// refinement of atom locations until the gain is below 1e-9.
// Throws Infeasible_error when no measure satisfies the constraints.
auto extremize(const Functional& q, const std::vector<Moment_constraint>& constraints,
               Extremum_mode mode, int grid_size) -> Extremum;

// True iff the lower quantile of the lambda_3 trace is <= cutoff (default eta).
auto kingman_test(const std::vector<double>& lambda3_trace, double level,
                  double cutoff = k_default_eta) -> bool;

}  // namespace lambda_infer
