#include "lambda_infer/bounds.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "lambda_infer/errors.h"
#include "lambda_infer/mcmc.h"
#include "lambda_infer/simplex.h"

namespace lambda_infer {

namespace {

constexpr double k_constraint_tolerance = 1e-9;
constexpr double k_refinement_gain = 1e-9;
constexpr int k_refinement_points = 8;
constexpr int k_max_refinements = 40;

struct Grid_solution {
  double value;
  std::vector<double> x;
  std::vector<double> w;
};

auto solve_on_points(const Functional& q, const std::vector<Moment_constraint>& constraints,
                     Extremum_mode mode, const std::vector<double>& points) -> Grid_solution {
  auto g = static_cast<int>(points.size());
  auto m = static_cast<int>(constraints.size());
  auto lp = Lp_problem{};
  lp.c.resize(g);
  lp.a_ub.resize(m, g);
  lp.b_ub.resize(m);
  lp.a_eq = Eigen::MatrixXd::Ones(1, g);
  lp.b_eq = Eigen::VectorXd::Ones(1);
  auto sense = (mode == Extremum_mode::min) ? 1.0 : -1.0;
  for (int i = 0; i < g; ++i) lp.c(i) = sense * q.q(points[i]);
  for (int r = 0; r < m; ++r) {
    const auto& con = constraints[r];
    auto s = con.sign == 0 ? 1.0 : -1.0;
    for (int i = 0; i < g; ++i) lp.a_ub(r, i) = s * std::pow(points[i], con.index - 2);
    lp.b_ub(r) = con.bound;
  }
  auto result = solve_lp(lp, k_constraint_tolerance);
  if (result.status == Lp_status::infeasible) {
    throw Infeasible_error{"moment constraints are infeasible on the grid"};
  }
  if (result.status != Lp_status::optimal) {
    throw Numerical_error{"linear program hit its iteration limit", result.infeasibility};
  }
  auto out = Grid_solution{};
  auto total = result.x.sum();
  for (int i = 0; i < g; ++i) {
    if (result.x(i) > 0.0) {
      out.x.push_back(points[i]);
      out.w.push_back(result.x(i) / total);
    }
  }
  out.value = 0.0;
  for (std::size_t i = 0; i < out.x.size(); ++i) out.value += out.w[i] * q.q(out.x[i]);
  return out;
}

auto to_measure(const Grid_solution& s) -> Discrete_measure {
  auto nu = Discrete_measure{};
  for (std::size_t i = 0; i < s.x.size(); ++i) nu.atoms.push_back({s.x[i], s.w[i]});
  return nu;
}

}  // namespace

auto constraints_from_samples(const std::vector<std::vector<double>>& traces, double level,
                              const std::vector<int>& indices) -> std::vector<Moment_constraint> {
  auto out = std::vector<Moment_constraint>{};
  for (auto index : indices) {
    if (index < 3 || index - 3 >= static_cast<int>(traces.size())) {
      throw Domain_error{"constraint index " + std::to_string(index) + " has no trace"};
    }
    const auto& trace = traces[index - 3];
    if (trace.empty()) throw Domain_error{"empty trace for lambda_" + std::to_string(index)};
    auto [lo, hi] = credible_interval(trace, level);
    out.push_back({index, 0, hi});
    out.push_back({index, 1, -lo});
  }
  return out;
}

auto constraint_value(const Moment_constraint& constraint, const Discrete_measure& nu) -> double {
  auto v = nu.raw_moment(constraint.index - 2);
  return constraint.sign == 0 ? v : -v;
}

auto satisfies(const std::vector<Moment_constraint>& constraints, const Discrete_measure& nu,
               double tolerance) -> bool {
  for (const auto& c : constraints) {
    if (constraint_value(c, nu) > c.bound + tolerance) return false;
  }
  return true;
}

auto exp_decay_functional() -> Functional {
  return {"exp", [](double r) { return std::exp(-r); }};
}

auto indicator_functional(double a, double b) -> Functional {
  if (!(a <= b)) throw Domain_error{"indicator needs a <= b"};
  return {"indicator", [a, b](double r) { return (r >= a && r <= b) ? 1.0 : 0.0; }};
}

auto monomial_functional(int power) -> Functional {
  if (power < 0) throw Domain_error{"monomial power must be >= 0"};
  return {"monomial", [power](double r) { return std::pow(r, power); }};
}

auto tabulated_functional(std::vector<double> values) -> Functional {
  if (values.size() < 2) throw Domain_error{"tabulated functional needs >= 2 values"};
  return {"tabulated", [v = std::move(values)](double r) {
            auto h = std::clamp(r, 0.0, 1.0) * (v.size() - 1);
            auto i = std::min(static_cast<std::size_t>(h), v.size() - 2);
            return v[i] + (h - i) * (v[i + 1] - v[i]);
          }};
}

auto parse_functional(const std::string& spec) -> Functional {
  auto colon = spec.find(':');
  auto name = spec.substr(0, colon);
  auto arg = colon == std::string::npos ? std::string{} : spec.substr(colon + 1);
  try {
    if (spec == "exp") return exp_decay_functional();
    if (name == "monomial" && !arg.empty()) return monomial_functional(std::stoi(arg));
    if (name == "indicator") {
      auto comma = arg.find(',');
      if (comma != std::string::npos) {
        return indicator_functional(std::stod(arg.substr(0, comma)), std::stod(arg.substr(comma + 1)));
      }
    }
  } catch (const std::logic_error&) {
  }
  throw Data_error{"unknown functional '" + spec + "' (exp, indicator:a,b, monomial:j)"};
}

auto evaluate_functional(const Functional& q, const Discrete_measure& nu) -> double {
  auto total = 0.0;
  for (const auto& a : nu.atoms) total += a.w * q.q(a.x);
  return total;
}

auto extremize(const Functional& q, const std::vector<Moment_constraint>& constraints,
               Extremum_mode mode, int grid_size) -> Extremum {
  if (grid_size < 2) throw Domain_error{"grid size must be >= 2"};
  for (const auto& c : constraints) {
    if (c.index < 3 || (c.sign != 0 && c.sign != 1)) throw Domain_error{"malformed constraint"};
  }
  auto points = std::vector<double>(grid_size);
  for (int i = 0; i < grid_size; ++i) points[i] = static_cast<double>(i) / (grid_size - 1);
  auto best = solve_on_points(q, constraints, mode, points);
  auto better = [&](double a, double b) { return mode == Extremum_mode::min ? a < b : a > b; };

  auto h = 1.0 / (grid_size - 1);
  auto refinements = 0;
  while (refinements < k_max_refinements && h > 1e-14) {
    auto local = std::set<double>(best.x.begin(), best.x.end());
    for (auto x : best.x) {
      for (int j = 1; j <= k_refinement_points; ++j) {
        auto step = h * j / k_refinement_points;
        local.insert(std::clamp(x - step, 0.0, 1.0));
        local.insert(std::clamp(x + step, 0.0, 1.0));
      }
    }
    auto candidate = solve_on_points(q, constraints, mode, {local.begin(), local.end()});
    ++refinements;
    auto gain = mode == Extremum_mode::min ? best.value - candidate.value
                                           : candidate.value - best.value;
    if (better(candidate.value, best.value) && satisfies(constraints, to_measure(candidate))) {
      best = std::move(candidate);
    }
    h /= 4.0;
    if (gain < k_refinement_gain && refinements >= 2) break;
  }
  auto witness = to_measure(best);
  if (!satisfies(constraints, witness, k_constraint_tolerance)) {
    throw Numerical_error{"optimal witness violates the constraints", 0.0};
  }
  return {evaluate_functional(q, witness), std::move(witness), refinements};
}

auto kingman_test(const std::vector<double>& lambda3_trace, double level, double cutoff) -> bool {
  auto [lo, hi] = credible_interval(lambda3_trace, level);
  return lo <= cutoff;
}

}  // namespace lambda_infer
