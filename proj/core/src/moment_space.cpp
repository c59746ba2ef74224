#include "lambda_infer/moment_space.h"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

#include "lambda_infer/errors.h"
#include "lambda_infer/rates.h"

namespace lambda_infer {

namespace {

constexpr long double k_rounding_allowance = 1e-14L;
constexpr double k_zero_node = 1e-12;

}  // namespace

auto Discrete_measure::total_mass() const -> double {
  auto total = 0.0;
  for (const auto& a : atoms) total += a.w;
  return total;
}

auto Discrete_measure::raw_moment(int j) const -> double {
  auto total = 0.0;
  for (const auto& a : atoms) total += a.w * std::pow(a.x, j);
  return total;
}

auto total_variation(const Discrete_measure& mu, const Discrete_measure& nu) -> double {
  auto diff = std::map<double, double>{};
  for (const auto& a : mu.atoms) diff[a.x] += a.w;
  for (const auto& a : nu.atoms) diff[a.x] -= a.w;
  auto total = 0.0;
  for (const auto& [x, d] : diff) total += std::abs(d);
  return total;
}

Moment_sequence::Moment_sequence(std::vector<double> values) : values_{std::move(values)} {
  for (auto v : values_) {
    if (!std::isfinite(v)) throw Domain_error{"moment sequence contains a non-finite value"};
  }
}

auto Moment_sequence::from_measure(const Lambda_measure& measure, int n) -> Moment_sequence {
  if (n < 3) throw Domain_error{"moment sequence needs n >= 3"};
  auto values = std::vector<double>{};
  values.reserve(n - 2);
  for (int k = 3; k <= n; ++k) values.push_back(moment(measure, k));
  return Moment_sequence{std::move(values)};
}

auto Moment_sequence::operator()(int k) const -> double {
  if (k == 2) return 1.0;
  if (k < 2 || k > n()) throw Domain_error{"moment index out of range"};
  return values_[k - 3];
}

auto binomial_transform(const Moment_sequence& seq, int m, int k) -> long double {
  if (k < 2 || k > m || m > seq.n()) throw Domain_error{"binomial transform index out of range"};
  auto total = 0.0L;
  auto c = 1.0L;  // C(m-k, j)
  for (int j = 0; j <= m - k; ++j) {
    auto term = c * static_cast<long double>(seq(k + j));
    total += (j % 2 == 0) ? term : -term;
    c = c * (m - k - j) / (j + 1);
  }
  return total;
}

auto check_complete_monotonicity(const Moment_sequence& seq) -> Monotonicity_report {
  if (seq.values().empty()) throw Domain_error{"empty moment sequence"};
  auto report = Monotonicity_report{};
  for (int m = 2; m <= seq.n(); ++m) {
    for (int k = 2; k <= m; ++k) {
      auto total = 0.0L;
      auto scale = 0.0L;
      auto c = 1.0L;
      for (int j = 0; j <= m - k; ++j) {
        auto term = c * static_cast<long double>(seq(k + j));
        total += (j % 2 == 0) ? term : -term;
        scale += std::abs(term);
        c = c * (m - k - j) / (j + 1);
      }
      auto tolerance = 1e-12L + k_rounding_allowance * scale;
      if (total < -tolerance) {
        report.monotone = false;
        report.violations.push_back({m, k, static_cast<double>(total)});
      }
    }
  }
  return report;
}

auto orthonormal_recurrence(const Moment_sequence& seq) -> Orthonormal_recurrence {
  if (seq.n() < 5) throw Domain_error{"orthogonal polynomials need n >= 5"};
  auto rec = Orthonormal_recurrence{};
  auto m = (seq.n() - 3) / 2;
  rec.requested_order = m;

  // Upper Cholesky factor of the Hankel matrix H_ij = mu_{i+j}, 0 <= i, j <= m.
  auto size = m + 1;
  auto r = std::vector<std::vector<long double>>(size, std::vector<long double>(size, 0.0L));
  auto order = m;
  for (int i = 0; i < size; ++i) {
    auto pivot = static_cast<long double>(seq.raw(2 * i));
    for (int l = 0; l < i; ++l) pivot -= r[l][i] * r[l][i];
    if (i > 0 && pivot < static_cast<long double>(k_hankel_pivot_threshold)) {
      order = std::min(order, i);
      break;
    }
    r[i][i] = std::sqrt(pivot);
    for (int j = i + 1; j < size; ++j) {
      auto s = static_cast<long double>(seq.raw(i + j));
      for (int l = 0; l < i; ++l) s -= r[l][i] * r[l][j];
      r[i][j] = s / r[i][i];
    }
  }
  rec.order = order;
  rec.degenerate = order < m;
  rec.a.assign(order, 0.0);
  rec.b.assign(order, 0.0);
  for (int k = 0; k < order; ++k) {
    auto a = r[k][k + 1] / r[k][k];
    if (k > 0) a -= r[k - 1][k] / r[k - 1][k - 1];
    rec.a[k] = static_cast<double>(a);
    if (k > 0) rec.b[k] = static_cast<double>(r[k][k] / r[k - 1][k - 1]);
  }
  return rec;
}

auto orthonormal_values(const Orthonormal_recurrence& rec, double x, int count)
    -> std::vector<double> {
  if (count > rec.order + 1 || count < 0) throw Domain_error{"too many polynomials requested"};
  auto phi = std::vector<double>(count);
  if (count == 0) return phi;
  phi[0] = 1.0;
  for (int k = 0; k + 1 < count; ++k) {
    if (k + 1 >= rec.order) throw Domain_error{"polynomial beyond the available recurrence"};
    auto prev = (k > 0) ? rec.b[k] * phi[k - 1] : 0.0;
    phi[k + 1] = ((x - rec.a[k]) * phi[k] - prev) / rec.b[k + 1];
  }
  return phi;
}

auto Quadrature_rule::as_discrete() const -> Discrete_measure {
  auto out = Discrete_measure{};
  for (std::size_t i = 0; i < nodes.size(); ++i) out.atoms.push_back({nodes[i], weights[i]});
  return out;
}

auto gauss_quadrature(const Orthonormal_recurrence& rec) -> Quadrature_rule {
  auto m = rec.order;
  if (m < 1) throw Domain_error{"Gauss rule needs order >= 1"};
  auto rule = Quadrature_rule{};
  rule.degenerate = rec.degenerate;
  if (m == 1) {
    rule.nodes = {std::clamp(rec.a[0], 0.0, 1.0)};
    rule.weights = {1.0};
    return rule;
  }
  auto diag = Eigen::VectorXd(m);
  auto sub = Eigen::VectorXd(m - 1);
  for (int k = 0; k < m; ++k) diag(k) = rec.a[k];
  for (int k = 1; k < m; ++k) sub(k - 1) = rec.b[k];
  auto solver = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>{};
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Numerical_error{"tridiagonal eigenproblem failed", 0.0};
  }
  for (int j = 0; j < m; ++j) {
    auto x = std::clamp(solver.eigenvalues()(j), 0.0, 1.0);
    auto phi = orthonormal_values(rec, x, m);
    auto s = 0.0;
    for (auto v : phi) s += v * v;
    rule.nodes.push_back(x);
    rule.weights.push_back(1.0 / s);
  }
  return rule;
}

auto gauss_quadrature(const Moment_sequence& seq) -> Quadrature_rule {
  return gauss_quadrature(orthonormal_recurrence(seq));
}

auto cms_envelope(const Moment_sequence& seq) -> Cms_envelope {
  auto env = Cms_envelope{};
  env.rule = gauss_quadrature(seq);
  const auto& xi = env.rule.nodes;
  const auto& zeta = env.rule.weights;
  auto m = env.rule.order();
  auto cumulative = 0.0;
  for (int j = 0; j < m; ++j) {
    cumulative += zeta[j];
    env.links.push_back({xi[j], (j + 1 < m) ? xi[j + 1] : 1.0, cumulative});
  }
  env.interval_caps.push_back({0.0, xi[0], false, zeta[0]});
  for (int j = 0; j + 1 < m; ++j) {
    env.interval_caps.push_back({xi[j], xi[j + 1], false, zeta[j] + zeta[j + 1]});
  }
  env.interval_caps.push_back({xi[m - 1], 1.0, true, zeta[m - 1]});
  return env;
}

auto check_measure(const Cms_envelope& envelope, const Lambda_measure& measure, double tolerance)
    -> Cms_check {
  auto check = Cms_check{};
  auto m = static_cast<int>(envelope.links.size());
  for (int j = 0; j < m; ++j) {
    const auto& link = envelope.links[j];
    auto upper_side = cumulative_mass(measure, link.node, true);
    auto last = (j + 1 == m);
    auto lower_side = cumulative_mass(measure, link.next_node, last);
    if (upper_side > link.cumulative + tolerance || link.cumulative > lower_side + tolerance) {
      check.holds = false;
      check.failed_links.push_back(j);
    }
  }
  for (int j = 0; j < static_cast<int>(envelope.interval_caps.size()); ++j) {
    const auto& cap = envelope.interval_caps[j];
    auto mass = cumulative_mass(measure, cap.hi, cap.closed_right) -
                cumulative_mass(measure, cap.lo, false);
    if (mass > cap.mass + tolerance) {
      check.holds = false;
      check.failed_intervals.push_back(j);
    }
  }
  return check;
}

auto interlaced_pair(const Moment_sequence& seq) -> Interlaced_pair {
  auto env = cms_envelope(seq);
  const auto& zeta = env.rule.weights;
  auto m = env.rule.order();
  if (m < 2) throw Domain_error{"interlacing needs a Gauss rule of order >= 2"};

  // Interval I_i (i = 0..m) receives zeta_i + zeta_{i+1} (1-based zeta,
  // zeta_0 = zeta_{m+1} = 0); even intervals go to x, odd ones to y.
  auto zeta_at = [&](int i) { return (i >= 1 && i <= m) ? zeta[i - 1] : 0.0; };
  auto pair = Interlaced_pair{};
  for (int i = 0; i <= m; ++i) {
    const auto& cap = env.interval_caps[i];
    auto mass = (i == 0) ? zeta_at(1) : zeta_at(i) + zeta_at(i + 1);
    auto& intervals = (i % 2 == 0) ? pair.x_intervals : pair.y_intervals;
    auto& measure = (i % 2 == 0) ? pair.x : pair.y;
    intervals.push_back({cap.lo, cap.hi, cap.closed_right, mass});
    if (mass > 0.0) measure.atoms.push_back({0.5 * (cap.lo + cap.hi), mass});
  }
  return pair;
}

auto canonical_representative(const Moment_sequence& seq) -> Lambda_measure {
  auto rule = gauss_quadrature(seq);
  auto total = 0.0;
  for (auto w : rule.weights) total += w;
  auto kingman = 0.0;
  auto atoms = std::vector<Atom>{};
  for (int j = 0; j < rule.order(); ++j) {
    auto w = rule.weights[j] / total;
    if (rule.nodes[j] < k_zero_node) {
      kingman += w;
    } else {
      atoms.push_back({rule.nodes[j], w});
    }
  }
  return Lambda_measure{kingman, std::move(atoms), {}};
}

}  // namespace lambda_infer
