#include "otto/ot_solvers.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace otto {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double x) { return x > 0 ? std::log(x) : kNegInf; }

// log sum_j exp((g_j - C_ij) / eps) for every row i.
void row_lse(const Matrix& cost, const Vector& g, double eps, Vector& out) {
  const Eigen::Index m = cost.rows(), n = cost.cols();
  for (Eigen::Index i = 0; i < m; ++i) {
    double hi = kNegInf;
    for (Eigen::Index j = 0; j < n; ++j) hi = std::max(hi, (g(j) - cost(i, j)) / eps);
    if (hi == kNegInf) {
      out(i) = kNegInf;
      continue;
    }
    double s = 0;
    for (Eigen::Index j = 0; j < n; ++j) s += std::exp((g(j) - cost(i, j)) / eps - hi);
    out(i) = hi + std::log(s);
  }
}

// log sum_i exp((f_i - C_ij) / eps) for every column j.
void col_lse(const Matrix& cost, const Vector& f, double eps, Vector& out) {
  const Eigen::Index m = cost.rows(), n = cost.cols();
  for (Eigen::Index j = 0; j < n; ++j) {
    double hi = kNegInf;
    for (Eigen::Index i = 0; i < m; ++i) hi = std::max(hi, (f(i) - cost(i, j)) / eps);
    if (hi == kNegInf) {
      out(j) = kNegInf;
      continue;
    }
    double s = 0;
    for (Eigen::Index i = 0; i < m; ++i) s += std::exp((f(i) - cost(i, j)) / eps - hi);
    out(j) = hi + std::log(s);
  }
}

// Newton ascent on the semi-dual in g, with f eliminated so row sums are exact.
// Only the active block (positive marginals, finite potentials) moves. Used
// when plain iterations stall, which they do when the optimum is nearly sparse.
int newton_polish(const Matrix& cost, const Vector& mu, const Vector& nu, const Vector& log_mu,
                  double eps, Vector& g, double tol, int max_steps) {
  const Eigen::Index m = cost.rows(), n = cost.cols();
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < n; ++j)
    if (nu(j) > 0 && g(j) != kNegInf) cols.push_back(j);
  const auto k = static_cast<Eigen::Index>(cols.size());
  if (k < 2) return 0;

  Vector lse(m);
  auto objective = [&](const Vector& pot) {
    row_lse(cost, pot, eps, lse);
    double v = 0;
    for (Eigen::Index j : cols) v += nu(j) * pot(j);
    for (Eigen::Index i = 0; i < m; ++i)
      if (mu(i) > 0) v -= eps * mu(i) * lse(i);
    return v;
  };

  int steps = 0;
  for (; steps < max_steps; ++steps) {
    row_lse(cost, g, eps, lse);
    Matrix p = Matrix::Zero(m, k);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!(mu(i) > 0) || lse(i) == kNegInf) continue;
      const double f = eps * (log_mu(i) - lse(i));
      for (Eigen::Index a = 0; a < k; ++a) p(i, a) = std::exp((f + g(cols[a]) - cost(i, cols[a])) / eps);
    }
    Vector grad(k);
    for (Eigen::Index a = 0; a < k; ++a) grad(a) = nu(cols[a]) - p.col(a).sum();
    if (grad.lpNorm<1>() <= tol) break;

    Matrix h = -p.transpose() * (mu.cwiseMax(1e-300).cwiseInverse().asDiagonal() * p);
    h.diagonal() += p.colwise().sum().transpose();
    h /= eps;
    h.diagonal().array() += 1e-12 * std::max(h.diagonal().maxCoeff(), 1.0);
    const Vector step = h.ldlt().solve(grad);
    if (!step.allFinite()) break;

    const double base = objective(g), slope = grad.dot(step);
    double t = 1.0;
    Vector trial = g;
    for (; t > 1e-12; t *= 0.5) {
      for (Eigen::Index a = 0; a < k; ++a) trial(cols[a]) = g(cols[a]) + t * step(a);
      if (objective(trial) >= base + 1e-4 * t * slope) break;
    }
    if (t <= 1e-12) break;
    g = trial;
  }
  return steps;
}

TransportPlan sinkhorn_log(const Matrix& cost, const Marginals& marg, const SolverConfig& cfg) {
  const Eigen::Index m = cost.rows(), n = cost.cols();
  const double eps = cfg.epsilon;
  Vector log_mu(m), log_nu(n);
  for (Eigen::Index i = 0; i < m; ++i) log_mu(i) = safe_log(marg.mu(i));
  for (Eigen::Index j = 0; j < n; ++j) log_nu(j) = safe_log(marg.nu(j));

  Vector f = Vector::Zero(m), g(n), lse_r(m), lse_c(n);
  auto update_f = [&] {
    row_lse(cost, g, eps, lse_r);
    for (Eigen::Index i = 0; i < m; ++i)
      f(i) = log_mu(i) == kNegInf || lse_r(i) == kNegInf ? kNegInf : eps * (log_mu(i) - lse_r(i));
  };
  auto update_g = [&] {
    col_lse(cost, f, eps, lse_c);
    for (Eigen::Index j = 0; j < n; ++j)
      g(j) = log_nu(j) == kNegInf || lse_c(j) == kNegInf ? kNegInf : eps * (log_nu(j) - lse_c(j));
  };
  auto row_residual = [&] {
    row_lse(cost, g, eps, lse_r);
    double residual = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double row_sum = lse_r(i) == kNegInf || f(i) == kNegInf ? 0.0 : std::exp(f(i) / eps + lse_r(i));
      residual += std::abs(row_sum - marg.mu(i));
    }
    return residual;
  };

  TransportPlan plan;
  update_g();
  int it = 1;
  for (;; ++it) {
    const double residual = row_residual();
    if (it % 10 == 0 || it == 1) plan.residual_trace.push_back(residual);
    plan.marginal_residual = residual;
    if (residual <= cfg.tolerance) {
      plan.converged = true;
      break;
    }
    if (it >= cfg.max_iterations) break;
    update_f();
    update_g();
  }

  if (!plan.converged) {
    const Vector f0 = f, g0 = g;
    plan.newton_steps = newton_polish(cost, marg.mu, marg.nu, log_mu, eps, g, 0.1 * cfg.tolerance, 50);
    update_f();
    update_g();
    const double residual = row_residual();
    if (residual < plan.marginal_residual) {
      plan.marginal_residual = residual;
      plan.converged = residual <= cfg.tolerance;
    } else {
      f = f0;
      g = g0;
    }
  }
  plan.iterations = it;

  plan.values.resize(m, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i)
      plan.values(i, j) =
          f(i) == kNegInf || g(j) == kNegInf ? 0.0 : std::exp((f(i) + g(j) - cost(i, j)) / eps);
  return plan;
}

TransportPlan sinkhorn_scaling(const Matrix& cost, const Marginals& marg, const SolverConfig& cfg) {
  // Scalar exp: the vectorized one clamps far-negative arguments to a denormal
  // instead of 0, which would hide underflow.
  const double eps = cfg.epsilon;
  const Matrix kernel = cost.unaryExpr([eps](double c) { return std::exp(-c / eps); });
  Vector u = Vector::Ones(cost.rows()), v(cost.cols());
  auto update_v = [&] {
    const Vector ktu = kernel.transpose() * u;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      if (!(ktu(j) > 0) || !std::isfinite(ktu(j)))
        throw NumericalUnderflow("Sinkhorn scaling underflow; enable log-domain iterations");
      v(j) = marg.nu(j) / ktu(j);
    }
  };

  TransportPlan plan;
  update_v();
  int it = 1;
  for (;; ++it) {
    const Vector kv = kernel * v;
    const double residual = (u.cwiseProduct(kv) - marg.mu).lpNorm<1>();
    if (it % 10 == 0 || it == 1) plan.residual_trace.push_back(residual);
    plan.marginal_residual = residual;
    if (residual <= cfg.tolerance) {
      plan.converged = true;
      break;
    }
    if (it >= cfg.max_iterations) break;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (!(kv(i) > 0) || !std::isfinite(kv(i)))
        throw NumericalUnderflow("Sinkhorn scaling underflow; enable log-domain iterations");
      u(i) = marg.mu(i) / kv(i);
    }
    update_v();
  }
  plan.iterations = it;
  plan.values = u.asDiagonal() * kernel * v.asDiagonal();
  return plan;
}

// Moves an approximate plan onto the exact transport polytope: shrink rows and
// columns that overshoot, then hand the leftover mass out proportionally.
void round_to_marginals(Matrix& plan, const Marginals& marg) {
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    const double s = plan.row(i).sum();
    if (s > marg.mu(i)) plan.row(i) *= marg.mu(i) / s;
  }
  for (Eigen::Index j = 0; j < plan.cols(); ++j) {
    const double s = plan.col(j).sum();
    if (s > marg.nu(j)) plan.col(j) *= marg.nu(j) / s;
  }
  const Vector err_r = (marg.mu - plan.rowwise().sum()).cwiseMax(0.0);
  const Vector err_c = (marg.nu - plan.colwise().sum().transpose()).cwiseMax(0.0);
  const double total = err_r.sum();
  if (total > 0) plan += err_r * err_c.transpose() / total;
}

}  // namespace

Marginals Marginals::uniform(Eigen::Index m, Eigen::Index n) {
  return {Vector::Constant(m, 1.0 / static_cast<double>(m)),
          Vector::Constant(n, 1.0 / static_cast<double>(n))};
}

void SolverConfig::check() const {
  if (!(epsilon > 0)) throw Error("epsilon must be > 0");
  if (max_iterations < 1) throw Error("max_iterations must be >= 1");
  if (!(tolerance >= 0)) throw Error("tolerance must be >= 0");
}

TransportPlan sinkhorn_balanced(const Matrix& cost, const Marginals& marginals,
                                const SolverConfig& config) {
  config.check();
  if (marginals.mu.size() != cost.rows() || marginals.nu.size() != cost.cols())
    throw DimensionMismatch("marginals do not match the cost shape");
  if (!cost.allFinite()) throw Error("cost matrix has non-finite entries");
  if ((marginals.mu.array() < 0).any() || (marginals.nu.array() < 0).any())
    throw Error("marginals must be nonnegative");
  if (std::abs(marginals.mu.sum() - marginals.nu.sum()) > 1e-9)
    throw Error("balanced OT needs equal marginal totals");

  TransportPlan plan = config.log_domain ? sinkhorn_log(cost, marginals, config)
                                         : sinkhorn_scaling(cost, marginals, config);
  plan.kind = PlanKind::Balanced;
  plan.epsilon = config.epsilon;
  plan.marginal_residual =
      (plan.values.rowwise().sum() - marginals.mu).lpNorm<1>() +
      (plan.values.colwise().sum().transpose() - marginals.nu).lpNorm<1>();
  // An unconverged iterate can overshoot its row marginals; callers still get
  // a feasible plan, and the residual above keeps the iterate's state.
  if (!plan.converged) round_to_marginals(plan.values, marginals);
  return plan;
}

TransportPlan solve_partial(const Matrix& cost, const Marginals& marginals, double mass,
                            const SolverConfig& config) {
  const Eigen::Index m = cost.rows(), n = cost.cols();
  const double total_mu = marginals.mu.sum(), total_nu = marginals.nu.sum();
  if (!(mass > 0) || !(mass < std::min(total_mu, total_nu)))
    throw InfeasibleMass("partial OT mass " + std::to_string(mass) + " outside (0, " +
                         std::to_string(std::min(total_mu, total_nu)) + ")");

  // Dummy row/column absorb untransported mass at zero cost; the corner is
  // priced out so dummy-to-dummy flow cannot stand in for real transport.
  Matrix aug = Matrix::Zero(m + 1, n + 1);
  aug.topLeftCorner(m, n) = cost;
  aug(m, n) = 2.0 * std::max(cost.maxCoeff(), 0.0) + 1.0;
  Marginals aug_marg{Vector(m + 1), Vector(n + 1)};
  aug_marg.mu << marginals.mu, total_nu - mass;
  aug_marg.nu << marginals.nu, total_mu - mass;

  TransportPlan full = sinkhorn_balanced(aug, aug_marg, config);
  TransportPlan plan = full;
  plan.values = full.values.topLeftCorner(m, n);
  plan.kind = PlanKind::Partial;
  return plan;
}

TransportPlan solve_one_side_constrained(const ExtendedCostMatrix& extended,
                                         const SolverConfig& config) {
  if (extended.direction == Direction::Forward) {
    ExtendedCostMatrix flipped{extended.values.transpose(), Direction::Reverse};
    TransportPlan plan = solve_one_side_constrained(flipped, config);
    plan.values.transposeInPlace();
    return plan;
  }

  // Reverse: rows are m real source words plus the null word.
  const Eigen::Index rows = extended.values.rows(), n = extended.values.cols();
  const Eigen::Index m = rows - 1;
  if (m < 1 || n < 1) throw DimensionMismatch("one-side OT needs at least one real row and column");

  Matrix aug = Matrix::Zero(rows, n + 1);
  aug.leftCols(n) = extended.values;
  Marginals marg{Vector(rows), Vector(n + 1)};
  marg.mu.head(m).setConstant(1.0 / static_cast<double>(m));
  marg.mu(m) = 1.0;
  marg.nu.head(n).setConstant(1.0 / static_cast<double>(n));
  marg.nu(n) = 1.0;

  TransportPlan full = sinkhorn_balanced(aug, marg, config);
  TransportPlan plan = full;
  plan.values = full.values.leftCols(n);
  plan.kind = PlanKind::OneSideConstrained;
  return plan;
}

double transport_cost(const Matrix& cost, const Matrix& plan) {
  return (cost.array() * plan.array()).sum();
}

}  // namespace otto
