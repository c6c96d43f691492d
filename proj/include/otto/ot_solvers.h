#pragma once

#include <vector>

#include "otto/geometry.h"
#include "otto/types.h"

namespace otto {

struct Marginals {
  Vector mu;  // row masses
  Vector nu;  // column masses

  static Marginals uniform(Eigen::Index m, Eigen::Index n);
};

struct SolverConfig {
  double epsilon = 0.05;
  int max_iterations = 2000;
  double tolerance = 1e-8;   // L1 residual of the enforced marginals
  bool log_domain = true;

  void check() const;
};

enum class PlanKind { Balanced, Partial, OneSideConstrained };

struct TransportPlan {
  Matrix values;
  PlanKind kind = PlanKind::Balanced;
  double epsilon = 0;
  int iterations = 0;     // Sinkhorn sweeps
  int newton_steps = 0;   // refinement steps after a stalled run
  bool converged = false;
  double marginal_residual = 0;
  // Row-marginal L1 residual sampled every 10 iterations.
  std::vector<double> residual_trace;
};

class NumericalUnderflow : public Error {
 public:
  using Error::Error;
};

class InfeasibleMass : public Error {
 public:
  using Error::Error;
};

// Entropic OT with both marginals enforced. Iterations alternate row and
// column scaling and always end on a column update, so column sums match nu to
// rounding; convergence is judged on the L1 row residual. In log-domain mode a
// run that hits max_iterations gets a short Newton refinement of the column
// potentials before giving up, since plain iterations crawl when the optimum
// is nearly sparse. Non-convergence is
// reported through `converged`, never thrown; such a plan is rounded onto the
// exact marginals while `marginal_residual` keeps the last iterate's value.
TransportPlan sinkhorn_balanced(const Matrix& cost, const Marginals& marginals,
                                const SolverConfig& config = {});

// Binary Gamma minimizing sum C*Gamma with min(m, n) ones, at most one per row
// and column. Among optimal solutions the one whose sorted (i, j) pair list is
// lexicographically smallest is returned.
BinaryMatrix solve_assignment(const Matrix& cost);

// Partial OT: row sums <= mu, column sums <= nu, total mass s. Solved as a
// balanced problem on a dummy-extended (m+1) x (n+1) cost.
TransportPlan solve_partial(const Matrix& cost, const Marginals& marginals, double mass,
                            const SolverConfig& config = {});

// One-side-constrained OT with a null word. For Reverse (null row appended),
// column sums equal 1/n and row sums are bounded by (1/m, ..., 1/m, 1). The
// inequality side is absorbed by a zero-cost slack column of mass 1. Forward
// is the transpose of the same construction. The returned plan has the shape
// of the extended cost.
TransportPlan solve_one_side_constrained(const ExtendedCostMatrix& extended,
                                         const SolverConfig& config = {});

// Linear cost sum C*P.
double transport_cost(const Matrix& cost, const Matrix& plan);

}  // namespace otto
