#include "otto/aligners.h"

#include <cmath>
#include <sstream>

namespace otto {

namespace {

// Extremum picks treat values within rounding of the best as tied and take the
// smallest index, so bit-level noise (e.g. from rescaled inputs) cannot flip a
// choice between mathematically equal entries.
enum class Pick { SmallestCost, LargestMass };

template <typename Line>
Eigen::Index pick(const Line& v, Pick mode) {
  if (mode == Pick::SmallestCost) {
    const double bound = v.minCoeff() + 1e-12;
    for (Eigen::Index k = 0;; ++k)
      if (v(k) <= bound) return k;
  }
  const double top = v.maxCoeff();
  const double bound = top - 1e-12 * std::abs(top);
  for (Eigen::Index k = 0;; ++k)
    if (v(k) >= bound) return k;
}

BinaryMatrix pick_per_row(const Matrix& values, Pick mode) {
  BinaryMatrix out = BinaryMatrix::Zero(values.rows(), values.cols());
  for (Eigen::Index i = 0; i < values.rows(); ++i) out(i, pick(values.row(i), mode)) = 1;
  return out;
}

BinaryMatrix pick_per_col(const Matrix& values, Pick mode) {
  BinaryMatrix out = BinaryMatrix::Zero(values.rows(), values.cols());
  for (Eigen::Index j = 0; j < values.cols(); ++j) out(pick(values.col(j), mode), j) = 1;
  return out;
}

AlignmentMatrix from_intermediates(BinaryMatrix fwd, BinaryMatrix rev) {
  AlignmentMatrix a;
  a.gamma = fwd.cwiseProduct(rev);
  a.gamma_fwd = std::move(fwd);
  a.gamma_rev = std::move(rev);
  a.null_assigned_src.assign(static_cast<std::size_t>(a.gamma.rows()), false);
  a.null_assigned_tgt.assign(static_cast<std::size_t>(a.gamma.cols()), false);
  return a;
}

AlignmentMatrix from_single(BinaryMatrix gamma) {
  BinaryMatrix copy = gamma;
  return from_intermediates(std::move(gamma), std::move(copy));
}

}  // namespace

std::vector<std::pair<int, int>> AlignmentMatrix::pairs() const {
  std::vector<std::pair<int, int>> out;
  for (Eigen::Index i = 0; i < gamma.rows(); ++i)
    for (Eigen::Index j = 0; j < gamma.cols(); ++j)
      if (gamma(i, j)) out.emplace_back(static_cast<int>(i), static_cast<int>(j));
  return out;
}

Strategy parse_strategy(const std::string& name) {
  if (name == "greedy") return Strategy::Greedy;
  if (name == "assignment") return Strategy::Assignment;
  if (name == "ot") return Strategy::OT;
  if (name == "pot") return Strategy::POT;
  if (name == "ottawa") return Strategy::Ottawa;
  throw Error("unknown strategy '" + name + "'");
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Greedy: return "greedy";
    case Strategy::Assignment: return "assignment";
    case Strategy::OT: return "ot";
    case Strategy::POT: return "pot";
    case Strategy::Ottawa: return "ottawa";
  }
  return "?";
}

void AlignerChoice::check() const {
  solver.check();
  if (!pot_tau_absolute && !(pot_tau > 0 && pot_tau < 1))
    throw Error("POT threshold fraction must lie in (0, 1)");
  if (pot_tau_absolute && !(pot_tau > 0)) throw Error("absolute POT threshold must be > 0");
  if (!(pot_mass > 0 && pot_mass < 1)) throw Error("POT mass must lie in (0, 1)");
}

AlignmentMatrix greedy_align(const Matrix& cost) {
  return from_intermediates(pick_per_row(cost, Pick::SmallestCost), pick_per_col(cost, Pick::SmallestCost));
}

AlignmentMatrix assignment_align(const Matrix& cost) { return from_single(solve_assignment(cost)); }

AlignmentMatrix ot_align(const Matrix& cost, const SolverConfig& config, TransportPlan* plan_out) {
  TransportPlan plan = sinkhorn_balanced(cost, Marginals::uniform(cost.rows(), cost.cols()), config);
  AlignmentMatrix a =
      from_intermediates(pick_per_row(plan.values, Pick::LargestMass), pick_per_col(plan.values, Pick::LargestMass));
  if (plan_out) *plan_out = std::move(plan);
  return a;
}

AlignmentMatrix pot_align(const Matrix& cost, const AlignerChoice& choice, TransportPlan* plan_out) {
  const Eigen::Index m = cost.rows(), n = cost.cols();
  TransportPlan plan = solve_partial(cost, Marginals::uniform(m, n), choice.pot_mass, choice.solver);
  const double tau = choice.pot_tau_absolute
                         ? choice.pot_tau
                         : choice.pot_tau * std::max(1.0 / static_cast<double>(m),
                                                     1.0 / static_cast<double>(n));
  BinaryMatrix gamma = (plan.values.array() >= tau).cast<unsigned char>();
  if (plan_out) *plan_out = std::move(plan);
  return from_single(std::move(gamma));
}

OttawaResult ottawa_align(const WordEmbeddings& src, const WordEmbeddings& tgt,
                          const AlignerChoice& choice) {
  OttawaResult r;
  r.cost = cost_matrix(src, tgt);
  const Eigen::Index m = r.cost.rows(), n = r.cost.cols();

  r.geom_rev = null_geometry(tgt, r.cost, choice.null_distance);
  r.plan_rev = solve_one_side_constrained(extend_cost(r.cost, r.geom_rev.d, Direction::Reverse),
                                          choice.solver);
  r.geom_fwd = null_geometry(src, r.cost, choice.null_distance);
  r.plan_fwd = solve_one_side_constrained(extend_cost(r.cost, r.geom_fwd.d, Direction::Forward),
                                          choice.solver);

  r.alignment = from_intermediates(BinaryMatrix::Zero(m, n), BinaryMatrix::Zero(m, n));
  // The null word sits last, so real words win ties with it.
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index best = pick(r.plan_rev.values.col(j), Pick::LargestMass);
    if (best == m)
      r.alignment.null_assigned_tgt[static_cast<std::size_t>(j)] = true;
    else
      r.alignment.gamma_rev(best, j) = 1;
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index best = pick(r.plan_fwd.values.row(i), Pick::LargestMass);
    if (best == n)
      r.alignment.null_assigned_src[static_cast<std::size_t>(i)] = true;
    else
      r.alignment.gamma_fwd(i, best) = 1;
  }
  r.alignment.gamma = r.alignment.gamma_fwd.cwiseProduct(r.alignment.gamma_rev);
  return r;
}

OttawaResult ottawa_align(const SentencePairRecord& record, const AlignerChoice& choice) {
  return ottawa_align(record.src, record.tgt, choice);
}

AlignmentMatrix align(const SentencePairRecord& record, const AlignerChoice& choice,
                      bool* plans_converged) {
  bool converged = true;
  AlignmentMatrix out;
  switch (choice.strategy) {
    case Strategy::Greedy:
      out = greedy_align(cost_matrix(record.src, record.tgt));
      break;
    case Strategy::Assignment:
      out = assignment_align(cost_matrix(record.src, record.tgt));
      break;
    case Strategy::OT: {
      TransportPlan plan;
      out = ot_align(cost_matrix(record.src, record.tgt), choice.solver, &plan);
      converged = plan.converged;
      break;
    }
    case Strategy::POT: {
      TransportPlan plan;
      out = pot_align(cost_matrix(record.src, record.tgt), choice, &plan);
      converged = plan.converged;
      break;
    }
    case Strategy::Ottawa: {
      OttawaResult r = ottawa_align(record, choice);
      converged = r.plan_rev.converged && r.plan_fwd.converged;
      out = std::move(r.alignment);
      break;
    }
  }
  if (plans_converged) *plans_converged = converged;
  return out;
}

std::string to_pharaoh(const AlignmentMatrix& a, bool emit_null) {
  std::ostringstream os;
  bool first = true;
  auto sep = [&] {
    if (!first) os << ' ';
    first = false;
  };
  for (const auto& [i, j] : a.pairs()) {
    sep();
    os << i << '-' << j;
  }
  if (emit_null) {
    for (std::size_t i = 0; i < a.null_assigned_src.size(); ++i)
      if (a.null_assigned_src[i]) {
        sep();
        os << i << "-∅";
      }
    for (std::size_t j = 0; j < a.null_assigned_tgt.size(); ++j)
      if (a.null_assigned_tgt[j]) {
        sep();
        os << "∅-" << j;
      }
  }
  return os.str();
}

}  // namespace otto
