#pragma once

#include <string>
#include <utility>
#include <vector>

#include "otto/embedding_io.h"
#include "otto/geometry.h"
#include "otto/ot_solvers.h"

namespace otto {

struct AlignmentMatrix {
  BinaryMatrix gamma;      // m x n, gamma_fwd AND gamma_rev
  BinaryMatrix gamma_fwd;  // source -> target choices
  BinaryMatrix gamma_rev;  // target -> source choices
  std::vector<bool> null_assigned_src;  // forward picked the null target
  std::vector<bool> null_assigned_tgt;  // reverse picked the null source

  // Sorted (i, j) pairs where gamma is set.
  std::vector<std::pair<int, int>> pairs() const;
};

enum class Strategy { Greedy, Assignment, OT, POT, Ottawa };

Strategy parse_strategy(const std::string& name);
std::string to_string(Strategy s);

struct AlignerChoice {
  Strategy strategy = Strategy::Ottawa;
  SolverConfig solver;
  double pot_tau = 0.05;       // fraction of max(1/m, 1/n) unless pot_tau_absolute
  bool pot_tau_absolute = false;
  double pot_mass = 0.5;
  NullDistance null_distance = NullDistance::Median;

  void check() const;
};

AlignmentMatrix greedy_align(const Matrix& cost);
AlignmentMatrix assignment_align(const Matrix& cost);

// Entropic OT with uniform marginals, binarized by row and column argmax of
// the plan (largest transported mass wins).
AlignmentMatrix ot_align(const Matrix& cost, const SolverConfig& config, TransportPlan* plan_out = nullptr);

// Partial OT binarized by the threshold tau.
AlignmentMatrix pot_align(const Matrix& cost, const AlignerChoice& choice, TransportPlan* plan_out = nullptr);

struct OttawaResult {
  AlignmentMatrix alignment;
  TransportPlan plan_rev;  // (m+1) x n, last row is the null source word
  TransportPlan plan_fwd;  // m x (n+1), last column is the null target word
  NullGeometry geom_rev;   // null source, equidistant to target vectors
  NullGeometry geom_fwd;   // null target, equidistant to source vectors
  Matrix cost;
};

// Null-aware alignment: each direction appends a null word at distance
// d = max(d_min, c) and solves one-side-constrained OT. A column (row) goes to
// null only when the null mass is strictly larger than every real word's.
OttawaResult ottawa_align(const SentencePairRecord& record, const AlignerChoice& choice);
OttawaResult ottawa_align(const WordEmbeddings& src, const WordEmbeddings& tgt,
                          const AlignerChoice& choice);

// Runs the chosen strategy on a record. plans_converged is cleared when any
// solver stopped at max_iterations.
AlignmentMatrix align(const SentencePairRecord& record, const AlignerChoice& choice,
                      bool* plans_converged = nullptr);

// Pharaoh line: "i-j" pairs, 0-based. With emit_null, null assignments are
// appended as "i-∅" and "∅-j".
std::string to_pharaoh(const AlignmentMatrix& a, bool emit_null = false);

}  // namespace otto
