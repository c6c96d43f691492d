#pragma once

#include "otto/aligners.h"

namespace otto {

struct ScoreOptions {
  // Pair hallucination with the source-side ratio and omission with the
  // target-side ratio, as the equations are printed, instead of the
  // side-consistent default.
  bool paper_literal_eq78 = false;
};

struct DetectionScores {
  double r_src = 0;  // fraction of source words with an all-zero gamma row
  double r_tgt = 0;  // fraction of target words with an all-zero gamma column
  double c_rev = 0;  // (1/n) * sum_j null-row mass of the reverse plan
  double c_fwd = 0;  // (1/m) * sum_i null-column mass of the forward plan
  double hallucination = 0;
  double omission = 0;
  Vector word_hallucination;  // length n
  Vector word_omission;       // length m
};

// Sentence-level scores:
//   hallucination = r_tgt + c_rev,  omission = r_src + c_fwd.
DetectionScores sentence_scores(const AlignmentMatrix& alignment, const TransportPlan& plan_rev,
                                const TransportPlan& plan_fwd, const ScoreOptions& options = {});

// Word-level scores, filled into `scores`:
//   word_hallucination[j] = n * P_rev[m][j] + [column j unaligned]
//   word_omission[i]      = m * P_fwd[i][n] + [row i unaligned]
// The factors n and m rescale a word's null mass (at most 1/n, 1/m) to [0, 1].
void word_scores(const AlignmentMatrix& alignment, const TransportPlan& plan_rev,
                 const TransportPlan& plan_fwd, DetectionScores& scores);

DetectionScores detect(const OttawaResult& result, const ScoreOptions& options = {});

}  // namespace otto
