#include "otto/detection.h"

namespace otto {

namespace {

void check_shapes(const AlignmentMatrix& a, const TransportPlan& rev, const TransportPlan& fwd) {
  const Eigen::Index m = a.gamma.rows(), n = a.gamma.cols();
  if (rev.values.rows() != m + 1 || rev.values.cols() != n)
    throw DimensionMismatch("reverse plan is " + std::to_string(rev.values.rows()) + "x" +
                            std::to_string(rev.values.cols()) + ", expected " +
                            std::to_string(m + 1) + "x" + std::to_string(n));
  if (fwd.values.rows() != m || fwd.values.cols() != n + 1)
    throw DimensionMismatch("forward plan is " + std::to_string(fwd.values.rows()) + "x" +
                            std::to_string(fwd.values.cols()) + ", expected " +
                            std::to_string(m) + "x" + std::to_string(n + 1));
}

}  // namespace

DetectionScores sentence_scores(const AlignmentMatrix& a, const TransportPlan& plan_rev,
                                const TransportPlan& plan_fwd, const ScoreOptions& options) {
  check_shapes(a, plan_rev, plan_fwd);
  const Eigen::Index m = a.gamma.rows(), n = a.gamma.cols();

  DetectionScores s;
  int empty_rows = 0, empty_cols = 0;
  for (Eigen::Index i = 0; i < m; ++i) empty_rows += a.gamma.row(i).cast<int>().sum() == 0;
  for (Eigen::Index j = 0; j < n; ++j) empty_cols += a.gamma.col(j).cast<int>().sum() == 0;
  s.r_src = static_cast<double>(empty_rows) / static_cast<double>(m);
  s.r_tgt = static_cast<double>(empty_cols) / static_cast<double>(n);
  s.c_rev = plan_rev.values.row(m).sum() / static_cast<double>(n);
  s.c_fwd = plan_fwd.values.col(n).sum() / static_cast<double>(m);

  if (options.paper_literal_eq78) {
    s.hallucination = s.r_src + s.c_rev;
    s.omission = s.r_tgt + s.c_fwd;
  } else {
    s.hallucination = s.r_tgt + s.c_rev;
    s.omission = s.r_src + s.c_fwd;
  }
  word_scores(a, plan_rev, plan_fwd, s);
  return s;
}

void word_scores(const AlignmentMatrix& a, const TransportPlan& plan_rev,
                 const TransportPlan& plan_fwd, DetectionScores& s) {
  check_shapes(a, plan_rev, plan_fwd);
  const Eigen::Index m = a.gamma.rows(), n = a.gamma.cols();
  s.word_hallucination.resize(n);
  s.word_omission.resize(m);
  for (Eigen::Index j = 0; j < n; ++j)
    s.word_hallucination(j) = static_cast<double>(n) * plan_rev.values(m, j) +
                              (a.gamma.col(j).cast<int>().sum() == 0 ? 1.0 : 0.0);
  for (Eigen::Index i = 0; i < m; ++i)
    s.word_omission(i) = static_cast<double>(m) * plan_fwd.values(i, n) +
                         (a.gamma.row(i).cast<int>().sum() == 0 ? 1.0 : 0.0);
}

DetectionScores detect(const OttawaResult& result, const ScoreOptions& options) {
  return sentence_scores(result.alignment, result.plan_rev, result.plan_fwd, options);
}

}  // namespace otto
