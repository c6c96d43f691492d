#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "otto/types.h"

namespace otto {

using AlignmentPairs = std::set<std::pair<int, int>>;

struct GoldAlignment {
  AlignmentPairs sure;
  AlignmentPairs possible;  // always a superset of sure
};

// Gold line: "i-j" marks a sure link, "i?j" a possible-only link (0-based).
GoldAlignment parse_gold_line(const std::string& line);

// Pharaoh line "i-j ..."; null tokens ("i-∅", "∅-j") are skipped.
AlignmentPairs parse_pharaoh_line(const std::string& line);

// Integer counts behind AER so corpus totals aggregate exactly.
struct AerCounts {
  std::int64_t a_and_s = 0;
  std::int64_t a_and_p = 0;
  std::int64_t a = 0;
  std::int64_t s = 0;

  AerCounts& operator+=(const AerCounts& o);
  // 1 - (|A&S| + |A&P|) / (|A| + |S|); 0 when both A and S are empty.
  double value() const;
};

AerCounts aer_counts(const AlignmentPairs& predicted, const GoldAlignment& gold);
double aer(const AlignmentPairs& predicted, const GoldAlignment& gold);
double corpus_aer(const std::vector<AlignmentPairs>& predicted, const std::vector<GoldAlignment>& gold);

struct LabeledScore {
  double score = 0;
  int label = 0;  // 0 = no, 1 = small, 2 = partial, 3 = full
};

class DegenerateLabels : public Error {
 public:
  using Error::Error;
};

// Mann-Whitney AUC with average ranks for ties.
double roc_auc(const std::vector<double>& scores, const std::vector<bool>& positive);
double roc_auc_binary(const std::vector<LabeledScore>& scores, const std::set<int>& positive_classes);

struct MulticlassAuc {
  double value = 0;
  int splits_used = 0;
  // Always true: an unweighted mean over ordinal splits, standing in for the
  // benchmark's own multi-class definition.
  bool approximate = true;
};

// Mean of binary AUCs over {0}|{1,2,3}, {0,1}|{2,3}, {0,1,2}|{3}, skipping
// splits with an empty side. Splits that cut the sample identically (because
// a class is absent) are counted once.
MulticlassAuc roc_auc_multiclass(const std::vector<LabeledScore>& scores);

}  // namespace otto
