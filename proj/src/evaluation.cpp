#include "otto/evaluation.h"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace otto {

namespace {

bool parse_index(const std::string& s, int& out) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
    return false;
  out = std::stoi(s);
  return true;
}

}  // namespace

GoldAlignment parse_gold_line(const std::string& line) {
  GoldAlignment g;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    const auto pos = tok.find_first_of("-?");
    int i = 0, j = 0;
    if (pos == std::string::npos || !parse_index(tok.substr(0, pos), i) ||
        !parse_index(tok.substr(pos + 1), j))
      throw Error("bad gold alignment token '" + tok + "'");
    if (tok[pos] == '-') g.sure.emplace(i, j);
    g.possible.emplace(i, j);
  }
  return g;
}

AlignmentPairs parse_pharaoh_line(const std::string& line) {
  AlignmentPairs out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    if (tok.find("∅") != std::string::npos) continue;
    const auto pos = tok.find('-');
    int i = 0, j = 0;
    if (pos == std::string::npos || !parse_index(tok.substr(0, pos), i) ||
        !parse_index(tok.substr(pos + 1), j))
      throw Error("bad alignment token '" + tok + "'");
    out.emplace(i, j);
  }
  return out;
}

AerCounts& AerCounts::operator+=(const AerCounts& o) {
  a_and_s += o.a_and_s;
  a_and_p += o.a_and_p;
  a += o.a;
  s += o.s;
  return *this;
}

double AerCounts::value() const {
  if (a + s == 0) return 0.0;
  return 1.0 - static_cast<double>(a_and_s + a_and_p) / static_cast<double>(a + s);
}

AerCounts aer_counts(const AlignmentPairs& predicted, const GoldAlignment& gold) {
  AerCounts c;
  c.a = static_cast<std::int64_t>(predicted.size());
  c.s = static_cast<std::int64_t>(gold.sure.size());
  for (const auto& p : predicted) {
    c.a_and_s += gold.sure.count(p);
    // Sure links count as possible even if the caller built `possible` by hand.
    c.a_and_p += gold.possible.count(p) || gold.sure.count(p);
  }
  return c;
}

double aer(const AlignmentPairs& predicted, const GoldAlignment& gold) {
  return aer_counts(predicted, gold).value();
}

double corpus_aer(const std::vector<AlignmentPairs>& predicted, const std::vector<GoldAlignment>& gold) {
  if (predicted.size() != gold.size())
    throw DimensionMismatch("corpus AER: " + std::to_string(predicted.size()) + " predictions vs " +
                            std::to_string(gold.size()) + " gold sentences");
  AerCounts total;
  for (std::size_t k = 0; k < predicted.size(); ++k) total += aer_counts(predicted[k], gold[k]);
  return total.value();
}

double roc_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) throw DimensionMismatch("scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0;
  std::size_t n_pos = 0;
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo;
    while (hi < n && scores[order[hi]] == scores[order[lo]]) ++hi;
    const double avg_rank = 0.5 * static_cast<double>(lo + 1 + hi);  // ranks lo+1..hi
    for (std::size_t k = lo; k < hi; ++k)
      if (positive[order[k]]) {
        pos_rank_sum += avg_rank;
        ++n_pos;
      }
    lo = hi;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DegenerateLabels("AUC needs both positive and negative samples");
  const double np = static_cast<double>(n_pos);
  return (pos_rank_sum - np * (np + 1) / 2) / (np * static_cast<double>(n_neg));
}

double roc_auc_binary(const std::vector<LabeledScore>& scores, const std::set<int>& positive_classes) {
  std::vector<double> s;
  std::vector<bool> pos;
  s.reserve(scores.size());
  pos.reserve(scores.size());
  for (const auto& ls : scores) {
    s.push_back(ls.score);
    pos.push_back(positive_classes.count(ls.label) > 0);
  }
  return roc_auc(s, pos);
}

MulticlassAuc roc_auc_multiclass(const std::vector<LabeledScore>& scores) {
  MulticlassAuc out;
  double total = 0;
  std::set<std::vector<bool>> seen;  // cuts through an empty class repeat a partition
  for (int cut = 1; cut <= 3; ++cut) {
    std::vector<bool> mask;
    for (const auto& ls : scores) mask.push_back(ls.label >= cut);
    if (!seen.insert(mask).second) continue;
    std::set<int> positive;
    for (int c = cut; c <= 3; ++c) positive.insert(c);
    try {
      total += roc_auc_binary(scores, positive);
      ++out.splits_used;
    } catch (const DegenerateLabels&) {
    }
  }
  if (out.splits_used == 0) throw DegenerateLabels("every ordinal split has an empty side");
  out.value = total / out.splits_used;
  return out;
}

}  // namespace otto
