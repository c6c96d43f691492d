#include "otto/pipeline.h"

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace otto {

namespace {

using nlohmann::json;

constexpr std::size_t kRecordsPerWorker = 32;

struct Slot {
  std::optional<SentencePairRecord> record;
  std::string id;
  std::string read_error;
  RecordOutcome outcome;
};

void run_batch(std::vector<Slot>& batch, int jobs, const RecordFn& fn) {
  auto work = [&](Slot& slot) {
    if (!slot.record) return;
    try {
      slot.outcome = fn(*slot.record);
    } catch (const std::exception& e) {
      slot.outcome.error = e.what();
    }
  };
  if (jobs <= 1 || batch.size() <= 1) {
    for (auto& slot : batch) work(slot);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), batch.size());
  for (std::size_t w = 0; w < n_workers; ++w)
    workers.emplace_back([&] {
      for (std::size_t k = next++; k < batch.size(); k = next++) work(batch[k]);
    });
  for (auto& t : workers) t.join();
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::vector<std::string> solver_warnings(const OttawaResult& r) {
  std::vector<std::string> w;
  auto plan_note = [&](const TransportPlan& p, const char* dir) {
    if (p.converged) return;
    std::ostringstream os;
    os << dir << " plan not converged after " << p.iterations << " iterations and " << p.newton_steps << " Newton steps (residual "
       << std::setprecision(3) << p.marginal_residual << ")";
    w.push_back(os.str());
  };
  plan_note(r.plan_rev, "reverse");
  plan_note(r.plan_fwd, "forward");
  if (r.geom_rev.fallback_used) w.push_back("reverse null geometry degenerate; d_min set to cost center");
  if (r.geom_fwd.fallback_used) w.push_back("forward null geometry degenerate; d_min set to cost center");
  return w;
}

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool is_blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

struct LabelRow {
  std::optional<int> hallucination, omission;
  std::optional<std::vector<int>> word_hallucination, word_omission;
};

LabelRow label_row(const json& obj) {
  const json& src = obj.contains("labels") && obj.at("labels").is_object() ? obj.at("labels") : obj;
  LabelRow row;
  if (src.contains("hallucination")) row.hallucination = src.at("hallucination").get<int>();
  if (src.contains("omission")) row.omission = src.at("omission").get<int>();
  if (src.contains("word_hallucination"))
    row.word_hallucination = src.at("word_hallucination").get<std::vector<int>>();
  if (src.contains("word_omission")) row.word_omission = src.at("word_omission").get<std::vector<int>>();
  return row;
}

json sentence_auc(const std::vector<LabeledScore>& scores) {
  json out;
  try {
    out["binary_auc"] = roc_auc_binary(scores, {1, 2, 3});
  } catch (const DegenerateLabels& e) {
    out["binary_auc"] = nullptr;
    out["binary_error"] = e.what();
  }
  try {
    const MulticlassAuc mc = roc_auc_multiclass(scores);
    out["multiclass_auc"] = mc.value;
    out["multiclass_splits"] = mc.splits_used;
    out["multiclass_approximate"] = mc.approximate;
  } catch (const DegenerateLabels& e) {
    out["multiclass_auc"] = nullptr;
    out["multiclass_error"] = e.what();
  }
  out["samples"] = scores.size();
  return out;
}

json word_auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
  json out;
  out["words"] = scores.size();
  try {
    out["auc"] = roc_auc(scores, labels);
  } catch (const DegenerateLabels& e) {
    out["auc"] = nullptr;
    out["error"] = e.what();
  }
  return out;
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
    return;
  }
  if (j.is_number_float()) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(6) << j.get<double>();
    rows.emplace_back(prefix, os.str());
    return;
  }
  rows.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
}

void print_matrix(std::ostringstream& os, const Matrix& m, const std::vector<std::string>& row_names,
                  const std::vector<std::string>& col_names) {
  std::size_t w = 0;
  for (const auto& s : row_names) w = std::max(w, s.size());
  os << std::string(w, ' ');
  for (const auto& c : col_names) os << ' ' << std::setw(9) << c.substr(0, 9);
  os << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << std::setw(static_cast<int>(w)) << row_names[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << ' ' << std::setw(9) << std::setprecision(4) << m(i, j);
    os << '\n';
  }
}

void print_geometry(std::ostringstream& os, const char* label, const NullGeometry& g) {
  os << label << ": d_min=" << g.d_min << " c=" << g.c_center << " d=" << g.d
     << (g.fallback_used ? " (fallback)" : "") << '\n';
}

}  // namespace

void RunConfig::check() const {
  aligner.check();
  if (jobs < 1) throw Error("parallelism must be >= 1");
}

RunSummary process_records(std::istream& in, std::ostream& out, std::ostream& err,
                           const RunConfig& config, const RecordFn& fn, const FailureFn& on_failure) {
  RecordReader reader(in, config.read);
  RunSummary summary;
  const std::size_t batch_size = kRecordsPerWorker * static_cast<std::size_t>(std::max(1, config.jobs));
  bool exhausted = false;

  while (!exhausted) {
    std::vector<Slot> batch;
    while (batch.size() < batch_size) {
      Slot slot;
      try {
        slot.record = reader.next();
        if (!slot.record) {
          exhausted = true;
          break;
        }
        slot.id = slot.record->pair_id;
      } catch (const Error& e) {
        slot.id = "line " + std::to_string(reader.line());
        slot.read_error = e.what();
      }
      batch.push_back(std::move(slot));
      // Nothing past a bad record is needed in strict mode.
      if (config.strict && !batch.back().read_error.empty()) {
        exhausted = true;
        break;
      }
    }

    run_batch(batch, config.jobs, fn);

    for (auto& slot : batch) {
      ++summary.records;
      const std::string& error = slot.read_error.empty() ? slot.outcome.error : slot.read_error;
      if (!error.empty()) {
        ++summary.failed;
        err << "error: " << slot.id << ": " << error << '\n';
        if (config.strict) {
          summary.aborted = true;
          return summary;
        }
        out << on_failure(slot.id, error) << '\n';
        continue;
      }
      if (!slot.outcome.clean) ++summary.warned;
      out << slot.outcome.line << '\n';
    }
  }
  return summary;
}

RecordOutcome align_record(const SentencePairRecord& record, const RunConfig& config) {
  RecordOutcome outcome;
  const AlignmentMatrix a = align(record, config.aligner, &outcome.clean);
  outcome.line = to_pharaoh(a, config.emit_null);
  return outcome;
}

json detect_record(const SentencePairRecord& record, const RunConfig& config) {
  const OttawaResult r = ottawa_align(record, config.aligner);
  const DetectionScores s = detect(r, config.scores);
  json j;
  j["pair_id"] = record.pair_id;
  j["hallucination"] = s.hallucination;
  j["omission"] = s.omission;
  j["r_src"] = s.r_src;
  j["r_tgt"] = s.r_tgt;
  j["c_fwd"] = s.c_fwd;
  j["c_rev"] = s.c_rev;
  j["word_hallucination"] = to_std(s.word_hallucination);
  j["word_omission"] = to_std(s.word_omission);
  j["solver_warnings"] = solver_warnings(r);
  return j;
}

RunSummary run_align(std::istream& in, std::ostream& out, std::ostream& err, const RunConfig& config) {
  return process_records(
      in, out, err, config, [&](const SentencePairRecord& r) { return align_record(r, config); },
      [](const std::string&, const std::string&) { return std::string(); });
}

RunSummary run_detect(std::istream& in, std::ostream& out, std::ostream& err, const RunConfig& config) {
  return process_records(
      in, out, err, config,
      [&](const SentencePairRecord& r) {
        json j = detect_record(r, config);
        RecordOutcome o;
        o.clean = j["solver_warnings"].empty();
        o.line = j.dump();
        return o;
      },
      [](const std::string& id, const std::string& error) {
        return json{{"pair_id", id}, {"error", error}}.dump();
      });
}

json eval_aer(std::istream& predicted, std::istream& gold) {
  const auto pred_lines = read_lines(predicted);
  const auto gold_lines = read_lines(gold);
  if (pred_lines.size() != gold_lines.size()) {
    std::ostringstream os;
    const bool gold_short = gold_lines.size() < pred_lines.size();
    os << (gold_short ? "missing gold lines for sentence index" : "missing predicted lines for sentence index");
    const std::size_t lo = std::min(pred_lines.size(), gold_lines.size());
    const std::size_t hi = std::max(pred_lines.size(), gold_lines.size());
    for (std::size_t k = lo; k < hi; ++k) os << ' ' << k;
    throw JoinMismatch(os.str());
  }
  AerCounts total;
  for (std::size_t k = 0; k < pred_lines.size(); ++k)
    total += aer_counts(parse_pharaoh_line(pred_lines[k]), parse_gold_line(gold_lines[k]));
  return json{{"metric", "aer"},
              {"sentences", pred_lines.size()},
              {"aer", total.value()},
              {"a_and_s", total.a_and_s},
              {"a_and_p", total.a_and_p},
              {"predicted", total.a},
              {"sure", total.s}};
}

json eval_auc(std::istream& scores_in, std::istream& labels_in) {
  std::map<std::string, LabelRow> labels;
  for (const auto& line : read_lines(labels_in)) {
    if (is_blank(line)) continue;
    const json obj = json::parse(line);
    labels[obj.at("pair_id").get<std::string>()] = label_row(obj);
  }

  std::vector<std::pair<std::string, json>> scored;
  std::vector<std::string> unscored;
  for (const auto& line : read_lines(scores_in)) {
    if (is_blank(line)) continue;
    json obj = json::parse(line);
    std::string id = obj.at("pair_id").get<std::string>();
    if (obj.contains("error")) {
      unscored.push_back(id);
      continue;
    }
    scored.emplace_back(std::move(id), std::move(obj));
  }

  std::vector<std::string> missing_labels, missing_scores = unscored;
  std::map<std::string, bool> seen;
  for (const auto& [id, obj] : scored) {
    seen[id] = true;
    if (!labels.count(id)) missing_labels.push_back(id);
  }
  for (const auto& [id, row] : labels)
    if (!seen.count(id) && std::find(unscored.begin(), unscored.end(), id) == unscored.end())
      missing_scores.push_back(id);
  if (!missing_labels.empty() || !missing_scores.empty()) {
    std::ostringstream os;
    os << "join mismatch;";
    if (!missing_labels.empty()) {
      os << " no labels for:";
      for (const auto& id : missing_labels) os << ' ' << id;
      os << ';';
    }
    if (!missing_scores.empty()) {
      os << " no scores for:";
      for (const auto& id : missing_scores) os << ' ' << id;
    }
    throw JoinMismatch(os.str());
  }

  // Sorting by id makes the report independent of score-file order.
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<LabeledScore> hal, omi;
  std::vector<double> whal_s, womi_s;
  std::vector<bool> whal_l, womi_l;
  for (const auto& [id, obj] : scored) {
    const LabelRow& row = labels.at(id);
    if (row.hallucination) hal.push_back({obj.at("hallucination").get<double>(), *row.hallucination});
    if (row.omission) omi.push_back({obj.at("omission").get<double>(), *row.omission});
    auto add_words = [&](const std::optional<std::vector<int>>& lab, const char* key,
                         std::vector<double>& s, std::vector<bool>& l) {
      if (!lab) return;
      const auto ws = obj.at(key).get<std::vector<double>>();
      if (ws.size() != lab->size())
        throw JoinMismatch(id + ": " + key + " has " + std::to_string(ws.size()) + " scores for " +
                           std::to_string(lab->size()) + " labels");
      for (std::size_t k = 0; k < ws.size(); ++k) {
        s.push_back(ws[k]);
        l.push_back((*lab)[k] != 0);
      }
    };
    add_words(row.word_hallucination, "word_hallucination", whal_s, whal_l);
    add_words(row.word_omission, "word_omission", womi_s, womi_l);
  }

  json report{{"metric", "auc"}, {"pairs", scored.size()}};
  if (!hal.empty()) report["hallucination"] = sentence_auc(hal);
  if (!omi.empty()) report["omission"] = sentence_auc(omi);
  if (!whal_s.empty()) report["word_hallucination"] = word_auc(whal_s, whal_l);
  if (!womi_s.empty()) report["word_omission"] = word_auc(womi_s, womi_l);
  return report;
}

std::string report_text(const json& report) {
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(report, "", rows);
  std::size_t w = 0;
  for (const auto& r : rows) w = std::max(w, r.first.size());
  std::ostringstream os;
  for (const auto& [k, v] : rows) os << std::left << std::setw(static_cast<int>(w) + 2) << k << v << '\n';
  return os.str();
}

std::string inspect_record(const SentencePairRecord& record, const RunConfig& config) {
  const OttawaResult r = ottawa_align(record, config.aligner);
  const DetectionScores s = detect(r, config.scores);
  const Eigen::Index m = r.cost.rows(), n = r.cost.cols();

  auto words = [](const std::vector<std::string>& w, Eigen::Index count) {
    std::vector<std::string> out;
    for (Eigen::Index k = 0; k < count; ++k) {
      const auto idx = static_cast<std::size_t>(k);
      out.push_back(std::to_string(k) + ":" + (idx < w.size() ? w[idx] : std::string("?")));
    }
    return out;
  };
  auto src = words(record.src_words, m);
  auto tgt = words(record.tgt_words, n);

  std::ostringstream os;
  os << "pair " << record.pair_id << "  m=" << m << " n=" << n << " D=" << record.dim()
     << "  eps=" << config.aligner.solver.epsilon << "\n\ncost matrix\n";
  print_matrix(os, r.cost, src, tgt);
  os << '\n';
  print_geometry(os, "null source (reverse)", r.geom_rev);
  print_geometry(os, "null target (forward)", r.geom_fwd);

  auto src_null = src;
  src_null.push_back("NULL");
  auto tgt_null = tgt;
  tgt_null.push_back("NULL");
  os << "\nreverse plan (" << r.plan_rev.iterations << " it + " << r.plan_rev.newton_steps << " newton, residual " << r.plan_rev.marginal_residual
     << (r.plan_rev.converged ? "" : ", NOT converged") << ")\n";
  print_matrix(os, r.plan_rev.values, src_null, tgt);
  os << "\nforward plan (" << r.plan_fwd.iterations << " it + " << r.plan_fwd.newton_steps << " newton, residual " << r.plan_fwd.marginal_residual
     << (r.plan_fwd.converged ? "" : ", NOT converged") << ")\n";
  print_matrix(os, r.plan_fwd.values, src, tgt_null);

  os << "\nalignment  " << to_pharaoh(r.alignment, true) << '\n'
     << "hallucination " << s.hallucination << " (r_tgt " << s.r_tgt << " + c_rev " << s.c_rev << ")\n"
     << "omission      " << s.omission << " (r_src " << s.r_src << " + c_fwd " << s.c_fwd << ")\n";
  return os.str();
}

}  // namespace otto
