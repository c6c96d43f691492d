#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "otto/aligners.h"
#include "otto/detection.h"
#include "otto/embedding_io.h"
#include "otto/evaluation.h"

namespace otto {

struct RunConfig {
  AlignerChoice aligner;
  ScoreOptions scores;
  ReadOptions read;
  bool emit_null = false;
  bool strict = false;
  int jobs = 1;

  void check() const;
};

class JoinMismatch : public Error {
 public:
  using Error::Error;
};

struct RunSummary {
  std::size_t records = 0;
  std::size_t failed = 0;
  std::size_t warned = 0;  // records that produced solver warnings
  bool aborted = false;  // strict mode stopped at the first failure

  int exit_code() const { return failed > 0 ? 2 : 0; }
};

// Per-record output: the line to write, or an error message.
struct RecordOutcome {
  std::string line;
  std::string error;
  bool clean = true;  // no solver warnings
};

using RecordFn = std::function<RecordOutcome(const SentencePairRecord&)>;
using FailureFn = std::function<std::string(const std::string& pair_id, const std::string& error)>;

// Reads records from `in`, applies `fn` on `jobs` worker threads and writes
// one line per record to `out` in input order. Unreadable or failing records
// are reported on `err`; without strict they are replaced by `on_failure`'s
// line, with strict the run stops and nothing is written for that record.
RunSummary process_records(std::istream& in, std::ostream& out, std::ostream& err,
                           const RunConfig& config, const RecordFn& fn, const FailureFn& on_failure);

RecordOutcome align_record(const SentencePairRecord& record, const RunConfig& config);

// Detection JSON: pair_id, hallucination, omission, r_src, r_tgt, c_fwd,
// c_rev, word_hallucination, word_omission, solver_warnings.
nlohmann::json detect_record(const SentencePairRecord& record, const RunConfig& config);

RunSummary run_align(std::istream& in, std::ostream& out, std::ostream& err, const RunConfig& config);
RunSummary run_detect(std::istream& in, std::ostream& out, std::ostream& err, const RunConfig& config);

// AER of Pharaoh predictions against gold lines, joined by line index.
nlohmann::json eval_aer(std::istream& predicted, std::istream& gold);

// Hallucination/omission AUC of detect output against labels, joined by
// pair_id. Label lines carry integer "hallucination"/"omission" classes either
// at top level or under "labels" (so embedding records work as label files);
// optional "word_hallucination"/"word_omission" 0/1 arrays add word-level AUC.
nlohmann::json eval_auc(std::istream& scores, std::istream& labels);

// Aligned-column plain-text rendering of an eval report.
std::string report_text(const nlohmann::json& report);

// Human-readable dump of one record under the OTTAWA pipeline.
std::string inspect_record(const SentencePairRecord& record, const RunConfig& config);

}  // namespace otto
