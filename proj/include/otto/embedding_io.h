#pragma once

#include <cstddef>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "otto/types.h"

namespace otto {

// Word vectors, one row per word (m x D).
using WordEmbeddings = Matrix;

// Subword-level view of one sentence before pooling.
struct TokenizedSide {
  std::vector<std::string> words;
  Matrix token_embeddings;            // num_tokens x D
  std::vector<int> token_to_word;     // one word index per token row
};

struct SentencePairRecord {
  std::string pair_id;
  std::vector<std::string> src_words;
  std::vector<std::string> tgt_words;
  WordEmbeddings src;  // m x D
  WordEmbeddings tgt;  // n x D
  nlohmann::json labels;  // carried through untouched; null when absent

  std::size_t src_len() const { return static_cast<std::size_t>(src.rows()); }
  std::size_t tgt_len() const { return static_cast<std::size_t>(tgt.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(src.cols()); }
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ZeroNormWord : public Error {
 public:
  using Error::Error;
};

class MappingGap : public Error {
 public:
  using Error::Error;
};

// Rows below this norm are rejected rather than repaired.
inline constexpr double kMinRowNorm = 1e-12;

// Mean-pools token rows into word rows. With normalize_tokens set, every token
// row is scaled to unit length first.
WordEmbeddings pool_to_words(const TokenizedSide& side, bool normalize_tokens = false);

// Throws ZeroNormWord / DimensionMismatch if the record violates the
// SentencePairRecord invariants.
void validate(const SentencePairRecord& record);

struct ReadOptions {
  bool normalize_before_pool = false;
  // Reject records whose D differs from the first record's D.
  bool require_uniform_dim = false;
};

// Streams records from line-delimited JSON. Blank lines are skipped. A record
// that fails to parse or validate throws (ParseError, ZeroNormWord,
// MappingGap, DimensionMismatch); the reader stays positioned after the
// offending line so the caller may continue.
class RecordReader {
 public:
  explicit RecordReader(std::istream& in, ReadOptions options = {});

  std::optional<SentencePairRecord> next();

  // 1-based line number of the most recently consumed line.
  std::size_t line() const { return line_; }

 private:
  std::istream* in_;
  ReadOptions options_;
  std::size_t line_ = 0;
  std::optional<Eigen::Index> uniform_dim_;
};

SentencePairRecord parse_record(const std::string& json_line, const ReadOptions& options = {});
std::string format_record(const SentencePairRecord& record);

// Reads a whole file; throws on the first bad record.
std::vector<SentencePairRecord> read_records(const std::string& path, ReadOptions options = {});
void write_records(const std::string& path, const std::vector<SentencePairRecord>& records);

}  // namespace otto
