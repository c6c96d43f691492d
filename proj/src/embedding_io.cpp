#include "otto/embedding_io.h"

#include <istream>
#include <ostream>

namespace otto {

namespace {

using nlohmann::json;

Matrix matrix_from_json(const json& rows, const char* field) {
  if (!rows.is_array()) throw Error(std::string(field) + " must be an array of rows");
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  if (n_rows == 0) return Matrix(0, 0);
  if (!rows[0].is_array()) throw Error(std::string(field) + " rows must be arrays");
  const auto n_cols = static_cast<Eigen::Index>(rows[0].size());
  Matrix out(n_rows, n_cols);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n_cols)
      throw DimensionMismatch(std::string(field) + ": ragged row " + std::to_string(i));
    for (Eigen::Index k = 0; k < n_cols; ++k) {
      const json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) throw Error(std::string(field) + ": non-numeric entry");
      out(i, k) = v.get<double>();
    }
  }
  return out;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

WordEmbeddings side_from_json(const json& obj, const char* words_key, const char* emb_key,
                              const char* map_key, std::vector<std::string>& words_out,
                              const ReadOptions& options) {
  if (!obj.contains(words_key)) throw Error(std::string("missing field ") + words_key);
  if (!obj.contains(emb_key)) throw Error(std::string("missing field ") + emb_key);
  words_out = obj.at(words_key).get<std::vector<std::string>>();
  Matrix emb = matrix_from_json(obj.at(emb_key), emb_key);

  if (obj.contains(map_key) && !obj.at(map_key).is_null()) {
    TokenizedSide side{words_out, std::move(emb), obj.at(map_key).get<std::vector<int>>()};
    return pool_to_words(side, options.normalize_before_pool);
  }
  if (emb.rows() != static_cast<Eigen::Index>(words_out.size()))
    throw DimensionMismatch(std::string(emb_key) + " has " + std::to_string(emb.rows()) +
                            " rows for " + std::to_string(words_out.size()) + " words");
  return emb;
}

}  // namespace

WordEmbeddings pool_to_words(const TokenizedSide& side, bool normalize_tokens) {
  const auto num_words = static_cast<Eigen::Index>(side.words.size());
  const Matrix& tokens = side.token_embeddings;
  if (static_cast<Eigen::Index>(side.token_to_word.size()) != tokens.rows())
    throw DimensionMismatch("token_to_word has " + std::to_string(side.token_to_word.size()) +
                            " entries for " + std::to_string(tokens.rows()) + " token rows");

  WordEmbeddings pooled = WordEmbeddings::Zero(num_words, tokens.cols());
  std::vector<int> counts(static_cast<std::size_t>(num_words), 0);
  for (Eigen::Index t = 0; t < tokens.rows(); ++t) {
    const int w = side.token_to_word[static_cast<std::size_t>(t)];
    if (w < 0 || w >= num_words)
      throw MappingGap("token " + std::to_string(t) + " maps to word " + std::to_string(w) +
                       " outside [0, " + std::to_string(num_words) + ")");
    if (normalize_tokens) {
      const double norm = tokens.row(t).norm();
      if (norm < kMinRowNorm) throw ZeroNormWord("token " + std::to_string(t) + " has zero norm");
      pooled.row(w) += tokens.row(t) / norm;
    } else {
      pooled.row(w) += tokens.row(t);
    }
    ++counts[static_cast<std::size_t>(w)];
  }
  for (Eigen::Index w = 0; w < num_words; ++w) {
    const int c = counts[static_cast<std::size_t>(w)];
    if (c == 0) throw MappingGap("word " + std::to_string(w) + " receives no tokens");
    pooled.row(w) /= static_cast<double>(c);
    if (pooled.row(w).norm() < kMinRowNorm)
      throw ZeroNormWord("word " + std::to_string(w) + " pools to a zero vector");
  }
  return pooled;
}

void validate(const SentencePairRecord& r) {
  if (r.src.rows() < 1 || r.tgt.rows() < 1)
    throw DimensionMismatch(r.pair_id + ": both sides need at least one word");
  if (r.src.cols() != r.tgt.cols())
    throw DimensionMismatch(r.pair_id + ": src D=" + std::to_string(r.src.cols()) +
                            " but tgt D=" + std::to_string(r.tgt.cols()));
  if (r.src.cols() < 2) throw DimensionMismatch(r.pair_id + ": embedding dimension must be >= 2");
  if (!r.src.allFinite() || !r.tgt.allFinite())
    throw Error(r.pair_id + ": non-finite embedding entry");
  for (Eigen::Index i = 0; i < r.src.rows(); ++i)
    if (r.src.row(i).norm() < kMinRowNorm)
      throw ZeroNormWord(r.pair_id + ": source word " + std::to_string(i) + " has zero norm");
  for (Eigen::Index j = 0; j < r.tgt.rows(); ++j)
    if (r.tgt.row(j).norm() < kMinRowNorm)
      throw ZeroNormWord(r.pair_id + ": target word " + std::to_string(j) + " has zero norm");
}

SentencePairRecord parse_record(const std::string& json_line, const ReadOptions& options) {
  json obj = json::parse(json_line);
  if (!obj.is_object()) throw Error("record is not a JSON object");
  SentencePairRecord r;
  r.pair_id = obj.at("pair_id").get<std::string>();
  r.src = side_from_json(obj, "src_words", "src_emb", "src_token_to_word", r.src_words, options);
  r.tgt = side_from_json(obj, "tgt_words", "tgt_emb", "tgt_token_to_word", r.tgt_words, options);
  if (obj.contains("labels")) r.labels = obj.at("labels");
  validate(r);
  return r;
}

std::string format_record(const SentencePairRecord& r) {
  json obj;
  obj["pair_id"] = r.pair_id;
  obj["src_words"] = r.src_words;
  obj["tgt_words"] = r.tgt_words;
  obj["src_emb"] = matrix_to_json(r.src);
  obj["tgt_emb"] = matrix_to_json(r.tgt);
  if (!r.labels.is_null()) obj["labels"] = r.labels;
  return obj.dump();
}

RecordReader::RecordReader(std::istream& in, ReadOptions options)
    : in_(&in), options_(options) {}

std::optional<SentencePairRecord> RecordReader::next() {
  std::string text;
  while (std::getline(*in_, text)) {
    ++line_;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;

    SentencePairRecord record;
    try {
      record = parse_record(text, options_);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_, e.what());
    } catch (const ZeroNormWord& e) {
      throw ZeroNormWord("line " + std::to_string(line_) + ": " + e.what());
    } catch (const MappingGap& e) {
      throw MappingGap("line " + std::to_string(line_) + ": " + e.what());
    } catch (const DimensionMismatch& e) {
      throw DimensionMismatch("line " + std::to_string(line_) + ": " + e.what());
    } catch (const Error& e) {
      throw ParseError(line_, e.what());
    }

    if (options_.require_uniform_dim) {
      if (!uniform_dim_) uniform_dim_ = record.src.cols();
      if (record.src.cols() != *uniform_dim_)
        throw DimensionMismatch("line " + std::to_string(line_) + ": D=" +
                                std::to_string(record.src.cols()) + " differs from stream D=" +
                                std::to_string(*uniform_dim_));
    }
    return record;
  }
  return std::nullopt;
}

std::vector<SentencePairRecord> read_records(const std::string& path, ReadOptions options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  RecordReader reader(in, options);
  std::vector<SentencePairRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  return out;
}

void write_records(const std::string& path, const std::vector<SentencePairRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  for (const auto& r : records) out << format_record(r) << '\n';
}

}  // namespace otto
