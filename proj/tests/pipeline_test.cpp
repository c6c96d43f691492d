#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "otto/pipeline.h"
#include "synthetic.h"

namespace otto {
namespace {

using nlohmann::json;

std::string corpus(std::mt19937_64& rng, int count, int dim = 16) {
  std::ostringstream os;
  for (int k = 0; k < count; ++k) {
    const int m = synthetic::uniform_int(rng, 1, 9), n = synthetic::uniform_int(rng, 1, 9);
    os << format_record(synthetic::make_record("pair" + std::to_string(k), synthetic::gaussian(rng, m, dim),
                                               synthetic::gaussian(rng, n, dim)))
       << '\n';
  }
  return os.str();
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

const char* kZeroNorm =
    R"({"pair_id":"zero","src_words":["a"],"tgt_words":["x"],"src_emb":[[0,0]],"tgt_emb":[[0,1]]})";

TEST(RunConfig, Validation) {
  RunConfig c;
  EXPECT_NO_THROW(c.check());
  c.jobs = 0;
  EXPECT_THROW(c.check(), Error);
}

TEST(RunAlign, EmptyInput) {
  std::istringstream in("");
  std::ostringstream out, err;
  const auto s = run_align(in, out, err, {});
  EXPECT_EQ(out.str(), "");
  EXPECT_EQ(s.records, 0u);
  EXPECT_EQ(s.exit_code(), 0);
}

TEST(RunAlign, OneLinePerRecordInOrder) {
  std::mt19937_64 rng(1);
  const std::string text = corpus(rng, 3);
  std::istringstream in(text);
  std::ostringstream out, err;
  RunConfig cfg;
  const auto s = run_align(in, out, err, cfg);
  EXPECT_EQ(s.records, 3u);
  EXPECT_EQ(s.failed, 0u);
  const auto lines = lines_of(out.str());
  ASSERT_EQ(lines.size(), 3u);
  std::istringstream again(text);
  RecordReader reader(again);
  for (const auto& line : lines) EXPECT_EQ(line, align_record(*reader.next(), cfg).line);
}

TEST(RunAlign, BadRecordGetsPlaceholderLine) {
  std::mt19937_64 rng(2);
  std::istringstream in(corpus(rng, 1) + kZeroNorm + "\n" + corpus(rng, 1));
  std::ostringstream out, err;
  const auto s = run_align(in, out, err, {});
  EXPECT_EQ(s.records, 3u);
  EXPECT_EQ(s.failed, 1u);
  EXPECT_EQ(s.exit_code(), 2);
  const auto lines = lines_of(out.str());
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[1], "");
  EXPECT_NE(err.str().find("zero"), std::string::npos);
}

TEST(RunAlign, StrictStopsWithoutWritingTheBadRecord) {
  std::mt19937_64 rng(3);
  std::istringstream in(corpus(rng, 2) + kZeroNorm + "\n" + corpus(rng, 2));
  std::ostringstream out, err;
  RunConfig cfg;
  cfg.strict = true;
  const auto s = run_align(in, out, err, cfg);
  EXPECT_TRUE(s.aborted);
  EXPECT_EQ(s.exit_code(), 2);
  EXPECT_EQ(lines_of(out.str()).size(), 2u);
}

TEST(RunDetect, SchemaAndErrorObjects) {
  std::mt19937_64 rng(4);
  std::istringstream in(corpus(rng, 2) + "{broken\n");
  std::ostringstream out, err;
  run_detect(in, out, err, {});
  const auto lines = lines_of(out.str());
  ASSERT_EQ(lines.size(), 3u);
  const json first = json::parse(lines[0]);
  for (const char* key : {"pair_id", "hallucination", "omission", "r_src", "r_tgt", "c_fwd", "c_rev",
                          "word_hallucination", "word_omission", "solver_warnings"})
    EXPECT_TRUE(first.contains(key)) << key;
  EXPECT_EQ(first["pair_id"], "pair0");
  const json bad = json::parse(lines[2]);
  EXPECT_TRUE(bad.contains("error"));
  EXPECT_EQ(bad["pair_id"], "line 3");
}

TEST(RunDetect, IdentityCorpusIsClean) {
  std::mt19937_64 rng(5);
  std::ostringstream text;
  for (int k = 0; k < 10; ++k) {
    const Matrix e = synthetic::gaussian(rng, synthetic::uniform_int(rng, 2, 15), 32);
    text << format_record(synthetic::make_record("id" + std::to_string(k), e, e)) << '\n';
  }
  std::istringstream in(text.str());
  std::ostringstream out, err;
  run_detect(in, out, err, {});
  for (const auto& line : lines_of(out.str())) {
    const json j = json::parse(line);
    EXPECT_LE(j["hallucination"].get<double>(), 0.05);
    EXPECT_LE(j["omission"].get<double>(), 0.05);
  }
}

// Property: output bytes do not depend on the worker count.
TEST(ProcessRecords, JobsDoNotChangeOutput) {
  std::mt19937_64 rng(6);
  const std::string text = corpus(rng, 150) + kZeroNorm + "\n" + corpus(rng, 20);
  std::string reference;
  for (int jobs : {1, 2, 3, 8}) {
    RunConfig cfg;
    cfg.jobs = jobs;
    std::istringstream in(text);
    std::ostringstream out, err;
    run_detect(in, out, err, cfg);
    if (jobs == 1)
      reference = out.str();
    else
      EXPECT_EQ(out.str(), reference) << "jobs=" << jobs;
  }
  EXPECT_EQ(lines_of(reference).size(), 171u);
}

TEST(EvalAer, JoinsByLine) {
  std::istringstream pred("0-0 1-1\n0-0\n\n");
  std::istringstream gold("0-0 1?1\n1-1\n\n");
  const json r = eval_aer(pred, gold);
  EXPECT_EQ(r["sentences"], 3);
  EXPECT_EQ(r["a_and_s"], 1);
  EXPECT_EQ(r["a_and_p"], 2);
  EXPECT_DOUBLE_EQ(r["aer"].get<double>(), 1.0 - 3.0 / 5.0);
}

TEST(EvalAer, MissingGoldLineIsNamed) {
  std::istringstream pred("0-0\n1-1\n2-2\n");
  std::istringstream gold("0-0\n1-1\n");
  try {
    eval_aer(pred, gold);
    FAIL();
  } catch (const JoinMismatch& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
}

std::string labels_for(const std::vector<std::pair<std::string, int>>& rows) {
  std::ostringstream os;
  for (const auto& [id, h] : rows) os << json{{"pair_id", id}, {"hallucination", h}, {"omission", 3 - h}}.dump() << '\n';
  return os.str();
}

TEST(EvalAuc, PerfectScoresAndShuffledJoin) {
  std::vector<std::string> score_lines;
  std::vector<std::pair<std::string, int>> labels;
  for (int k = 0; k < 12; ++k) {
    const int h = k % 4;
    labels.emplace_back("p" + std::to_string(k), h);
    score_lines.push_back(json{{"pair_id", "p" + std::to_string(k)}, {"hallucination", h + 0.1 * k},
                               {"omission", 3 - h + 0.01 * k}}.dump());
  }
  auto joined = [&](const std::vector<std::string>& s) {
    std::string text;
    for (const auto& l : s) text += l + "\n";
    std::istringstream a(text), b(labels_for(labels));
    return eval_auc(a, b);
  };
  const json ordered = joined(score_lines);
  EXPECT_DOUBLE_EQ(ordered["hallucination"]["binary_auc"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(ordered["omission"]["binary_auc"].get<double>(), 1.0);
  EXPECT_EQ(ordered["hallucination"]["samples"], 12);

  std::mt19937_64 rng(7);
  auto shuffled = score_lines;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  EXPECT_EQ(joined(shuffled), ordered);
}

TEST(EvalAuc, MissingLabelIsNamed) {
  std::istringstream scores(R"({"pair_id":"a","hallucination":0.1,"omission":0.2})"
                            "\n"
                            R"({"pair_id":"lonely","hallucination":0.3,"omission":0.2})");
  std::istringstream labels(labels_for({{"a", 0}}));
  try {
    eval_auc(scores, labels);
    FAIL();
  } catch (const JoinMismatch& e) {
    EXPECT_NE(std::string(e.what()).find("lonely"), std::string::npos);
  }
}

TEST(EvalAuc, ReportRendersAsText) {
  std::istringstream scores(R"({"pair_id":"a","hallucination":0.1,"omission":0.2})"
                            "\n"
                            R"({"pair_id":"b","hallucination":0.3,"omission":0.1})");
  std::istringstream labels(labels_for({{"a", 0}, {"b", 2}}));
  const std::string text = report_text(eval_auc(scores, labels));
  EXPECT_NE(text.find("hallucination.binary_auc"), std::string::npos);
  EXPECT_NE(text.find("1.000000"), std::string::npos);
}

TEST(Inspect, MentionsNullGeometryAndAlignment) {
  std::mt19937_64 rng(8);
  const auto rec = synthetic::make_record("x", synthetic::gaussian(rng, 2, 8), synthetic::gaussian(rng, 3, 8));
  const std::string text = inspect_record(rec, {});
  EXPECT_NE(text.find("d_min="), std::string::npos);
  EXPECT_NE(text.find("x"), std::string::npos);
}

}  // namespace
}  // namespace otto
