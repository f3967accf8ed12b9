/* Copyright 2026 The Shelfread Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "shelfread/cli.h"

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"
#include "shelfread/ctc.h"
#include "shelfread/retrieval.h"
#include "shelfread/train.h"
#include "support/corpus.h"

namespace shelfread {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("shelfread_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  std::string Write(const std::string& name, const std::string& text) const {
    std::ofstream(Path(name)) << text;
    return Path(name);
  }

  int Run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return RunCli(args, out_, err_);
  }

  std::string out() const { return out_.str(); }
  std::string err() const { return err_.str(); }

 private:
  fs::path dir_;
  std::ostringstream out_, err_;
};

std::string Exact(double v) {
  std::ostringstream s;
  s.precision(std::numeric_limits<double>::max_digits10);
  s << v << '\n';
  return s.str();
}

constexpr const char* kEmissions = "3 3\n0.5 0.3 0.2\n0.2 0.6 0.2\n0.4 0.1 0.5\n";

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(Run({}), kExitUsage);
  EXPECT_EQ(Run({"no-such-command"}), kExitUsage);
  EXPECT_EQ(Run({"ctc-loss", "--target", "ab"}), kExitUsage);
  EXPECT_EQ(Run({"decode", "--emissions", "x", "--bogus"}), kExitUsage);
  EXPECT_EQ(Run({"gradcheck", "--loss", "mse"}), kExitUsage);
  EXPECT_FALSE(err().empty());
}

TEST_F(CliTest, HelpExitsZero) {
  EXPECT_EQ(Run({"--help"}), kExitOk);
  EXPECT_EQ(Run({"train", "--help"}), kExitOk);
}

TEST_F(CliTest, CtcLossEqualsLibrary) {
  const std::string e = Write("e.txt", kEmissions);
  ASSERT_EQ(Run({"ctc-loss", "--emissions", e, "--target", "ab"}), kExitOk) << err();
  std::ifstream in(e);
  const EmissionMatrix x = ReadEmissionMatrix(in);
  EXPECT_EQ(out(), Exact(-CtcLogProbability(x, LabelSequence{{1, 2}}).value));

  ASSERT_EQ(Run({"ctc-loss", "--emissions", e, "--target", "yx", "--alphabet", "xy"}), kExitOk);
  EXPECT_EQ(out(), Exact(-CtcLogProbability(x, LabelSequence{{2, 1}}).value));
}

TEST_F(CliTest, DataErrorsExitTwo) {
  EXPECT_EQ(Run({"ctc-loss", "--emissions", Path("missing.txt"), "--target", "a"}), kExitData);
  const std::string e = Write("e.txt", kEmissions);
  EXPECT_EQ(Run({"ctc-loss", "--emissions", e, "--target", "a", "--alphabet", "xyz"}), kExitData);
  EXPECT_EQ(Run({"ctc-loss", "--emissions", e, "--target", "q"}), kExitData);
  const std::string bad = Write("bad.txt", "2 2\n0.5 0.5\n");
  EXPECT_EQ(Run({"decode", "--emissions", bad}), kExitData);
}

TEST_F(CliTest, DecodeBestPathAndBeam) {
  const std::string e = Write("e.txt", "2 2\n0.6 0.4\n0.6 0.4\n");
  ASSERT_EQ(Run({"decode", "--emissions", e}), kExitOk);
  EXPECT_EQ(out(), "\n");
  ASSERT_EQ(Run({"decode", "--emissions", e, "--method", "beam"}), kExitOk);
  EXPECT_EQ(out(), "a\n");
}

TEST_F(CliTest, GradcheckReportsSmallError) {
  for (const char* loss : {"ctc", "pt", "combined", "wctc"}) {
    ASSERT_EQ(Run({"gradcheck", "--loss", loss, "--seed", "3"}), kExitOk) << loss;
    EXPECT_LT(std::stod(out()), 1e-4) << loss;
  }
  ASSERT_EQ(Run({"gradcheck", "--loss", "ctc", "--level", "model"}), kExitOk);
  EXPECT_LT(std::stod(out()), 1e-3);
}

TEST_F(CliTest, TrainWritesOneRowPerEpoch) {
  const std::string csv = Path("c.csv");
  ASSERT_EQ(Run({"train", "--loss", "ctc_pt", "--epochs", "5", "--out", csv, "--train-size", "40",
                 "--val-size", "10", "--hidden", "8", "--alphabet-size", "6"}),
            kExitOk)
      << err();
  std::ifstream in(csv);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0], "epoch,ctc,pt,lambda,wctc,val_ctc,val_blank");
  EXPECT_EQ(lines[5].substr(0, 2), "5,");

  // Same run through the library, byte for byte.
  SyntheticTaskConfig task;
  task.train_size = 40;
  task.validation_size = 10;
  task.hidden_dim = 8;
  task.alphabet_size = 6;
  TrainConfig cfg;
  cfg.loss_kind = LossKind::kCtcPt;
  cfg.epochs = 5;
  cfg.seed = 1;
  std::ostringstream lib;
  WriteCurveCsv(lib, RunRegime(MakeSyntheticTask(1, task), task, cfg));
  std::ifstream again(csv);
  std::stringstream file;
  file << again.rdbuf();
  EXPECT_EQ(file.str(), lib.str());
}

TEST_F(CliTest, TrainRejectsUnknownLoss) {
  EXPECT_EQ(Run({"train", "--loss", "mse"}), kExitUsage);
}

TEST_F(CliTest, SegmentPrintsBoundaries) {
  std::ostringstream grid;
  grid << "2 20\n";
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 20; ++c) grid << (c >= 8 && c < 11 ? 0.0 : 0.9) << ' ';
    grid << '\n';
  }
  const std::string s = Write("s.txt", grid.str());
  ASSERT_EQ(Run({"segment", "--saliency", s}), kExitOk) << err();
  EXPECT_EQ(out(), "[9]\n");
  const std::string j = Path("b.json");
  ASSERT_EQ(Run({"segment", "--saliency", s, "--out", j}), kExitOk);
  std::ifstream in(j);
  EXPECT_EQ(nlohmann::json::parse(in), nlohmann::json::parse("[9]"));
  const std::string bad = Write("bad.txt", "1 2\n0.5 7\n");
  EXPECT_EQ(Run({"segment", "--saliency", bad}), kExitData);
}

TEST_F(CliTest, IndexQueryEvalMatchLibrary) {
  const std::vector<BookRecord> books = testing::GenerateCorpus(9, {.records = 200});
  {
    std::ofstream f(Path("books.jsonl"));
    WriteBooksJsonl(f, books);
  }
  std::vector<EvalQuery> queries;
  for (int i = 0; i < 60; ++i) queries.push_back({{books[i].title}, books[i].id});
  {
    std::ofstream f(Path("q.jsonl"));
    WriteQueriesJsonl(f, queries);
  }
  const std::string bin = Path("index.bin");
  ASSERT_EQ(Run({"index", "--in", Path("books.jsonl"), "--out", bin}), kExitOk) << err();
  const InvertedIndex idx = InvertedIndex::Build(books);

  ASSERT_EQ(Run({"query", "--index", bin, "--q", books[3].title, "--k", "3"}), kExitOk);
  const std::vector<std::string> kw = {books[3].title};
  EXPECT_EQ(out(), HitsToJson(Query(idx, kw, 3)) + "\n");

  ASSERT_EQ(Run({"eval", "--index", bin, "--queries", Path("q.jsonl"), "--ks", "1,5"}), kExitOk);
  const std::vector<int> ks = {1, 5};
  EXPECT_EQ(out(), MetricsToJson(Evaluate(idx, queries, ks)) + "\n");
  const double mrr = nlohmann::json::parse(out())["mrr"];
  EXPECT_EQ(mrr, Evaluate(idx, queries, ks).mrr);

  const std::string dup = Write("dup.jsonl",
                                "{\"id\":\"1\",\"title\":\"a\",\"meta\":[]}\n"
                                "{\"id\":\"1\",\"title\":\"b\",\"meta\":[]}\n");
  EXPECT_EQ(Run({"index", "--in", dup, "--out", Path("d.bin")}), kExitData);
  const std::string unknown = Write("u.jsonl", "{\"keywords\":\"x\",\"truth\":\"nope\"}\n");
  EXPECT_EQ(Run({"eval", "--index", bin, "--queries", unknown}), kExitData);
}

}  // namespace
}  // namespace shelfread
