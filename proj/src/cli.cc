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

#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "shelfread/ctc.h"
#include "shelfread/decode.h"
#include "shelfread/gradcheck.h"
#include "shelfread/losses.h"
#include "shelfread/retrieval.h"
#include "shelfread/segment.h"
#include "shelfread/train.h"
#include "shelfread/utf8.h"

namespace shelfread {
namespace {

constexpr std::uint64_t kDefaultSeed = 1;

// Bad input files or values, as opposed to malformed command lines.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ifstream OpenIn(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

std::ofstream OpenOut(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

void PrintNumber(std::ostream& out, double v) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << v << '\n';
  out.precision(old);
}

Alphabet AlphabetFor(int class_count, const std::string& symbols) {
  if (symbols.empty()) return Alphabet::Default(class_count - 1);
  Alphabet a = Alphabet::FromUtf8(symbols);
  if (a.class_count() != class_count) {
    throw DataError("alphabet has " + std::to_string(a.label_count()) +
                    " symbols but the emissions have " + std::to_string(class_count - 1) +
                    " non-blank classes");
  }
  return a;
}

EmissionMatrix LoadEmissions(const std::string& path) {
  std::ifstream in = OpenIn(path);
  return ReadEmissionMatrix(in);
}

// --- ctc-loss -------------------------------------------------------------

struct CtcLossArgs {
  std::string emissions, target, alphabet;
};

void RunCtcLoss(const CtcLossArgs& a, std::ostream& out) {
  const EmissionMatrix x = LoadEmissions(a.emissions);
  const LabelSequence y = AlphabetFor(x.class_count(), a.alphabet).Encode(a.target);
  PrintNumber(out, -CtcLogProbability(x, y).value);
}

// --- gradcheck ------------------------------------------------------------

struct GradcheckArgs {
  std::string loss = "ctc";
  std::string level = "logits";
  std::uint64_t seed = kDefaultSeed;
  int timesteps = 6;
  int classes = 4;
  int hidden = 4;
  double lambda = 0.5;
  std::string emissions, target, frames, alphabet;
};

LogitLoss MakeLogitLoss(const std::string& kind, const LabelSequence& y,
                        const PerTimestepTarget& z, double lambda) {
  auto wrap = [](LossResult r) { return std::make_pair(r.loss, std::move(r.grad)); };
  if (kind == "ctc") return [=](const Matrix& l) { return wrap(CtcLossAndGrad(l, y)); };
  if (kind == "pt") return [=](const Matrix& l) { return wrap(PerTimestepLossAndGrad(l, z)); };
  if (kind == "combined") {
    return [=](const Matrix& l) { return wrap(CombinedLoss(l, y, z, lambda)); };
  }
  return [=](const Matrix& l) { return wrap(WctcLossAndGrad(l, y)); };
}

void RunGradcheck(const GradcheckArgs& a, std::ostream& out) {
  std::mt19937_64 rng(a.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix logits;
  LabelSequence y;
  PerTimestepTarget z;
  if (!a.emissions.empty()) {
    const EmissionMatrix x = LoadEmissions(a.emissions);
    const Alphabet alphabet = AlphabetFor(x.class_count(), a.alphabet);
    // Log-probabilities are valid logits; zeros are floored to stay finite.
    logits = x.probs().array().max(1e-300).log().matrix();
    y = alphabet.Encode(a.target);
    if (!a.frames.empty()) {
      for (char32_t c : utf8::Decode(a.frames)) {
        z.labels.push_back(c == U'-' ? kBlank : alphabet.Encode(utf8::Encode(c)).items.at(0));
      }
    } else if (a.loss == "pt" || a.loss == "combined") {
      throw DataError("--frames is required for the per-timestep losses with --emissions");
    }
    if (!z.labels.empty() && z.size() != x.timesteps()) {
      throw DataError("--frames length differs from the number of timesteps");
    }
  } else {
    if (a.timesteps < 1 || a.classes < 2) throw DataError("need --timesteps >= 1 and --classes >= 2");
    logits.resize(a.timesteps, a.classes);
    for (Eigen::Index i = 0; i < logits.size(); ++i) logits.data()[i] = 2.0 * normal(rng);
    // A random frame labelling; its collapse is the target, so the CTC
    // term is always feasible.
    z.labels.resize(a.timesteps);
    for (Label& l : z.labels) l = static_cast<Label>(rng() % static_cast<std::uint64_t>(a.classes));
    y = Collapse(z.labels);
  }

  const LogitLoss loss = MakeLogitLoss(a.loss, y, z, a.lambda);
  GradCheckReport report;
  if (a.level == "logits") {
    report = CheckLogitGradient(loss, logits);
  } else {
    const int classes = static_cast<int>(logits.cols());
    const SeqModel model = SeqModel::Random({classes, a.hidden, classes}, a.seed);
    Matrix input(logits.rows(), classes);
    for (Eigen::Index i = 0; i < input.size(); ++i) input.data()[i] = normal(rng);
    report = CheckModelGradient(model, input, loss);
  }
  PrintNumber(out, report.max_relative_error);
}

// --- decode ---------------------------------------------------------------

struct DecodeArgs {
  std::string emissions, alphabet;
  std::string method = "bestpath";
  int beam_width = 8;
};

void RunDecode(const DecodeArgs& a, std::ostream& out) {
  const EmissionMatrix x = LoadEmissions(a.emissions);
  const Alphabet alphabet = AlphabetFor(x.class_count(), a.alphabet);
  const DecodeResult r = a.method == "beam" ? BeamSearchDecode(x, a.beam_width) : BestPathDecode(x);
  out << alphabet.Decode(r.sequence) << '\n';
}

// --- train ----------------------------------------------------------------

struct TrainArgs {
  std::string loss = "ctc";
  std::uint64_t seed = kDefaultSeed;
  int epochs = 5;
  std::string out, checkpoint;
  SyntheticTaskConfig task;
  TrainConfig config;
  std::optional<double> lambda0;
};

void RunTrain(const TrainArgs& a, std::ostream& out, bool verbose, std::ostream& err) {
  TrainConfig cfg = a.config;
  cfg.loss_kind = *ParseLossKind(a.loss);
  cfg.seed = a.seed;
  cfg.epochs = a.epochs;
  cfg.lambda0 = a.lambda0;
  const SyntheticTask task = MakeSyntheticTask(a.seed, a.task);
  SeqModel model({1, 1, 1});
  const TrainingCurve curve = RunRegime(task, a.task, cfg, &model);
  if (verbose) err << "lambda0 " << curve.lambda0 << '\n';
  if (a.out.empty() || a.out == "-") {
    WriteCurveCsv(out, curve);
  } else {
    std::ofstream f = OpenOut(a.out);
    WriteCurveCsv(f, curve);
  }
  if (!a.checkpoint.empty()) {
    std::ofstream f = OpenOut(a.checkpoint, true);
    model.Save(f);
  }
}

// --- segment --------------------------------------------------------------

struct SegmentArgs {
  std::string saliency, out;
  std::optional<int> nms_window;
  double min_gap = SplitOptions::kDefaultMinGapScore;
};

void RunSegment(const SegmentArgs& a, std::ostream& out) {
  std::ifstream in = OpenIn(a.saliency);
  const SaliencyMap map(ReadGrid(in));
  SplitOptions opt;
  opt.nms_window = a.nms_window;
  opt.min_gap_score = a.min_gap;
  const SpineSegmentation seg = SplitSpines(map, opt);
  const std::string text = nlohmann::json(seg.boundaries).dump();
  if (a.out.empty() || a.out == "-") {
    out << text << '\n';
  } else {
    std::ofstream f = OpenOut(a.out);
    f << text << '\n';
  }
}

// --- index / query / eval -------------------------------------------------

InvertedIndex LoadIndex(const std::string& path) {
  std::ifstream in = OpenIn(path, true);
  return InvertedIndex::Load(in);
}

struct IndexArgs {
  std::string in, out;
};

void RunIndex(const IndexArgs& a, std::ostream& out) {
  std::ifstream in = OpenIn(a.in);
  const InvertedIndex index = InvertedIndex::Build(ReadBooksJsonl(in));
  std::ofstream f = OpenOut(a.out, true);
  index.Save(f);
  out << index.doc_count() << " records, " << index.vocabulary().size() << " terms\n";
}

struct QueryArgs {
  std::string index;
  std::vector<std::string> q;
  int k = 5;
  bool no_correct = false;
};

void RunQuery(const QueryArgs& a, std::ostream& out) {
  const InvertedIndex index = LoadIndex(a.index);
  QueryOptions opt;
  opt.correct = !a.no_correct;
  out << HitsToJson(Query(index, a.q, a.k, opt)) << '\n';
}

struct EvalArgs {
  std::string index, queries;
  std::vector<int> ks{1, 5};
  bool no_correct = false;
};

void RunEval(const EvalArgs& a, std::ostream& out) {
  const InvertedIndex index = LoadIndex(a.index);
  std::ifstream in = OpenIn(a.queries);
  const std::vector<EvalQuery> queries = ReadQueriesJsonl(in);
  QueryOptions opt;
  opt.correct = !a.no_correct;
  out << MetricsToJson(Evaluate(index, queries, a.ks, opt)) << '\n';
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Book-spine reading toolkit: CTC losses, decoding, training, segmentation and retrieval",
               "shelfread"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Diagnostics on stderr");

  std::function<void()> action;

  CtcLossArgs ctc;
  auto* c = app.add_subcommand("ctc-loss", "Print -log P(target | emissions)");
  c->add_option("--emissions", ctc.emissions, "Emission matrix file (\"T C\" then rows)")->required();
  c->add_option("--target", ctc.target, "Target string")->required();
  c->add_option("--alphabet", ctc.alphabet, "Non-blank symbols in class order");
  c->callback([&] { action = [&] { RunCtcLoss(ctc, out); }; });

  GradcheckArgs gc;
  auto* g = app.add_subcommand("gradcheck", "Print the max relative error against finite differences");
  g->add_option("--loss", gc.loss)->check(CLI::IsMember({"ctc", "pt", "combined", "wctc"}));
  g->add_option("--level", gc.level)->check(CLI::IsMember({"logits", "model"}));
  g->add_option("--seed", gc.seed);
  g->add_option("--timesteps", gc.timesteps);
  g->add_option("--classes", gc.classes, "Class count including blank");
  g->add_option("--hidden", gc.hidden, "Hidden size for --level model");
  g->add_option("--lambda", gc.lambda, "Weight of the per-timestep term for combined");
  g->add_option("--emissions", gc.emissions, "Check at log(emissions) instead of random logits");
  g->add_option("--target", gc.target);
  g->add_option("--frames", gc.frames, "Per-timestep labels, '-' for blank");
  g->add_option("--alphabet", gc.alphabet);
  g->callback([&] { action = [&] { RunGradcheck(gc, out); }; });

  DecodeArgs dec;
  auto* d = app.add_subcommand("decode", "Decode an emission matrix");
  d->add_option("--emissions", dec.emissions)->required();
  d->add_option("--method", dec.method)->check(CLI::IsMember({"bestpath", "beam"}));
  d->add_option("--beam-width", dec.beam_width)->check(CLI::PositiveNumber);
  d->add_option("--alphabet", dec.alphabet);
  d->callback([&] { action = [&] { RunDecode(dec, out); }; });

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train on the synthetic task and write the loss curve");
  t->add_option("--loss", tr.loss)
      ->check(CLI::IsMember({"ctc", "ctc_pt", "wctc_pt", "ctc+pt", "wctc+pt"}));
  t->add_option("--seed", tr.seed);
  t->add_option("--epochs", tr.epochs)->check(CLI::NonNegativeNumber);
  t->add_option("--out", tr.out, "Curve CSV (default stdout)");
  t->add_option("--checkpoint", tr.checkpoint, "Write the trained parameters here");
  t->add_option("--train-size", tr.task.train_size)->check(CLI::PositiveNumber);
  t->add_option("--val-size", tr.task.validation_size)->check(CLI::PositiveNumber);
  t->add_option("--alphabet-size", tr.task.alphabet_size)->check(CLI::Range(1, 36));
  t->add_option("--hidden", tr.task.hidden_dim)->check(CLI::PositiveNumber);
  t->add_option("--noise", tr.task.synth.noise_level)->check(CLI::NonNegativeNumber);
  t->add_option("--batch-size", tr.config.batch_size)->check(CLI::PositiveNumber);
  t->add_option("--lambda0", tr.lambda0, "Fixed lambda0; omit for the gradient-ratio rule")
      ->check(CLI::NonNegativeNumber);
  t->add_option("--decay", tr.config.lambda_decay);
  t->add_option("--wctc-switch", tr.config.wctc_switch_epoch, "0-based epoch WCTC starts");
  t->callback([&] { action = [&] { RunTrain(tr, out, verbose, err); }; });

  SegmentArgs seg;
  auto* s = app.add_subcommand("segment", "Split a saliency map into spines");
  s->add_option("--saliency", seg.saliency, "Grid file (\"H W\" then rows)")->required();
  s->add_option("--out", seg.out, "Boundaries JSON (default stdout)");
  s->add_option("--nms-window", seg.nms_window)->check(CLI::PositiveNumber);
  s->add_option("--min-gap", seg.min_gap);
  s->callback([&] { action = [&] { RunSegment(seg, out); }; });

  IndexArgs ix;
  auto* i = app.add_subcommand("index", "Build an index from JSON-lines book records");
  i->add_option("--in", ix.in)->required();
  i->add_option("--out", ix.out)->required();
  i->callback([&] { action = [&] { RunIndex(ix, out); }; });

  QueryArgs qa;
  auto* q = app.add_subcommand("query", "Ranked search");
  q->add_option("--index", qa.index)->required();
  q->add_option("--q", qa.q, "Keywords (repeatable)")->required();
  q->add_option("--k", qa.k)->check(CLI::PositiveNumber);
  q->add_flag("--no-correct", qa.no_correct, "Skip dictionary correction");
  q->callback([&] { action = [&] { RunQuery(qa, out); }; });

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Retrieval metrics over labelled queries");
  e->add_option("--index", ev.index)->required();
  e->add_option("--queries", ev.queries)->required();
  e->add_option("--ks", ev.ks)->delimiter(',')->check(CLI::PositiveNumber);
  e->add_flag("--no-correct", ev.no_correct);
  e->callback([&] { action = [&] { RunEval(ev, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex, err, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    action();
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return RunCli(args, out, err);
}

}  // namespace shelfread
