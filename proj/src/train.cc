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

#include "shelfread/train.h"

#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "shelfread/decode.h"

namespace shelfread {

std::string_view LossKindName(LossKind kind) {
  switch (kind) {
    case LossKind::kCtc:
      return "ctc";
    case LossKind::kCtcPt:
      return "ctc_pt";
    case LossKind::kWctcPt:
      return "wctc_pt";
  }
  return "unknown";
}

std::optional<LossKind> ParseLossKind(std::string_view name) {
  if (name == "ctc") return LossKind::kCtc;
  if (name == "ctc_pt" || name == "ctc+pt") return LossKind::kCtcPt;
  if (name == "wctc_pt" || name == "wctc+pt") return LossKind::kWctcPt;
  return std::nullopt;
}

EvalStats Evaluate(const SeqModel& model, const std::vector<SynthSample>& data) {
  EvalStats stats;
  double loss_sum = 0.0;
  long blanks = 0, frames = 0;
  int counted = 0;
  for (const SynthSample& s : data) {
    const Matrix logits = model.Forward(s.input);
    const EmissionMatrix x = EmissionMatrix::FromLogits(logits);
    for (Label l : ArgmaxPath(x.probs())) {
      blanks += l == kBlank;
      ++frames;
    }
    const CtcLogProb lp = CtcLogProbability(x, s.target);
    if (!lp.ok()) {
      ++stats.skipped;
      continue;
    }
    loss_sum -= lp.value;
    ++counted;
  }
  stats.mean_ctc = counted ? loss_sum / counted : std::numeric_limits<double>::quiet_NaN();
  stats.blank_fraction = frames ? static_cast<double>(blanks) / frames : 0.0;
  return stats;
}

namespace {

// Fisher-Yates with raw generator output so the permutation does not depend
// on the standard library's distributions.
void Shuffle(std::vector<int>& v, std::mt19937_64& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

double ResolveLambda0(const SeqModel& model, const std::vector<SynthSample>& train,
                      const std::vector<PerTimestepTarget>& pt, const TrainConfig& cfg) {
  if (cfg.lambda0) {
    if (*cfg.lambda0 < 0.0) throw std::invalid_argument("lambda0 must be >= 0");
    return *cfg.lambda0;
  }
  const int n = std::min<int>(cfg.lambda_init_samples, static_cast<int>(train.size()));
  std::vector<LambdaSample> batch;
  batch.reserve(n);
  for (int i = 0; i < n; ++i) {
    batch.push_back({model.Forward(train[i].input), train[i].target, pt[i]});
  }
  return InitialLambda(batch).lambda0;
}

}  // namespace

TrainingCurve Train(SeqModel& model, const std::vector<SynthSample>& train,
                    const std::vector<SynthSample>& validation, const TrainConfig& cfg) {
  if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (cfg.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (train.empty()) throw std::invalid_argument("training set is empty");

  std::vector<PerTimestepTarget> pt;
  pt.reserve(train.size());
  for (const SynthSample& s : train) pt.push_back(AssignPerTimestepLabels(s.spans));

  TrainingCurve curve;
  curve.loss_kind = cfg.loss_kind;
  const bool uses_pt = cfg.loss_kind != LossKind::kCtc;
  const double lambda0 = uses_pt ? ResolveLambda0(model, train, pt, cfg) : 0.0;
  curve.lambda0 = lambda0;
  std::optional<LambdaSchedule> schedule;
  if (lambda0 > 0.0) schedule.emplace(lambda0, cfg.lambda_decay);

  const std::vector<std::vector<int>> batches = BatchByLength(train, cfg.batch_size);
  std::vector<int> order(batches.size());
  for (size_t b = 0; b < order.size(); ++b) order[b] = static_cast<int>(b);
  std::mt19937_64 rng(cfg.seed);
  AdadeltaState state(model.parameter_count());
  Vector sample_grad;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (schedule) schedule->SetEpoch(epoch);
    const double lambda = schedule ? schedule->value() : 0.0;
    const bool wctc_active =
        cfg.loss_kind == LossKind::kWctcPt && epoch >= cfg.wctc_switch_epoch;
    const SequenceTerm term = wctc_active ? SequenceTerm::kWctc : SequenceTerm::kCtc;

    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.lambda = lambda;
    double ctc_sum = 0.0, pt_sum = 0.0, wctc_sum = 0.0;
    long seen = 0;

    Shuffle(order, rng);
    for (int b : order) {
      Vector grad = Vector::Zero(model.parameter_count());
      int used = 0;
      for (int i : batches[b]) {
        const SynthSample& s = train[i];
        LossComponents comp;
        const bool ok = model.ForwardBackward(
            s.input,
            [&](const Matrix& logits) -> std::optional<Matrix> {
              LossResult r = CombinedLoss(logits, s.target, pt[i], lambda, term);
              if (!r.ok()) return std::nullopt;
              comp = r.components;
              return std::move(r.grad);
            },
            sample_grad);
        if (!ok) {
          ++rec.skipped;
          continue;
        }
        grad += sample_grad;
        ++used;
        ctc_sum += comp.ctc;
        pt_sum += comp.pt;
        wctc_sum += comp.wctc;
        ++seen;
      }
      if (used == 0) continue;
      grad /= static_cast<double>(used);

      const Vector before = model.parameters();
      const AdadeltaState saved = state;
      AdadeltaStep(model.mutable_parameters(), grad, state);
      if (!model.ParametersFinite()) {
        model.mutable_parameters() = before;
        state = saved;
        ++rec.nonfinite_steps;
      }
    }
    if (seen > 0) {
      rec.train_ctc = ctc_sum / seen;
      rec.train_pt = pt_sum / seen;
      rec.train_wctc = wctc_active ? wctc_sum / seen : 0.0;
    }
    const EvalStats val = Evaluate(model, validation);
    rec.val_ctc = val.mean_ctc;
    rec.val_blank_fraction = val.blank_fraction;
    curve.epochs.push_back(rec);
  }
  return curve;
}

SyntheticTask MakeSyntheticTask(std::uint64_t seed, const SyntheticTaskConfig& config) {
  Alphabet alphabet = Alphabet::Default(config.alphabet_size);
  std::vector<SynthSample> train =
      GenerateSynthetic(seed * 1000 + 1, alphabet, config.train_size, config.synth);
  std::vector<SynthSample> validation =
      GenerateSynthetic(seed * 1000 + 2, alphabet, config.validation_size, config.synth);
  return {std::move(alphabet), std::move(train), std::move(validation)};
}

TrainingCurve RunRegime(const SyntheticTask& task, const SyntheticTaskConfig& task_config,
                        const TrainConfig& config, SeqModel* trained) {
  const int classes = task.alphabet.class_count();
  SeqModel model = SeqModel::Random({classes, task_config.hidden_dim, classes}, config.seed);
  TrainingCurve curve = Train(model, task.train, task.validation, config);
  if (trained) *trained = std::move(model);
  return curve;
}

void WriteCurveCsv(std::ostream& out, const TrainingCurve& curve) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "epoch,ctc,pt,lambda,wctc,val_ctc,val_blank\n";
  for (const EpochRecord& r : curve.epochs) {
    out << r.epoch << ',' << r.train_ctc << ',' << r.train_pt << ',' << r.lambda << ','
        << r.train_wctc << ',' << r.val_ctc << ',' << r.val_blank_fraction << '\n';
  }
  out.precision(old);
}

}  // namespace shelfread
