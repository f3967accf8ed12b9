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

#ifndef SHELFREAD_TRAIN_H_
#define SHELFREAD_TRAIN_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shelfread/losses.h"
#include "shelfread/model.h"
#include "shelfread/synthgen.h"

namespace shelfread {

enum class LossKind { kCtc, kCtcPt, kWctcPt };

std::string_view LossKindName(LossKind kind);
std::optional<LossKind> ParseLossKind(std::string_view name);

struct TrainConfig {
  LossKind loss_kind = LossKind::kCtc;
  // Unset: derive lambda0 from gradient magnitudes at the start of training.
  // Zero disables the per-timestep term entirely.
  std::optional<double> lambda0;
  double lambda_decay = LambdaSchedule::kDefaultDecay;
  // 0-based epoch from which wctc_pt trains on WCTC instead of CTC.
  int wctc_switch_epoch = 2;
  int batch_size = 16;
  int epochs = 5;
  std::uint64_t seed = 1;
  // Samples used by the automatic lambda0 rule.
  int lambda_init_samples = 64;
};

struct EpochRecord {
  int epoch = 0;            // 1-based
  double train_ctc = 0.0;   // mean over the epoch's feasible training samples
  double train_pt = 0.0;
  double lambda = 0.0;      // 0 for plain ctc
  double train_wctc = 0.0;  // mean WCTC value seen while the WCTC term is active
  double val_ctc = 0.0;     // mean plain CTC loss on validation data
  double val_blank_fraction = 0.0;  // best-path timesteps that are blank
  int skipped = 0;          // infeasible samples
  int nonfinite_steps = 0;  // optimizer steps rejected by the NaN guard
};

struct TrainingCurve {
  LossKind loss_kind = LossKind::kCtc;
  double lambda0 = 0.0;
  std::vector<EpochRecord> epochs;
};

struct EvalStats {
  double mean_ctc = 0.0;
  double blank_fraction = 0.0;
  int skipped = 0;
};

// Mean CTC loss and best-path blank fraction of `model` over `data`.
EvalStats Evaluate(const SeqModel& model, const std::vector<SynthSample>& data);

// Mini-batch Adadelta training over length-grouped batches. Batch order is
// reshuffled each epoch from config.seed, so regimes sharing a seed see the
// same data order. Validation always reports plain CTC.
TrainingCurve Train(SeqModel& model, const std::vector<SynthSample>& train,
                    const std::vector<SynthSample>& validation, const TrainConfig& config);

struct SyntheticTaskConfig {
  int train_size = 2000;
  int validation_size = 500;
  int alphabet_size = 26;
  int hidden_dim = 64;
  SynthConfig synth;
};

struct SyntheticTask {
  Alphabet alphabet;
  std::vector<SynthSample> train;
  std::vector<SynthSample> validation;
};

// Training and validation sets drawn from generator seeds seed * 1000 + 1 and
// seed * 1000 + 2 over Alphabet::Default(alphabet_size).
SyntheticTask MakeSyntheticTask(std::uint64_t seed, const SyntheticTaskConfig& config);

// Trains a fresh SeqModel::Random(shape, config.seed) on the task. The model
// is returned through `trained` when given.
TrainingCurve RunRegime(const SyntheticTask& task, const SyntheticTaskConfig& task_config,
                        const TrainConfig& config, SeqModel* trained = nullptr);

// Header "epoch,ctc,pt,lambda,wctc,val_ctc,val_blank" and one row per epoch.
void WriteCurveCsv(std::ostream& out, const TrainingCurve& curve);

}  // namespace shelfread

#endif  // SHELFREAD_TRAIN_H_
