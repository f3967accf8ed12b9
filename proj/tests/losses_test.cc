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

#include "shelfread/losses.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "shelfread/decode.h"
#include "support/oracles.h"

namespace shelfread {
namespace {

Matrix RandomLogits(std::mt19937_64& rng, int T, int C) {
  std::normal_distribution<double> n(0, 1.5);
  Matrix m(T, C);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

TEST(AssignPerTimestepLabelsTest, OverlapMustExceedHalfTheSpan) {
  CharSpanAnnotation ann;
  ann.spans = {{1, {0, 6}}, {2, {6, 12}}};
  ann.receptive_fields = {{0, 8}, {3, 11}, {6, 12}};
  EXPECT_EQ(AssignPerTimestepLabels(ann).labels, (std::vector<Label>{1, 2, 2}));
}

TEST(AssignPerTimestepLabelsTest, EqualOverlapGoesToFirstSpan) {
  CharSpanAnnotation ann;
  ann.spans = {{1, {0, 4}}, {2, {4, 8}}};
  ann.receptive_fields = {{0, 8}, {0, 8}};
  EXPECT_EQ(AssignPerTimestepLabels(ann).labels, (std::vector<Label>{1, 1}));
}

TEST(AssignPerTimestepLabelsTest, LargestOverlapWins) {
  CharSpanAnnotation ann;
  ann.spans = {{1, {0, 2}}, {2, {2, 8}}};
  ann.receptive_fields = {{0, 8}};
  EXPECT_EQ(AssignPerTimestepLabels(ann).labels, (std::vector<Label>{2}));
}

TEST(AssignPerTimestepLabelsTest, NoSpansOrZeroWidthGiveBlanks) {
  CharSpanAnnotation ann;
  ann.receptive_fields = {{0, 3}, {1, 4}};
  EXPECT_EQ(AssignPerTimestepLabels(ann).labels, (std::vector<Label>{0, 0}));
  ann.spans = {{1, {2, 2}}};
  EXPECT_EQ(AssignPerTimestepLabels(ann).labels, (std::vector<Label>{0, 0}));
}

TEST(AssignPerTimestepLabelsTest, UnitReceptiveFieldsCannotClaimWideSpans) {
  // One-frame fields cover exactly half of a two-frame span, which is not
  // strictly more than half.
  CharSpanAnnotation ann;
  ann.spans = {{1, {0, 2}}, {2, {2, 4}}};
  ann.receptive_fields = {{0, 1}, {1, 2}, {2, 3}, {3, 4}};
  EXPECT_EQ(AssignPerTimestepLabels(ann).labels, (std::vector<Label>{0, 0, 0, 0}));
}

TEST(PerTimestepLossTest, OneHotCorrectIsZero) {
  Matrix logits = Matrix::Constant(2, 3, -800.0);
  logits(0, 1) = 0;
  logits(1, 2) = 0;
  const LossResult r = PerTimestepLossAndGrad(logits, {{1, 2}});
  EXPECT_EQ(r.loss, 0.0);
}

TEST(PerTimestepLossTest, UniformIsLn2) {
  const LossResult r = PerTimestepLossAndGrad(Matrix::Zero(2, 2), {{0, 1}});
  EXPECT_NEAR(r.loss, std::log(2.0), 1e-15);
}

TEST(PerTimestepLossTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    const int T = 1 + static_cast<int>(rng() % 8), C = 2 + static_cast<int>(rng() % 5);
    const Matrix logits = RandomLogits(rng, T, C);
    PerTimestepTarget z;
    for (int t = 0; t < T; ++t) z.labels.push_back(static_cast<int>(rng() % C));
    const LossResult r = PerTimestepLossAndGrad(logits, z);
    const Matrix fd = oracle::NumericGradient(
        [&](const Matrix& l) { return PerTimestepLossAndGrad(l, z).loss; }, logits);
    EXPECT_LT(oracle::MaxRelativeError(r.grad, fd), 1e-4);
  }
}

TEST(PerTimestepLossTest, LengthMismatchThrows) {
  EXPECT_THROW(PerTimestepLossAndGrad(Matrix::Zero(3, 2), {{0, 1}}), std::invalid_argument);
}

TEST(CombinedLossTest, ZeroLambdaIsPlainCtc) {
  std::mt19937_64 rng(9);
  const Matrix logits = RandomLogits(rng, 5, 3);
  const LabelSequence y{{1, 2}};
  const PerTimestepTarget z{{0, 1, 1, 0, 2}};
  const LossResult c = CombinedLoss(logits, y, z, 0.0);
  const LossResult ctc = CtcLossAndGrad(logits, y);
  EXPECT_EQ(c.loss, ctc.loss);
  EXPECT_EQ(c.grad, ctc.grad);
}

TEST(CombinedLossTest, UnitLambdaAddsComponents) {
  std::mt19937_64 rng(10);
  const Matrix logits = RandomLogits(rng, 5, 3);
  const LabelSequence y{{1, 2}};
  const PerTimestepTarget z{{0, 1, 1, 0, 2}};
  const LossResult c = CombinedLoss(logits, y, z, 1.0);
  const LossResult ctc = CtcLossAndGrad(logits, y);
  const LossResult pt = PerTimestepLossAndGrad(logits, z);
  EXPECT_NEAR(c.loss, ctc.loss + pt.loss, 1e-13);
  EXPECT_LT((c.grad - ctc.grad - pt.grad).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(c.components.ctc, ctc.loss);
  EXPECT_EQ(c.components.pt, pt.loss);
  EXPECT_EQ(c.components.lambda, 1.0);
}

TEST(CombinedLossTest, ScheduleValueIsUsed) {
  std::mt19937_64 rng(12);
  const Matrix logits = RandomLogits(rng, 4, 3);
  LambdaSchedule s(3.0);
  s.Advance();
  const LossResult c = CombinedLoss(logits, {{1}}, {{0, 1, 1, 0}}, s);
  EXPECT_EQ(c.components.lambda, 1.5);
}

TEST(CombinedLossTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 30; ++i) {
    const int T = 2 + static_cast<int>(rng() % 6), C = 2 + static_cast<int>(rng() % 4);
    const Matrix logits = RandomLogits(rng, T, C);
    PerTimestepTarget z;
    for (int t = 0; t < T; ++t) z.labels.push_back(static_cast<int>(rng() % C));
    const LabelSequence y = Collapse(z.labels);
    const LossResult r = CombinedLoss(logits, y, z, 0.8);
    const Matrix fd = oracle::NumericGradient(
        [&](const Matrix& l) { return CombinedLoss(l, y, z, 0.8).loss; }, logits);
    EXPECT_LT(oracle::MaxRelativeError(r.grad, fd), 1e-4);
  }
}

TEST(CombinedLossTest, PropagatesInfeasibility) {
  const LossResult r = CombinedLoss(Matrix::Zero(1, 3), {{1, 1}}, {{1}}, 0.5);
  EXPECT_FALSE(r.ok());
}

TEST(LambdaScheduleTest, DecaysGeometrically) {
  LambdaSchedule s(8.0, 0.5);
  EXPECT_EQ(s.value(), 8.0);
  s.Advance();
  EXPECT_EQ(s.value(), 4.0);
  EXPECT_EQ(s.ValueAt(3), 1.0);
  EXPECT_THROW(LambdaSchedule(0.0), std::invalid_argument);
  EXPECT_THROW(LambdaSchedule(1.0, 1.5), std::invalid_argument);
}

TEST(InitialLambdaTest, RatioOfMeanGradientNorms) {
  std::mt19937_64 rng(21);
  std::vector<LambdaSample> batch;
  double ctc_norm = 0, pt_norm = 0;
  for (int i = 0; i < 6; ++i) {
    const Matrix logits = RandomLogits(rng, 6, 4);
    PerTimestepTarget z;
    for (int t = 0; t < 6; ++t) z.labels.push_back(static_cast<int>(rng() % 4));
    const LabelSequence y = Collapse(z.labels);
    batch.push_back({logits, y, z});
    // Independent recomputation through finite differences.
    ctc_norm += oracle::NumericGradient([&](const Matrix& l) { return CtcLossAndGrad(l, y).loss; },
                                        logits).norm();
    pt_norm += oracle::NumericGradient(
                   [&](const Matrix& l) { return PerTimestepLossAndGrad(l, z).loss; }, logits)
                   .norm();
  }
  const LambdaInit init = InitialLambda(batch);
  EXPECT_FALSE(init.degenerate);
  EXPECT_NEAR(init.lambda0, ctc_norm / pt_norm, 1e-6 * init.lambda0);
  EXPECT_NEAR(init.mean_ctc_grad_norm, ctc_norm / 6, 1e-6);
}

TEST(InitialLambdaTest, VanishingPerTimestepGradientFallsBackToOne) {
  Matrix logits = Matrix::Constant(2, 2, -800.0);
  logits(0, 1) = 0;
  logits(1, 1) = 0;
  std::vector<LambdaSample> batch{{logits, {{1}}, {{1, 1}}}};
  const LambdaInit init = InitialLambda(batch);
  EXPECT_TRUE(init.degenerate);
  EXPECT_EQ(init.lambda0, 1.0);
}

TEST(WctcTest, CorrectDecodingZeroesLossAndGradient) {
  Matrix logits = Matrix::Constant(3, 3, -2.0);
  logits(0, 1) = 3;
  logits(1, 0) = 3;
  logits(2, 2) = 3;
  const LossResult r = WctcLossAndGrad(logits, {{1, 2}});
  EXPECT_EQ(r.components.edit_distance, 0);
  EXPECT_EQ(r.loss, 0.0);
  EXPECT_TRUE((r.grad.array() == 0.0).all());
}

TEST(WctcTest, DistanceTwoDoublesCtc) {
  // Best path decodes to "b" against target "aa": one substitution and one
  // deletion.
  Matrix logits = Matrix::Constant(4, 3, 0.0);
  logits(0, 2) = 2;
  logits(1, 0) = 2;
  logits(2, 0) = 2;
  logits(3, 0) = 2;
  const LabelSequence y{{1, 1}};
  ASSERT_EQ(BestPathDecode(EmissionMatrix::FromLogits(logits)).sequence.items, (std::vector<Label>{2}));
  const LossResult w = WctcLossAndGrad(logits, y);
  const LossResult c = CtcLossAndGrad(logits, y);
  EXPECT_EQ(w.components.edit_distance, 2);
  EXPECT_EQ(w.loss, 2.0 * c.loss);
  EXPECT_EQ(w.grad, 2.0 * c.grad);
}

TEST(WctcTest, GradientMatchesFiniteDifferencesAtFixedDecoding) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 30; ++i) {
    const int T = 2 + static_cast<int>(rng() % 6), C = 2 + static_cast<int>(rng() % 4);
    const Matrix logits = RandomLogits(rng, T, C);
    LabelSequence y;
    for (int j = 0; j < 2; ++j) y.items.push_back(1 + static_cast<int>(rng() % (C - 1)));
    if (MinAlignmentLength(y) > T) continue;
    const LossResult r = WctcLossAndGrad(logits, y);
    const Matrix fd = oracle::NumericGradient(
        [&](const Matrix& l) { return WctcLossAndGrad(l, y).loss; }, logits);
    EXPECT_LT(oracle::MaxRelativeError(r.grad, fd), 1e-4);
  }
}

}  // namespace
}  // namespace shelfread
