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

// Central finite-difference checks of analytic loss gradients, at the logits
// level and through the sequence model's parameters.

#ifndef SHELFREAD_GRADCHECK_H_
#define SHELFREAD_GRADCHECK_H_

#include <functional>

#include "shelfread/model.h"
#include "shelfread/seqcore.h"

namespace shelfread {

inline constexpr double kDefaultFdStep = 1e-5;
// Denominator floor so entries that are zero up to rounding do not report
// huge relative errors.
inline constexpr double kRelativeErrorFloor = 1e-6;

// |a - n| / max(|a|, |n|, floor).
double RelativeError(double analytic, double numeric, double floor = kRelativeErrorFloor);

struct GradCheckReport {
  double max_relative_error = 0.0;
  double max_abs_error = 0.0;
  int entries = 0;
};

// loss(logits) returns (value, analytic gradient). Throws std::invalid_argument
// when the loss is infeasible at `logits`.
using LogitLoss = std::function<std::pair<double, Matrix>(const Matrix&)>;

GradCheckReport CheckLogitGradient(const LogitLoss& loss, const Matrix& logits,
                                   double step = kDefaultFdStep);

// End to end: parameters -> model logits -> loss. Checks every parameter when
// max_params <= 0, otherwise an evenly spaced subset of that size.
GradCheckReport CheckModelGradient(const SeqModel& model, const Matrix& input,
                                   const LogitLoss& loss, int max_params = 0,
                                   double step = kDefaultFdStep);

}  // namespace shelfread

#endif  // SHELFREAD_GRADCHECK_H_
