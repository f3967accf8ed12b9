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

#include "shelfread/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shelfread {

double RelativeError(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

namespace {

void Accumulate(GradCheckReport& r, double analytic, double numeric) {
  r.max_relative_error = std::max(r.max_relative_error, RelativeError(analytic, numeric));
  r.max_abs_error = std::max(r.max_abs_error, std::abs(analytic - numeric));
  ++r.entries;
}

double FiniteValue(const LogitLoss& loss, const Matrix& logits) {
  const double v = loss(logits).first;
  if (!std::isfinite(v)) throw std::invalid_argument("loss is not finite at the probe point");
  return v;
}

}  // namespace

GradCheckReport CheckLogitGradient(const LogitLoss& loss, const Matrix& logits, double step) {
  const auto [value, grad] = loss(logits);
  if (!std::isfinite(value)) throw std::invalid_argument("loss is infeasible at these logits");
  GradCheckReport report;
  Matrix probe = logits;
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      const double orig = probe(t, c);
      probe(t, c) = orig + step;
      const double up = FiniteValue(loss, probe);
      probe(t, c) = orig - step;
      const double down = FiniteValue(loss, probe);
      probe(t, c) = orig;
      Accumulate(report, grad(t, c), (up - down) / (2.0 * step));
    }
  }
  return report;
}

GradCheckReport CheckModelGradient(const SeqModel& model, const Matrix& input,
                                   const LogitLoss& loss, int max_params, double step) {
  Vector analytic;
  const bool ok = model.ForwardBackward(
      input,
      [&](const Matrix& logits) -> std::optional<Matrix> {
        auto [v, g] = loss(logits);
        if (!std::isfinite(v)) return std::nullopt;
        return std::move(g);
      },
      analytic);
  if (!ok) throw std::invalid_argument("loss is infeasible for this model output");

  const Eigen::Index n = model.parameter_count();
  const Eigen::Index count = max_params <= 0 ? n : std::min<Eigen::Index>(n, max_params);
  SeqModel probe = model;
  GradCheckReport report;
  for (Eigen::Index i = 0; i < count; ++i) {
    const Eigen::Index p = count == n ? i : (i * n) / count;
    const double orig = probe.parameters()[p];
    probe.mutable_parameters()[p] = orig + step;
    const double up = FiniteValue(loss, probe.Forward(input));
    probe.mutable_parameters()[p] = orig - step;
    const double down = FiniteValue(loss, probe.Forward(input));
    probe.mutable_parameters()[p] = orig;
    Accumulate(report, analytic[p], (up - down) / (2.0 * step));
  }
  return report;
}

}  // namespace shelfread
