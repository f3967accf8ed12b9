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

// A small bidirectional gated recurrent sequence model with a linear output
// head, hand-written backpropagation and an Adadelta optimizer.
//
// Each direction runs a GRU cell
//
//   z = sigmoid(Wz x + Uz h + bz)
//   r = sigmoid(Wr x + Ur h + br)
//   n = tanh(Wn x + Un (r * h) + bn)
//   h' = (1 - z) * n + z * h
//
// and the head maps [h_forward; h_backward] to C logits per timestep. All
// parameters live in one flat vector so optimizers, finite-difference checks
// and checkpoints treat them uniformly.

#ifndef SHELFREAD_MODEL_H_
#define SHELFREAD_MODEL_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>

#include "shelfread/seqcore.h"

namespace shelfread {

struct ModelShape {
  int input_dim = 0;
  int hidden_dim = 64;
  int class_count = 0;
  bool operator==(const ModelShape&) const = default;
};

class SeqModel {
 public:
  // All-zero parameters. Throws std::invalid_argument on non-positive dims.
  explicit SeqModel(ModelShape shape);
  // Uniform(-1/sqrt(H), 1/sqrt(H)) initialisation from a fixed seed.
  static SeqModel Random(ModelShape shape, std::uint64_t seed);

  const ModelShape& shape() const { return shape_; }
  Eigen::Index parameter_count() const { return params_.size(); }
  const Vector& parameters() const { return params_; }
  Vector& mutable_parameters() { return params_; }
  bool ParametersFinite() const { return params_.allFinite(); }

  // T x input_dim -> T x class_count logits. Throws std::invalid_argument on
  // a column mismatch or an empty sequence.
  Matrix Forward(const Matrix& input) const;

  // Gradient of sum(upstream .* Forward(input)) with respect to parameters().
  Vector Backward(const Matrix& input, const Matrix& upstream) const;

  // One forward pass, then backpropagates upstream_of(logits). Returns false
  // and leaves `grad` untouched when upstream_of declines (returns nullopt).
  bool ForwardBackward(const Matrix& input,
                       const std::function<std::optional<Matrix>(const Matrix&)>& upstream_of,
                       Vector& grad) const;

  // Versioned flat binary: magic, version, shape, count, raw doubles.
  void Save(std::ostream& out) const;
  static SeqModel Load(std::istream& in);

 private:
  struct Trace;
  Matrix ForwardImpl(const Matrix& input, Trace* trace) const;
  Vector BackwardFromTrace(const Trace& trace, const Matrix& upstream) const;

  ModelShape shape_;
  Vector params_;
};

struct AdadeltaState {
  static constexpr double kDefaultRho = 0.95;
  static constexpr double kDefaultEpsilon = 1e-6;

  explicit AdadeltaState(Eigen::Index size, double rho = kDefaultRho,
                         double epsilon = kDefaultEpsilon)
      : mean_sq_grad(Vector::Zero(size)),
        mean_sq_update(Vector::Zero(size)),
        rho(rho),
        epsilon(epsilon) {}

  Vector mean_sq_grad;
  Vector mean_sq_update;
  double rho;
  double epsilon;
};

// One Adadelta step in place:
//   E[g^2] <- rho E[g^2] + (1 - rho) g^2
//   dx      = -sqrt(E[dx^2] + eps) / sqrt(E[g^2] + eps) * g
//   E[dx^2] <- rho E[dx^2] + (1 - rho) dx^2
// Returns the applied update dx.
Vector AdadeltaStep(Vector& params, const Vector& grads, AdadeltaState& state);

}  // namespace shelfread

#endif  // SHELFREAD_MODEL_H_
