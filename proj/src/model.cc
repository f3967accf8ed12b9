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

#include "shelfread/model.h"

#include <array>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

namespace shelfread {
namespace {

using ColMatrix = Eigen::MatrixXd;
using ConstMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>>;
using MutMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>>;

constexpr char kMagic[4] = {'S', 'R', 'S', 'M'};
constexpr std::uint32_t kFormatVersion = 1;

// Offsets of each tensor inside the flat parameter vector. Matrices are
// stored column-major.
struct Layout {
  explicit Layout(const ModelShape& s) : H(s.hidden_dim), D(s.input_dim), C(s.class_count) {
    Eigen::Index off = 0;
    for (int d = 0; d < 2; ++d) {
      wx[d] = off;
      off += 3 * H * D;
      wh[d] = off;
      off += 3 * H * H;
      b[d] = off;
      off += 3 * H;
    }
    wo = off;
    off += C * 2 * H;
    bo = off;
    off += C;
    total = off;
  }
  Eigen::Index H, D, C;
  std::array<Eigen::Index, 2> wx{}, wh{}, b{};
  Eigen::Index wo = 0, bo = 0, total = 0;
};

double Sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Uniform in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double UnitUniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

// Activations of one forward pass, indexed by timestep in input order.
struct SeqModel::Trace {
  ColMatrix input;                  // D x T
  std::array<ColMatrix, 2> h_prev;  // H x T
  std::array<ColMatrix, 2> z, r, n; // H x T
  ColMatrix features;               // 2H x T, [h_fwd; h_bwd]
};

SeqModel::SeqModel(ModelShape shape) : shape_(shape) {
  if (shape.input_dim < 1 || shape.hidden_dim < 1 || shape.class_count < 1) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  params_ = Vector::Zero(Layout(shape).total);
}

SeqModel SeqModel::Random(ModelShape shape, std::uint64_t seed) {
  SeqModel m(shape);
  std::mt19937_64 rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(shape.hidden_dim));
  for (Eigen::Index i = 0; i < m.params_.size(); ++i) {
    m.params_[i] = (2.0 * UnitUniform(rng) - 1.0) * scale;
  }
  return m;
}

Matrix SeqModel::Forward(const Matrix& input) const { return ForwardImpl(input, nullptr); }

Matrix SeqModel::ForwardImpl(const Matrix& input, Trace* trace) const {
  if (input.cols() != shape_.input_dim) {
    throw std::invalid_argument("input has " + std::to_string(input.cols()) +
                                " columns, model expects " +
                                std::to_string(shape_.input_dim));
  }
  if (input.rows() < 1) throw std::invalid_argument("input sequence is empty");
  const Layout L(shape_);
  const Eigen::Index H = L.H, T = input.rows();
  const double* p = params_.data();

  ColMatrix x = input.transpose();
  ColMatrix features(2 * H, T);
  for (int d = 0; d < 2; ++d) {
    ConstMap wx(p + L.wx[d], 3 * H, L.D);
    ConstMap wh(p + L.wh[d], 3 * H, H);
    Eigen::Map<const Vector> b(p + L.b[d], 3 * H);
    const ColMatrix gx = (wx * x).colwise() + b;

    ColMatrix z(H, T), r(H, T), n(H, T), hp(H, T);
    Vector h = Vector::Zero(H);
    for (Eigen::Index k = 0; k < T; ++k) {
      const Eigen::Index t = d == 0 ? k : T - 1 - k;
      const Vector gzr = gx.col(t).head(2 * H) + wh.topRows(2 * H) * h;
      const Vector zt = gzr.head(H).unaryExpr(&Sigmoid);
      const Vector rt = gzr.tail(H).unaryExpr(&Sigmoid);
      const Vector nt = (gx.col(t).tail(H) + wh.bottomRows(H) * rt.cwiseProduct(h))
                            .array().tanh().matrix();
      hp.col(t) = h;
      h = (1.0 - zt.array()) * nt.array() + zt.array() * h.array();
      z.col(t) = zt;
      r.col(t) = rt;
      n.col(t) = nt;
      features.block(d * H, t, H, 1) = h;
    }
    if (trace) {
      trace->h_prev[d] = std::move(hp);
      trace->z[d] = std::move(z);
      trace->r[d] = std::move(r);
      trace->n[d] = std::move(n);
    }
  }

  ConstMap wo(p + L.wo, L.C, 2 * H);
  Eigen::Map<const Vector> bo(p + L.bo, L.C);
  const ColMatrix out = (wo * features).colwise() + bo;
  if (trace) {
    trace->input = std::move(x);
    trace->features = std::move(features);
  }
  return out.transpose();
}

Vector SeqModel::Backward(const Matrix& input, const Matrix& upstream) const {
  Trace tr;
  ForwardImpl(input, &tr);
  return BackwardFromTrace(tr, upstream);
}

bool SeqModel::ForwardBackward(
    const Matrix& input,
    const std::function<std::optional<Matrix>(const Matrix&)>& upstream_of,
    Vector& grad) const {
  Trace tr;
  const Matrix logits = ForwardImpl(input, &tr);
  std::optional<Matrix> upstream = upstream_of(logits);
  if (!upstream) return false;
  grad = BackwardFromTrace(tr, *upstream);
  return true;
}

Vector SeqModel::BackwardFromTrace(const Trace& tr, const Matrix& upstream) const {
  const Eigen::Index T = tr.input.cols();
  if (upstream.rows() != T || upstream.cols() != shape_.class_count) {
    throw std::invalid_argument("upstream gradient shape mismatch");
  }
  const Layout L(shape_);
  const Eigen::Index H = L.H;
  const double* p = params_.data();
  Vector grad = Vector::Zero(L.total);
  double* g = grad.data();

  const ColMatrix gout = upstream.transpose();  // C x T
  ConstMap wo(p + L.wo, L.C, 2 * H);
  MutMap(g + L.wo, L.C, 2 * H).noalias() = gout * tr.features.transpose();
  Eigen::Map<Vector>(g + L.bo, L.C) = gout.rowwise().sum();
  const ColMatrix dfeat = wo.transpose() * gout;  // 2H x T

  for (int d = 0; d < 2; ++d) {
    ConstMap wh(p + L.wh[d], 3 * H, H);
    const ColMatrix& z = tr.z[d];
    const ColMatrix& r = tr.r[d];
    const ColMatrix& n = tr.n[d];
    const ColMatrix& hp = tr.h_prev[d];

    ColMatrix dgate(3 * H, T);
    ColMatrix rh(H, T);
    Vector dh_next = Vector::Zero(H);
    for (Eigen::Index k = T - 1; k >= 0; --k) {
      const Eigen::Index t = d == 0 ? k : T - 1 - k;
      const Vector dh = dfeat.block(d * H, t, H, 1) + dh_next;
      const auto zt = z.col(t).array();
      const auto rt = r.col(t).array();
      const auto nt = n.col(t).array();
      const auto hpt = hp.col(t).array();

      const Vector dgn = (dh.array() * (1.0 - zt) * (1.0 - nt.square())).matrix();
      const Vector drh = wh.bottomRows(H).transpose() * dgn;
      const Vector dgz = (dh.array() * (hpt - nt) * zt * (1.0 - zt)).matrix();
      const Vector dgr = (drh.array() * hpt * rt * (1.0 - rt)).matrix();

      dgate.block(0, t, H, 1) = dgz;
      dgate.block(H, t, H, 1) = dgr;
      dgate.block(2 * H, t, H, 1) = dgn;
      rh.col(t) = (rt * hpt).matrix();

      dh_next = (dh.array() * zt + drh.array() * rt).matrix() +
                wh.topRows(H).transpose() * dgz + wh.middleRows(H, H).transpose() * dgr;
    }

    MutMap dwx(g + L.wx[d], 3 * H, L.D);
    MutMap dwh(g + L.wh[d], 3 * H, H);
    dwx.noalias() = dgate * tr.input.transpose();
    dwh.topRows(2 * H).noalias() = dgate.topRows(2 * H) * hp.transpose();
    dwh.bottomRows(H).noalias() = dgate.bottomRows(H) * rh.transpose();
    Eigen::Map<Vector>(g + L.b[d], 3 * H) = dgate.rowwise().sum();
  }
  return grad;
}

void SeqModel::Save(std::ostream& out) const {
  auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
  out.write(kMagic, sizeof kMagic);
  put_u32(kFormatVersion);
  put_u32(static_cast<std::uint32_t>(shape_.input_dim));
  put_u32(static_cast<std::uint32_t>(shape_.hidden_dim));
  put_u32(static_cast<std::uint32_t>(shape_.class_count));
  const auto count = static_cast<std::uint64_t>(params_.size());
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  out.write(reinterpret_cast<const char*>(params_.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
  if (!out) throw std::runtime_error("failed to write model checkpoint");
}

SeqModel SeqModel::Load(std::istream& in) {
  char magic[4];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw std::runtime_error("not a model checkpoint");
  }
  auto get_u32 = [&] {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
  };
  const std::uint32_t version = get_u32();
  if (version != kFormatVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  }
  ModelShape shape;
  shape.input_dim = static_cast<int>(get_u32());
  shape.hidden_dim = static_cast<int>(get_u32());
  shape.class_count = static_cast<int>(get_u32());
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof count);
  if (!in) throw std::runtime_error("truncated checkpoint header");
  SeqModel m(shape);
  if (count != static_cast<std::uint64_t>(m.params_.size())) {
    throw std::runtime_error("checkpoint parameter count does not match shape");
  }
  in.read(reinterpret_cast<char*>(m.params_.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw std::runtime_error("truncated checkpoint parameters");
  return m;
}

Vector AdadeltaStep(Vector& params, const Vector& grads, AdadeltaState& state) {
  if (grads.size() != params.size() || state.mean_sq_grad.size() != params.size()) {
    throw std::invalid_argument("adadelta shape mismatch");
  }
  const double rho = state.rho;
  const double eps = state.epsilon;
  state.mean_sq_grad = rho * state.mean_sq_grad.array() + (1.0 - rho) * grads.array().square();
  const Vector update = (-(state.mean_sq_update.array() + eps).sqrt() /
                         (state.mean_sq_grad.array() + eps).sqrt() * grads.array())
                            .matrix();
  state.mean_sq_update =
      rho * state.mean_sq_update.array() + (1.0 - rho) * update.array().square();
  params += update;
  return update;
}

}  // namespace shelfread
