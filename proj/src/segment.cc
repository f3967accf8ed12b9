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

#include "shelfread/segment.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace shelfread {
namespace {

double DegToRad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

std::optional<double> HoughDominantOrientation(const Grid& edges, double angle_resolution_deg,
                                               double rho_resolution) {
  if (!(angle_resolution_deg > 0.0 && angle_resolution_deg <= 1.0)) {
    throw std::invalid_argument("angle resolution must lie in (0, 1] degrees");
  }
  if (!(rho_resolution > 0.0)) throw std::invalid_argument("rho resolution must be positive");

  std::vector<std::pair<double, double>> points;
  const auto H = edges.rows();
  const auto W = edges.cols();
  for (Eigen::Index r = 0; r < H; ++r) {
    for (Eigen::Index c = 0; c < W; ++c) {
      if (edges(r, c) != 0.0) {
        points.emplace_back(static_cast<double>(c), static_cast<double>(H - 1 - r));
      }
    }
  }
  if (points.empty()) return std::nullopt;

  // rho is measured from the lower-left corner of the edge set's bounding
  // box so that translating the edges leaves every bin unchanged.
  double x_min = points[0].first, y_min = points[0].second;
  for (const auto& [x, y] : points) {
    x_min = std::min(x_min, x);
    y_min = std::min(y_min, y);
  }
  for (auto& [x, y] : points) {
    x -= x_min;
    y -= y_min;
  }

  const int angle_bins = static_cast<int>(std::lround(180.0 / angle_resolution_deg));
  const double rho_max = std::hypot(static_cast<double>(W), static_cast<double>(H));
  const int rho_bins = static_cast<int>(std::ceil(2.0 * rho_max / rho_resolution)) + 1;

  std::vector<int> votes(rho_bins);
  double best_score = -1.0;
  double best_theta = -90.0;
  for (int k = 0; k < angle_bins; ++k) {
    const double theta = -90.0 + k * angle_resolution_deg;
    const double ct = std::cos(DegToRad(theta));
    const double st = std::sin(DegToRad(theta));
    std::fill(votes.begin(), votes.end(), 0);
    for (const auto& [x, y] : points) {
      const double rho = x * ct + y * st;
      ++votes[static_cast<size_t>(std::lround((rho + rho_max) / rho_resolution))];
    }
    double score = 0.0;
    for (int v : votes) score += static_cast<double>(v) * v;
    if (score > best_score) {
      best_score = score;
      best_theta = theta;
    }
  }
  return best_theta;
}

Grid Rotate(const Grid& grid, double angle_deg) {
  if (angle_deg == 0.0) return grid;
  const auto H = grid.rows();
  const auto W = grid.cols();
  const double cx = (static_cast<double>(W) - 1.0) / 2.0;
  const double cy = (static_cast<double>(H) - 1.0) / 2.0;
  const double ca = std::cos(DegToRad(angle_deg));
  const double sa = std::sin(DegToRad(angle_deg));

  auto at = [&](Eigen::Index r, Eigen::Index c) {
    return (r < 0 || r >= H || c < 0 || c >= W) ? 0.0 : grid(r, c);
  };

  Grid out(H, W);
  for (Eigen::Index r = 0; r < H; ++r) {
    for (Eigen::Index c = 0; c < W; ++c) {
      const double dx = static_cast<double>(c) - cx;
      const double dy = cy - static_cast<double>(r);
      // Inverse map: rotate the output point clockwise into the source.
      const double sx = ca * dx + sa * dy;
      const double sy = -sa * dx + ca * dy;
      const double col = cx + sx;
      const double row = cy - sy;
      const double r0 = std::floor(row);
      const double c0 = std::floor(col);
      const double fr = row - r0;
      const double fc = col - c0;
      const auto ri = static_cast<Eigen::Index>(r0);
      const auto ci = static_cast<Eigen::Index>(c0);
      out(r, c) = (1.0 - fr) * ((1.0 - fc) * at(ri, ci) + fc * at(ri, ci + 1)) +
                  fr * ((1.0 - fc) * at(ri + 1, ci) + fc * at(ri + 1, ci + 1));
    }
  }
  return out;
}

SaliencyMap::SaliencyMap(Grid grid) : grid_(std::move(grid)) {
  if (grid_.size() == 0) throw std::invalid_argument("saliency map is empty");
  if (!((grid_.array() >= 0.0).all() && (grid_.array() <= 1.0).all())) {
    throw std::invalid_argument("saliency values must lie in [0, 1]");
  }
}

std::vector<double> GapProfile(const SaliencyMap& saliency) {
  const Grid& g = saliency.grid();
  std::vector<double> profile(g.cols());
  for (Eigen::Index c = 0; c < g.cols(); ++c) profile[c] = 1.0 - g.col(c).mean();
  return profile;
}

SpineSegmentation SplitSpines(const SaliencyMap& saliency, const SplitOptions& options) {
  const int W = saliency.width();
  const int window = options.nms_window.value_or(std::max(1, W / 50));
  if (window < 1) throw std::invalid_argument("nms window must be >= 1");
  if (W < 2 * window) throw std::invalid_argument("image narrower than twice the nms window");

  const std::vector<double> g = GapProfile(saliency);
  struct Proposal {
    int column;
    double score;
  };
  std::vector<Proposal> proposals;
  for (int a = 0; a < W;) {
    int b = a;
    while (b + 1 < W && g[b + 1] == g[a]) ++b;
    const bool interior = a > 0 && b < W - 1;
    if (interior && g[a - 1] < g[a] && g[b + 1] < g[a] && g[a] > options.min_gap_score) {
      proposals.push_back({(a + b) / 2, g[a]});
    }
    a = b + 1;
  }
  std::stable_sort(proposals.begin(), proposals.end(),
                   [](const Proposal& x, const Proposal& y) { return x.score > y.score; });

  SpineSegmentation seg;
  for (const Proposal& p : proposals) {
    const bool suppressed = std::any_of(seg.boundaries.begin(), seg.boundaries.end(),
                                        [&](int kept) { return std::abs(kept - p.column) <= window; });
    if (!suppressed) seg.boundaries.push_back(p.column);
  }
  std::sort(seg.boundaries.begin(), seg.boundaries.end());

  int left = 0;
  for (int b : seg.boundaries) {
    seg.spines.push_back({left, b});
    left = b;
  }
  seg.spines.push_back({left, W});
  return seg;
}

std::optional<FlipDecision> DecideFlip(std::span<const double> window_probs) {
  if (window_probs.empty()) return std::nullopt;
  // Summed in sorted order so the mean is independent of window order.
  std::vector<double> sorted(window_probs.begin(), window_probs.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double p : sorted) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probabilities must lie in [0, 1]");
    sum += p;
  }
  FlipDecision d;
  d.mean_probability = sum / static_cast<double>(window_probs.size());
  if (d.mean_probability > kFlipAbove) {
    d.verdict = FlipVerdict::kFlip;
  } else if (d.mean_probability < kKeepBelow) {
    d.verdict = FlipVerdict::kKeep;
  } else {
    d.verdict = FlipVerdict::kBoth;
  }
  return d;
}

}  // namespace shelfread
