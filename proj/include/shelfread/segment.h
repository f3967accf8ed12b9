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

// Book-spine geometry on plain 2D grids: dominant line orientation by Hough
// voting, rotation, spine splitting from a text-saliency map, and the
// upside-down decision over sliding-window flip probabilities.
//
// Grids are indexed (row, col). Geometry uses x = col and y = H - 1 - row,
// i.e. y grows upwards, and angles are counter-clockwise in degrees.

#ifndef SHELFREAD_SEGMENT_H_
#define SHELFREAD_SEGMENT_H_

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace shelfread {

using Grid = Eigen::MatrixXd;

// Normal angle theta in [-90, 90) of the line family with the most
// concentrated votes under rho = x cos(theta) + y sin(theta). For book
// edges this is the tilt of the lines away from vertical: 0 for vertical
// lines, positive when they lean counter-clockwise. Concentration is the sum
// of squared (theta, rho) bin counts, with rho taken relative to the lower-left
// corner of the edge pixels' bounding box. Ties go to the smaller angle.
// Non-zero cells are edge pixels. Returns nullopt for an empty edge map.
// Throws std::invalid_argument unless 0 < angle_resolution_deg <= 1.
std::optional<double> HoughDominantOrientation(const Grid& edges,
                                               double angle_resolution_deg = 1.0,
                                               double rho_resolution = 1.0);

// Rotates content counter-clockwise by angle_deg about the grid center.
// Each output cell samples the source by inverse mapping with bilinear
// interpolation; samples outside the source read as 0. Same shape as input.
Grid Rotate(const Grid& grid, double angle_deg);

class SaliencyMap {
 public:
  // Throws std::invalid_argument for an empty grid or values outside [0, 1].
  explicit SaliencyMap(Grid grid);
  const Grid& grid() const { return grid_; }
  int height() const { return static_cast<int>(grid_.rows()); }
  int width() const { return static_cast<int>(grid_.cols()); }

 private:
  Grid grid_;
};

struct ColumnRange {
  int left = 0;   // inclusive
  int right = 0;  // exclusive
  bool operator==(const ColumnRange&) const = default;
};

struct SpineSegmentation {
  std::vector<int> boundaries;     // interior split columns, ascending
  std::vector<ColumnRange> spines; // tile [0, W)
};

struct SplitOptions {
  static constexpr double kDefaultMinGapScore = 0.6;
  // Defaults to max(1, W / 50).
  std::optional<int> nms_window;
  double min_gap_score = kDefaultMinGapScore;
};

// Gap profile g(x) = 1 - mean saliency of column x. Each plateau of g that
// is a strict local maximum and does not touch the image border proposes
// its center column. Proposals scoring above min_gap_score are accepted
// greedily by descending score (ties: leftmost), suppressing any other
// proposal within nms_window columns. Throws std::invalid_argument when
// W < 2 * nms_window or nms_window < 1.
SpineSegmentation SplitSpines(const SaliencyMap& saliency, const SplitOptions& options = {});

std::vector<double> GapProfile(const SaliencyMap& saliency);

enum class FlipVerdict { kKeep, kFlip, kBoth };

struct FlipDecision {
  FlipVerdict verdict = FlipVerdict::kBoth;
  double mean_probability = 0.0;
};

inline constexpr double kFlipAbove = 0.7;
inline constexpr double kKeepBelow = 0.3;

// Mean upside-down probability m: m > 0.7 flips, m < 0.3 keeps, anything in
// between (boundaries included) keeps both orientations. nullopt for an
// empty list; throws std::invalid_argument for values outside [0, 1].
std::optional<FlipDecision> DecideFlip(std::span<const double> window_probs);

}  // namespace shelfread

#endif  // SHELFREAD_SEGMENT_H_
