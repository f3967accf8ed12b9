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

#include "shelfread/synthgen.h"

#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace shelfread {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double UnitUniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int UniformInt(std::mt19937_64& rng, int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(rng() % span);
}

// Box-Muller; one draw per call keeps the stream layout simple.
double StandardNormal(std::mt19937_64& rng) {
  const double u1 = 1.0 - UnitUniform(rng);  // (0, 1]
  const double u2 = UnitUniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void Validate(const SynthConfig& c, const Alphabet& alphabet) {
  if (c.min_length < 1 || c.max_length < c.min_length) {
    throw std::invalid_argument("bad target length range");
  }
  if (c.min_span < 1 || c.max_span < c.min_span) {
    throw std::invalid_argument("bad span length range");
  }
  if (c.window < 1 || c.stride < 1) throw std::invalid_argument("window/stride must be >= 1");
  if (!(c.noise_level >= 0.0 && c.noise_level < 1.0)) {
    throw std::invalid_argument("noise_level must lie in [0, 1)");
  }
  if (c.forbid_adjacent_repeats && alphabet.label_count() < 2 && c.max_length > 1) {
    throw std::invalid_argument("cannot avoid repeats with a one-letter alphabet");
  }
  // Without repeats each label needs one frame; with repeats a separating
  // blank frame too. min_span >= 2 covers both.
  if (!c.forbid_adjacent_repeats && c.min_span < 2) {
    throw std::invalid_argument("repeated labels need min_span >= 2");
  }
}

}  // namespace

std::vector<Interval> ReceptiveFields(int timesteps, int window, int stride) {
  std::vector<Interval> rfs(timesteps);
  for (int t = 0; t < timesteps; ++t) rfs[t] = {t * stride, t * stride + window};
  return rfs;
}

std::vector<SynthSample> GenerateSynthetic(std::uint64_t seed, const Alphabet& alphabet,
                                           int count, const SynthConfig& config) {
  Validate(config, alphabet);
  const int C = alphabet.class_count();
  std::vector<SynthSample> samples;
  samples.reserve(count);
  for (int i = 0; i < count; ++i) {
    std::mt19937_64 rng(SplitMix64(seed ^ SplitMix64(static_cast<std::uint64_t>(i))));
    SynthSample s;
    s.noise_level = config.noise_level;
    const int length = UniformInt(rng, config.min_length, config.max_length);
    for (int j = 0; j < length; ++j) {
      Label l = UniformInt(rng, 1, C - 1);
      while (config.forbid_adjacent_repeats && j > 0 && l == s.target.items.back()) {
        l = UniformInt(rng, 1, C - 1);
      }
      s.target.items.push_back(l);
    }
    int pos = 0;
    for (Label l : s.target.items) {
      const int width = UniformInt(rng, config.min_span, config.max_span);
      s.spans.spans.push_back({l, {pos, pos + width}});
      pos += width;
    }
    const int T = pos;
    s.input = Matrix::Zero(T, C);
    for (const CharSpan& span : s.spans.spans) {
      for (int t = span.extent.start; t < span.extent.end; ++t) s.input(t, span.label) = 1.0;
    }
    if (config.noise_level > 0.0) {
      for (int t = 0; t < T; ++t) {
        for (int c = 0; c < C; ++c) s.input(t, c) += config.noise_level * StandardNormal(rng);
      }
    }
    s.spans.receptive_fields = ReceptiveFields(T, config.window, config.stride);
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<std::vector<int>> BatchByLength(const std::vector<SynthSample>& samples,
                                            int batch_size) {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  std::map<int, std::vector<int>> groups;
  for (size_t i = 0; i < samples.size(); ++i) {
    groups[samples[i].target.size()].push_back(static_cast<int>(i));
  }
  std::vector<std::vector<int>> batches;
  for (const auto& [length, members] : groups) {
    for (size_t start = 0; start < members.size(); start += batch_size) {
      const size_t stop = std::min(members.size(), start + static_cast<size_t>(batch_size));
      batches.emplace_back(members.begin() + static_cast<long>(start),
                           members.begin() + static_cast<long>(stop));
    }
  }
  return batches;
}

void WriteDataset(std::ostream& out, const Alphabet& alphabet,
                  const std::vector<SynthSample>& samples) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  for (const SynthSample& s : samples) {
    out << alphabet.Decode(s.target) << '\t';
    for (size_t j = 0; j < s.spans.spans.size(); ++j) {
      const CharSpan& span = s.spans.spans[j];
      if (j) out << ',';
      out << span.label << ':' << span.extent.start << ':' << span.extent.end;
    }
    int window = 1, stride = 1;
    const auto& rfs = s.spans.receptive_fields;
    if (!rfs.empty()) window = rfs[0].length();
    if (rfs.size() > 1) stride = rfs[1].start - rfs[0].start;
    out << '\t' << s.noise_level << '\t' << window << ' ' << stride << '\t'
        << s.input.rows() << ' ' << s.input.cols();
    for (Eigen::Index t = 0; t < s.input.rows(); ++t) {
      for (Eigen::Index c = 0; c < s.input.cols(); ++c) out << ' ' << s.input(t, c);
    }
    out << '\n';
  }
  out.precision(old);
}

std::vector<SynthSample> ReadDataset(std::istream& in, const Alphabet& alphabet) {
  std::vector<SynthSample> samples;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) {
      return std::runtime_error("dataset line " + std::to_string(line_no) + ": " + why);
    };
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, '\t');) fields.push_back(f);
    if (fields.size() != 5) throw fail("expected 5 tab-separated fields");

    SynthSample s;
    s.target = alphabet.Encode(fields[0]);
    std::stringstream spans(fields[1]);
    for (std::string item; std::getline(spans, item, ',');) {
      CharSpan span;
      char c1 = 0, c2 = 0;
      std::stringstream is(item);
      if (!(is >> span.label >> c1 >> span.extent.start >> c2 >> span.extent.end) ||
          c1 != ':' || c2 != ':') {
        throw fail("malformed span '" + item + "'");
      }
      s.spans.spans.push_back(span);
    }
    s.noise_level = std::stod(fields[2]);
    int window = 0, stride = 0;
    std::stringstream(fields[3]) >> window >> stride;
    std::stringstream grid(fields[4]);
    s.input = ReadGrid(grid);
    if (window < 1 || stride < 1) throw fail("bad window/stride");
    s.spans.receptive_fields = ReceptiveFields(static_cast<int>(s.input.rows()), window, stride);
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace shelfread
