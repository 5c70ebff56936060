// Copyright (c) 2026 The SuperVoice Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "supervoice/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "supervoice/errors.h"

namespace supervoice {
namespace {

struct ClassCounts {
  size_t genuine = 0;
  size_t impostor = 0;
};

ClassCounts CheckTrials(const TrialSet& trials) {
  if (trials.scores.size() != trials.genuine.size()) {
    throw Error(ErrorCode::kLengthMismatch, "scores and labels differ in length");
  }
  ClassCounts c;
  for (bool g : trials.genuine) (g ? c.genuine : c.impostor)++;
  if (c.genuine == 0 || c.impostor == 0) {
    throw Error(ErrorCode::kEmptyClass, "need at least one genuine and one impostor trial");
  }
  return c;
}

struct OperatingPoint {
  double far;
  double frr;
  double threshold;
};

// Cuts between distinct sorted scores, from accept-all to reject-all.
std::vector<OperatingPoint> OperatingPoints(const TrialSet& trials) {
  const ClassCounts counts = CheckTrials(trials);
  std::vector<std::pair<double, bool>> sorted;
  sorted.reserve(trials.size());
  for (size_t i = 0; i < trials.size(); ++i) sorted.emplace_back(trials.scores[i], trials.genuine[i]);
  std::sort(sorted.begin(), sorted.end());

  std::vector<OperatingPoint> points;
  size_t accepted_impostors = counts.impostor;
  size_t rejected_genuines = 0;
  const double ni = static_cast<double>(counts.impostor);
  const double ng = static_cast<double>(counts.genuine);
  points.push_back({1.0, 0.0, sorted.front().first});
  size_t i = 0;
  while (i < sorted.size()) {
    const double score = sorted[i].first;
    while (i < sorted.size() && sorted[i].first == score) {
      if (sorted[i].second) {
        ++rejected_genuines;
      } else {
        --accepted_impostors;
      }
      ++i;
    }
    const double threshold =
        i < sorted.size() ? 0.5 * (score + sorted[i].first)
                          : std::nextafter(score, std::numeric_limits<double>::infinity());
    points.push_back({accepted_impostors / ni, rejected_genuines / ng, threshold});
  }
  return points;
}

double Cross(const OperatingPoint& o, const OperatingPoint& a, const OperatingPoint& b) {
  return (a.far - o.far) * (b.frr - o.frr) - (a.frr - o.frr) * (b.far - o.far);
}

}  // namespace

ErrorRates FarFrr(const TrialSet& trials, double threshold) {
  const ClassCounts counts = CheckTrials(trials);
  size_t fa = 0, fr = 0;
  for (size_t i = 0; i < trials.size(); ++i) {
    const bool accept = trials.scores[i] >= threshold;
    if (trials.genuine[i] && !accept) ++fr;
    if (!trials.genuine[i] && accept) ++fa;
  }
  return {static_cast<double>(fa) / counts.impostor, static_cast<double>(fr) / counts.genuine};
}

EerResult Eer(const TrialSet& trials) {
  std::vector<OperatingPoint> points = OperatingPoints(trials);
  std::sort(points.begin(), points.end(), [](const OperatingPoint& a, const OperatingPoint& b) {
    if (a.far != b.far) return a.far < b.far;
    return a.frr < b.frr;
  });
  // Andrew's monotone chain, lower hull only.
  std::vector<OperatingPoint> hull;
  for (const OperatingPoint& p : points) {
    while (hull.size() >= 2 && Cross(hull[hull.size() - 2], hull.back(), p) <= 0.0) {
      hull.pop_back();
    }
    hull.push_back(p);
  }
  // Along the hull FAR rises and FRR falls; find where FRR - FAR turns <= 0.
  for (size_t k = 0; k < hull.size(); ++k) {
    const double d = hull[k].frr - hull[k].far;
    if (d > 0.0) continue;
    if (d == 0.0 || k == 0) return {hull[k].far, hull[k].threshold};
    const OperatingPoint& a = hull[k - 1];
    const OperatingPoint& b = hull[k];
    const double da = a.frr - a.far;
    const double lambda = da / (da - d);
    return {a.far + lambda * (b.far - a.far),
            a.threshold + lambda * (b.threshold - a.threshold)};
  }
  return {hull.back().far, hull.back().threshold};
}

std::vector<DetPoint> DetCurve(const TrialSet& trials) {
  CheckTrials(trials);
  std::vector<double> thresholds = trials.scores;
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  std::vector<DetPoint> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) {
    const ErrorRates r = FarFrr(trials, t);
    out.push_back({t, r.far, r.frr});
  }
  return out;
}

double Cer(std::span<const std::string> predicted, std::span<const std::string> truth) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::kLengthMismatch, "predicted and truth differ in length");
  }
  if (predicted.empty()) throw Error(ErrorCode::kEmptyInput, "CER of zero recordings");
  size_t wrong = 0;
  for (size_t i = 0; i < predicted.size(); ++i) wrong += predicted[i] != truth[i];
  return static_cast<double>(wrong) / predicted.size();
}

}  // namespace supervoice
