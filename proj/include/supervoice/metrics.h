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

#ifndef SUPERVOICE_METRICS_H_
#define SUPERVOICE_METRICS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace supervoice {

// Parallel score/label lists. A trial is accepted iff score >= threshold.
struct TrialSet {
  std::vector<double> scores;
  std::vector<bool> genuine;

  void Add(double score, bool is_genuine) {
    scores.push_back(score);
    genuine.push_back(is_genuine);
  }
  size_t size() const { return scores.size(); }
};

struct ErrorRates {
  double far = 0.0;
  double frr = 0.0;
};

// Throws Error(kEmptyClass) when either class is missing and
// Error(kLengthMismatch) for ragged input.
ErrorRates FarFrr(const TrialSet& trials, double threshold);

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

// Equal error rate on the convex hull of the empirical ROC. The operating
// points are every distinct cut between sorted scores; points that lie above
// the lower hull are dominated by a mix of their neighbours and dropped; the
// hull segment crossing FAR = FRR is interpolated linearly. Depends on the
// score order only. The threshold is interpolated between the hull
// vertices' cut positions (midpoints between adjacent distinct scores).
EerResult Eer(const TrialSet& trials);

struct DetPoint {
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

// One point per distinct score, ascending threshold.
std::vector<DetPoint> DetCurve(const TrialSet& trials);

// Fraction of mismatching labels. Throws Error(kEmptyInput) or
// Error(kLengthMismatch).
double Cer(std::span<const std::string> predicted, std::span<const std::string> truth);

}  // namespace supervoice

#endif  // SUPERVOICE_METRICS_H_
