// Copyright 2026 The prk Authors.
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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace prk {

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);

// Real vector of unit L2 norm. Queries, documents and perturbed queries all
// travel as UnitVector.
class UnitVector {
 public:
  // Scales v to unit length. Throws DomainError on a zero or non-finite input.
  static UnitVector normalize(std::vector<double> v);
  // Wraps v unchanged; throws DomainError unless |‖v‖ - 1| <= tolerance.
  static UnitVector from_normalized(std::vector<double> v, double tolerance = 1e-9);

  std::size_t dimension() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const UnitVector&, const UnitVector&) = default;

 private:
  explicit UnitVector(std::vector<double> v) : values_(std::move(v)) {}
  std::vector<double> values_;
};

// 1 - <a, b> for unit vectors.
double cosine_distance(std::span<const double> a, std::span<const double> b);
double l2_distance(std::span<const double> a, std::span<const double> b);
// Angle in [0, pi] between two unit vectors, accurate near 0 and near pi.
double angle_between(std::span<const double> a, std::span<const double> b);

}  // namespace prk
