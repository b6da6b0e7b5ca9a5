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

#include "prk/embedding.hpp"

#include <cmath>
#include <string>

#include "prk/errors.hpp"

namespace prk {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DomainError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

UnitVector UnitVector::normalize(std::vector<double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw DomainError("non-finite vector component");
  }
  const double norm = l2_norm(v);
  if (!(norm > 0.0)) throw DomainError("cannot normalize a zero vector");
  for (double& x : v) x /= norm;
  return UnitVector(std::move(v));
}

UnitVector UnitVector::from_normalized(std::vector<double> v, double tolerance) {
  const double norm = l2_norm(v);
  if (!(std::abs(norm - 1.0) <= tolerance)) {
    throw DomainError("vector is not unit-norm (norm " + std::to_string(norm) + ")");
  }
  return UnitVector(std::move(v));
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  return 1.0 - dot(a, b);
}

double l2_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double angle_between(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("dimension mismatch");
  double diff = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    sum += (a[i] + b[i]) * (a[i] + b[i]);
  }
  return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

}  // namespace prk
