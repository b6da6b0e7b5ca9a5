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

#include <cstdint>
#include <optional>
#include <string>

#include "prk/embedding.hpp"
#include "prk/random.hpp"
#include "prk/sphere_geometry.hpp"

namespace prk::dp {

// Finite, strictly positive privacy budget epsilon (inverse L2 units).
// The limits epsilon -> infinity / 0 are service modes, not budgets.
class PrivacyBudget {
 public:
  static PrivacyBudget of(double epsilon);

  double epsilon() const { return epsilon_; }
  // Mean perturbation radius n / epsilon.
  double mean_radius(int n) const { return n / epsilon_; }

 private:
  explicit PrivacyBudget(double epsilon) : epsilon_(epsilon) {}
  double epsilon_;
};

// Marsaglia-Tsang squeeze/rejection sampler for Gamma(shape, scale).
double sample_gamma(double shape, double scale, RandomSource& rng);

// Radial component of the n-dimensional distance mechanism: Gamma(n, 1/epsilon).
double sample_radius(int n, PrivacyBudget budget, RandomSource& rng);

// Uniform direction on the unit sphere in R^n (normalized Gaussian vector).
UnitVector sample_direction(int n, RandomSource& rng);

struct PerturbationSample {
  double radius = 0.0;
  UnitVector direction;
  // Angle between the query and the (renormalized) perturbed embedding.
  PolarAngle realized_delta_alpha;
};

struct Perturbation {
  UnitVector perturbed;
  PerturbationSample sample;
};

// normalize(query + radius * direction), recording the realized angle.
Perturbation perturb_with(const UnitVector& query, double radius, const UnitVector& direction);
Perturbation perturb(const UnitVector& query, PrivacyBudget budget, RandomSource& rng);

// Budget whose mean radius n / epsilon, taken as the perturbation angle,
// expands k to exactly k_prime_target candidates. Throws ConfigError when
// k_prime_target == k (no finite budget; use the privacy-ignorant mode).
PrivacyBudget calibrate_epsilon(const sphere::SphereParams& params, std::uint64_t k,
                                std::uint64_t k_prime_target);

// Warning text when epsilon falls outside the recommended [10n, 50n] band.
std::optional<std::string> epsilon_guidance(int n, PrivacyBudget budget);

// Density of Gamma(shape, 1/rate) at r.
double gamma_pdf(double r, double shape, double rate);

}  // namespace prk::dp
