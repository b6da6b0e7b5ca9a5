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

#include "prk/dp_perturbation.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "prk/errors.hpp"

namespace prk::dp {

PrivacyBudget PrivacyBudget::of(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw DomainError("privacy budget must be finite and > 0");
  }
  return PrivacyBudget(epsilon);
}

double sample_gamma(double shape, double scale, RandomSource& rng) {
  if (!(shape > 0.0 && scale > 0.0)) throw DomainError("gamma needs shape, scale > 0");
  if (shape < 1.0) {
    // Boost to shape + 1 and rescale by U^(1/shape).
    const double u = rng.uniform01();
    return sample_gamma(shape + 1.0, scale, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform01();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

double sample_radius(int n, PrivacyBudget budget, RandomSource& rng) {
  if (n < 2) throw DomainError("dimension must be >= 2");
  return sample_gamma(static_cast<double>(n), 1.0 / budget.epsilon(), rng);
}

UnitVector sample_direction(int n, RandomSource& rng) {
  if (n < 2) throw DomainError("dimension must be >= 2");
  std::vector<double> v(static_cast<std::size_t>(n));
  while (true) {
    double norm2 = 0.0;
    for (double& x : v) {
      x = rng.normal();
      norm2 += x * x;
    }
    if (norm2 > 0.0) break;
  }
  return UnitVector::normalize(std::move(v));
}

Perturbation perturb_with(const UnitVector& query, double radius, const UnitVector& direction) {
  if (query.dimension() != direction.dimension()) throw DomainError("dimension mismatch");
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw DomainError("radius must be >= 0");
  if (radius == 0.0) return Perturbation{query, PerturbationSample{0.0, direction, PolarAngle{}}};
  std::vector<double> shifted(query.dimension());
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] = query[i] + radius * direction[i];
  UnitVector perturbed = UnitVector::normalize(std::move(shifted));
  const auto delta = PolarAngle::radians(angle_between(query.values(), perturbed.values()));
  return Perturbation{std::move(perturbed), PerturbationSample{radius, direction, delta}};
}

Perturbation perturb(const UnitVector& query, PrivacyBudget budget, RandomSource& rng) {
  const int n = static_cast<int>(query.dimension());
  const double radius = sample_radius(n, budget, rng);
  return perturb_with(query, radius, sample_direction(n, rng));
}

PrivacyBudget calibrate_epsilon(const sphere::SphereParams& params, std::uint64_t k,
                                std::uint64_t k_prime_target) {
  if (k < 1 || k > params.corpus_size) throw DomainError("k must lie in [1, N]");
  if (k_prime_target < k) throw DomainError("k' target must be >= k");
  if (k_prime_target > params.corpus_size) throw DomainError("k' target must be <= N");
  if (k_prime_target == k) {
    throw ConfigError("k' == k needs zero perturbation; use the privacy-ignorant mode");
  }
  const auto alpha_k = sphere::alpha_from_k(params, static_cast<double>(k));
  const double inner = sphere::k_from_alpha(params, alpha_k);
  // Aim half a document below the target so the ceil lands on it.
  const double goal = static_cast<double>(k_prime_target) - 0.5;
  double lo = 0.0;
  double hi = std::numbers::pi - alpha_k.value();
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double grown =
        static_cast<double>(k) +
        (sphere::k_from_alpha(params, PolarAngle::radians(alpha_k.value() + mid)) - inner);
    (grown < goal ? lo : hi) = mid;
  }
  return PrivacyBudget::of(params.dimension / hi);
}

std::optional<std::string> epsilon_guidance(int n, PrivacyBudget budget) {
  const double lo = 10.0 * n;
  const double hi = 50.0 * n;
  if (budget.epsilon() < lo || budget.epsilon() > hi) {
    return "epsilon " + std::to_string(budget.epsilon()) + " is outside the recommended range [" +
           std::to_string(lo) + ", " + std::to_string(hi) + "] (mean radius " +
           std::to_string(budget.mean_radius(n)) + ")";
  }
  return std::nullopt;
}

double gamma_pdf(double r, double shape, double rate) {
  if (r <= 0.0) return 0.0;
  return std::exp((shape - 1.0) * std::log(r) - rate * r + shape * std::log(rate) -
                  std::lgamma(shape));
}

}  // namespace prk::dp
