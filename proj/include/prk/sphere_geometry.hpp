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

namespace prk {

// Polar angle on the unit sphere, always within [0, pi].
class PolarAngle {
 public:
  constexpr PolarAngle() = default;
  // Throws DomainError outside [0, pi] or for NaN.
  static PolarAngle radians(double value);

  constexpr double value() const { return radians_; }
  friend constexpr auto operator<=>(PolarAngle, PolarAngle) = default;

 private:
  explicit constexpr PolarAngle(double r) : radians_(r) {}
  double radians_ = 0.0;
};

enum class Route { Direct, ObliviousTransfer };

const char* to_string(Route route);

namespace sphere {

// Embedding dimension n and corpus size N for uniformly spread unit vectors.
struct SphereParams {
  int dimension = 0;
  std::uint64_t corpus_size = 0;

  // Validates n >= 2 and N >= 1.
  static SphereParams make(int dimension, std::uint64_t corpus_size);
};

// Regularized incomplete beta I_x(a, b), taking both x and y = 1 - x so that
// callers can pass an exactly computed complement (e.g. cos^2 alongside sin^2).
double regularized_incomplete_beta(double a, double b, double x, double y);

// Surface area of the unit sphere embedded in R^n: 2 pi^(n/2) / Gamma(n/2).
double unit_sphere_area(int n);

// Integral of sin^(n-2)(theta) over [0, alpha].
//
// Evaluated as B(sin^2 alpha; (n-1)/2, 1/2) / 2 for alpha <= pi/2 and by
// reflection about pi/2 above that, so it stays finite for n in the
// thousands where direct quadrature of sin^(n-2) underflows.
double cap_integral(int n, PolarAngle alpha);

// Fraction of the sphere's area lying within angle alpha of a pole.
double cap_fraction(int n, PolarAngle alpha);

// Expected number of the N corpus points inside a cap of half-angle alpha.
// Real-valued: N at alpha = pi and N/2 at alpha = pi/2.
double k_from_alpha(const SphereParams& params, PolarAngle alpha);

// Inverse of k_from_alpha by bisection on [0, pi]. Requires 0 < k <= N.
PolarAngle alpha_from_k(const SphereParams& params, double k);

// Candidate count k' whose cap, centred on the perturbed query, covers the
// true top-k cap after the query moved by delta_alpha:
//
//   k' = ceil(k + safety * (k_from_alpha(alpha_k + delta) - k_from_alpha(alpha_k)))
//
// clamped to [k, N]. k > N is clamped to N; alpha_k + delta >= pi yields N.
// safety scales the expansion; 1.0 is the exact uniform-corpus value.
std::uint64_t expanded_k_prime(const SphereParams& params, std::uint64_t k,
                               PolarAngle delta_alpha, double safety = 1.0);

// Expected angle between a query and the centroid of its k nearest
// neighbours: atan(tan(alpha_k) / sqrt(k)). Requires alpha_k < pi/2.
PolarAngle mean_angle(std::uint64_t k, PolarAngle alpha_k);

// Direct when the centroid leaks no more than the perturbation itself
// (omega >= delta_alpha), oblivious transfer otherwise.
Route leakage_route(PolarAngle omega, PolarAngle delta_alpha);

}  // namespace sphere
}  // namespace prk
