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

#include "prk/sphere_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "prk/errors.hpp"

namespace prk {

PolarAngle PolarAngle::radians(double value) {
  if (!(value >= 0.0 && value <= std::numbers::pi)) {
    throw DomainError("polar angle out of [0, pi]: " + std::to_string(value));
  }
  return PolarAngle(value);
}

const char* to_string(Route route) {
  return route == Route::Direct ? "direct" : "ot";
}

namespace sphere {
namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

SphereParams SphereParams::make(int dimension, std::uint64_t corpus_size) {
  if (dimension < 2) throw DomainError("dimension must be >= 2");
  if (corpus_size < 1) throw DomainError("corpus size must be >= 1");
  return SphereParams{dimension, corpus_size};
}

double regularized_incomplete_beta(double a, double b, double x, double y) {
  if (!(a > 0.0 && b > 0.0)) throw DomainError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
    throw DomainError("incomplete beta argument outside [0, 1]");
  }
  // y carries 1 - x without cancellation, so near x = 1 use the complement form.
  if (x <= 0.5) return boost::math::ibeta(a, b, x);
  return boost::math::ibetac(b, a, y);
}

double unit_sphere_area(int n) {
  if (n < 2) throw DomainError("sphere dimension must be >= 2");
  const double half = 0.5 * n;
  return std::exp(std::log(2.0) + half * std::log(kPi) - std::lgamma(half));
}

double cap_fraction(int n, PolarAngle alpha) {
  if (n < 2) throw DomainError("sphere dimension must be >= 2");
  const double a = 0.5 * (n - 1);
  const double angle = alpha.value();
  if (angle <= 0.5 * kPi) {
    const double s = std::sin(angle);
    const double c = std::cos(angle);
    return 0.5 * regularized_incomplete_beta(a, 0.5, s * s, c * c);
  }
  const double reflected = kPi - angle;
  const double s = std::sin(reflected);
  const double c = std::cos(reflected);
  return 1.0 - 0.5 * regularized_incomplete_beta(a, 0.5, s * s, c * c);
}

double cap_integral(int n, PolarAngle alpha) {
  const double full = boost::math::beta(0.5 * (n - 1), 0.5);
  return full * cap_fraction(n, alpha);
}

double k_from_alpha(const SphereParams& params, PolarAngle alpha) {
  return static_cast<double>(params.corpus_size) * cap_fraction(params.dimension, alpha);
}

PolarAngle alpha_from_k(const SphereParams& params, double k) {
  const double total = static_cast<double>(params.corpus_size);
  if (!(k > 0.0 && k <= total)) {
    throw DomainError("k must lie in (0, N]: k=" + std::to_string(k));
  }
  if (k == total) return PolarAngle::radians(kPi);
  const double target = k / total;
  double lo = 0.0;
  double hi = kPi;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f = cap_fraction(params.dimension, PolarAngle::radians(mid));
    if (f == target) return PolarAngle::radians(mid);
    (f < target ? lo : hi) = mid;
  }
  const double f_lo = cap_fraction(params.dimension, PolarAngle::radians(lo));
  const double f_hi = cap_fraction(params.dimension, PolarAngle::radians(hi));
  return PolarAngle::radians(std::abs(f_lo - target) <= std::abs(f_hi - target) ? lo : hi);
}

std::uint64_t expanded_k_prime(const SphereParams& params, std::uint64_t k,
                               PolarAngle delta_alpha, double safety) {
  if (k < 1) throw DomainError("k must be >= 1");
  if (!(safety >= 0.0) || !std::isfinite(safety)) {
    throw DomainError("safety multiplier must be finite and >= 0");
  }
  const std::uint64_t total = params.corpus_size;
  if (k >= total) return total;
  if (delta_alpha.value() == 0.0) return k;

  const PolarAngle alpha_k = alpha_from_k(params, static_cast<double>(k));
  const double expanded = alpha_k.value() + delta_alpha.value();
  if (expanded >= kPi) return total;

  const double inner = k_from_alpha(params, alpha_k);
  const double outer = k_from_alpha(params, PolarAngle::radians(expanded));
  const double grown = static_cast<double>(k) + safety * (outer - inner);
  if (grown >= static_cast<double>(total)) return total;
  const auto k_prime = static_cast<std::uint64_t>(std::ceil(grown));
  return std::clamp(k_prime, k, total);
}

PolarAngle mean_angle(std::uint64_t k, PolarAngle alpha_k) {
  if (k < 1) throw DomainError("k must be >= 1");
  if (!(alpha_k.value() < 0.5 * kPi)) {
    throw DomainError("mean angle needs an acute cap (alpha_k < pi/2)");
  }
  return PolarAngle::radians(
      std::atan(std::tan(alpha_k.value()) / std::sqrt(static_cast<double>(k))));
}

Route leakage_route(PolarAngle omega, PolarAngle delta_alpha) {
  return omega >= delta_alpha ? Route::Direct : Route::ObliviousTransfer;
}

}  // namespace sphere
}  // namespace prk
