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

#include <gtest/gtest.h>

#include <boost/math/distributions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "prk/errors.hpp"
#include "test_support.hpp"

namespace {

using namespace prk;
using namespace prk::dp;

TEST(PrivacyBudget, Validates) {
  EXPECT_THROW(PrivacyBudget::of(0.0), DomainError);
  EXPECT_THROW(PrivacyBudget::of(-3.0), DomainError);
  EXPECT_THROW(PrivacyBudget::of(INFINITY), DomainError);
  EXPECT_DOUBLE_EQ(PrivacyBudget::of(7680).mean_radius(768), 0.1);
}

TEST(SampleRadius, PositiveDraws) {
  RandomSource rng(1);
  for (int i = 0; i < 10000; ++i) EXPECT_GT(sample_radius(2, PrivacyBudget::of(50.0), rng), 0.0);
}

TEST(SampleRadius, MeanAndVarianceAtTenN) {
  RandomSource rng(2);
  const int n = 768;
  const auto budget = PrivacyBudget::of(10.0 * n);
  const int draws = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double r = sample_radius(n, budget, rng);
    sum += r;
    sum_sq += r * r;
  }
  const double mean = sum / draws;
  const double var = (sum_sq - draws * mean * mean) / (draws - 1);
  EXPECT_NEAR(mean, 0.1, 0.001);
  EXPECT_NEAR(var / (n / (7680.0 * 7680.0)), 1.0, 0.05);
}

// Same moments from the standard library's gamma sampler.
TEST(SampleGamma, AgreesWithIndependentSampler) {
  RandomSource rng(3);
  std::mt19937_64 other(3);
  for (double shape : {0.4, 1.0, 2.5, 128.0}) {
    std::gamma_distribution<double> ref(shape, 2.0);
    std::vector<double> ours, theirs;
    for (int i = 0; i < 20000; ++i) {
      ours.push_back(sample_gamma(shape, 2.0, rng));
      theirs.push_back(ref(other));
    }
    EXPECT_GT(prk::testing::ks_two_sample_p(ours, theirs), 0.01) << "shape " << shape;
  }
}

TEST(SampleGamma, CdfGoodnessOfFit) {
  RandomSource rng(4);
  const boost::math::gamma_distribution<double> dist(300.0, 1.0 / 1500.0);
  std::vector<double> u;
  for (int i = 0; i < 20000; ++i) u.push_back(boost::math::cdf(dist, sample_gamma(300.0, 1.0 / 1500.0, rng)));
  std::vector<double> uniform;
  std::mt19937_64 ref(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 20000; ++i) uniform.push_back(unit(ref));
  EXPECT_GT(prk::testing::ks_two_sample_p(u, uniform), 0.01);
}

// Histogram of radii at n = 8: ln(D(r1)/D(r2)) = (n-1) ln(r1/r2) - eps (r1 - r2).
TEST(SampleRadius, DensityLogRatio) {
  RandomSource rng(5);
  const int n = 8;
  const double eps = 40.0;  // mean 0.2, mode 0.175
  const double width = 0.01;
  std::vector<double> hist(60, 0.0);
  for (int i = 0; i < 1000000; ++i) {
    const double r = sample_radius(n, PrivacyBudget::of(eps), rng);
    const auto b = static_cast<std::size_t>(r / width);
    if (b < hist.size()) hist[b] += 1.0;
  }
  const auto centre = [&](int b) { return (b + 0.5) * width; };
  for (auto [b1, b2] : {std::pair{10, 25}, std::pair{15, 30}, std::pair{12, 20}}) {
    const double r1 = centre(b1), r2 = centre(b2);
    const double expected = (n - 1) * std::log(r1 / r2) - eps * (r1 - r2);
    const double got = std::log(hist[b1] / hist[b2]);
    EXPECT_NEAR(got, expected, 0.1 * std::abs(expected) + 0.02) << r1 << " vs " << r2;
  }
}

TEST(SampleDirection, UnitNorm) {
  RandomSource rng(6);
  for (int n : {2, 3, 128, 3072}) {
    for (int i = 0; i < 200; ++i) {
      const UnitVector v = sample_direction(n, rng);
      ASSERT_EQ(v.dimension(), static_cast<std::size_t>(n));
      EXPECT_NEAR(l2_norm(v.values()), 1.0, 1e-9);
    }
  }
}

TEST(SampleDirection, CoordinateMoments) {
  RandomSource rng(7);
  const int n = 128, draws = 100000;
  std::vector<double> mean(n, 0.0), second(n, 0.0);
  for (int d = 0; d < draws; ++d) {
    const UnitVector v = sample_direction(n, rng);
    for (int i = 0; i < n; ++i) {
      mean[i] += v[i] / draws;
      second[i] += v[i] * v[i] / draws;
    }
  }
  const double sigma = 1.0 / std::sqrt(128.0 * draws);
  int outside = 0;
  for (int i = 0; i < n; ++i) {
    if (std::abs(mean[i]) > 3 * sigma) ++outside;
    EXPECT_NEAR(second[i] * n, 1.0, 0.05);
  }
  // 3-sigma exceedances: expected 0.35 of 128; allow a handful.
  EXPECT_LE(outside, 4);
}

TEST(Perturb, ZeroRadiusIsIdentity) {
  RandomSource rng(8);
  const UnitVector q = sample_direction(16, rng);
  const Perturbation p = perturb_with(q, 0.0, sample_direction(16, rng));
  EXPECT_EQ(p.perturbed, q);
  EXPECT_EQ(p.sample.realized_delta_alpha.value(), 0.0);
}

TEST(Perturb, OrthogonalDirectionGivesArctan) {
  std::vector<double> e(10, 0.0), v(10, 0.0);
  e[0] = 1.0;
  v[3] = 1.0;
  const Perturbation p = perturb_with(UnitVector::normalize(e), 0.1,
                                      UnitVector::normalize(v));
  EXPECT_NEAR(p.sample.realized_delta_alpha.value(), std::atan(0.1), 1e-15);
  EXPECT_NEAR(p.sample.realized_delta_alpha.value(), 0.0997, 1e-4);
  EXPECT_NEAR(l2_norm(p.perturbed.values()), 1.0, 1e-12);
}

TEST(Perturb, RealizedAngleMatchesConstruction) {
  RandomSource rng(9);
  for (int t = 0; t < 1000; ++t) {
    const UnitVector q = sample_direction(64, rng);
    const Perturbation p = perturb(q, PrivacyBudget::of(640.0), rng);
    EXPECT_NEAR(l2_norm(p.perturbed.values()), 1.0, 1e-9);
    EXPECT_NEAR(l2_norm(p.sample.direction.values()), 1.0, 1e-9);
    const double c = std::clamp(dot(q.values(), p.perturbed.values()), -1.0, 1.0);
    EXPECT_NEAR(p.sample.realized_delta_alpha.value(), std::acos(c), 1e-7);
  }
}

TEST(Perturb, MeanRealizedAngleAtTenN) {
  RandomSource rng(10);
  const int n = 768;
  double sum = 0.0;
  const UnitVector q = sample_direction(n, rng);
  for (int t = 0; t < 10000; ++t) {
    const Perturbation p = perturb(q, PrivacyBudget::of(10.0 * n), rng);
    sum += angle_between(q.values(), p.perturbed.values());
  }
  const double mean = sum / 10000;
  EXPECT_GE(mean, 0.095);
  EXPECT_LE(mean, 0.105);
}

// Random orthogonal Q (Householder product): delta alpha for Q e and for e
// must share a distribution.
TEST(Perturb, RotationInvariance) {
  RandomSource rng(12);
  const int n = 24;
  std::vector<std::vector<double>> reflectors;
  for (int i = 0; i < 5; ++i) reflectors.push_back(prk::testing::random_unit(n, rng));
  const auto rotate = [&](std::vector<double> x) {
    for (const auto& h : reflectors) {
      const double d = 2.0 * dot(h, x);
      for (int i = 0; i < n; ++i) x[i] -= d * h[i];
    }
    return x;
  };
  const std::vector<double> e = prk::testing::random_unit(n, rng);
  const UnitVector q1 = UnitVector::normalize(e);
  const UnitVector q2 = UnitVector::normalize(rotate(e));
  std::vector<double> a, b;
  for (int t = 0; t < 10000; ++t) {
    a.push_back(perturb(q1, PrivacyBudget::of(60.0), rng).sample.realized_delta_alpha.value());
    const double r = sample_radius(n, PrivacyBudget::of(60.0), rng);
    const UnitVector dir = UnitVector::normalize(rotate(prk::testing::random_unit(n, rng)));
    b.push_back(perturb_with(q2, r, dir).sample.realized_delta_alpha.value());
  }
  EXPECT_GT(prk::testing::ks_two_sample_p(a, b), 0.01);
}

TEST(CalibrateEpsilon, TargetEqualsKIsRejected) {
  const auto p = sphere::SphereParams::make(768, 100000);
  EXPECT_THROW(calibrate_epsilon(p, 5, 5), ConfigError);
  EXPECT_THROW(calibrate_epsilon(p, 5, 4), DomainError);
  EXPECT_THROW(calibrate_epsilon(p, 5, 100001), DomainError);
}

TEST(CalibrateEpsilon, OperatingPoint) {
  const auto p = sphere::SphereParams::make(768, 100000);
  const double eps = calibrate_epsilon(p, 5, 160).epsilon();
  EXPECT_NEAR(eps / 25600.0, 1.0, 0.25);
}

TEST(CalibrateEpsilon, RoundTrips) {
  for (auto [n, N, k, target] : {std::tuple{768, 100000u, 5u, 300u}, std::tuple{128, 10000u, 20u, 300u},
                                 std::tuple{32, 5000u, 3u, 11u}, std::tuple{128, 10000u, 5u, 6u}}) {
    const auto p = sphere::SphereParams::make(n, N);
    const auto budget = calibrate_epsilon(p, k, target);
    const auto kp = sphere::expanded_k_prime(p, k, PolarAngle::radians(budget.mean_radius(n)));
    EXPECT_NEAR(static_cast<double>(kp), static_cast<double>(target), 1.0) << n << " " << target;
  }
}

TEST(EpsilonGuidance, Band) {
  EXPECT_FALSE(epsilon_guidance(100, PrivacyBudget::of(1000)).has_value());
  EXPECT_FALSE(epsilon_guidance(100, PrivacyBudget::of(5000)).has_value());
  EXPECT_TRUE(epsilon_guidance(100, PrivacyBudget::of(999)).has_value());
  EXPECT_TRUE(epsilon_guidance(100, PrivacyBudget::of(5001)).has_value());
}

TEST(GammaPdf, MatchesBoost) {
  const boost::math::gamma_distribution<double> dist(768.0, 1.0 / 7680.0);
  for (double r : {0.06, 0.09, 0.1, 0.12, 0.14}) {
    const double expected = boost::math::pdf(dist, r);
    EXPECT_NEAR(gamma_pdf(r, 768.0, 7680.0), expected, 1e-10 * expected + 1e-300);
  }
  EXPECT_EQ(gamma_pdf(-1.0, 3.0, 1.0), 0.0);
}

}  // namespace
