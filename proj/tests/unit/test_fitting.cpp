#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fbp/error.hpp"
#include "fbp/fitting.hpp"

using namespace fbp;

TEST(LinearFit, ExactLine) {
  const std::vector<double> x{0.0, 1.0, 2.0, 5.0};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 - 0.5 * v);
  const LinearFit f = linear_fit(x, y);
  EXPECT_NEAR(f.intercept, 3.0, 1e-14);
  EXPECT_NEAR(f.slope, -0.5, 1e-14);
  EXPECT_NEAR(f.r2, 1.0, 1e-14);
  EXPECT_EQ(f.samples, 4u);
}

TEST(LinearFit, Degenerate) {
  EXPECT_THROW((void)linear_fit({1.0}, {2.0}), Error);
  try {
    (void)linear_fit({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientSamples);
  }
  EXPECT_THROW((void)linear_fit({1.0, 2.0}, {1.0}), Error);
}

TEST(PowerFit, RecoversInjectedLaw) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(0.01, 1.0);
  for (double p : {0.5, 1.0, 2.0, 2.7}) {
    std::vector<double> d;
    std::vector<double> v;
    for (int k = 0; k < 40; ++k) {
      d.push_back(U(rng));
      v.push_back(1.7 * std::pow(d.back(), p));
    }
    const PowerFit f = power_law_fit(d, v);
    EXPECT_NEAR(f.exponent, p, 1e-12);
    EXPECT_NEAR(f.constant, 1.7, 1e-12);
  }
}

TEST(PowerFit, NoisyInjection) {
  std::mt19937 rng(9);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<double> d;
  std::vector<double> v;
  for (int k = 1; k <= 200; ++k) {
    d.push_back(0.005 * k);
    v.push_back(0.5 * d.back() * d.back() * std::exp(noise(rng)));
  }
  const PowerFit f = power_law_fit(d, v);
  EXPECT_NEAR(f.exponent, 2.0, 0.01);
  EXPECT_GT(f.r2, 0.99);
}

TEST(PowerFit, NonpositiveSamplesDropped) {
  const PowerFit f = power_law_fit({0.0, 1.0, 2.0, 4.0, 3.0}, {1.0, 1.0, 4.0, 16.0, -9.0});
  EXPECT_EQ(f.samples, 3u);
  EXPECT_NEAR(f.exponent, 2.0, 1e-12);
  EXPECT_THROW((void)power_law_fit({1.0, 2.0, 3.0}, {0.0, 0.0, 1.0}), Error);
}

TEST(QuadraticCoefficient, NoIntercept) {
  std::vector<double> d;
  std::vector<double> u;
  for (int k = 1; k <= 10; ++k) {
    d.push_back(0.1 * k);
    u.push_back(1.3 * d.back() * d.back() / 2.0);
  }
  EXPECT_NEAR(quadratic_coefficient(d, u), 1.3, 1e-13);
  EXPECT_THROW((void)quadratic_coefficient({}, {}), Error);
}
