#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fbp/error.hpp"
#include "fbp/fitting.hpp"
#include "fbp/penalty.hpp"

using namespace fbp;

TEST(Penalty, BetaVanishesAtZero) {
  const auto fam = PenaltyFamily::rational_cube();
  EXPECT_EQ(fam.beta(0.0), 0.0);
  EXPECT_EQ(fam.beta_eps(0.0, 0.3), 0.0);
  EXPECT_EQ(fam.B_eps(0.0, 0.3), 0.0);
}

TEST(Penalty, DefaultScaleAndHandValues) {
  const auto fam = PenaltyFamily::rational_cube(0.5);
  EXPECT_DOUBLE_EQ(fam.scale(), 1.0);
  EXPECT_DOUBLE_EQ(fam.beta(1.0), 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(fam.beta_eps(0.1, 0.1), 1.25);
  EXPECT_DOUBLE_EQ(fam.B_eps(0.2, 0.2), 1.0 / 8.0);
}

TEST(Penalty, MassIntegral) {
  for (double mass : {0.5, 1.0 / std::sqrt(2.0), 2.0}) {
    const auto fam = PenaltyFamily::rational_cube(mass);
    EXPECT_NEAR(fam.integrate_beta(), mass, 1e-10);
    EXPECT_DOUBLE_EQ(fam.scale(), 2.0 * mass);
  }
}

TEST(Penalty, PrimitiveTendsToMass) {
  const auto fam = PenaltyFamily::rational_cube(0.5);
  EXPECT_NEAR(fam.B_eps(1.0, 1e-9), 0.5, 1e-8);
  EXPECT_LT(fam.B_eps(1.0, 1e-3), 0.5);
}

TEST(Penalty, ArgumentChecks) {
  const auto fam = PenaltyFamily::rational_cube();
  try {
    (void)fam.beta(-1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NegativeArgument);
  }
  try {
    (void)fam.beta_eps(1.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonpositiveEps);
  }
  EXPECT_THROW((void)PenaltyFamily::rational_cube(0.0), Error);
  EXPECT_THROW((void)PenaltyFamily::rational_cube(-1.0), Error);
}

TEST(PenaltyProperty, ScalingIdentity) {
  const auto fam = PenaltyFamily::rational_cube();
  for (double eps : {1e-3, 0.05, 0.4, 3.0}) {
    for (double s : {0.0, 1e-6, 0.3, 1.0, 2.5, 40.0, 1e5}) {
      const double lhs = fam.beta_eps(eps * s, eps) * eps;
      const double rhs = fam.beta(s);
      EXPECT_NEAR(lhs, rhs, 1e-14 * std::max(std::abs(rhs), 1e-300));
    }
  }
}

TEST(PenaltyProperty, PositiveAwayFromZero) {
  const auto fam = PenaltyFamily::rational_cube();
  for (double s = 1e-8; s < 1e8; s *= 3.7) EXPECT_GT(fam.beta(s), 0.0);
}

TEST(PenaltyProperty, PrimitiveMonotone) {
  const auto fam = PenaltyFamily::rational_cube();
  double prev = 0.0;
  for (double u = 0.0; u < 5.0; u += 0.01) {
    const double b = fam.B_eps(u, 0.2);
    EXPECT_GE(b, prev);
    prev = b;
  }
}

TEST(PenaltyProperty, DerivativeOfPrimitiveSecondOrder) {
  const auto fam = PenaltyFamily::rational_cube();
  const double eps = 0.2;
  const std::vector<double> us{0.05, 0.13, 0.3, 0.7, 1.9};
  std::vector<double> hs;
  std::vector<double> errs;
  for (double h = 1e-2; h > 5e-4; h /= 2.0) {
    double err = 0.0;
    for (double u : us) {
      const double fd = (fam.B_eps(u + h, eps) - fam.B_eps(u - h, eps)) / (2.0 * h);
      err = std::max(err, std::abs(fd - fam.beta_eps(u, eps)));
    }
    hs.push_back(h);
    errs.push_back(err);
  }
  EXPECT_GE(power_law_fit(hs, errs).exponent, 1.9);
}

TEST(PenaltyProperty, FirstIntegralLimit) {
  for (double mass : {0.5, 1.0 / std::sqrt(2.0)}) {
    const auto fam = PenaltyFamily::rational_cube(mass);
    EXPECT_NEAR(std::sqrt(2.0 * fam.B_eps(1.0, 1e-8)), std::sqrt(2.0 * mass), 1e-7);
  }
  EXPECT_NEAR(std::sqrt(2.0 * PenaltyFamily::rational_cube(0.5).B_eps(1.0, 1e-8)), 1.0, 1e-7);
}

TEST(PenaltyRaw, MatchesCheckedEvaluation) {
  const auto fam = PenaltyFamily::rational_cube(0.7);
  for (double s : {0.0, 0.1, 1.0, 9.0}) {
    EXPECT_EQ(fam.beta_raw(s), fam.beta(s));
    EXPECT_EQ(fam.B_raw(s), fam.B(s));
  }
  EXPECT_EQ(fam.beta_raw(-1.0), 0.0);
  EXPECT_NEAR(fam.dbeta_raw(0.4), (fam.beta(0.4 + 1e-6) - fam.beta(0.4 - 1e-6)) / 2e-6, 1e-8);
}

TEST(CustomTable, RescaledToMass) {
  std::vector<std::pair<double, double>> samples;
  for (int k = 0; k <= 200; ++k) {
    const double s = 0.1 * k;
    samples.emplace_back(s, s * std::exp(-s));
  }
  const auto fam = PenaltyFamily::custom_table(samples, 0.5);
  EXPECT_EQ(fam.shape(), PenaltyShape::CustomTable);
  EXPECT_NEAR(fam.integrate_beta(), 0.5, 1e-8);
  EXPECT_NEAR(fam.B(1e3), 0.5, 1e-8);
  EXPECT_EQ(fam.beta(0.0), 0.0);
  EXPECT_GT(fam.beta(1.0), 0.0);
}

TEST(CustomTable, InvalidSamplesRejected) {
  try {
    (void)PenaltyFamily::custom_table({{0.0, 0.1}, {1.0, 1.0}, {2.0, 0.5}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidPenalty);
  }
  EXPECT_THROW((void)PenaltyFamily::custom_table({{0.0, 0.0}, {2.0, 1.0}, {1.0, 0.5}}), Error);
}
