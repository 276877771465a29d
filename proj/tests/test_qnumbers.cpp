#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle/mp_oracle.hpp"
#include "qpdeform/qnumbers.hpp"

using namespace qpdeform;

namespace {

complex unit(double frac) { return std::polar(1.0, std::numbers::pi * frac); }

double rel_err(complex a, complex b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace

TEST(QNumbers, HalfQUnitP) {
  const DeformationParams params(0.5, 1.0);
  const complex b = qp_number(3, params);
  EXPECT_EQ(b, complex(1.75, 0.0));
  const auto ref = oracle::to_double(
      oracle::basket(3, oracle::to_mp(0.5), oracle::to_mp(1.0)));
  EXPECT_LT(rel_err(b, ref), 1e-15);
}

TEST(QNumbers, ZeroIndexIsZero) {
  for (auto [q, p] : {std::pair<complex, complex>{0.5, 1.0}, {unit(0.3), 2.0},
                      {1.0, 1.0}, {3.0, -0.2}}) {
    EXPECT_EQ(qp_number(0, DeformationParams(q, p)), complex(0.0, 0.0));
  }
}

TEST(QNumbers, ClassicalLimitUsesDegenerateBranch) {
  const DeformationParams params(1.0, 1.0);
  EXPECT_TRUE(params.is_degenerate());
  EXPECT_EQ(qp_number(5, params), complex(5.0, 0.0));
}

TEST(QNumbers, SymmetricCaseIsSineRatio) {
  const complex Q = unit(1.0 / 7.0);
  const complex b = qp_number(4, DeformationParams(Q, Q));
  const double expected =
      std::sin(4.0 * std::numbers::pi / 7.0) / std::sin(std::numbers::pi / 7.0);
  EXPECT_NEAR(b.real(), expected, 1e-14);
  EXPECT_NEAR(b.imag(), 0.0, 1e-14);
  const auto ref = oracle::to_double(
      oracle::basket(4, oracle::unit_root(1, 7), oracle::unit_root(1, 7)));
  EXPECT_LT(rel_err(b, ref), 1e-14);
}

TEST(QNumbers, SequenceFactorials) {
  const QNumberSequence seq = qp_sequence(3, DeformationParams(0.5, 1.0));
  const std::vector<complex> expected{1.0, 1.0, 1.5, 2.625};
  ASSERT_EQ(seq.factorials.size(), 4u);
  for (std::size_t n = 0; n < 4; ++n) {
    EXPECT_EQ(seq.factorials[n], expected[n]);
    EXPECT_EQ(seq.abs_factorials[n], expected[n].real());
  }
}

TEST(QNumbers, SequenceAtZeroCutoff) {
  const QNumberSequence seq = qp_sequence(0, DeformationParams(unit(0.2), 3.0));
  EXPECT_EQ(seq.numbers, std::vector<complex>{0.0});
  EXPECT_EQ(seq.factorials, std::vector<complex>{1.0});
  EXPECT_EQ(seq.abs_factorials, std::vector<double>{1.0});
}

TEST(QNumbers, ClassicalFactorials) {
  const QNumberSequence seq = qp_sequence(6, DeformationParams(1.0, 1.0));
  const std::vector<double> expected{1, 1, 2, 6, 24, 120, 720};
  for (std::size_t n = 0; n <= 6; ++n) EXPECT_EQ(seq.factorials[n], expected[n]);
}

TEST(QNumbers, SpecialBasket) {
  EXPECT_EQ(qp_number_special(2, 2.0), complex(2.5, 0.0));
  EXPECT_EQ(qp_number_special(1, complex(0.3, 1.7)), complex(1.0, 0.0));
  EXPECT_EQ(qp_number_special(3, 1.0), complex(3.0, 0.0));
  EXPECT_EQ(qp_number_special(3, -1.0), complex(3.0, 0.0));  // 3 (-1)^2
  EXPECT_THROW(qp_number_special(2, 0.0), InvalidParameter);
}

TEST(QNumbers, ZeroPIsRejected) {
  EXPECT_THROW(DeformationParams(0.5, 0.0), InvalidParameter);
}

TEST(QNumbers, RootOfUnityGivesExactZero) {
  const complex Q = unit(1.0 / 7.0);
  const QNumberSequence seq = qp_sequence(20, DeformationParams(Q, Q));
  ASSERT_TRUE(seq.first_zero.has_value());
  EXPECT_EQ(*seq.first_zero, 7u);
  EXPECT_EQ(seq.numbers[7], complex(0.0, 0.0));
  EXPECT_EQ(seq.factorials[12], complex(0.0, 0.0));
  EXPECT_FALSE(seq.first_nonfinite.has_value());
}

TEST(QNumbers, OverflowIsFlagged) {
  const QNumberSequence seq = qp_sequence(200, DeformationParams(3.0, 1.0));
  ASSERT_TRUE(seq.first_nonfinite.has_value());
  EXPECT_TRUE(std::isinf(seq.abs_factorials[*seq.first_nonfinite]));
  EXPECT_TRUE(std::isfinite(seq.abs_factorials[*seq.first_nonfinite - 1]));
  EXPECT_TRUE(std::isfinite(seq.log_abs_factorials.back()));
}

TEST(QNumbersProperty, DegenerateBranchIsTheLimit) {
  // With p = 1/(q + eps), [n] = ((q + eps)^n - q^n) / eps, which differs from
  // n q^(n-1) by C(n,2) q^(n-2) eps to first order.
  const double eps = 1e-6;
  for (complex q : {complex(0.7, 0.2), unit(0.3), complex(1.0, 0.0),
                    complex(-0.9, 0.1)}) {
    const DeformationParams near(q, 1.0 / (q + eps));
    ASSERT_FALSE(near.is_degenerate());
    for (std::size_t n = 1; n <= 20; ++n) {
      const complex limit = static_cast<double>(n) * std::pow(q, n - 1);
      const double first_order = 0.5 * static_cast<double>(n * (n - 1)) *
                                 std::pow(std::abs(q), static_cast<double>(n) - 2.0) * eps;
      const double err = std::abs(qp_number(n, near) - limit);
      EXPECT_LT(err, 1.01 * first_order + 1e-8) << "n=" << n;
      if (first_order < 0.9e-4) EXPECT_LT(err, 1e-4) << "n=" << n;
    }
  }
}

TEST(QNumbersProperty, RandomParameterInvariants) {
  std::mt19937_64 rng(20241014);
  std::uniform_real_distribution<double> mod(0.3, 1.6);
  std::uniform_real_distribution<double> arg(-std::numbers::pi, std::numbers::pi);
  for (int trial = 0; trial < 200; ++trial) {
    const complex q = std::polar(mod(rng), arg(rng));
    const complex p = std::polar(mod(rng), arg(rng));
    const DeformationParams params(q, p);
    if (params.is_degenerate()) continue;

    EXPECT_EQ(qp_number(1, params), complex(1.0, 0.0));

    const complex Q = q;
    for (std::size_t n : {2u, 5u, 11u})
      EXPECT_EQ(qp_number(n, DeformationParams(Q, Q)), qp_number_special(n, Q));

    const QNumberSequence seq = qp_sequence(40, params);
    for (std::size_t n = 0; n <= 40; ++n) {
      const bool finite = std::isfinite(std::abs(seq.factorials[n]));
      if (n > 0 && finite)
        EXPECT_EQ(seq.factorials[n], seq.factorials[n - 1] * seq.numbers[n]);
      if (finite && std::abs(seq.factorials[n]) > 0.0) {
        EXPECT_NEAR(seq.abs_factorials[n] / std::abs(seq.factorials[n]), 1.0,
                    1e-12);
      }
      EXPECT_EQ(seq.numbers[n], qp_number(n, params));
    }

    const DeformationParams cj = params.conj();
    for (std::size_t n : {3u, 8u, 17u}) {
      const complex a = qp_number(n, cj);
      const complex b = std::conj(qp_number(n, params));
      EXPECT_LE(std::abs(a - b), 1e-15 * std::abs(b));
    }
  }
}

TEST(QNumbersProperty, AgreesWithArbitraryPrecision) {
  const std::vector<std::pair<complex, complex>> points{
      {0.5, 1.0}, {std::polar(1.0, 0.66), std::polar(1.0, -1.17)}, {complex(0.8, -0.3), 1.3}};
  for (auto [q, p] : points) {
    const DeformationParams params(q, p);
    for (std::size_t n = 1; n <= 30; ++n) {
      const auto ref =
          oracle::to_double(oracle::basket(n, oracle::to_mp(q), oracle::to_mp(p)));
      EXPECT_LT(rel_err(qp_number(n, params), ref), 1e-12) << n;
    }
  }
}
