#include <gtest/gtest.h>

#include <random>

#include "epikl/cyclo.hpp"
#include "epikl/errors.hpp"

using namespace epikl;

namespace {

CycloSum random_sum(std::uint32_t p, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> c(-20, 20);
  std::vector<std::int64_t> v(p);
  for (auto& x : v) x = c(rng);
  return CycloSum(p, v);
}

}  // namespace

TEST(CycloSum, CanonicalFormDropsTopPower) {
  CycloSum s(5, {1, 2, 3, 4, 5});
  const CycloSum c = s.canonical();
  EXPECT_EQ(c[4], 0);
  EXPECT_EQ(c.coeffs(), (std::vector<std::int64_t>{-4, -3, -2, -1, 0}));
  EXPECT_EQ(s, c);
  EXPECT_NEAR(std::abs(s.to_complex() - c.to_complex()), 0.0, 1e-12);
}

TEST(CycloSum, FullOrbitIsZero) {
  CycloSum s(7);
  for (std::uint32_t j = 0; j < 7; ++j) s.add_power(j, 3);
  EXPECT_TRUE(s.is_zero());
  EXPECT_EQ(s.as_integer(), std::optional<std::int64_t>(0));
}

TEST(CycloSum, RingAxiomsRandomized) {
  std::mt19937_64 rng(11);
  for (std::uint32_t p : {3u, 5u, 7u, 11u, 13u}) {
    for (int it = 0; it < 200; ++it) {
      const CycloSum a = random_sum(p, rng), b = random_sum(p, rng), c = random_sum(p, rng);
      ASSERT_EQ(a + b, b + a);
      ASSERT_EQ(a * b, b * a);
      ASSERT_EQ((a * b) * c, a * (b * c));
      ASSERT_EQ(a * (b + c), a * b + a * c);
      ASSERT_EQ(a - a, CycloSum(p));
      ASSERT_NEAR(std::abs((a * b).to_complex() - a.to_complex() * b.to_complex()), 0.0, 1e-9);
    }
  }
}

TEST(CycloSum, EmbeddingPrecisionLargeCoefficients) {
  const std::int64_t big = std::int64_t{1} << 39;
  CycloSum s(5, {big, -big + 3, 7, big / 3, 0});
  const cplx z = s.to_complex();
  long double re = 0, im = 0;
  for (int j = 0; j < 5; ++j) {
    const long double ang = 2.0L * 3.14159265358979323846264338327950288L * j / 5;
    re += static_cast<long double>(s[static_cast<std::size_t>(j)]) * std::cos(ang);
    im += static_cast<long double>(s[static_cast<std::size_t>(j)]) * std::sin(ang);
  }
  const double ref = std::hypot(static_cast<double>(re), static_cast<double>(im));
  EXPECT_LE(std::abs(std::abs(z) - ref), 1e-12 * ref);
}

TEST(CycloSum, MismatchedPrimeRejected) {
  EXPECT_THROW(CycloSum(3) + CycloSum(5), shape_error);
}

TEST(Accumulator, FullAdditiveSumVanishes) {
  auto F = make_field(5);
  CharSumAccumulator acc{AdditiveCharacter(F)};
  for (elem x = 0; x < 5; ++x) acc.add(std::int64_t{1}, x);
  const TraceValue v = acc.result();
  ASSERT_TRUE(v.is_exact());
  EXPECT_TRUE(v.exact->is_zero());
}

TEST(Accumulator, TwoZeta3) {
  auto F = make_field(3);
  CharSumAccumulator acc{AdditiveCharacter(F)};
  acc.add(std::int64_t{1}, 1);
  acc.add(std::int64_t{1}, 1);
  EXPECT_EQ(*acc.result().exact, CycloSum::zeta_power(3, 1, 2));
}

TEST(Accumulator, GaussSumNormF7) {
  auto F = make_field(7);
  const AdditiveCharacter psi(F);
  CharSumAccumulator g(psi), g2(psi);
  for (elem x = 0; x < 7; ++x) g.add(std::int64_t{1}, F->mul(x, x));
  for (elem x = 0; x < 7; ++x)
    for (elem y = 0; y < 7; ++y) g2.add(std::int64_t{1}, F->add(F->mul(x, x), F->mul(y, y)));
  const CycloSum G = *g.result().exact, G2 = *g2.result().exact;
  EXPECT_EQ(G * G, G2);
  EXPECT_NEAR(std::norm(G.to_complex()), 7.0, 1e-12);
  EXPECT_NEAR(std::abs(G2.to_complex()), 7.0, 1e-12);
}

TEST(Accumulator, MixingBackendsRejected) {
  auto F = make_field(5);
  CharSumAccumulator acc{AdditiveCharacter(F)};
  acc.add(std::int64_t{1}, 1);
  EXPECT_THROW(acc.add(cplx(1.0, 0.0), 2), invariant_violation);
}

TEST(Accumulator, FloatErrorBound) {
  auto F = make_field(11);
  const MultiplicativeCharacter chi(F, 3);
  CharSumAccumulator acc{AdditiveCharacter(F)};
  cplx ref = 0;
  for (elem x = 1; x < 11; ++x) {
    acc.add(chi.value(x), x);
    ref += chi.value(x) * AdditiveCharacter(F).value(x);
  }
  const TraceValue v = acc.result();
  EXPECT_FALSE(v.is_exact());
  EXPECT_LE(v.error_bound, 10 * 1e-14 + 1e-300);
  EXPECT_LE(std::abs(v.value - ref), 1e-12);
  EXPECT_NEAR(std::abs(v.value), std::sqrt(11.0), 1e-9);
}

TEST(Accumulator, MergeMatchesSequential) {
  auto F = make_field(3, 3);
  const AdditiveCharacter psi(F, 5);
  CharSumAccumulator whole(psi), a(psi), b(psi);
  for (elem x = 0; x < F->size(); ++x) {
    const std::int64_t w = static_cast<std::int64_t>(x % 4) - 1;
    whole.add(w, F->mul(x, x));
    (x % 2 ? a : b).add(w, F->mul(x, x));
  }
  a.merge(b);
  EXPECT_EQ(*a.result().exact, *whole.result().exact);
}

TEST(Characters, AdditiveSumsVanishExactly) {
  for (std::uint32_t q : {3u, 5u, 7u, 9u, 25u, 27u, 49u}) {
    auto [p, e] = split_prime_power(q);
    auto F = make_field(p, e);
    for (elem a = 1; a < q; ++a) {
      const AdditiveCharacter psi(F, a);
      CycloSum s(p);
      for (elem x = 0; x < q; ++x) s.add_power(psi.exponent(x), 1);
      ASSERT_TRUE(s.is_zero()) << q << " " << a;
    }
  }
}

TEST(Characters, AdditiveHomomorphism) {
  auto F = make_field(5, 2);
  const AdditiveCharacter psi(F, 7);
  for (elem x = 0; x < 25; ++x)
    for (elem y = 0; y < 25; ++y) ASSERT_EQ(psi.exponent(F->add(x, y)), (psi.exponent(x) + psi.exponent(y)) % 5);
}

TEST(Characters, MultiplicativeSumsVanish) {
  for (std::uint32_t q : {5u, 7u, 9u, 11u, 13u, 25u}) {
    auto [p, e] = split_prime_power(q);
    auto F = make_field(p, e);
    for (std::int64_t r = 1; r < q - 1; ++r) {
      const MultiplicativeCharacter chi(F, r);
      cplx s = 0;
      for (elem x = 1; x < q; ++x) s += chi.value(x);
      ASSERT_LT(std::abs(s), 1e-9);
      if (chi.is_quadratic()) {
        int t = 0;
        for (elem x = 1; x < q; ++x) t += chi.exact_value(x);
        ASSERT_EQ(t, 0);
      }
    }
  }
}

TEST(Characters, MultiplicativeHomomorphismAndOrder) {
  auto F = make_field(13);
  for (std::int64_t r = 0; r < 12; ++r) {
    const MultiplicativeCharacter chi(F, r);
    EXPECT_EQ(chi.is_quadratic(), r == 6);
    for (elem x = 1; x < 13; ++x)
      for (elem y = 1; y < 13; ++y) ASSERT_LT(std::abs(chi.value(F->mul(x, y)) - chi.value(x) * chi.value(y)), 1e-12);
  }
  EXPECT_THROW(MultiplicativeCharacter(F, 5).exact_value(2), invariant_violation);
}
