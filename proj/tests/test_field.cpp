#include <gtest/gtest.h>

#include <random>
#include <set>

#include "epikl/errors.hpp"
#include "epikl/field.hpp"
#include "epikl/poly.hpp"

using namespace epikl;

namespace {

const std::vector<std::pair<std::uint32_t, unsigned>> kSmallFields = {{3, 1}, {5, 1}, {7, 1}, {11, 1}, {3, 2},
                                                                        {5, 2}, {3, 3}, {7, 2}, {3, 4}, {11, 2}};

// Naive polynomial-basis multiplication, independent of the log tables.
elem naive_mul(const Field& F, elem x, elem y) {
  const auto a = F.digits(x), b = F.digits(y);
  const unsigned e = F.degree();
  const std::uint32_t p = F.p();
  std::vector<std::uint64_t> c(2 * e, 0);
  for (unsigned i = 0; i < e; ++i)
    for (unsigned j = 0; j < e; ++j) c[i + j] = (c[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p;
  const auto& f = F.modulus();
  for (unsigned k = 2 * e - 1; k >= e; --k) {
    const std::uint64_t lead = c[k];
    if (lead == 0) continue;
    for (unsigned i = 0; i <= e; ++i) c[k - e + i] = (c[k - e + i] + (p - lead) * f[i]) % p;
  }
  std::vector<std::uint32_t> d(e);
  for (unsigned i = 0; i < e; ++i) d[i] = static_cast<std::uint32_t>(c[i]);
  return F.from_digits(d);
}

}  // namespace

TEST(Field, PrimeFieldExamples) {
  Field F(5);
  EXPECT_EQ(F.add(3, 4), 2u);
  EXPECT_EQ(F.inv(2), 3u);
  EXPECT_EQ(F.neg(1), 4u);
  EXPECT_EQ(F.pow(2, 4), 1u);
  EXPECT_THROW(F.inv(0), degenerate_input);
}

TEST(Field, F9ModulusRelation) {
  Field F(3, 2);
  EXPECT_EQ(F.modulus(), (std::vector<std::uint32_t>{1, 0, 1}));
  const elem x = F.from_digits({0, 1});
  EXPECT_EQ(F.mul(x, x), 2u);
  EXPECT_EQ(F.size(), 9u);
}

TEST(Field, RejectsEvenOrComposite) {
  EXPECT_THROW(Field(2), std::invalid_argument);
  EXPECT_THROW(Field(9), std::invalid_argument);
  EXPECT_THROW(split_prime_power(12), std::invalid_argument);
  EXPECT_EQ(split_prime_power(81), (std::pair<std::uint32_t, unsigned>{3, 4}));
}

TEST(Field, MultiplicationMatchesPolynomialModel) {
  for (auto [p, e] : kSmallFields) {
    Field F(p, e);
    for (elem x = 0; x < F.size(); ++x)
      for (elem y = 0; y < F.size(); ++y) ASSERT_EQ(F.mul(x, y), naive_mul(F, x, y)) << F.describe();
  }
}

TEST(Field, AxiomsExhaustive) {
  for (auto [p, e] : kSmallFields) {
    Field F(p, e);
    for (elem x = 0; x < F.size(); ++x) {
      ASSERT_EQ(F.add(x, F.neg(x)), 0u);
      if (x != 0) { ASSERT_EQ(F.mul(x, F.inv(x)), 1u); }
      ASSERT_EQ(F.pow_by_squaring(x, F.size()), x);
      for (elem y = 0; y < F.size(); ++y) {
        ASSERT_EQ(F.add(x, y), F.add(y, x));
        ASSERT_EQ(F.sub(F.add(x, y), y), x);
      }
    }
  }
}

TEST(Field, DlogExpBijection) {
  for (auto [p, e] : kSmallFields) {
    Field F(p, e);
    std::set<elem> seen;
    for (std::uint64_t k = 0; k + 1 < F.size(); ++k) {
      const elem x = F.exp(k);
      ASSERT_EQ(F.dlog(x), k);
      seen.insert(x);
    }
    EXPECT_EQ(seen.size(), F.size() - 1u);
    EXPECT_EQ(seen.count(0), 0u);
  }
}

TEST(Field, TraceLinearAndSurjective) {
  for (std::uint32_t q : {3u, 5u, 7u, 9u, 11u, 25u, 27u, 49u, 81u, 121u}) {
    auto [p, e] = split_prime_power(q);
    Field F(p, e);
    std::set<std::uint32_t> image;
    for (elem x = 0; x < q; ++x) {
      image.insert(F.trace(x));
      std::uint32_t direct = 0;
      elem y = x;
      for (unsigned i = 0; i < e; ++i) {
        direct = (direct + F.digits(y)[0]) % p;
        y = F.frobenius(y);
      }
      ASSERT_EQ(F.trace(x), direct);
      for (elem z = 0; z < q; ++z) ASSERT_EQ(F.trace(F.add(x, z)), (F.trace(x) + F.trace(z)) % p);
    }
    EXPECT_EQ(image.size(), p);
  }
}

TEST(Field, QuadraticCharacterMatchesSquares) {
  for (auto [p, e] : kSmallFields) {
    Field F(p, e);
    std::set<elem> squares;
    for (elem x = 1; x < F.size(); ++x) squares.insert(F.mul(x, x));
    for (elem x = 1; x < F.size(); ++x) ASSERT_EQ(F.quadratic_char(x), squares.count(x) ? 1 : -1);
  }
}

TEST(Field, SeededModulusIsDeterministic) {
  Field a(5, 3, 17), b(5, 3, 17);
  EXPECT_EQ(a.modulus(), b.modulus());
  EXPECT_EQ(a.primitive_root(), b.primitive_root());
  EXPECT_TRUE(detail::is_irreducible(detail::pvec(a.modulus().begin(), a.modulus().end()), 5));
}

TEST(FieldExtension, DegreeTwoOverF3) {
  FieldExtension ext(make_field(3), 2);
  EXPECT_EQ(ext.ext()->size(), 9u);
  std::set<elem> img;
  for (elem x = 0; x < 3; ++x) img.insert(ext.embed(x));
  EXPECT_EQ(img.size(), 3u);
}

TEST(FieldExtension, DegreeOneIsIdentity) {
  FieldExtension ext(make_field(5), 1);
  EXPECT_EQ(ext.ext()->size(), 5u);
  for (elem x = 0; x < 5; ++x) EXPECT_EQ(ext.embed(x), x);
}

TEST(FieldExtension, EmbeddingIsRingHomomorphism) {
  for (auto [base, k] : std::vector<std::pair<FieldPtr, unsigned>>{{make_field(3), 4}, {make_field(5, 2), 2}, {make_field(7), 3}}) {
    FieldExtension ext(base, k);
    const Field& E = *ext.ext();
    for (elem x = 0; x < base->size(); ++x)
      for (elem y = 0; y < base->size(); ++y) {
        ASSERT_EQ(ext.embed(base->add(x, y)), E.add(ext.embed(x), ext.embed(y)));
        ASSERT_EQ(ext.embed(base->mul(x, y)), E.mul(ext.embed(x), ext.embed(y)));
      }
  }
}

TEST(FieldExtension, TraceTransitivityF81) {
  auto F9 = make_field(3, 2);
  FieldExtension ext(F9, 2);
  const Field& F81 = *ext.ext();
  ASSERT_EQ(F81.size(), 81u);
  for (elem y = 0; y < 81; ++y) {
    elem s = 0, z = y;
    for (int j = 0; j < 4; ++j) {
      s = F81.add(s, z);
      z = F81.pow(z, 3);
    }
    ASSERT_TRUE(ext.in_base(s));
    const std::uint32_t direct = F81.trace(y);
    EXPECT_EQ(direct, F9->trace(ext.relative_trace(y)));
    const auto sd = F9->digits(ext.restrict(s));
    EXPECT_EQ(sd[1], 0u);
    EXPECT_EQ(direct, sd[0]);
  }
}

TEST(Poly, RootsOfProductOfLinearFactors) {
  Field F(7);
  Poly f = {1};
  for (elem r : {1u, 2u, 3u}) f = poly_mul(F, f, Poly{F.neg(r), 1});
  const RootMultiset R = poly_roots(F, f);
  ASSERT_EQ(R.roots.size(), 3u);
  EXPECT_TRUE(R.squarefree);
  EXPECT_EQ(R.roots[0], (std::pair<elem, int>{1, 1}));
  EXPECT_EQ(R.roots[2], (std::pair<elem, int>{3, 1}));
}

TEST(Poly, DoubleRoot) {
  Field F(5);
  const Poly f = poly_mul(F, Poly{4, 1}, Poly{4, 1});
  const RootMultiset R = poly_roots(F, f);
  ASSERT_EQ(R.roots.size(), 1u);
  EXPECT_EQ(R.roots[0], (std::pair<elem, int>{1, 2}));
  EXPECT_FALSE(R.squarefree);
}

TEST(Poly, XSquaredPlusOneOverF7) {
  Field F(7);
  bool minus_one_square = false;
  for (elem x = 0; x < 7; ++x) minus_one_square = minus_one_square || F.mul(x, x) == 6;
  ASSERT_FALSE(minus_one_square);
  const RootMultiset R = poly_roots(F, Poly{1, 0, 1});
  EXPECT_TRUE(R.roots.empty());
  EXPECT_TRUE(R.squarefree);
}

TEST(Poly, ZeroPolynomialRejected) {
  Field F(5);
  EXPECT_THROW(poly_roots(F, Poly{}), degenerate_input);
}

TEST(Poly, DivmodRandomized) {
  Field F(11);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<elem> c(0, 10);
  for (int it = 0; it < 500; ++it) {
    Poly a(1 + it % 7), b(1 + it % 4);
    for (auto& x : a) x = c(rng);
    for (auto& x : b) x = c(rng);
    b.back() = 1 + it % 10;
    poly_trim(a);
    auto [qq, r] = poly_divmod(F, a, b);
    EXPECT_LT(poly_degree(r), poly_degree(b));
    Poly back = poly_add(F, poly_mul(F, qq, b), r);
    poly_trim(back);
    EXPECT_EQ(back, a);
  }
}
