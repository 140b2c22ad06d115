#include <gtest/gtest.h>

#include <random>

#include "epikl/errors.hpp"
#include "epikl/verify.hpp"

using namespace epikl;

namespace {

std::vector<elem> iota_values(int n) {
  std::vector<elem> v;
  for (int i = 1; i <= n; ++i) v.push_back(static_cast<elem>(i));
  return v;
}

TraceTable unitary_table(std::uint32_t q, int n, const std::vector<elem>& diag) {
  auto F = make_field(q);
  GradedSpace S(F, classify(GroupType::A2, n, 2));
  return trace_table(S, diagonal_functional(S, diag), CharacterTuple::trivial(S.datum()), AdditiveCharacter(F));
}

std::vector<elem> roots_for(std::uint32_t q, int n, const std::vector<elem>& diag) {
  auto F = make_field(q);
  GradedSpace S(F, classify(GroupType::A2, n, 2));
  return span_test_roots(S, diagonal_functional(S, diag));
}

}  // namespace

TEST(SpanTest, ExactCombinationAndOutsideVector) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N(0.0, 1.0);
  const int len = 12;
  std::vector<std::vector<cplx>> basis(3, std::vector<cplx>(len));
  for (auto& b : basis)
    for (auto& x : b) x = {N(rng), N(rng)};
  std::vector<cplx> target(len, 0.0);
  const cplx coef[3] = {{1.0, -2.0}, {0.5, 0.0}, {0.0, 3.0}};
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < len; ++i) target[static_cast<std::size_t>(i)] += coef[j] * basis[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  const SpanTestResult r = span_test(target, basis, "synthetic");
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.basis_rank, 3);
  ASSERT_EQ(r.coefficients.size(), 3u);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(r.coefficients[static_cast<std::size_t>(j)] - coef[j]), 0.0, 1e-9);
  target[0] += 1.0;
  EXPECT_FALSE(span_test(target, basis, "synthetic").pass);
}

TEST(SpanTest, OddUnitaryInSpan) {
  for (int n : {3, 5})
    for (std::uint32_t q : {7u, 11u}) {
      SCOPED_TRACE("n=" + std::to_string(n) + " q=" + std::to_string(q));
      const auto diag = iota_values(n);
      const TraceTable T = unitary_table(q, n, diag);
      const auto lambda = roots_for(q, n, diag);
      ASSERT_EQ(lambda.size(), static_cast<std::size_t>(n));
      const SpanTestResult r = span_test_odd_unitary(T, lambda);
      EXPECT_TRUE(r.pass) << r.residual / r.target_norm;
      const SpanTestResult c = span_control_trivial_character(T);
      EXPECT_FALSE(c.pass);
      EXPECT_GT(c.residual / c.target_norm, 0.1);
      EXPECT_THROW(span_test_even_unitary(T, lambda), inapplicable);
    }
}

TEST(SpanTest, EvenUnitaryInSpan) {
  for (std::uint32_t q : {5u, 7u}) {
    SCOPED_TRACE("q=" + std::to_string(q));
    const auto diag = iota_values(4);
    const TraceTable T = unitary_table(q, 4, diag);
    const auto lambda = roots_for(q, 4, diag);
    const SpanTestResult r = span_test_even_unitary(T, lambda);
    EXPECT_TRUE(r.pass) << r.residual / r.target_norm;
    const SpanTestResult c = span_control_random(T, lambda, 7);
    EXPECT_FALSE(c.pass);
    EXPECT_GT(c.residual / c.target_norm, 0.1);
    EXPECT_THROW(span_test_odd_unitary(T, lambda), inapplicable);
  }
}

TEST(SpanTest, RootsInapplicable) {
  auto F = make_field(7);
  GradedSpace S6(F, classify(GroupType::A2, 3, 6));
  EXPECT_THROW(span_test_roots(S6, canonical_functional(S6)), inapplicable);
  GradedSpace S(F, classify(GroupType::A2, 3, 2));
  EXPECT_THROW(span_test_roots(S, diagonal_functional(S, {1, 1, 2})), inapplicable);
  const TraceTable T = unitary_table(7, 3, {1, 2, 3});
  EXPECT_THROW(span_test_odd_unitary(T, {1, 1, 2}), inapplicable);
  EXPECT_THROW(span_test_odd_unitary(T, {1, 2}), inapplicable);
  EXPECT_THROW(span_test_odd_unitary(T, {1, 2, 9}), inapplicable);
}

TEST(Purity, StableConfigsWithinRank) {
  struct C {
    GroupType t;
    int n, m;
    std::uint32_t q;
  };
  for (const C& c : {C{GroupType::A2, 3, 2, 7}, C{GroupType::A2, 4, 2, 5}, C{GroupType::A2, 3, 6, 7}, C{GroupType::C, 2, 4, 5},
                     C{GroupType::B, 2, 4, 5}, C{GroupType::C, 1, 2, 11}}) {
    auto F = make_field(c.q);
    GradedSpace S(F, classify(c.t, c.n, c.m));
    SCOPED_TRACE(S.datum().describe());
    const TraceTable T = trace_table(S, canonical_functional(S), CharacterTuple::trivial(S.datum()), AdditiveCharacter(F));
    ASSERT_TRUE(T.stability.stable);
    const PurityResult r = purity_check(T);
    EXPECT_TRUE(r.pass) << r.max_ratio;
    EXPECT_GT(r.max_ratio, 0.0);
  }
}

TEST(Purity, KloostermanWeil) {
  for (std::uint32_t p : {3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u}) {
    auto F = make_field(p);
    const PurityResult r = purity_check(kloosterman_table(F, 2, AdditiveCharacter(F)), 2, 1);
    EXPECT_TRUE(r.pass) << p;
  }
  TraceTable T = unitary_table(7, 3, {1, 2, 3});
  for (auto& v : T.values) v.value *= 10.0;
  EXPECT_FALSE(purity_check(T).pass);
}

TEST(Euler, CharacterLiftIsComposedWithNorm) {
  int nontrivial_offsets = 0;
  for (auto [p, e, k, seed] : std::vector<std::tuple<std::uint32_t, unsigned, unsigned, std::uint64_t>>{
           {3, 1, 2, 0}, {3, 1, 3, 0}, {5, 1, 2, 0}, {7, 1, 2, 1}, {3, 2, 2, 0}, {5, 1, 3, 2}, {3, 1, 4, 1}}) {
    auto B = make_field(p, e);
    const FieldExtension X(B, k, seed);
    const Field& E = *X.ext();
    const std::int64_t q1 = B->size() - 1, Q1 = E.size() - 1;
    if (B->dlog(X.restrict(E.pow(E.primitive_root(), Q1 / q1))) != 1) ++nontrivial_offsets;
    for (std::int64_t a = 0; a < q1; ++a) {
      const auto lifted = lift_character_exponents({a}, X);
      for (elem x = 1; x < E.size(); ++x) {
        elem norm = 1;
        for (elem y = x, j = 0; j < k; ++j, y = E.pow(y, B->size())) norm = E.mul(norm, y);
        // chi'(x) = exp(2 pi i lifted dlog x / Q1), chi(N x) = exp(2 pi i a dlog N x / q1)
        const __int128 lhs = static_cast<__int128>(lifted[0]) * E.dlog(x) * q1;
        const __int128 rhs = static_cast<__int128>(a) * B->dlog(X.restrict(norm)) * Q1;
        ASSERT_EQ((lhs - rhs) % (static_cast<__int128>(q1) * Q1), 0) << p << "^" << e << " k=" << k << " a=" << a;
      }
    }
  }
  EXPECT_GT(nontrivial_offsets, 0);
}

TEST(Euler, SmallUnitaryCases) {
  auto F = make_field(3);
  {
    GradedSpace S(F, classify(GroupType::A2, 3, 6));
    const ProonyEstimate E = euler_characteristic_estimate(S, diagonal_functional(S, {1}), CharacterTuple::trivial(S.datum()), 8);
    EXPECT_TRUE(E.complete);
    EXPECT_EQ(E.estimate, 1);
    EXPECT_GE(E.gap, 10.0);
    EXPECT_NEAR(std::abs(E.prony_sum - cplx(1.0)), 0.0, 1e-6);
  }
  GradedSpace S(F, classify(GroupType::A2, 3, 2));
  {
    const StableFunctional phi = search_functional(S, false);
    const ProonyEstimate E = euler_characteristic_estimate(S, phi, CharacterTuple::trivial(S.datum()), 8);
    EXPECT_EQ(E.estimate, 3);
    EXPECT_GE(E.gap, 10.0);
    EXPECT_NEAR(std::abs(E.prony_sum - cplx(3.0)), 0.0, 1e-6);
  }
  {
    const StableFunctional phi = search_functional(S, true);
    const ProonyEstimate E = euler_characteristic_estimate(S, phi, CharacterTuple::trivial(S.datum()), 8);
    EXPECT_EQ(E.estimate, 2);
    EXPECT_GE(E.gap, 10.0);
  }
  EXPECT_THROW(euler_characteristic_estimate(S, search_functional(S, false), CharacterTuple::trivial(S.datum()), 3), degenerate_input);
}

TEST(Euler, BudgetTruncates) {
  auto F = make_field(3);
  GradedSpace S(F, classify(GroupType::A2, 3, 6));
  EulerOptions opt;
  opt.budget = 2000;
  const ProonyEstimate E = euler_characteristic_estimate(S, diagonal_functional(S, {1}), CharacterTuple::trivial(S.datum()), 8, opt);
  EXPECT_FALSE(E.complete);
  EXPECT_LT(E.k_achieved, 8);
  EXPECT_LE(E.cost, 2000.0);
}

TEST(SearchFunctional, Properties) {
  for (std::uint32_t q : {3u, 5u}) {
    auto F = make_field(q);
    GradedSpace S(F, classify(GroupType::A2, 3, 2));
    const StableFunctional nd = search_functional(S, false);
    EXPECT_TRUE(is_stable(S, nd).stable);
    EXPECT_EQ(mat_rank(*F, nd.form), 3u);
    EXPECT_EQ(nd.form, transpose(nd.form));
    const StableFunctional dg = search_functional(S, true);
    EXPECT_TRUE(is_stable(S, dg).stable);
    EXPECT_EQ(mat_rank(*F, dg.form), 2u);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        if (i != j) { EXPECT_EQ(dg.form(i, j), 0u); }
  }
  auto F = make_field(5);
  GradedSpace S(F, classify(GroupType::C, 2, 4));
  EXPECT_THROW(search_functional(S, false), inapplicable);
}

TEST(Reconstruction, ExhaustiveSmallConfigs) {
  struct C {
    GroupType t;
    int n, m;
    std::uint32_t q;
  };
  for (const C& c : {C{GroupType::A2, 3, 2, 5}, C{GroupType::A2, 3, 6, 3}, C{GroupType::C, 2, 4, 3}, C{GroupType::C, 1, 2, 5},
                     C{GroupType::B, 2, 4, 3}, C{GroupType::D2, 3, 6, 3}}) {
    auto F = make_field(c.q);
    GradedSpace S(F, classify(c.t, c.n, c.m));
    SCOPED_TRACE(S.datum().describe());
    const StableFunctional phi = canonical_functional(S);
    const ReconstructionSweep r = reconstruction_sweep(S, &phi);
    EXPECT_TRUE(r.pass()) << r.first_failure;
    EXPECT_EQ(r.domain_points, domain_size(S));
  }
}

TEST(Reconstruction, FunctionalPairingSampled) {
  auto F = make_field(5);
  GradedSpace S(F, classify(GroupType::C, 2, 4));
  const StableFunctional phi = canonical_functional(S);
  const ReconstructionSweep r = reconstruction_sweep(S, &phi, 300, 11);
  EXPECT_EQ(r.domain_points, 300u);
  EXPECT_TRUE(r.pass()) << r.first_failure;
}

TEST(Reconstruction, SplitTypeRejected) {
  auto F = make_field(5);
  GradedSpace S(F, classify(GroupType::A2, 3, 2));
  const DomainEvaluator dom(S);
  DomainPoint pt;
  bool found_outside = false;
  for (std::uint64_t i = 0; i < dom.candidate_count() && !found_outside; ++i) {
    dom.load(i, pt);
    if (!dom.evaluate(pt)) {
      found_outside = true;
      EXPECT_FALSE(reconstruction_oracle(S, pt).decomposed);
    }
  }
  EXPECT_TRUE(found_outside);
}
