#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "epikl/engine.hpp"
#include "epikl/errors.hpp"

using namespace epikl;

namespace {

struct Config {
  GroupType type;
  int n, m;
  std::uint32_t p;
  unsigned e;
};

const std::vector<Config> kConfigs = {
    {GroupType::A2, 3, 2, 5, 1}, {GroupType::A2, 3, 2, 7, 1}, {GroupType::A2, 5, 10, 3, 1}, {GroupType::A2, 3, 6, 7, 1},
    {GroupType::A2, 4, 6, 5, 1}, {GroupType::A2, 4, 2, 3, 2}, {GroupType::C, 1, 2, 7, 1},   {GroupType::C, 2, 4, 5, 1},
    {GroupType::C, 2, 2, 5, 1},  {GroupType::B, 2, 4, 5, 1},  {GroupType::B, 3, 6, 3, 1},   {GroupType::D, 4, 6, 3, 1},
    {GroupType::D2, 3, 6, 3, 1},
};

StableFunctional some_functional(const GradedSpace& S) {
  try {
    return canonical_functional(S);
  } catch (const degenerate_input&) {
    const GroupDatum& g = S.datum();
    std::size_t k = S.block_dim(g.ell);
    if (g.family() == Family::orthogonal) k = std::min(k, g.ell == 1 ? S.block_dim(0) : static_cast<std::size_t>(g.d));
    return diagonal_functional(S, std::vector<elem>(k, 1));
  }
}

StableFunctional zero_functional(StableFunctional phi) {
  for (auto& A : phi.maps) A = Mat(A.rows, A.cols);
  phi.form = Mat(phi.form.rows, phi.form.cols);
  phi.form_m = Mat(phi.form_m.rows, phi.form_m.cols);
  return phi;
}

cplx psi_value(std::uint32_t p, std::uint32_t tr) {
  const double a = 2.0 * std::numbers::pi * tr / p;
  return {std::cos(a), std::sin(a)};
}

}  // namespace

TEST(Engine, ZeroFunctionalCountsDomain) {
  for (const auto& c : kConfigs) {
    auto F = make_field(c.p, c.e);
    GradedSpace S(F, classify(c.type, c.n, c.m));
    const StableFunctional phi = zero_functional(some_functional(S));
    const TraceTable T = trace_table(S, phi, CharacterTuple::trivial(S.datum()), AdditiveCharacter(F));
    ASSERT_EQ(T.values.size(), F->size() - 1u);
    for (const auto& v : T.values) ASSERT_EQ(v.exact->as_integer(), std::optional<std::int64_t>(static_cast<std::int64_t>(T.domain_size)));
    const auto N = fiber_point_counts(S, phi);
    EXPECT_EQ(N[0], T.domain_size);
  }
}

TEST(Engine, UnitaryBruteForceF5) {
  Field F(5);
  auto Fp = make_field(5);
  GradedSpace S(Fp, classify(GroupType::A2, 3, 2));
  const StableFunctional phi = diagonal_functional(S, {1, 2, 3});
  for (elem t = 1; t < 5; ++t) {
    cplx ref = 0;
    std::int64_t count = 0;
    for (elem a = 0; a < 5; ++a)
      for (elem b = 0; b < 5; ++b)
        for (elem c = 0; c < 5; ++c) {
          const elem lead = a ? a : (b ? b : c);
          if (lead != 1) continue;
          const elem qv = (a * a + b * b + c * c) % 5;
          if (qv == 0) continue;
          const elem fv = (a * a + 2 * b * b + 3 * c * c) % 5;
          ref += psi_value(5, static_cast<std::uint32_t>((t * fv % 5) * F.inv(qv) % 5));
          ++count;
        }
    const TraceValue v = trace_sum(S, phi, CharacterTuple::trivial(S.datum()), AdditiveCharacter(Fp), t);
    EXPECT_EQ(count, 25);
    EXPECT_NEAR(std::abs(v.value - ref), 0.0, 1e-9);
  }
}

TEST(Engine, TwoPathIdentityExact) {
  for (const auto& c : kConfigs) {
    auto F = make_field(c.p, c.e);
    GradedSpace S(F, classify(c.type, c.n, c.m));
    SCOPED_TRACE(S.datum().describe());
    const StableFunctional phi = some_functional(S);
    std::vector<CharacterTuple> chis = {CharacterTuple::trivial(S.datum())};
    if (S.datum().character_arity().first) {
      CharacterTuple sgn = chis[0];
      sgn.sign_exponent = 1;
      chis.push_back(sgn);
    }
    if (S.datum().character_arity().second > 0) {
      CharacterTuple quad = chis[0];
      quad.exponents[0] = (F->size() - 1) / 2;
      chis.push_back(quad);
    }
    for (const auto& chi : chis) {
      const AdditiveCharacter psi(F, 2 % F->size());
      const TraceTable a = trace_table(S, phi, chi, psi), b = fiber_count_transform(S, phi, chi, psi);
      ASSERT_TRUE(a.exact());
      for (std::size_t i = 0; i < a.values.size(); ++i) ASSERT_EQ(*a.values[i].exact, *b.values[i].exact);
      const TraceValue total = total_trace_sum(S, phi, chi, psi);
      CycloSum sum(F->p());
      for (const auto& v : a.values) sum += *v.exact;
      ASSERT_EQ(*total.exact, sum);
    }
  }
}

TEST(Engine, TwoPathIdentityFloatCharacter) {
  auto F = make_field(7);
  GradedSpace S(F, classify(GroupType::A2, 3, 6));
  const StableFunctional phi = canonical_functional(S);
  CharacterTuple chi = CharacterTuple::trivial(S.datum());
  chi.exponents[0] = 1;
  const AdditiveCharacter psi(F);
  const TraceTable a = trace_table(S, phi, chi, psi), b = fiber_count_transform(S, phi, chi, psi);
  ASSERT_FALSE(a.exact());
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    EXPECT_LE(std::abs(a.values[i].value - b.values[i].value), 1e-9);
    EXPECT_LE(a.values[i].error_bound, static_cast<double>(a.domain_size) * 1e-14);
  }
}

TEST(Engine, ThreadCountDeterminism) {
  auto F = make_field(11);
  GradedSpace S(F, classify(GroupType::A2, 5, 2));
  const StableFunctional phi = canonical_functional(S);
  const auto chi = CharacterTuple::trivial(S.datum());
  const TraceTable a = trace_table(S, phi, chi, AdditiveCharacter(F), 1), b = trace_table(S, phi, chi, AdditiveCharacter(F), 4);
  for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_EQ(*a.values[i].exact, *b.values[i].exact);
  EXPECT_EQ(*total_trace_sum(S, phi, chi, AdditiveCharacter(F), 1).exact, *total_trace_sum(S, phi, chi, AdditiveCharacter(F), 3).exact);
}

TEST(Engine, ArityMismatchRejected) {
  auto F = make_field(7);
  GradedSpace S(F, classify(GroupType::A2, 3, 6));
  CharacterTuple chi;
  EXPECT_THROW(trace_table(S, canonical_functional(S), chi, AdditiveCharacter(F)), shape_error);
  EXPECT_THROW(CharacterTuple::from_list(S.datum(), {0, 0, 0}), shape_error);
}

TEST(Engine, PencilFiberCounts) {
  auto F = make_field(7);
  GradedSpace S(F, classify(GroupType::A2, 3, 2));
  const StableFunctional phi = diagonal_functional(S, {1, 2, 3});
  const auto N = fiber_point_counts(S, phi);
  std::vector<std::uint64_t> ref(7, 0);
  for (const auto& pt : enumerate_domain(S)) ++ref[f_phi_eval(S, pt, phi, 1)];
  EXPECT_EQ(N, ref);
  std::uint64_t total = 0;
  for (auto x : N) total += x;
  EXPECT_EQ(total, domain_size(S));
}

TEST(Engine, NormalizedTrace) {
  TraceValue v;
  v.exact = CycloSum::integer(3, 45);
  v.value = 45.0;
  EXPECT_NEAR(normalized_trace(v, 2, 9).real(), 5.0, 1e-12);
  v.value = 27.0;
  EXPECT_NEAR(normalized_trace(v, 3, 9).real(), -1.0, 1e-12);
}

TEST(Engine, UnitaryRankBound) {
  for (std::uint32_t p : {5u, 7u, 11u, 13u}) {
    auto F = make_field(p);
    GradedSpace S(F, classify(GroupType::A2, 3, 2));
    const TraceTable T = trace_table(S, canonical_functional(S), CharacterTuple::trivial(S.datum()), AdditiveCharacter(F));
    for (std::size_t i = 0; i < T.values.size(); ++i) EXPECT_LE(std::abs(T.normalized(i)), 3.0 + 1e-9);
  }
}

TEST(Kloosterman, Examples) {
  auto F = make_field(5);
  const AdditiveCharacter psi(F);
  CycloSum ref(5);
  for (elem x = 1; x < 5; ++x) ref.add_power(psi.exponent(F->add(x, F->inv(x))), 1);
  EXPECT_EQ(classical_kloosterman(2, 1, psi), ref);
  for (elem a = 1; a < 5; ++a) EXPECT_EQ(classical_kloosterman(1, a, psi), CycloSum::zeta_power(5, psi.exponent(a)));
  EXPECT_THROW(classical_kloosterman(2, 0, psi), degenerate_input);
}

TEST(Kloosterman, WeilBound) {
  for (std::uint32_t p : {3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u}) {
    auto F = make_field(p);
    const TraceTable T = kloosterman_table(F, 2, AdditiveCharacter(F));
    for (const auto& v : T.values) ASSERT_LE(std::abs(v.value), 2.0 * std::sqrt(static_cast<double>(p)) + 1e-9);
    const TraceTable T3 = kloosterman_table(F, 3, AdditiveCharacter(F));
    for (const auto& v : T3.values) ASSERT_LE(std::abs(v.value), 3.0 * static_cast<double>(p) + 1e-9);
  }
}

TEST(Kloosterman, ExtensionFieldValuesReal) {
  auto F = make_field(3, 2);
  const TraceTable T = kloosterman_table(F, 2, AdditiveCharacter(F));
  for (const auto& v : T.values) {
    EXPECT_NEAR(v.value.imag(), 0.0, 1e-9);
    EXPECT_LE(std::abs(v.value), 6.0 + 1e-9);
  }
}
