#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "epikl/cyclo.hpp"
#include "epikl/domain.hpp"
#include "epikl/parallel.hpp"
#include "epikl/quadform.hpp"

namespace epikl {

// chi on L^ab = {+-1}^s x G_m^r: an exponent in {0,1} for the sign factor
// (when present) and exponents r_i of chi_i(x) = zeta_{q-1}^{r_i dlog x}.
struct CharacterTuple {
  int sign_exponent = 0;
  std::vector<std::int64_t> exponents;

  static CharacterTuple trivial(const GroupDatum& g) {
    CharacterTuple c;
    c.exponents.assign(static_cast<std::size_t>(g.character_arity().second), 0);
    return c;
  }
  // Flat list: the sign exponent first when the datum has a sign factor.
  static CharacterTuple from_list(const GroupDatum& g, const std::vector<std::int64_t>& list) {
    const auto [has_sign, r] = g.character_arity();
    const std::size_t want = static_cast<std::size_t>(r) + (has_sign ? 1 : 0);
    if (list.size() != want)
      throw shape_error("character needs " + std::to_string(want) + " exponents" + (has_sign ? " (sign first)" : "") + ", got " +
                        std::to_string(list.size()));
    CharacterTuple c;
    std::size_t k = 0;
    if (has_sign) {
      if (list[0] != 0 && list[0] != 1) throw shape_error("the sign character exponent must be 0 or 1");
      c.sign_exponent = static_cast<int>(list[k++]);
    }
    c.exponents.assign(list.begin() + static_cast<std::ptrdiff_t>(k), list.end());
    return c;
  }
  std::vector<std::int64_t> to_list(const GroupDatum& g) const {
    std::vector<std::int64_t> out;
    if (g.character_arity().first) out.push_back(sign_exponent);
    out.insert(out.end(), exponents.begin(), exponents.end());
    return out;
  }
  bool operator==(const CharacterTuple& o) const { return sign_exponent == o.sign_exponent && exponents == o.exponents; }
};

// A CharacterTuple bound to a field and checked against a datum.
class BoundCharacter {
 public:
  BoundCharacter(const FieldPtr& F, const GroupDatum& g, const CharacterTuple& chi) : sign_(chi.sign_exponent) {
    const auto [has_sign, r] = g.character_arity();
    if (static_cast<int>(chi.exponents.size()) != r)
      throw shape_error("character arity mismatch: expected " + std::to_string(r) + " torus factors, got " + std::to_string(chi.exponents.size()));
    if (!has_sign && chi.sign_exponent != 0) throw shape_error("this datum has no sign factor");
    for (auto e : chi.exponents) chars_.emplace_back(F, e);
    exact_ = true;
    for (const auto& c : chars_) exact_ = exact_ && c.is_exact();
  }
  bool exact() const { return exact_; }

  int exact_value(const FPrime& f) const {
    int w = (f.has_sign && sign_ == 1 && f.sign == -1) ? -1 : 1;
    for (std::size_t i = 0; i < chars_.size(); ++i) w *= chars_[i].exact_value(f.units[i]);
    return w;
  }
  cplx value(const FPrime& f) const {
    cplx w = (f.has_sign && sign_ == 1 && f.sign == -1) ? -1.0 : 1.0;
    for (std::size_t i = 0; i < chars_.size(); ++i) w *= chars_[i].value(f.units[i]);
    return w;
  }

 private:
  int sign_;
  std::vector<MultiplicativeCharacter> chars_;
  bool exact_ = true;
};

// Per-point data for the t-loop: chi(f'(v)) and f_phi = t g + h.
struct PreparedDomain {
  bool exact = true;
  std::vector<elem> g, h;
  std::vector<std::int8_t> w_exact;
  std::vector<cplx> w_float;
  std::size_t size() const { return g.size(); }
};

inline PreparedDomain prepare_domain(const GradedSpace& S, const StableFunctional& phi, const CharacterTuple& chi, unsigned threads = 1) {
  const BoundCharacter bc(S.field_ptr(), S.datum(), chi);
  const DomainEvaluator dom(S);
  const FunctionalEvaluator fe(S, phi);
  const std::uint64_t total = dom.candidate_count();
  const unsigned chunks = std::max(1u, std::min<unsigned>(64, static_cast<unsigned>(total / 4096 + 1)));
  const auto ranges = split_range(total, chunks);
  std::vector<PreparedDomain> parts(ranges.size());
  parallel_for(ranges.size(), threads, [&](std::size_t k) {
    PreparedDomain& part = parts[k];
    part.exact = bc.exact();
    dom.for_each(ranges[k].first, ranges[k].second, [&](const DomainPoint& pt) {
      const FPhiParts fp = fe.parts(pt);
      const FPrime f1 = f_prime_eval(S, pt);
      part.g.push_back(fp.g);
      part.h.push_back(fp.h);
      if (part.exact) part.w_exact.push_back(static_cast<std::int8_t>(bc.exact_value(f1)));
      else part.w_float.push_back(bc.value(f1));
    });
  });
  PreparedDomain out;
  out.exact = bc.exact();
  for (auto& part : parts) {
    out.g.insert(out.g.end(), part.g.begin(), part.g.end());
    out.h.insert(out.h.end(), part.h.begin(), part.h.end());
    out.w_exact.insert(out.w_exact.end(), part.w_exact.begin(), part.w_exact.end());
    out.w_float.insert(out.w_float.end(), part.w_float.begin(), part.w_float.end());
  }
  return out;
}

inline TraceValue trace_sum_prepared(const PreparedDomain& D, const AdditiveCharacter& psi, elem t) {
  const Field& F = *psi.field();
  CharSumAccumulator acc(psi);
  for (std::size_t i = 0; i < D.size(); ++i) {
    const elem arg = F.add(F.mul(t, D.g[i]), D.h[i]);
    if (D.exact) acc.add(static_cast<std::int64_t>(D.w_exact[i]), arg);
    else acc.add(D.w_float[i], arg);
  }
  if (D.size() == 0) {
    if (D.exact) acc.add_exponent(std::int64_t{0}, 0);
    else acc.add_exponent(cplx(0.0), 0);
  }
  return acc.result();
}

// S(t) = sum over the domain of chi(f'(v)) psi(f_phi(t, v)).
inline TraceValue trace_sum(const GradedSpace& S, const StableFunctional& phi, const CharacterTuple& chi, const AdditiveCharacter& psi, elem t) {
  if (t == 0 || t >= S.field().size()) throw degenerate_input("t must be a nonzero field element");
  if (*psi.field() != S.field()) throw shape_error("additive character over a different field");
  return trace_sum_prepared(prepare_domain(S, phi, chi), psi, t);
}

inline cplx normalized_trace(const TraceValue& S, int w, std::uint64_t q) {
  const double scale = std::pow(static_cast<double>(q), -0.5 * w);
  return (w % 2 == 0 ? 1.0 : -1.0) * scale * S.value;
}

struct TraceTable {
  FieldPtr field;
  GroupDatum datum;
  StableFunctional phi;
  CharacterTuple chi;
  elem psi_multiplier = 1;
  std::vector<elem> ts;
  std::vector<TraceValue> values;
  StabilityResult stability;
  std::uint64_t domain_size = 0;
  int weight = 0;

  bool exact() const { return !values.empty() && values.front().is_exact(); }
  cplx normalized(std::size_t i) const { return normalized_trace(values[i], weight, field->size()); }
  std::vector<cplx> raw_vector() const {
    std::vector<cplx> r;
    for (const auto& v : values) r.push_back(v.value);
    return r;
  }
};

namespace detail {

inline TraceTable table_shell(const GradedSpace& S, const StableFunctional& phi, const CharacterTuple& chi, const AdditiveCharacter& psi) {
  if (*psi.field() != S.field()) throw shape_error("additive character over a different field");
  TraceTable T;
  T.field = S.field_ptr();
  T.datum = S.datum();
  T.phi = phi;
  T.chi = chi;
  T.psi_multiplier = psi.multiplier();
  T.stability = is_stable(S, phi);
  T.weight = S.datum().weight();
  for (elem t = 1; t < S.field().size(); ++t) T.ts.push_back(t);
  return T;
}

}  // namespace detail

inline TraceTable trace_table(const GradedSpace& S, const StableFunctional& phi, const CharacterTuple& chi, const AdditiveCharacter& psi,
                              unsigned threads = 1) {
  TraceTable T = detail::table_shell(S, phi, chi, psi);
  const PreparedDomain D = prepare_domain(S, phi, chi, threads);
  T.domain_size = D.size();
  T.values.resize(T.ts.size());
  parallel_for(T.ts.size(), threads, [&](std::size_t i) { T.values[i] = trace_sum_prepared(D, psi, T.ts[i]); });
  return T;
}

// Same table through the fiber counts N(a, b) = sum of chi(f'(v)) over
// points with g(v) = a, h(v) = b, then S(t) = sum N(a,b) psi(b + t a).
inline TraceTable fiber_count_transform(const GradedSpace& S, const StableFunctional& phi, const CharacterTuple& chi,
                                        const AdditiveCharacter& psi, unsigned threads = 1) {
  TraceTable T = detail::table_shell(S, phi, chi, psi);
  const Field& F = S.field();
  const std::size_t q = F.size();
  if (q > 4096) throw degenerate_input("fiber histogram limited to q <= 4096");
  const BoundCharacter bc(S.field_ptr(), S.datum(), chi);
  const DomainEvaluator dom(S);
  const FunctionalEvaluator fe(S, phi);
  std::vector<std::int64_t> Ni(bc.exact() ? q * q : 0, 0);
  std::vector<cplx> Nc(bc.exact() ? 0 : q * q, 0.0);
  std::uint64_t count = 0;
  dom.for_each([&](const DomainPoint& pt) {
    const FPhiParts fp = fe.parts(pt);
    const FPrime f1 = f_prime_eval(S, pt);
    const std::size_t cell = static_cast<std::size_t>(fp.g) * q + fp.h;
    if (bc.exact()) Ni[cell] += bc.exact_value(f1);
    else Nc[cell] += bc.value(f1);
    ++count;
  });
  T.domain_size = count;
  T.values.resize(T.ts.size());
  parallel_for(T.ts.size(), threads, [&](std::size_t i) {
    const elem t = T.ts[i];
    CharSumAccumulator acc(psi);
    for (elem a = 0; a < q; ++a) {
      const elem ta = F.mul(t, a);
      for (elem b = 0; b < q; ++b) {
        const std::size_t cell = static_cast<std::size_t>(a) * q + b;
        if (bc.exact()) acc.add(Ni[cell], F.add(b, ta));
        else acc.add(Nc[cell], F.add(b, ta));
      }
    }
    T.values[i] = acc.result();
  });
  return T;
}

// Fiber counts of f_phi(1, -) = g + h restricted to chi trivial, used for
// the pencil fibration at m = 2: N(c) = #{v : g(v) + h(v) = c}.
inline std::vector<std::uint64_t> fiber_point_counts(const GradedSpace& S, const StableFunctional& phi) {
  const Field& F = S.field();
  std::vector<std::uint64_t> N(F.size(), 0);
  const FunctionalEvaluator fe(S, phi);
  DomainEvaluator(S).for_each([&](const DomainPoint& pt) { ++N[fe.value(pt, 1)]; });
  return N;
}

// sum over t in F^x of S(t), computed pointwise as
// sum_v chi(f'(v)) psi(h(v)) (q [g(v) = 0] - 1) without a t-loop.
inline TraceValue total_trace_sum(const GradedSpace& S, const StableFunctional& phi, const CharacterTuple& chi, const AdditiveCharacter& psi,
                                  unsigned threads = 1) {
  const Field& F = S.field();
  const BoundCharacter bc(S.field_ptr(), S.datum(), chi);
  const DomainEvaluator dom(S);
  const FunctionalEvaluator fe(S, phi);
  const std::uint64_t total = dom.candidate_count();
  const auto ranges = split_range(total, std::max(1u, std::min<unsigned>(256, static_cast<unsigned>(total / 65536 + 1))));
  std::vector<CharSumAccumulator> parts(ranges.size(), CharSumAccumulator(psi));
  const std::int64_t qm1 = static_cast<std::int64_t>(F.size()) - 1;
  parallel_for(ranges.size(), threads, [&](std::size_t k) {
    CharSumAccumulator& acc = parts[k];
    dom.for_each(ranges[k].first, ranges[k].second, [&](const DomainPoint& pt) {
      const FPhiParts fp = fe.parts(pt);
      const FPrime f1 = f_prime_eval(S, pt);
      const std::int64_t mult = fp.g == 0 ? qm1 : -1;
      if (bc.exact()) acc.add(mult * bc.exact_value(f1), fp.h);
      else acc.add(static_cast<double>(mult) * bc.value(f1), fp.h);
    });
  });
  CharSumAccumulator out(psi);
  for (const auto& p : parts) out.merge(p);
  if (!out.backend()) out.add_exponent(std::int64_t{0}, 0);
  return out.result();
}

// Kl_n(a) = sum over x_1 ... x_n = a of psi(x_1 + ... + x_n).
inline CycloSum classical_kloosterman(int n, elem a, const AdditiveCharacter& psi) {
  const Field& F = *psi.field();
  if (a == 0) throw degenerate_input("Kloosterman sum needs a != 0");
  if (n < 1) throw degenerate_input("Kloosterman sum needs n >= 1");
  CharSumAccumulator acc(psi);
  if (n == 1) {
    acc.add(std::int64_t{1}, a);
    return *acc.result().exact;
  }
  const std::size_t k = static_cast<std::size_t>(n - 1);
  std::vector<elem> x(k, 1);
  for (;;) {
    elem prod = 1, sum = 0;
    for (elem xi : x) {
      prod = F.mul(prod, xi);
      sum = F.add(sum, xi);
    }
    acc.add(std::int64_t{1}, F.add(sum, F.div(a, prod)));
    std::size_t j = 0;
    while (j < k && ++x[j] == F.size()) x[j++] = 1;
    if (j == k) break;
  }
  return *acc.result().exact;
}

// Trace table for split type A: t -> Kl_n(t), weight n - 1.
inline TraceTable kloosterman_table(const FieldPtr& F, int n, const AdditiveCharacter& psi, unsigned threads = 1) {
  TraceTable T;
  T.field = F;
  T.datum = classify(GroupType::A, n, n);
  T.psi_multiplier = psi.multiplier();
  T.stability = {true, ""};
  T.weight = n - 1;
  for (elem t = 1; t < F->size(); ++t) T.ts.push_back(t);
  T.values.resize(T.ts.size());
  T.domain_size = ipow(F->size() - 1, static_cast<unsigned>(n - 1));
  parallel_for(T.ts.size(), threads, [&](std::size_t i) {
    const CycloSum s = classical_kloosterman(n, T.ts[i], psi);
    T.values[i].exact = s;
    T.values[i].value = s.to_complex();
  });
  return T;
}

}  // namespace epikl
