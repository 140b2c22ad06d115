#pragma once

#include <utility>
#include <vector>

#include "epikl/field.hpp"

namespace epikl {

// Univariate polynomial over F_q; coefficient i at index i, no trailing zeros.
using Poly = std::vector<elem>;

inline void poly_trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int poly_degree(const Poly& a) { return static_cast<int>(a.size()) - 1; }

inline elem poly_eval(const Field& F, const Poly& a, elem x) {
  elem acc = 0;
  for (std::size_t i = a.size(); i-- > 0;) acc = F.add(F.mul(acc, x), a[i]);
  return acc;
}

inline Poly poly_add(const Field& F, const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const elem x = i < a.size() ? a[i] : 0;
    const elem y = i < b.size() ? b[i] : 0;
    r[i] = F.add(x, y);
  }
  poly_trim(r);
  return r;
}

inline Poly poly_sub(const Field& F, const Poly& a, const Poly& b) {
  Poly nb(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) nb[i] = F.neg(b[i]);
  return poly_add(F, a, nb);
}

inline Poly poly_mul(const Field& F, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
  }
  poly_trim(r);
  return r;
}

inline Poly poly_scale(const Field& F, const Poly& a, elem c) {
  Poly r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = F.mul(a[i], c);
  poly_trim(r);
  return r;
}

// Quotient and remainder; b must be nonzero.
inline std::pair<Poly, Poly> poly_divmod(const Field& F, Poly a, const Poly& b) {
  if (b.empty()) throw degenerate_input("polynomial division by zero");
  poly_trim(a);
  if (a.size() < b.size()) return {Poly{}, a};
  Poly quo(a.size() - b.size() + 1, 0);
  const elem lead_inv = F.inv(b.back());
  while (!a.empty() && a.size() >= b.size()) {
    const std::size_t shift = a.size() - b.size();
    const elem c = F.mul(a.back(), lead_inv);
    quo[shift] = c;
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = F.sub(a[shift + i], F.mul(c, b[i]));
    poly_trim(a);
  }
  poly_trim(quo);
  return {quo, a};
}

inline Poly poly_derivative(const Field& F, const Poly& a) {
  if (a.size() <= 1) return {};
  Poly r(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = F.mul(F.from_int(static_cast<std::int64_t>(i)), a[i]);
  poly_trim(r);
  return r;
}

inline Poly poly_monic(const Field& F, const Poly& a) {
  if (a.empty()) return a;
  return poly_scale(F, a, F.inv(a.back()));
}

inline Poly poly_gcd(const Field& F, Poly a, Poly b) {
  poly_trim(a);
  poly_trim(b);
  while (!b.empty()) {
    Poly r = poly_divmod(F, a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return poly_monic(F, a);
}

// Squarefree over the algebraic closure: gcd(f, f') is a nonzero constant.
inline bool poly_is_squarefree(const Field& F, const Poly& f) {
  if (f.empty()) throw degenerate_input("zero polynomial");
  if (f.size() == 1) return true;
  const Poly d = poly_derivative(F, f);
  if (d.empty()) return false;
  return poly_gcd(F, f, d).size() == 1;
}

struct RootMultiset {
  std::vector<std::pair<elem, int>> roots;  // (root, multiplicity), increasing root code
  bool squarefree = true;

  int total() const {
    int s = 0;
    for (auto& r : roots) s += r.second;
    return s;
  }
};

// Rational roots by evaluating at every element, multiplicities by
// repeated synthetic division.
inline RootMultiset poly_roots(const Field& F, const Poly& f_in) {
  Poly f = f_in;
  poly_trim(f);
  if (f.empty()) throw degenerate_input("zero polynomial has no root multiset");
  RootMultiset out;
  out.squarefree = poly_is_squarefree(F, f);
  for (elem x = 0; x < F.size(); ++x) {
    if (poly_eval(F, f, x) != 0) continue;
    int mult = 0;
    Poly g = f;
    const Poly lin{F.neg(x), 1};
    for (;;) {
      auto [quo, rem] = poly_divmod(F, g, lin);
      if (!rem.empty()) break;
      ++mult;
      g = std::move(quo);
      if (g.size() <= 1) break;
    }
    out.roots.emplace_back(x, mult);
  }
  return out;
}

}  // namespace epikl
