#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "epikl/errors.hpp"

namespace epikl {

using elem = std::uint32_t;

namespace detail {

// Dense polynomials over F_p, coefficient i at index i, no trailing zeros.
using pvec = std::vector<std::uint32_t>;

inline void ptrim(pvec& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline std::uint32_t inv_mod(std::uint32_t a, std::uint32_t p) {
  std::int64_t t = 0, nt = 1, r = p, nr = a % p;
  while (nr != 0) {
    std::int64_t qt = r / nr;
    t -= qt * nt;
    std::swap(t, nt);
    r -= qt * nr;
    std::swap(r, nr);
  }
  if (r != 1) throw degenerate_input("no inverse modulo p");
  return static_cast<std::uint32_t>((t % p + p) % p);
}

inline pvec pmod(pvec a, const pvec& m, std::uint32_t p) {
  ptrim(a);
  const std::size_t dm = m.size() - 1;
  const std::uint32_t lead_inv = inv_mod(m.back(), p);
  while (a.size() > dm) {
    const std::uint64_t c = std::uint64_t(a.back()) * lead_inv % p;
    const std::size_t shift = a.size() - 1 - dm;
    for (std::size_t i = 0; i <= dm; ++i) {
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - c * m[i] % p) % p);
    }
    ptrim(a);
  }
  return a;
}

inline pvec pmulmod(const pvec& a, const pvec& b, const pvec& m, std::uint32_t p) {
  if (a.empty() || b.empty()) return {};
  pvec r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      r[i + j] = static_cast<std::uint32_t>((r[i + j] + std::uint64_t(a[i]) * b[j]) % p);
    }
  }
  return pmod(std::move(r), m, p);
}

inline pvec ppowmod(pvec base, std::uint64_t k, const pvec& m, std::uint32_t p) {
  pvec r{1};
  base = pmod(std::move(base), m, p);
  while (k > 0) {
    if (k & 1) r = pmulmod(r, base, m, p);
    base = pmulmod(base, base, m, p);
    k >>= 1;
  }
  return r;
}

inline pvec pgcd(pvec a, pvec b, std::uint32_t p) {
  ptrim(a);
  ptrim(b);
  while (!b.empty()) {
    pvec r = pmod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// Rabin-style test: f of degree e is irreducible iff gcd(f, x^{p^i} - x) = 1
// for every i <= e/2.
inline bool is_irreducible(const pvec& f, std::uint32_t p) {
  const std::size_t e = f.size() - 1;
  if (e == 1) return true;
  if (f[0] == 0) return false;
  pvec xp{0, 1};
  for (std::size_t i = 1; i <= e / 2; ++i) {
    xp = ppowmod(xp, p, f, p);
    pvec h = xp;
    h.resize(std::max<std::size_t>(h.size(), 2), 0);
    h[1] = (h[1] + p - 1) % p;
    ptrim(h);
    if (h.empty()) return false;
    pvec g = pgcd(f, h, p);
    if (g.size() > 1) return false;
  }
  return true;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t r = 2; r * r <= n; ++r) {
    if (n % r == 0) {
      out.push_back(r);
      while (n % r == 0) n /= r;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t r = 2; r * r <= n; ++r)
    if (n % r == 0) return false;
  return true;
}

}  // namespace detail

// Finite field F_q, q = p^e with p odd. Elements are integer codes
// 0..q-1 whose base-p digits are coordinates in the basis 1, a, a^2, ...
// where a is a root of the modulus. Codes 0..p-1 form the prime field.
class Field {
 public:
  static constexpr std::uint64_t kMaxSize = 1u << 24;

  // seed 0 picks the lexicographically first irreducible modulus
  // (constant term first); other seeds sample moduli at random.
  Field(std::uint32_t p, unsigned e = 1, std::uint64_t seed = 0) : p_(p), e_(e), seed_(seed) {
    check_params();
    modulus_ = find_modulus(seed);
    build();
  }

  Field(std::uint32_t p, std::vector<std::uint32_t> modulus)
      : p_(p), e_(static_cast<unsigned>(modulus.size()) - 1), seed_(0) {
    check_params();
    if (modulus.size() < 2 || modulus.back() != 1) throw degenerate_input("modulus must be monic of degree >= 1");
    for (auto c : modulus)
      if (c >= p) throw degenerate_input("modulus coefficient out of range");
    if (!detail::is_irreducible(modulus, p)) throw degenerate_input("modulus is reducible");
    modulus_ = std::move(modulus);
    build();
  }

  std::uint32_t p() const { return p_; }
  unsigned degree() const { return e_; }
  std::uint32_t size() const { return q_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }
  elem primitive_root() const { return g_; }

  bool operator==(const Field& o) const { return p_ == o.p_ && modulus_ == o.modulus_; }
  bool operator!=(const Field& o) const { return !(*this == o); }

  elem zero() const { return 0; }
  elem one() const { return 1; }

  elem from_int(std::int64_t v) const {
    std::int64_t r = v % static_cast<std::int64_t>(p_);
    if (r < 0) r += p_;
    return static_cast<elem>(r);
  }

  elem add(elem x, elem y) const {
    if (e_ == 1) {
      const elem s = x + y;
      return s >= p_ ? s - p_ : s;
    }
    if (x == 0) return y;
    if (y == 0) return x;
    const std::uint32_t lx = log_[x];
    std::uint32_t diff = log_[y] + (q_ - 1) - lx;
    if (diff >= q_ - 1) diff -= q_ - 1;
    const std::int32_t z = zech_[diff];
    if (z < 0) return 0;
    return exp_[lx + static_cast<std::uint32_t>(z)];
  }
  elem neg(elem x) const { return neg_[x]; }
  elem sub(elem x, elem y) const { return add(x, neg_[y]); }
  elem mul(elem x, elem y) const {
    if (x == 0 || y == 0) return 0;
    return exp_[log_[x] + log_[y]];
  }
  elem inv(elem x) const {
    if (x == 0) throw degenerate_input("inverse of zero");
    return exp_[(q_ - 1 - log_[x]) % (q_ - 1)];
  }
  elem div(elem x, elem y) const { return mul(x, inv(y)); }
  elem pow(elem x, std::int64_t k) const {
    if (x == 0) {
      if (k < 0) throw degenerate_input("negative power of zero");
      return k == 0 ? 1 : 0;
    }
    const std::int64_t order = q_ - 1;
    std::int64_t r = (static_cast<std::int64_t>(log_[x]) * (k % order)) % order;
    if (r < 0) r += order;
    return exp_[static_cast<std::size_t>(r)];
  }
  // Square-and-multiply, independent of the log tables (used in tests).
  elem pow_by_squaring(elem x, std::uint64_t k) const {
    elem r = 1;
    while (k > 0) {
      if (k & 1) r = mul(r, x);
      x = mul(x, x);
      k >>= 1;
    }
    return r;
  }

  std::uint32_t dlog(elem x) const {
    if (x == 0) throw degenerate_input("discrete log of zero");
    return log_[x];
  }
  elem exp(std::uint64_t k) const { return exp_[k % (q_ - 1)]; }

  std::uint32_t trace(elem x) const { return trace_[x]; }
  int quadratic_char(elem x) const {
    if (x == 0) return 0;
    return (log_[x] & 1u) ? -1 : 1;
  }
  elem frobenius(elem x) const { return pow(x, p_); }

  std::vector<std::uint32_t> digits(elem x) const {
    std::vector<std::uint32_t> d(e_);
    for (unsigned i = 0; i < e_; ++i) {
      d[i] = x % p_;
      x /= p_;
    }
    return d;
  }
  elem from_digits(const std::vector<std::uint32_t>& d) const {
    elem x = 0;
    for (std::size_t i = d.size(); i-- > 0;) x = x * p_ + d[i] % p_;
    return x;
  }

  std::string describe() const {
    std::string s = "F_" + std::to_string(q_);
    if (e_ > 1) {
      s += " = F_" + std::to_string(p_) + "[a]/(";
      bool first = true;
      for (std::size_t i = modulus_.size(); i-- > 0;) {
        if (modulus_[i] == 0) continue;
        if (!first) s += " + ";
        first = false;
        if (modulus_[i] != 1 || i == 0) s += std::to_string(modulus_[i]);
        if (i >= 1) s += "a";
        if (i >= 2) s += "^" + std::to_string(i);
      }
      s += ")";
    }
    return s;
  }

 private:
  void check_params() {
    if (!detail::is_prime(p_) || p_ == 2) throw degenerate_input("characteristic must be an odd prime");
    if (e_ < 1) throw degenerate_input("extension degree must be >= 1");
    std::uint64_t q = 1;
    for (unsigned i = 0; i < e_; ++i) {
      q *= p_;
      if (q > kMaxSize) throw degenerate_input("field too large for table arithmetic");
    }
    q_ = static_cast<std::uint32_t>(q);
  }

  std::vector<std::uint32_t> find_modulus(std::uint64_t seed) const {
    if (e_ == 1) return {0, 1};
    detail::pvec f(e_ + 1, 0);
    f[e_] = 1;
    if (seed == 0) {
      // Enumerate lower coefficients as a base-p counter, constant term fastest.
      std::uint64_t count = q_;
      for (std::uint64_t idx = 1; idx < count; ++idx) {
        std::uint64_t t = idx;
        for (unsigned i = 0; i < e_; ++i) {
          f[i] = static_cast<std::uint32_t>(t % p_);
          t /= p_;
        }
        if (detail::is_irreducible(f, p_)) return f;
      }
      throw invariant_violation("no irreducible polynomial found");
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint32_t> coef(0, p_ - 1);
    for (;;) {
      for (unsigned i = 0; i < e_; ++i) f[i] = coef(rng);
      if (detail::is_irreducible(f, p_)) return f;
    }
  }

  detail::pvec poly_of(elem x) const {
    detail::pvec d = digits(x);
    detail::ptrim(d);
    return d;
  }

  void build() {
    const std::uint32_t order = q_ - 1;
    const auto factors = detail::prime_factors(order);
    // Smallest code that generates F_q^x.
    g_ = 0;
    for (elem cand = 2; cand < q_; ++cand) {
      const detail::pvec c = poly_of(cand);
      bool ok = true;
      for (auto r : factors) {
        if (detail::ppowmod(c, order / r, modulus_, p_) == detail::pvec{1}) {
          ok = false;
          break;
        }
      }
      if (ok) {
        g_ = cand;
        break;
      }
    }
    if (g_ == 0) throw invariant_violation("no primitive root found");

    exp_.assign(2 * static_cast<std::size_t>(order) + 1, 0);
    log_.assign(q_, 0);
    const detail::pvec gp = poly_of(g_);
    detail::pvec cur{1};
    for (std::uint32_t k = 0; k < order; ++k) {
      const elem code = from_digits(cur);
      exp_[k] = code;
      log_[code] = k;
      cur = detail::pmulmod(cur, gp, modulus_, p_);
    }
    for (std::uint32_t k = order; k < exp_.size(); ++k) exp_[k] = exp_[k - order];

    neg_.resize(q_);
    for (elem x = 0; x < q_; ++x) {
      auto d = digits(x);
      for (auto& c : d) c = (p_ - c) % p_;
      neg_[x] = from_digits(d);
    }

    // zech_[n] = log(1 + g^n), or -1 when 1 + g^n = 0.
    zech_.assign(order, -1);
    for (std::uint32_t n = 0; n < order; ++n) {
      auto d = digits(exp_[n]);
      d[0] = (d[0] + 1) % p_;
      const elem s = from_digits(d);
      zech_[n] = s == 0 ? -1 : static_cast<std::int32_t>(log_[s]);
    }

    // Trace of basis elements a^i, extended by linearity.
    std::vector<std::uint32_t> tr_basis(e_);
    elem basis = 1;
    const elem alpha = e_ > 1 ? p_ : 0;
    for (unsigned i = 0; i < e_; ++i) {
      elem y = basis, s = 0;
      for (unsigned j = 0; j < e_; ++j) {
        s = add(s, y);
        y = pow(y, p_);
      }
      if (s >= p_) throw invariant_violation("trace left the prime field");
      tr_basis[i] = s;
      if (e_ > 1) basis = mul(basis, alpha);
    }
    trace_.assign(q_, 0);
    for (elem x = 0; x < q_; ++x) {
      const auto d = digits(x);
      std::uint64_t s = 0;
      for (unsigned i = 0; i < e_; ++i) s += std::uint64_t(d[i]) * tr_basis[i];
      trace_[x] = static_cast<std::uint32_t>(s % p_);
    }
  }

  std::uint32_t p_;
  unsigned e_;
  std::uint64_t seed_;
  std::uint32_t q_ = 0;
  std::vector<std::uint32_t> modulus_;
  elem g_ = 0;
  std::vector<elem> exp_;
  std::vector<std::uint32_t> log_;
  std::vector<elem> neg_;
  std::vector<std::int32_t> zech_;
  std::vector<std::uint32_t> trace_;
};

using FieldPtr = std::shared_ptr<const Field>;

inline FieldPtr make_field(std::uint32_t p, unsigned e = 1, std::uint64_t seed = 0) {
  return std::make_shared<const Field>(p, e, seed);
}

// Prime power decomposition of q; throws if q is not an odd prime power.
inline std::pair<std::uint32_t, unsigned> split_prime_power(std::uint64_t q) {
  if (q < 3) throw degenerate_input("q must be an odd prime power");
  for (std::uint64_t r = 2; r <= q; ++r) {
    if (q % r != 0) continue;
    unsigned e = 0;
    std::uint64_t t = q;
    while (t % r == 0) {
      t /= r;
      ++e;
    }
    if (t != 1 || r == 2) throw degenerate_input("q must be an odd prime power");
    return {static_cast<std::uint32_t>(r), e};
  }
  throw degenerate_input("q must be an odd prime power");
}

// F_{q^k} together with the embedding of its subfield F_q.
class FieldExtension {
 public:
  FieldExtension(FieldPtr base, unsigned k, std::uint64_t seed = 0) : base_(std::move(base)), k_(k) {
    if (k < 1) throw degenerate_input("extension degree must be >= 1");
    if (k == 1) {
      ext_ = base_;
    } else {
      ext_ = std::make_shared<const Field>(base_->p(), base_->degree() * k, seed);
    }
    image_.resize(base_->size());
    preimage_.assign(ext_->size(), -1);
    if (k == 1) {
      for (elem x = 0; x < base_->size(); ++x) image_[x] = x;
    } else {
      // A root b of the base modulus in the big field; a |-> b.
      const auto& mod = base_->modulus();
      elem beta = 0;
      bool found = false;
      for (elem y = 0; y < ext_->size() && !found; ++y) {
        elem acc = 0;
        for (std::size_t i = mod.size(); i-- > 0;) acc = ext_->add(ext_->mul(acc, y), mod[i]);
        if (acc == 0) {
          beta = y;
          found = true;
        }
      }
      if (!found) throw invariant_violation("base modulus has no root in the extension");
      for (elem x = 0; x < base_->size(); ++x) {
        const auto d = base_->digits(x);
        elem acc = 0;
        for (std::size_t i = d.size(); i-- > 0;) acc = ext_->add(ext_->mul(acc, beta), d[i]);
        image_[x] = acc;
      }
    }
    for (elem x = 0; x < base_->size(); ++x) preimage_[image_[x]] = static_cast<std::int64_t>(x);
  }

  const FieldPtr& base() const { return base_; }
  const FieldPtr& ext() const { return ext_; }
  unsigned degree() const { return k_; }

  elem embed(elem x) const { return image_[x]; }
  bool in_base(elem y) const { return preimage_[y] >= 0; }
  elem restrict(elem y) const {
    if (preimage_[y] < 0) throw invariant_violation("element not in the base field");
    return static_cast<elem>(preimage_[y]);
  }
  // Tr_{F_{q^k}/F_q}(y) = sum_{j<k} y^{q^j}, returned as a base element.
  elem relative_trace(elem y) const {
    elem s = 0, z = y;
    for (unsigned j = 0; j < k_; ++j) {
      s = ext_->add(s, z);
      z = ext_->pow(z, base_->size());
    }
    return restrict(s);
  }

 private:
  FieldPtr base_;
  FieldPtr ext_;
  unsigned k_;
  std::vector<elem> image_;
  std::vector<std::int64_t> preimage_;
};

}  // namespace epikl
