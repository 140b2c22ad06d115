#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "epikl/field.hpp"

namespace epikl {

using cplx = std::complex<double>;

// Element of Z[zeta_p] stored as p coefficients of 1, zeta, ..., zeta^{p-1}.
// Representations differing by a multiple of (1 + zeta + ... + zeta^{p-1})
// are equal; canonical() fixes the last coefficient to zero.
class CycloSum {
 public:
  CycloSum() = default;
  explicit CycloSum(std::uint32_t p) : c_(p, 0) {}
  CycloSum(std::uint32_t p, std::vector<std::int64_t> coeffs) : c_(std::move(coeffs)) {
    if (c_.size() != p) throw shape_error("CycloSum needs exactly p coefficients");
  }
  static CycloSum integer(std::uint32_t p, std::int64_t n) {
    CycloSum s(p);
    s.c_[0] = n;
    return s;
  }
  static CycloSum zeta_power(std::uint32_t p, std::uint32_t j, std::int64_t mult = 1) {
    CycloSum s(p);
    s.c_[j % p] = mult;
    return s;
  }

  std::uint32_t p() const { return static_cast<std::uint32_t>(c_.size()); }
  const std::vector<std::int64_t>& coeffs() const { return c_; }
  std::int64_t operator[](std::size_t i) const { return c_[i]; }

  void add_power(std::uint32_t j, std::int64_t mult) { c_[j] += mult; }

  CycloSum canonical() const {
    CycloSum r = *this;
    const std::int64_t last = c_.empty() ? 0 : c_.back();
    for (auto& x : r.c_) x -= last;
    return r;
  }
  bool is_zero() const {
    for (auto x : c_)
      if (x != c_.back()) return false;
    return true;
  }
  // Rational integer value if the sum lies in Z.
  std::optional<std::int64_t> as_integer() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
      if (c_[i] != c_[1]) return std::nullopt;
    return c_[0] - (c_.size() > 1 ? c_[1] : 0);
  }

  cplx to_complex() const {
    const std::uint32_t p = this->p();
    // Work with canonical coefficients so equal sums embed identically.
    const std::int64_t shift = c_.back();
    long double re = 0, im = 0;
    for (std::uint32_t j = 0; j < p; ++j) {
      const long double a = static_cast<long double>(c_[j] - shift);
      if (a == 0) continue;
      const long double ang = 2.0L * std::numbers::pi_v<long double> * j / p;
      re += a * std::cos(ang);
      im += a * std::sin(ang);
    }
    return {static_cast<double>(re), static_cast<double>(im)};
  }

  bool operator==(const CycloSum& o) const {
    if (p() != o.p()) return false;
    const std::int64_t a = c_.back(), b = o.c_.back();
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (c_[i] - a != o.c_[i] - b) return false;
    return true;
  }
  bool operator!=(const CycloSum& o) const { return !(*this == o); }

  CycloSum& operator+=(const CycloSum& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  CycloSum& operator-=(const CycloSum& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  CycloSum operator-() const {
    CycloSum r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  friend CycloSum operator+(CycloSum a, const CycloSum& b) { return a += b; }
  friend CycloSum operator-(CycloSum a, const CycloSum& b) { return a -= b; }
  friend CycloSum operator*(const CycloSum& a, const CycloSum& b) {
    a.check(b);
    const std::size_t p = a.c_.size();
    CycloSum r(static_cast<std::uint32_t>(p));
    for (std::size_t i = 0; i < p; ++i) {
      if (a.c_[i] == 0) continue;
      for (std::size_t j = 0; j < p; ++j) r.c_[(i + j) % p] += a.c_[i] * b.c_[j];
    }
    return r.canonical();
  }
  friend CycloSum operator*(std::int64_t k, CycloSum a) {
    for (auto& x : a.c_) x *= k;
    return a;
  }

  std::string to_string() const {
    const CycloSum r = canonical();
    std::string s;
    for (std::size_t j = 0; j < r.c_.size(); ++j) {
      if (r.c_[j] == 0) continue;
      if (!s.empty()) s += r.c_[j] > 0 ? " + " : " - ";
      else if (r.c_[j] < 0) s += "-";
      const std::int64_t a = r.c_[j] < 0 ? -r.c_[j] : r.c_[j];
      if (j == 0) s += std::to_string(a);
      else {
        if (a != 1) s += std::to_string(a) + "*";
        s += "z^" + std::to_string(j);
      }
    }
    return s.empty() ? "0" : s;
  }

 private:
  void check(const CycloSum& o) const {
    if (o.c_.size() != c_.size()) throw shape_error("CycloSum over different p");
  }
  std::vector<std::int64_t> c_;
};

// psi_a(x) = zeta_p^{Tr(a x)}.
class AdditiveCharacter {
 public:
  AdditiveCharacter(FieldPtr field, elem multiplier = 1) : field_(std::move(field)), a_(multiplier) {
    if (a_ == 0 || a_ >= field_->size()) throw degenerate_input("additive character multiplier must be nonzero");
  }
  const FieldPtr& field() const { return field_; }
  elem multiplier() const { return a_; }
  std::uint32_t exponent(elem x) const { return field_->trace(field_->mul(a_, x)); }
  cplx value(elem x) const {
    const double ang = 2.0 * std::numbers::pi * exponent(x) / field_->p();
    return {std::cos(ang), std::sin(ang)};
  }

 private:
  FieldPtr field_;
  elem a_;
};

// chi_r(x) = zeta_{q-1}^{r dlog x}, chi(0) = 0.
class MultiplicativeCharacter {
 public:
  MultiplicativeCharacter(FieldPtr field, std::int64_t exponent = 0) : field_(std::move(field)) {
    const std::int64_t order = field_->size() - 1;
    r_ = static_cast<std::uint32_t>(((exponent % order) + order) % order);
  }
  static MultiplicativeCharacter quadratic(FieldPtr field) {
    const std::int64_t h = (field->size() - 1) / 2;
    return MultiplicativeCharacter(std::move(field), h);
  }
  const FieldPtr& field() const { return field_; }
  std::uint32_t exponent() const { return r_; }
  bool is_trivial() const { return r_ == 0; }
  bool is_quadratic() const { return 2 * static_cast<std::uint64_t>(r_) == field_->size() - 1; }
  bool is_exact() const { return is_trivial() || is_quadratic(); }

  int exact_value(elem x) const {
    if (x == 0) return 0;
    if (is_trivial()) return 1;
    if (is_quadratic()) return field_->quadratic_char(x);
    throw invariant_violation("character has no exact integer values");
  }
  cplx value(elem x) const {
    if (x == 0) return 0.0;
    const std::uint64_t order = field_->size() - 1;
    const std::uint64_t k = (static_cast<std::uint64_t>(r_) * field_->dlog(x)) % order;
    const double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(order);
    return {std::cos(ang), std::sin(ang)};
  }

 private:
  FieldPtr field_;
  std::uint32_t r_ = 0;
};

// A character sum value: exact in Z[zeta_p] when available, always with
// its complex embedding and an error bound for the floating backend.
struct TraceValue {
  std::optional<CycloSum> exact;
  cplx value{0.0, 0.0};
  double error_bound = 0.0;

  bool is_exact() const { return exact.has_value(); }
};

enum class Backend { exact, floating };

// Sums of chi-value * psi(argument). The backend is fixed by the first
// term; feeding the other kind of weight throws.
class CharSumAccumulator {
 public:
  explicit CharSumAccumulator(const AdditiveCharacter& psi) : psi_(psi), exact_(psi.field()->p()), bins_(psi.field()->p()) {}

  void add(std::int64_t weight, elem argument) { add_exponent(weight, psi_.exponent(argument)); }
  void add(cplx weight, elem argument) { add_exponent(weight, psi_.exponent(argument)); }

  void add_exponent(std::int64_t weight, std::uint32_t j) {
    use(Backend::exact);
    exact_.add_power(j, weight);
    ++terms_;
  }
  void add_exponent(cplx weight, std::uint32_t j) {
    use(Backend::floating);
    bins_[j] += weight;
    ++terms_;
  }

  void merge(const CharSumAccumulator& o) {
    if (!o.backend_) return;
    use(*o.backend_);
    exact_ += o.exact_;
    for (std::size_t j = 0; j < bins_.size(); ++j) bins_[j] += o.bins_[j];
    terms_ += o.terms_;
  }

  std::uint64_t terms() const { return terms_; }
  std::optional<Backend> backend() const { return backend_; }

  TraceValue result() const {
    TraceValue out;
    if (backend_ == Backend::floating) {
      const std::uint32_t p = static_cast<std::uint32_t>(bins_.size());
      cplx s = 0.0;
      for (std::uint32_t j = 0; j < p; ++j) {
        const double ang = 2.0 * std::numbers::pi * j / p;
        s += bins_[j] * cplx(std::cos(ang), std::sin(ang));
      }
      out.value = s;
      out.error_bound = static_cast<double>(terms_) * 1e-14;
    } else {
      out.exact = exact_.canonical();
      out.value = out.exact->to_complex();
    }
    return out;
  }

 private:
  void use(Backend b) {
    if (backend_ && *backend_ != b) throw invariant_violation("mixing exact and floating terms in one accumulation");
    backend_ = b;
  }
  AdditiveCharacter psi_;
  CycloSum exact_;
  std::vector<cplx> bins_;
  std::optional<Backend> backend_;
  std::uint64_t terms_ = 0;
};

}  // namespace epikl
