#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "epikl/cyclo.hpp"
#include "epikl/projective.hpp"
#include "epikl/quadform.hpp"

namespace epikl {

// A point of the variety over which the Kloosterman sum runs.
//   unitary/orthogonal: v normalized in P(M); norms[i] = q_[-i,i](v)
//     (unitary, i = 0..l) or q_[i,m-i](v) (orthogonal, i = 1..l, with
//     norms[0] = q(v)).
//   symplectic: the tensor c * w (x) w with w normalized (c = 0 for the zero
//     tensor); gammas[i] = gamma_i for i = 1..m, norms[i] = 1 - gamma_1 -
//     ... - gamma_i for i = 0..l.
struct DomainPoint {
  Vec v;
  elem c = 1;
  bool zero_tensor = false;
  std::vector<elem> norms;
  std::vector<elem> gammas;
};

// Value of f' in {+-1} x (F_q^x)^r.
struct FPrime {
  bool has_sign = false;
  int sign = 1;
  std::vector<elem> units;
};

// f_phi(x, point) = x * g + h.
struct FPhiParts {
  elem g = 0;
  elem h = 0;
};

namespace detail {

struct SparseEntry {
  std::uint32_t r, c;
  elem val;
};

inline std::vector<SparseEntry> sparse_block(const Mat& A, std::size_t r0, std::size_t nr, std::size_t c0, std::size_t nc) {
  std::vector<SparseEntry> out;
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j)
      if (A(r0 + i, c0 + j) != 0)
        out.push_back({static_cast<std::uint32_t>(r0 + i), static_cast<std::uint32_t>(c0 + j), A(r0 + i, c0 + j)});
  return out;
}

inline elem eval_sparse(const Field& F, const std::vector<SparseEntry>& s, const Vec& x, const Vec& y) {
  elem acc = 0;
  for (const auto& e : s) {
    const elem a = x[e.r], b = y[e.c];
    if (a == 0 || b == 0) continue;
    acc = F.add(acc, F.mul(e.val, F.mul(a, b)));
  }
  return acc;
}

}  // namespace detail

// Precomputed block forms for enumerating the domain and evaluating
// f', f_phi on its points.
class DomainEvaluator {
 public:
  explicit DomainEvaluator(const GradedSpace& S) : S_(&S), F_(&S.field()), g_(S.datum()), proj_(S.field().size(), S.dim()) {
    const Mat& G = S.gram();
    switch (g_.family()) {
      case Family::unitary: {
        base_ = detail::sparse_block(S.quad(), S.offset(0), S.block_dim(0), S.offset(0), S.block_dim(0));
        for (int i = 1; i <= g_.ell; ++i)
          steps_.push_back(detail::sparse_block(G, S.offset(i), S.block_dim(i), S.offset(-i), S.block_dim(-i)));
        break;
      }
      case Family::orthogonal: {
        const int l = g_.ell;
        base_ = detail::sparse_block(S.quad(), S.offset(l), S.block_dim(l), S.offset(l), S.block_dim(l));
        // steps_[k] adds (v_j, v_{m-j}) for j = l-1-k.
        for (int j = l - 1; j >= 1; --j)
          steps_.push_back(detail::sparse_block(G, S.offset(j), S.block_dim(j), S.offset(g_.m - j), S.block_dim(g_.m - j)));
        q0_ = detail::sparse_block(S.quad(), S.offset(0), S.block_dim(0), S.offset(0), S.block_dim(0));
        break;
      }
      case Family::symplectic: {
        // gamma_i = c * omega(w_{m+1-i}, w_i).
        for (int i = 1; i <= g_.m; ++i) {
          const int j = g_.m + 1 - i;
          steps_.push_back(detail::sparse_block(G, S.offset(j), S.block_dim(j), S.offset(i), S.block_dim(i)));
        }
        break;
      }
      default: throw shape_error("split type A has no domain");
    }
  }

  const GradedSpace& space() const { return *S_; }

  // Candidate parameters: points of P(M), or, for the symplectic case,
  // the zero tensor followed by pairs (c, w).
  std::uint64_t candidate_count() const {
    if (g_.family() == Family::symplectic) return 1 + static_cast<std::uint64_t>(F_->size() - 1) * proj_.count();
    return proj_.count();
  }

  // Fills the caches of pt from pt.v (and pt.c); returns membership in the domain.
  bool evaluate(DomainPoint& pt) const {
    const Field& F = *F_;
    switch (g_.family()) {
      case Family::unitary: {
        pt.norms.resize(static_cast<std::size_t>(g_.ell) + 1);
        elem s = detail::eval_sparse(F, base_, pt.v, pt.v);
        pt.norms[0] = s;
        bool ok = s != 0;
        for (int i = 1; i <= g_.ell; ++i) {
          s = F.add(s, detail::eval_sparse(F, steps_[static_cast<std::size_t>(i - 1)], pt.v, pt.v));
          pt.norms[static_cast<std::size_t>(i)] = s;
          ok = ok && s != 0;
        }
        return ok;
      }
      case Family::orthogonal: {
        const int l = g_.ell;
        pt.norms.assign(static_cast<std::size_t>(l) + 1, 0);
        elem s = detail::eval_sparse(F, base_, pt.v, pt.v);
        pt.norms[static_cast<std::size_t>(l)] = s;
        bool ok = s != 0;
        for (int j = l - 1; j >= 1; --j) {
          s = F.add(s, detail::eval_sparse(F, steps_[static_cast<std::size_t>(l - 1 - j)], pt.v, pt.v));
          pt.norms[static_cast<std::size_t>(j)] = s;
          ok = ok && s != 0;
        }
        pt.norms[0] = F.add(s, detail::eval_sparse(F, q0_, pt.v, pt.v));
        return ok && pt.norms[0] == 0;
      }
      case Family::symplectic: {
        pt.gammas.assign(static_cast<std::size_t>(g_.m) + 1, 0);
        pt.norms.assign(static_cast<std::size_t>(g_.ell) + 1, 1);
        if (pt.zero_tensor) return true;
        for (int i = 1; i <= g_.m; ++i)
          pt.gammas[static_cast<std::size_t>(i)] = F.mul(pt.c, detail::eval_sparse(F, steps_[static_cast<std::size_t>(i - 1)], pt.v, pt.v));
        bool ok = true;
        elem s = 1;
        for (int i = 1; i <= g_.ell; ++i) {
          s = F.sub(s, pt.gammas[static_cast<std::size_t>(i)]);
          pt.norms[static_cast<std::size_t>(i)] = s;
          ok = ok && s != 0;
        }
        return ok;
      }
      default: return false;
    }
  }

  void load(std::uint64_t index, DomainPoint& pt) const {
    if (g_.family() == Family::symplectic) {
      if (index == 0) {
        pt.zero_tensor = true;
        pt.c = 0;
        pt.v.assign(S_->dim(), 0);
        return;
      }
      pt.zero_tensor = false;
      const std::uint64_t r = index - 1;
      pt.c = static_cast<elem>(r / proj_.count()) + 1;
      proj_.decode(r % proj_.count(), pt.v);
      return;
    }
    proj_.decode(index, pt.v);
  }

  // Calls fn(point) for every domain point with candidate index in [begin, end).
  template <class Fn>
  void for_each(std::uint64_t begin, std::uint64_t end, Fn&& fn) const {
    if (begin >= end) return;
    DomainPoint pt;
    load(begin, pt);
    for (std::uint64_t idx = begin;;) {
      if (evaluate(pt)) fn(static_cast<const DomainPoint&>(pt));
      if (++idx >= end) break;
      advance(pt);
    }
  }
  template <class Fn>
  void for_each(Fn&& fn) const {
    for_each(0, candidate_count(), std::forward<Fn>(fn));
  }

 private:
  void advance(DomainPoint& pt) const {
    if (g_.family() == Family::symplectic) {
      if (pt.zero_tensor) {
        pt.zero_tensor = false;
        pt.c = 1;
        proj_.decode(0, pt.v);
        return;
      }
      if (!proj_.next(pt.v)) {
        ++pt.c;
        proj_.decode(0, pt.v);
      }
      return;
    }
    proj_.next(pt.v);
  }

  const GradedSpace* S_;
  const Field* F_;
  GroupDatum g_;
  ProjectiveSpace proj_;
  std::vector<detail::SparseEntry> base_, q0_;
  std::vector<std::vector<detail::SparseEntry>> steps_;
};

// Precomputed pairings for f_phi:
//   unitary:    term_i = v_i^T K_i v_{-i-1} / norms[i], i < l; g = v_l^T S v_l / norms[l]
//   symplectic: term_i = c w_i^T K_i w_{m-i} / norms[i], i = 1..l; g = c w_m^T S_m w_m
//   orthogonal: term_i = -v_i^T K_i v_{m-i-1} / norms[i+1], i = 1..l-1; g = -v_0^T K_0 v_{m-1} / norms[1]
class FunctionalEvaluator {
 public:
  FunctionalEvaluator(const GradedSpace& S, const StableFunctional& phi) : S_(&S), F_(&S.field()), g_(S.datum()) {
    check_shapes(S, phi);
    const Field& F = S.field();
    const Mat& G = S.gram();
    auto pairing_via = [&](const Mat& map, int dst, int other, int src) {
      // x^T (map^T G_{dst,other}) y for x in M_src, y in M_other.
      const Mat K = mat_mul(F, transpose(map), S.gram_block(dst, other));
      std::vector<detail::SparseEntry> e;
      for (std::size_t a = 0; a < K.rows; ++a)
        for (std::size_t b = 0; b < K.cols; ++b)
          if (K(a, b) != 0)
            e.push_back({static_cast<std::uint32_t>(S.offset(src) + a), static_cast<std::uint32_t>(S.offset(other) + b), K(a, b)});
      return e;
    };
    (void)G;
    switch (g_.family()) {
      case Family::unitary:
        for (int i = 0; i < g_.ell; ++i) terms_.push_back(pairing_via(phi.maps[static_cast<std::size_t>(i)], i + 1, -i - 1, i));
        g_form_ = detail::sparse_block(embed_form(phi.form, g_.ell), 0, S.dim(), 0, S.dim());
        break;
      case Family::symplectic:
        for (int i = 1; i < g_.ell; ++i)
          terms_.push_back(pairing_via(phi.maps[static_cast<std::size_t>(i - 1)], i + 1, g_.m - i, i));
        terms_.push_back(detail::sparse_block(embed_form(phi.form, g_.ell), 0, S.dim(), 0, S.dim()));
        g_form_ = detail::sparse_block(embed_form(phi.form_m, g_.m), 0, S.dim(), 0, S.dim());
        break;
      case Family::orthogonal:
        g_form_ = pairing_via(phi.maps[0], 1, g_.m - 1, 0);
        for (int i = 1; i < g_.ell; ++i) terms_.push_back(pairing_via(phi.maps[static_cast<std::size_t>(i)], i + 1, g_.m - i - 1, i));
        break;
      default: throw shape_error("split type A has no functional");
    }
  }

  FPhiParts parts(const DomainPoint& pt) const {
    const Field& F = *F_;
    FPhiParts r;
    switch (g_.family()) {
      case Family::unitary: {
        for (std::size_t i = 0; i < terms_.size(); ++i)
          r.h = F.add(r.h, F.div(detail::eval_sparse(F, terms_[i], pt.v, pt.v), denom(pt, i)));
        r.g = F.div(detail::eval_sparse(F, g_form_, pt.v, pt.v), denom(pt, terms_.size()));
        break;
      }
      case Family::symplectic: {
        if (pt.zero_tensor) return r;
        for (std::size_t i = 0; i < terms_.size(); ++i)
          r.h = F.add(r.h, F.div(detail::eval_sparse(F, terms_[i], pt.v, pt.v), denom(pt, i + 1)));
        r.h = F.mul(pt.c, r.h);
        r.g = F.mul(pt.c, detail::eval_sparse(F, g_form_, pt.v, pt.v));
        break;
      }
      case Family::orthogonal: {
        for (std::size_t i = 0; i < terms_.size(); ++i)
          r.h = F.sub(r.h, F.div(detail::eval_sparse(F, terms_[i], pt.v, pt.v), denom(pt, i + 2)));
        r.g = F.neg(F.div(detail::eval_sparse(F, g_form_, pt.v, pt.v), denom(pt, 1)));
        break;
      }
      default: break;
    }
    return r;
  }

  elem value(const DomainPoint& pt, elem x) const {
    const FPhiParts p = parts(pt);
    return F_->add(F_->mul(x, p.g), p.h);
  }

 private:
  elem denom(const DomainPoint& pt, std::size_t i) const {
    const elem d = pt.norms.at(i);
    if (d == 0) throw invariant_violation("zero denominator in f_phi: point outside the domain");
    return d;
  }
  Mat embed_form(const Mat& A, int label) const {
    Mat big(S_->dim(), S_->dim());
    set_submatrix(big, S_->offset(label), S_->offset(label), A);
    return big;
  }

  const GradedSpace* S_;
  const Field* F_;
  GroupDatum g_;
  std::vector<std::vector<detail::SparseEntry>> terms_;
  std::vector<detail::SparseEntry> g_form_;
};

inline FPrime f_prime_eval(const GradedSpace& S, const DomainPoint& pt) {
  const Field& F = S.field();
  const GroupDatum& g = S.datum();
  FPrime r;
  auto ratio = [&](std::size_t a, std::size_t b) {
    if (pt.norms.at(a) == 0 || pt.norms.at(b) == 0) throw invariant_violation("zero block norm in f': point outside the domain");
    return F.div(pt.norms[a], pt.norms[b]);
  };
  switch (g.family()) {
    case Family::unitary:
      r.has_sign = true;
      r.sign = -1;
      for (int i = 0; i < g.ell; ++i) r.units.push_back(ratio(static_cast<std::size_t>(i), static_cast<std::size_t>(i + 1)));
      break;
    case Family::symplectic:
      for (int i = 1; i <= g.ell; ++i) r.units.push_back(ratio(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(i)));
      break;
    case Family::orthogonal:
      r.has_sign = true;
      r.sign = -1;
      for (int i = 1; i < g.ell; ++i) r.units.push_back(ratio(static_cast<std::size_t>(i), static_cast<std::size_t>(i + 1)));
      break;
    default: break;
  }
  return r;
}

inline elem f_phi_eval(const GradedSpace& S, const DomainPoint& pt, const StableFunctional& phi, elem x) {
  return FunctionalEvaluator(S, phi).value(pt, x);
}

// Point built from a representative vector (and scalar c for the
// symplectic tensor c * w (x) w); `in_domain` reports the divisor filter.
inline DomainPoint make_point(const GradedSpace& S, Vec v, elem c, bool* in_domain = nullptr) {
  DomainPoint pt;
  pt.v = std::move(v);
  pt.c = c;
  bool zero = true;
  for (elem x : pt.v) zero = zero && x == 0;
  pt.zero_tensor = S.datum().family() == Family::symplectic && (c == 0 || zero);
  if (pt.zero_tensor) {
    pt.c = 0;
    pt.v.assign(S.dim(), 0);
  }
  const bool ok = DomainEvaluator(S).evaluate(pt);
  if (in_domain) *in_domain = ok;
  return pt;
}

inline std::vector<DomainPoint> enumerate_domain(const GradedSpace& S) {
  std::vector<DomainPoint> out;
  DomainEvaluator(S).for_each([&](const DomainPoint& pt) { out.push_back(pt); });
  return out;
}

inline std::uint64_t domain_size(const GradedSpace& S) {
  std::uint64_t n = 0;
  DomainEvaluator(S).for_each([&](const DomainPoint&) { ++n; });
  return n;
}

}  // namespace epikl
