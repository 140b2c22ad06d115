#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "epikl/engine.hpp"

namespace epikl {

// ---------------------------------------------------------------------------
// Span tests for the unitary m = 2 structure theorems.

struct SpanTestResult {
  double residual = 0.0;
  double target_norm = 0.0;
  std::vector<cplx> coefficients;
  std::string basis;
  int basis_rank = 0;
  int length = 0;
  bool pass = false;

  double relative_residual() const { return target_norm > 0 ? residual / target_norm : 0.0; }
  // Negative-control outcome: the target is far from the span.
  bool rejects(double frac = 0.1) const { return residual > frac * target_norm; }
  // Basis spans the whole ambient space, so passing carries no information.
  bool vacuous() const { return basis_rank >= length; }
};

inline constexpr double span_tolerance = 1e-6;

// Least-squares fit of `target` by the columns of `basis`.
inline SpanTestResult span_test(const std::vector<cplx>& target, const std::vector<std::vector<cplx>>& basis, std::string desc) {
  const Eigen::Index n = static_cast<Eigen::Index>(target.size());
  Eigen::VectorXcd b(n);
  for (Eigen::Index i = 0; i < n; ++i) b(i) = target[static_cast<std::size_t>(i)];
  Eigen::MatrixXcd A(n, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (basis[j].size() != target.size()) throw shape_error("span basis vector has the wrong length");
    for (Eigen::Index i = 0; i < n; ++i) A(i, static_cast<Eigen::Index>(j)) = basis[j][static_cast<std::size_t>(i)];
  }
  SpanTestResult r;
  r.basis = std::move(desc);
  r.length = static_cast<int>(n);
  r.target_norm = b.norm();
  if (A.cols() > 0) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(A);
    cod.setThreshold(1e-10);
    const Eigen::VectorXcd x = cod.solve(b);
    r.residual = (A * x - b).norm();
    r.basis_rank = static_cast<int>(cod.rank());
    for (Eigen::Index j = 0; j < x.size(); ++j) r.coefficients.push_back(x(j));
  } else {
    r.residual = r.target_norm;
  }
  r.pass = r.residual < span_tolerance * r.target_norm || r.target_norm == 0.0;
  return r;
}

// Pencil roots lambda_i of det(phi - lambda q) for a unitary m = 2 datum;
// throws inapplicable unless they are distinct and all in F_q.
inline std::vector<elem> span_test_roots(const GradedSpace& S, const StableFunctional& phi) {
  const GroupDatum& g = S.datum();
  if (g.family() != Family::unitary || g.m != 2) throw inapplicable("span tests need a unitary datum with m = 2");
  const Pencil P = stability_pencil(S, phi);
  if (!P.squarefree || P.infinity_multiplicity > 0) throw inapplicable("pencil roots are repeated or at infinity");
  if (!P.all_rational()) throw inapplicable("pencil roots are not all rational over F_q");
  return P.rational_roots();
}

namespace detail {

inline void check_span_table(const TraceTable& T, const std::vector<elem>& lambda, bool odd) {
  if (T.datum.family() != Family::unitary || T.datum.m != 2) throw inapplicable("span tests need a unitary datum with m = 2");
  if ((T.datum.total_dim() % 2 == 1) != odd) throw inapplicable(odd ? "dim M is even; use the quadratic-character test" : "dim M is odd; use the odd test");
  if (static_cast<int>(lambda.size()) != T.datum.total_dim()) throw inapplicable("need dim M pencil roots");
  std::vector<elem> s = lambda;
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw inapplicable("repeated pencil root");
  for (elem x : s)
    if (x >= T.field->size()) throw inapplicable("pencil root outside F_q");
}

inline std::vector<cplx> constant_vector(const TraceTable& T) { return std::vector<cplx>(T.ts.size(), 1.0); }

inline std::vector<cplx> psi_vector(const TraceTable& T, elem lambda) {
  const AdditiveCharacter psi(T.field, T.psi_multiplier);
  const Field& F = *T.field;
  std::vector<cplx> v;
  for (elem t : T.ts) v.push_back(psi.value(F.mul(lambda, t)));
  return v;
}

// G(t) = sum over a outside {lambda_i} of eta(prod (a - lambda_i)) psi(a t);
// eta trivial when `quadratic` is false.
inline std::vector<cplx> twisted_vector(const TraceTable& T, const std::vector<elem>& lambda, bool quadratic) {
  const Field& F = *T.field;
  const AdditiveCharacter psi(T.field, T.psi_multiplier);
  std::vector<cplx> v(T.ts.size(), 0.0);
  for (elem a = 0; a < F.size(); ++a) {
    elem prod = 1;
    for (elem l : lambda) prod = F.mul(prod, F.sub(a, l));
    if (prod == 0) continue;
    const double eta = quadratic ? F.quadratic_char(prod) : 1.0;
    for (std::size_t i = 0; i < T.ts.size(); ++i) v[i] += eta * psi.value(F.mul(a, T.ts[i]));
  }
  return v;
}

}  // namespace detail

// (S(t))_t in span{1, psi(lambda_i t)}.
inline SpanTestResult span_test_odd_unitary(const TraceTable& T, const std::vector<elem>& lambda) {
  detail::check_span_table(T, lambda, true);
  std::vector<std::vector<cplx>> basis{detail::constant_vector(T)};
  for (elem l : lambda) basis.push_back(detail::psi_vector(T, l));
  return span_test(T.raw_vector(), basis, "constant + psi(lambda_i t), " + std::to_string(lambda.size()) + " roots");
}

// (S(t))_t in span{1, G} with G the quadratic-character model vector.
inline SpanTestResult span_test_even_unitary(const TraceTable& T, const std::vector<elem>& lambda) {
  detail::check_span_table(T, lambda, false);
  return span_test(T.raw_vector(), {detail::constant_vector(T), detail::twisted_vector(T, lambda, true)},
                   "constant + sum eta(prod(a - lambda_i)) psi(a t)");
}

// Negative controls.
inline SpanTestResult span_control_trivial_character(const TraceTable& T) {
  return span_test(T.raw_vector(), {detail::constant_vector(T)}, "trivial character: constants only");
}

inline SpanTestResult span_control_trivial_eta(const TraceTable& T, const std::vector<elem>& lambda) {
  detail::check_span_table(T, lambda, false);
  return span_test(T.raw_vector(), {detail::constant_vector(T), detail::twisted_vector(T, lambda, false)},
                   "constant + sum psi(a t) over a outside the roots (eta trivial)");
}

// Random unit-modulus target against the basis of the corresponding test.
inline SpanTestResult span_control_random(const TraceTable& T, const std::vector<elem>& lambda, std::uint64_t seed) {
  const bool odd = T.datum.total_dim() % 2 == 1;
  detail::check_span_table(T, lambda, odd);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  std::vector<cplx> target;
  for (std::size_t i = 0; i < T.ts.size(); ++i) target.push_back(std::polar(1.0, ang(rng)));
  std::vector<std::vector<cplx>> basis{detail::constant_vector(T)};
  if (odd)
    for (elem l : lambda) basis.push_back(detail::psi_vector(T, l));
  else
    basis.push_back(detail::twisted_vector(T, lambda, true));
  return span_test(target, basis, "random target against the model basis");
}

// ---------------------------------------------------------------------------
// Purity.

struct PurityResult {
  double max_ratio = 0.0;
  elem t_at_max = 0;
  int rank = 0;
  int weight = 0;
  bool pass = false;
};

// max_t |S(t)| / q^{w/2}; passes iff <= rank + 1e-9.
inline PurityResult purity_check(const TraceTable& T, int rank, int w) {
  PurityResult r;
  r.rank = rank;
  r.weight = w;
  const double scale = std::pow(static_cast<double>(T.field->size()), -0.5 * w);
  for (std::size_t i = 0; i < T.values.size(); ++i) {
    const double x = std::abs(T.values[i].value) * scale;
    if (x > r.max_ratio) {
      r.max_ratio = x;
      r.t_at_max = T.ts[i];
    }
  }
  r.pass = r.max_ratio <= rank + 1e-9;
  return r;
}

inline PurityResult purity_check(const TraceTable& T) { return purity_check(T, T.datum.standard_rank(), T.weight); }

// ---------------------------------------------------------------------------
// Euler characteristic from Frobenius power sums.

struct EulerOptions {
  elem psi_multiplier = 1;
  double budget = 4e8;  // total candidate points over all extensions
  double tolerance = 1e-6;
  unsigned threads = 1;
  std::uint64_t extension_seed = 0;
};

struct ProonyEstimate {
  int k_max = 0;
  int k_achieved = 0;
  bool complete = false;
  std::vector<cplx> power_sums;  // N_k = -sum_t S_k(t)
  std::vector<cplx> scaled;      // y_k = -(-1)^w q^{-k(w+1)/2} sum_t S_k(t)
  std::vector<double> singular_values;
  double tolerance = 0.0;
  int estimate = 0;
  double gap = 0.0;  // sigma_r / sigma_{r+1}
  bool confident = false;
  std::vector<cplx> roots;         // Prony roots of y (eigenvalues / sqrt(q))
  std::vector<cplx> multiplicities;  // Prony amplitudes c_j
  cplx prony_sum{0.0, 0.0};
  double cost = 0.0;
  std::string assumptions =
      "H^0_c = H^2_c = 0, so sum_t tr(Frob^k | Kl) = -tr(Frob^k | H^1_c); Hankel rank counts distinct eigenvalues, "
      "the Prony sum counts them with multiplicity (signed, so it equals -chi_c even when H^2_c is nonzero)";
};

namespace detail {

// Numerical rank of the Hankel matrix of y_1..y_K.
inline void hankel_rank(ProonyEstimate& E) {
  const int K = static_cast<int>(E.scaled.size());
  E.singular_values.clear();
  E.estimate = 0;
  E.gap = 0.0;
  E.confident = false;
  if (K == 0) return;
  const int r = (K + 1) / 2, c = K - r + 1;
  Eigen::MatrixXcd H(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) H(i, j) = E.scaled[static_cast<std::size_t>(i + j)];
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(H);
  const auto& s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) E.singular_values.push_back(s(i));
  if (E.singular_values.empty() || E.singular_values[0] == 0.0) {
    E.confident = true;
    E.gap = std::numeric_limits<double>::infinity();
    return;
  }
  const double cut = E.tolerance * E.singular_values[0];
  for (double x : E.singular_values)
    if (x > cut) ++E.estimate;
  const std::size_t rr = static_cast<std::size_t>(E.estimate);
  if (rr < E.singular_values.size()) {
    const double next = E.singular_values[rr];
    E.gap = next > 0 ? E.singular_values[rr - 1] / next : std::numeric_limits<double>::infinity();
    // The estimate is confident only if the rank is below the matrix size
    // (a full-rank Hankel matrix cannot exclude further exponentials).
    E.confident = E.gap >= 10.0;
  }
}

// Linear prediction roots and amplitudes for the first `estimate` exponentials.
inline void prony_fit(ProonyEstimate& E) {
  const int r = E.estimate, K = static_cast<int>(E.scaled.size());
  E.roots.clear();
  E.multiplicities.clear();
  E.prony_sum = 0.0;
  if (r == 0 || K < 2 * r) return;
  Eigen::MatrixXcd P(K - r, r);
  Eigen::VectorXcd rhs(K - r);
  for (int k = 0; k < K - r; ++k) {
    for (int i = 0; i < r; ++i) P(k, i) = E.scaled[static_cast<std::size_t>(k + i)];
    rhs(k) = E.scaled[static_cast<std::size_t>(k + r)];
  }
  const Eigen::VectorXcd a = P.completeOrthogonalDecomposition().solve(rhs);
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(r, r);
  for (int i = 1; i < r; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < r; ++i) comp(i, r - 1) = a(i);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp);
  const Eigen::VectorXcd alpha = es.eigenvalues();
  Eigen::MatrixXcd V(K, r);
  Eigen::VectorXcd y(K);
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < r; ++j) V(k, j) = std::pow(alpha(j), k + 1);
    y(k) = E.scaled[static_cast<std::size_t>(k)];
  }
  const Eigen::VectorXcd c = V.completeOrthogonalDecomposition().solve(y);
  for (int j = 0; j < r; ++j) {
    E.roots.push_back(alpha(j));
    E.multiplicities.push_back(c(j));
    E.prony_sum += c(j);
  }
}

inline double candidate_cost(const GroupDatum& g, double Q) {
  const double proj = (std::pow(Q, g.total_dim()) - 1.0) / (Q - 1.0);
  return g.family() == Family::symplectic ? 1.0 + (Q - 1.0) * proj : proj;
}

}  // namespace detail

// Unitary functional with identity/inclusion quiver maps and phi_l running
// over symmetric forms in counting order (upper-triangle entries, row by
// row, the first one fastest).
// Nondegenerate: symmetric forms, fewest rational pencil roots first.
// Degenerate: diagonal rank k-1 forms, first stable one in counting order.
inline StableFunctional search_functional(const GradedSpace& S, bool degenerate, std::uint64_t max_candidates = 200000) {
  const GroupDatum& g = S.datum();
  const Field& F = S.field();
  if (g.family() != Family::unitary) throw inapplicable("functional search is implemented for unitary data");
  const std::size_t k = S.block_dim(g.ell);
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < (degenerate ? i + 1 : k); ++j) slots.emplace_back(i, j);
  StableFunctional phi = diagonal_functional(S, std::vector<elem>(k, 1));
  std::optional<StableFunctional> best;
  std::size_t best_rational = std::numeric_limits<std::size_t>::max();
  std::vector<elem> digits(slots.size(), 0);
  for (std::uint64_t it = 0; it < max_candidates; ++it) {
    Mat M(k, k);
    for (std::size_t s = 0; s < slots.size(); ++s) M(slots[s].first, slots[s].second) = M(slots[s].second, slots[s].first) = digits[s];
    const std::size_t rk = mat_rank(F, M);
    if (rk == (degenerate ? k - 1 : k)) {
      StableFunctional cand = phi;
      cand.form = M;
      if (is_stable(S, cand).stable) {
        if (degenerate) return cand;
        const std::size_t nrat = stability_pencil(S, cand).rational.roots.size();
        if (nrat < best_rational) {
          best_rational = nrat;
          best = cand;
          if (nrat == 0) break;
        }
      }
    }
    std::size_t s = 0;
    while (s < digits.size() && ++digits[s] == F.size()) digits[s++] = 0;
    if (s == digits.size()) break;
  }
  if (!best) throw inapplicable(std::string("no stable ") + (degenerate ? "degenerate" : "nondegenerate") + " functional found");
  return *best;
}

// Lift of chi to F_{q^k}: chi o Norm. Exponents are relative to the
// primitive roots of each field, and Norm(g_ext) = g_base^c for some unit c.
inline std::vector<std::int64_t> lift_character_exponents(const std::vector<std::int64_t>& exps, const FieldExtension& ext) {
  const Field& B = *ext.base();
  const Field& E = *ext.ext();
  const std::int64_t qm1 = static_cast<std::int64_t>(B.size() - 1);
  const std::int64_t order = static_cast<std::int64_t>(E.size() - 1);
  const std::int64_t factor = order / qm1;
  const std::int64_t c = B.dlog(ext.restrict(E.pow(E.primitive_root(), factor)));
  std::vector<std::int64_t> out;
  for (auto e : exps) {
    const std::int64_t r = ((e % qm1) + qm1) % qm1;
    out.push_back(static_cast<std::int64_t>((static_cast<__int128>(r * c % qm1) * factor) % order));
  }
  return out;
}

inline ProonyEstimate euler_characteristic_estimate(const GradedSpace& S, const StableFunctional& phi, const CharacterTuple& chi, int k_max,
                                                    const EulerOptions& opt = {}) {
  const GroupDatum& g = S.datum();
  if (k_max < 2 * (g.d + 1)) throw degenerate_input("k_max must be at least 2(d+1) = " + std::to_string(2 * (g.d + 1)));
  const FieldPtr& F = S.field_ptr();
  const std::uint64_t q = F->size();
  const int w = g.weight();
  ProonyEstimate E;
  E.k_max = k_max;
  E.tolerance = opt.tolerance;
  for (int k = 1; k <= k_max; ++k) {
    const double Q = std::pow(static_cast<double>(q), k);
    const double cost = detail::candidate_cost(g, Q);
    if (Q >= static_cast<double>(1u << 24) || E.cost + cost > opt.budget) break;
    const FieldExtension ext(F, static_cast<unsigned>(k), opt.extension_seed);
    const GradedSpace Sk = S.base_change(ext);
    const StableFunctional phik = phi.base_change(ext);
    CharacterTuple chik = chi;
    chik.exponents = lift_character_exponents(chi.exponents, ext);
    const AdditiveCharacter psik(ext.ext(), ext.embed(opt.psi_multiplier));
    const TraceValue total = total_trace_sum(Sk, phik, chik, psik, opt.threads);
    E.power_sums.push_back(-total.value);
    const double sign = w % 2 == 0 ? 1.0 : -1.0;
    E.scaled.push_back(-sign * total.value * std::pow(Q, -0.5 * (w + 1)));
    E.cost += cost;
    E.k_achieved = k;
  }
  E.complete = E.k_achieved == k_max;
  detail::hankel_rank(E);
  detail::prony_fit(E);
  return E;
}

// ---------------------------------------------------------------------------
// A/B reconstruction oracle.

struct ABPair {
  Mat A, B, C;
};

namespace detail {

inline Mat blk(const GradedSpace& S, const Mat& M, int i, int j) {
  return submatrix(M, S.offset(i), S.block_dim(i), S.offset(j), S.block_dim(j));
}

inline elem mat_trace(const Field& F, const Mat& M) {
  elem s = 0;
  for (std::size_t i = 0; i < std::min(M.rows, M.cols); ++i) s = F.add(s, M(i, i));
  return s;
}

// x y^T
inline Mat outer(const Field& F, const Vec& x, const Vec& y) {
  Mat M(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) M(i, j) = F.mul(x[i], y[j]);
  return M;
}

inline Vec slice(const Vec& v, std::size_t o, std::size_t n) {
  return Vec(v.begin() + static_cast<std::ptrdiff_t>(o), v.begin() + static_cast<std::ptrdiff_t>(o + n));
}

}  // namespace detail

// R = A^{-1} B with A block upper unipotent and B block lower triangular,
// blocks in label order. Eliminates from the last block upward; fails when
// a trailing pivot block is singular.
inline std::optional<ABPair> block_ul(const GradedSpace& S, const Mat& R) {
  const Field& F = S.field();
  const auto& labels = S.datum().labels;
  const std::size_t N = S.dim();
  Mat W = R, U = Mat::identity(N), L(N, N);
  for (std::size_t kk = labels.size(); kk-- > 0;) {
    const int k = labels[kk];
    const std::size_t o = S.offset(k), n = S.block_dim(k);
    if (n == 0) continue;
    set_submatrix(L, o, 0, submatrix(W, o, n, 0, o + n));
    if (o == 0) continue;
    auto inv = mat_inverse(F, submatrix(W, o, n, o, n));
    if (!inv) return std::nullopt;
    const Mat Uk = mat_mul(F, submatrix(W, 0, o, o, n), *inv);
    set_submatrix(U, 0, o, Uk);
    const Mat lead = mat_sub(F, submatrix(W, 0, o, 0, o), mat_mul(F, Uk, submatrix(W, o, n, 0, o)));
    set_submatrix(W, 0, 0, lead);
  }
  if (mat_mul(F, U, L) != R) throw invariant_violation("block UL factorization does not reproduce R");
  auto A = mat_inverse(F, U);
  if (!A) throw invariant_violation("unipotent factor is singular");
  return ABPair{*A, L, Mat()};
}

// C with R = 1 - C for the point: the rank-one endomorphism attached to
// [v] (unitary, orthogonal) or to the tensor c w (x) w (symplectic).
// Empty when the defining denominator vanishes.
inline std::optional<Mat> point_endomorphism(const GradedSpace& S, const DomainPoint& pt) {
  const Field& F = S.field();
  const Mat& G = S.gram();
  switch (S.datum().family()) {
    case Family::unitary: {
      const elem qv = S.q(pt.v);
      if (qv == 0) return std::nullopt;
      const Vec Gv = mat_vec(F, G, pt.v);
      return mat_scale(F, detail::outer(F, pt.v, Gv), F.inv(qv));
    }
    case Family::symplectic: {
      if (pt.zero_tensor) return Mat(S.dim(), S.dim());
      // C x = c omega(x, w) w, omega(x, w) = x^T G w.
      const Vec Gw = mat_vec(F, G, pt.v);
      return mat_scale(F, detail::outer(F, pt.v, Gw), pt.c);
    }
    case Family::orthogonal: {
      const Vec vp = S.truncate(pt.v, [](int lab) { return lab != 0; });
      const elem qp = S.q(vp);
      if (qp == 0) return std::nullopt;
      const Vec Gv = mat_vec(F, G, pt.v);
      return mat_scale(F, detail::outer(F, pt.v, Gv), F.inv(qp));
    }
    default: throw shape_error("no reconstruction for split type A");
  }
}

inline std::optional<ABPair> reconstruct_ab(const GradedSpace& S, const DomainPoint& pt) {
  auto C = point_endomorphism(S, pt);
  if (!C) return std::nullopt;
  const Mat R = mat_sub(S.field(), Mat::identity(S.dim()), *C);
  auto ab = block_ul(S, R);
  if (ab) ab->C = *C;
  return ab;
}

struct ReconstructionResult {
  bool decomposed = false;
  bool match = false;
  std::vector<std::string> failures;
  std::optional<ABPair> ab;
};

inline ReconstructionResult reconstruction_oracle(const GradedSpace& S, const DomainPoint& pt, const StableFunctional* phi = nullptr) {
  const Field& F = S.field();
  const GroupDatum& g = S.datum();
  const Mat& G = S.gram();
  ReconstructionResult res;
  res.ab = reconstruct_ab(S, pt);
  if (!res.ab) {
    res.failures.push_back("no block factorization: point outside the domain");
    return res;
  }
  res.decomposed = true;
  const Mat& A = res.ab->A;
  const Mat& B = res.ab->B;
  const Mat& C = res.ab->C;
  auto fail = [&](bool ok, const std::string& what) {
    if (!ok) res.failures.push_back(what);
  };
  auto preserves = [&](const Mat& X, const Mat& form) { return mat_mul(F, transpose(X), mat_mul(F, form, X)) == form; };
  auto det_block = [&](const Mat& M, int i) { return mat_det(F, detail::blk(S, M, i, i)); };
  const std::size_t rkAB = mat_rank(F, mat_sub(F, A, B));
  const FPrime fp = f_prime_eval(S, pt);
  std::optional<FPhiParts> want;
  if (phi && g.ell >= 1) want = FunctionalEvaluator(S, *phi).parts(pt);
  FPhiParts got;

  switch (g.family()) {
    case Family::unitary: {
      const int l = g.ell;
      fail(preserves(A, G), "A preserves the form");
      fail(preserves(B, G), "B preserves the form");
      fail(mat_mul(F, transpose(A), mat_mul(F, G, B)) == mat_mul(F, transpose(B), mat_mul(F, G, A)), "(Ax,By) = (Bx,Ay)");
      fail(rkAB == 1, "A - B has rank one");
      fail(det_block(B, 0) == F.neg(1), "det B_00 = -1");
      for (int i = 1; i <= l; ++i)
        fail(det_block(B, i) == fp.units.at(static_cast<std::size_t>(i - 1)), "det B_" + std::to_string(i) + std::to_string(i) + " = f' entry");
      if (want) {
        for (int i = 0; i < l; ++i)
          got.h = F.add(got.h, detail::mat_trace(F, mat_mul(F, phi->maps[static_cast<std::size_t>(i)], detail::blk(S, A, i, i + 1))));
        // <phi_l, X> for X = -B_{l,-l} : M_{-l} -> M_l, via M_{-l} = M_l^*.
        const Mat X = mat_scale(F, detail::blk(S, B, l, -l), F.neg(1));
        auto Ginv = mat_inverse(F, S.gram_block(l, -l));
        if (!Ginv) throw invariant_violation("pairing block is singular");
        got.g = detail::mat_trace(F, mat_mul(F, phi->form, mat_mul(F, X, *Ginv)));
      }
      break;
    }
    case Family::symplectic: {
      const int l = g.ell, m = g.m;
      fail(preserves(A, G), "A is symplectic");
      fail(preserves(B, G), "B is symplectic");
      fail(mat_add(F, mat_mul(F, transpose(C), G), mat_mul(F, G, C)).is_zero(), "C lies in the symplectic Lie algebra");
      fail(rkAB == (pt.zero_tensor ? 0u : 1u), "A - B has rank one (zero at the identity)");
      for (int i = 1; i <= l; ++i)
        fail(det_block(B, i) == fp.units.at(static_cast<std::size_t>(i - 1)), "det B_" + std::to_string(i) + std::to_string(i) + " = f' entry");
      if (want) {
        for (int i = 1; i <= l; ++i) {
          const Mat phi_i = i < l ? phi->maps[static_cast<std::size_t>(i - 1)] : symplectic_form_to_map(S, phi->form, l);
          got.h = F.add(got.h, detail::mat_trace(F, mat_mul(F, phi_i, detail::blk(S, A, i, i + 1))));
        }
        const Mat phi_m = symplectic_form_to_map(S, phi->form_m, m);
        got.g = F.neg(detail::mat_trace(F, mat_mul(F, phi_m, detail::blk(S, B, m, 1))));
      }
      break;
    }
    case Family::orthogonal: {
      const int l = g.ell;
      const std::size_t n0 = S.block_dim(0), np = S.dim() - n0;
      const Mat G0 = submatrix(G, 0, n0, 0, n0), Gp = submatrix(G, n0, np, n0, np);
      const Mat Q0 = submatrix(S.quad(), 0, n0, 0, n0), Qp = submatrix(S.quad(), n0, np, n0, np);
      const Mat A00 = submatrix(A, 0, n0, 0, n0), A0p = submatrix(A, 0, n0, n0, np), Ap0 = submatrix(A, n0, np, 0, n0),
                App = submatrix(A, n0, np, n0, np);
      const Mat B00 = submatrix(B, 0, n0, 0, n0), B0p = submatrix(B, 0, n0, n0, np), Bp0 = submatrix(B, n0, np, 0, n0),
                Bpp = submatrix(B, n0, np, n0, np);
      const Vec v0 = detail::slice(pt.v, 0, n0), vp = detail::slice(pt.v, n0, np);
      const elem q0 = bilinear(F, Q0, v0, v0), qp = bilinear(F, Qp, vp, vp);
      auto sym = [&](const Mat& X) { return mat_add(F, X, transpose(X)); };
      fail(A00 == Mat::identity(n0), "A_00 = 1");
      fail(Ap0.is_zero(), "A_+0 = 0");
      fail(B0p.is_zero(), "B_0+ = 0");
      fail(preserves(App, Gp), "A_++ orthogonal on M_+");
      fail(preserves(Bpp, Gp), "B_++ orthogonal on M_+");
      fail(q0 != 0 && q0 == F.neg(qp), "q_0(v_0) = -q_+(v_+)");
      if (q0 != 0) {
        const Mat refl = mat_sub(F, Mat::identity(n0), mat_scale(F, detail::outer(F, v0, mat_vec(F, G0, v0)), F.inv(q0)));
        fail(B00 == refl, "B_00 = R_[v_0]");
      }
      fail(mat_det(F, B00) == F.neg(1), "det B_00 = -1");
      if (qp != 0) {
        const Mat want0p = mat_scale(F, detail::outer(F, v0, mat_vec(F, Gp, vp)), F.neg(F.inv(qp)));
        fail(A0p == want0p, "A_0+ = -(-, v_+) v_0 / q_+(v_+)");
      }
      // Pairing identities, as symmetric matrices (q(x) = x^T Q x, G = 2Q).
      fail(sym(mat_mul(F, G0, B00)) == mat_add(F, sym(G0), sym(mat_mul(F, transpose(Bp0), mat_mul(F, Qp, Bp0)))),
           "(x, B_00 x) = 2 q_0(x) + q_+(B_+0 x)");
      fail(sym(mat_mul(F, transpose(App), mat_mul(F, Gp, Bpp))) == mat_add(F, sym(mat_mul(F, transpose(A0p), mat_mul(F, Q0, A0p))), sym(Gp)),
           "(A_++ y, B_++ y) = q_0(A_0+ y) + 2 q_+(y)");
      fail(mat_mul(F, G0, A0p) == mat_mul(F, transpose(Bp0), mat_mul(F, Gp, App)), "(x, A_0+ y) = (B_+0 x, A_++ y)");
      fail(mat_mul(F, transpose(B00), mat_mul(F, G0, A0p)) == mat_mul(F, transpose(Bp0), mat_mul(F, Gp, Bpp)),
           "(B_00 x, A_0+ y) = (B_+0 x, B_++ y)");
      fail(rkAB == 1, "A - B has rank one");
      for (int i = 1; i < l; ++i)
        fail(det_block(B, i) == fp.units.at(static_cast<std::size_t>(i - 1)), "det B_" + std::to_string(i) + std::to_string(i) + " = f' entry");
      if (l >= 1) fail(det_block(B, l) == mat_det(F, B00), "det B_ll = det B_00");
      if (want) {
        got.g = detail::mat_trace(F, mat_mul(F, phi->maps[0], detail::blk(S, A, 0, 1)));
        for (int i = 1; i < l; ++i)
          got.h = F.add(got.h, detail::mat_trace(F, mat_mul(F, phi->maps[static_cast<std::size_t>(i)], detail::blk(S, A, i, i + 1))));
      }
      break;
    }
    default: throw shape_error("no reconstruction for split type A");
  }
  if (want) {
    fail(got.g == want->g, "<phi, f''> x-coefficient = f_phi");
    fail(got.h == want->h, "<phi, f''> constant term = f_phi");
  }
  res.match = res.failures.empty();
  return res;
}

struct ReconstructionSweep {
  std::uint64_t candidates = 0;
  std::uint64_t domain_points = 0;
  std::uint64_t matched = 0;
  std::uint64_t membership_disagreements = 0;  // factorization exists iff the point is in the domain
  std::uint64_t mismatches = 0;
  std::string first_failure;

  bool pass() const { return domain_points > 0 && matched == domain_points && membership_disagreements == 0 && mismatches == 0; }
};

// Runs the oracle over all candidate points (samples == 0) or over
// `samples` random domain points. Orthogonal candidates off the quadric
// q(v) = 0 are skipped: the oracle is defined on the quadric only.
inline ReconstructionSweep reconstruction_sweep(const GradedSpace& S, const StableFunctional* phi, std::uint64_t samples = 0,
                                                std::uint64_t seed = 1) {
  const DomainEvaluator dom(S);
  ReconstructionSweep rep;
  auto visit = [&](DomainPoint& pt, bool count_outside) {
    const bool in = dom.evaluate(pt);
    if (S.datum().family() == Family::orthogonal && S.q(pt.v) != 0) return;
    ++rep.candidates;
    if (!in) {
      if (count_outside && reconstruct_ab(S, pt)) {
        ++rep.membership_disagreements;
        if (rep.first_failure.empty()) rep.first_failure = "factorization exists outside the domain";
      }
      return;
    }
    ++rep.domain_points;
    const ReconstructionResult r = reconstruction_oracle(S, pt, phi);
    if (!r.decomposed) {
      ++rep.membership_disagreements;
    } else if (!r.match) {
      ++rep.mismatches;
    } else {
      ++rep.matched;
    }
    if (!r.match && rep.first_failure.empty()) rep.first_failure = r.failures.front();
  };
  DomainPoint pt;
  if (samples == 0) {
    for (std::uint64_t i = 0; i < dom.candidate_count(); ++i) {
      dom.load(i, pt);
      visit(pt, true);
    }
    return rep;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, dom.candidate_count() - 1);
  for (std::uint64_t tries = 0; rep.domain_points < samples && tries < 10000 * samples; ++tries) {
    dom.load(pick(rng), pt);
    if (!dom.evaluate(pt)) continue;
    visit(pt, false);
  }
  return rep;
}

}  // namespace epikl
