#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "epikl/field.hpp"
#include "epikl/matrix.hpp"
#include "epikl/poly.hpp"
#include "epikl/projective.hpp"

namespace epikl {

enum class GroupType { A, A2, B, C, D, D2 };
enum class Family { split, unitary, symplectic, orthogonal };

inline std::string to_string(GroupType t) {
  switch (t) {
    case GroupType::A: return "A";
    case GroupType::A2: return "2A";
    case GroupType::B: return "B";
    case GroupType::C: return "C";
    case GroupType::D: return "D";
    case GroupType::D2: return "2D";
  }
  return "?";
}

inline GroupType parse_group_type(const std::string& s) {
  if (s == "A") return GroupType::A;
  if (s == "2A" || s == "U" || s == "unitary") return GroupType::A2;
  if (s == "B") return GroupType::B;
  if (s == "C" || s == "Sp") return GroupType::C;
  if (s == "D") return GroupType::D;
  if (s == "2D") return GroupType::D2;
  throw classification_error("unknown classical type '" + s + "' (expected A, 2A, B, C, D, 2D)");
}

inline Family family_of(GroupType t) {
  switch (t) {
    case GroupType::A: return Family::split;
    case GroupType::A2: return Family::unitary;
    case GroupType::C: return Family::symplectic;
    default: return Family::orthogonal;
  }
}

// (type, n, m, d, l) with the graded pieces M_i. Block labels are
// -l..l (unitary), 1..m (symplectic) or 0..m-1 (orthogonal), stored in
// increasing order, which is also the order of basis vectors.
struct GroupDatum {
  GroupType type = GroupType::A;
  int n = 0, m = 0, d = 0, ell = 0;
  bool second_series = false;  // m = 2(n-1)/d
  std::vector<int> labels;
  std::vector<int> dims;

  Family family() const { return family_of(type); }
  int total_dim() const {
    int s = 0;
    for (int x : dims) s += x;
    return s;
  }
  bool has_block(int label) const { return std::find(labels.begin(), labels.end(), label) != labels.end(); }
  std::size_t index_of(int label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw shape_error("no block with label " + std::to_string(label));
    return static_cast<std::size_t>(it - labels.begin());
  }
  int dim(int label) const { return dims[index_of(label)]; }

  // Weight w of the sum normalization (the dimension of the domain) and
  // rank of the standard representation. The symplectic domain is open in
  // the rank <= 1 symmetric tensors of Sym^2(M), which has dimension 2n.
  int weight() const {
    switch (family()) {
      case Family::unitary: return n - 1;
      case Family::symplectic: return 2 * n;
      case Family::orthogonal: return total_dim() - 2;
      case Family::split: return n - 1;
    }
    return 0;
  }
  int standard_rank() const {
    switch (family()) {
      case Family::unitary: return n;
      case Family::symplectic: return 2 * n + 1;
      case Family::orthogonal: return 2 * n;
      case Family::split: return n;
    }
    return 0;
  }
  // Arity of the characters on L^ab: (sign factor present, number of G_m factors).
  std::pair<bool, int> character_arity() const {
    switch (family()) {
      case Family::unitary: return {true, ell};
      case Family::symplectic: return {false, ell};
      case Family::orthogonal: return {true, ell - 1};
      case Family::split: return {false, n};
    }
    return {false, 0};
  }

  std::string describe() const {
    std::string s = to_string(type) + " n=" + std::to_string(n) + " m=" + std::to_string(m) + " d=" + std::to_string(d) +
                    " l=" + std::to_string(ell) + " blocks";
    for (std::size_t i = 0; i < labels.size(); ++i) s += " M" + std::to_string(labels[i]) + ":" + std::to_string(dims[i]);
    return s;
  }
};

namespace detail {

inline GroupDatum make_unitary(int n, int d, bool second) {
  GroupDatum g;
  g.type = GroupType::A2;
  g.n = n;
  g.d = d;
  g.second_series = second;
  g.m = second ? 2 * (n - 1) / d : 2 * n / d;
  g.ell = (g.m / 2 - 1) / 2;
  for (int i = -g.ell; i <= g.ell; ++i) {
    g.labels.push_back(i);
    g.dims.push_back(i == 0 && second ? d + 1 : d);
  }
  return g;
}

inline GroupDatum make_symplectic(int n, int d) {
  GroupDatum g;
  g.type = GroupType::C;
  g.n = n;
  g.d = d;
  g.m = 2 * n / d;
  g.ell = n / d;
  for (int i = 1; i <= g.m; ++i) {
    g.labels.push_back(i);
    g.dims.push_back(d);
  }
  return g;
}

inline GroupDatum make_orthogonal(GroupType t, int n, int d, bool second) {
  GroupDatum g;
  g.type = t;
  g.n = n;
  g.d = d;
  g.second_series = second;
  g.m = second ? 2 * (n - 1) / d : 2 * n / d;
  g.ell = g.m / 2;
  int d0 = d, dl = d;
  if (t == GroupType::B) {
    if (d % 2 == 0) dl = d + 1;
    else d0 = d + 1;
  } else if (second) {
    d0 = dl = d + 1;
  }
  for (int i = 0; i < g.m; ++i) {
    g.labels.push_back(i);
    g.dims.push_back(i == 0 ? d0 : (i == g.ell ? dl : d));
  }
  return g;
}

}  // namespace detail

inline const char* divisor_rule(GroupType t) {
  switch (t) {
    case GroupType::A: return "m must be n (the Coxeter number) for split type A";
    case GroupType::A2: return "m must be 2n/d with n/d odd, or 2(n-1)/d with (n-1)/d odd and d < n-1";
    case GroupType::B: return "m must be 2n/d for a divisor d of n";
    case GroupType::C: return "m must be 2n/d for a divisor d of n";
    case GroupType::D: return "m must be 2n/d for an even divisor d of n, or 2(n-1)/d for an odd divisor d of n-1";
    case GroupType::D2: return "m must be 2n/d for an odd divisor d of n, or 2(n-1)/d for an even divisor d of n-1";
  }
  return "";
}

inline int min_rank(GroupType t) {
  switch (t) {
    case GroupType::A: return 2;
    case GroupType::A2: return 2;
    case GroupType::B: return 1;
    case GroupType::C: return 1;
    case GroupType::D: return 2;
    case GroupType::D2: return 2;
  }
  return 1;
}

// All admissible data for (type, n), one per regular elliptic number m,
// in decreasing order of m.
inline std::vector<GroupDatum> admissible_data(GroupType t, int n) {
  if (n < min_rank(t)) throw classification_error("n=" + std::to_string(n) + " is below the supported range for type " + to_string(t));
  std::map<int, GroupDatum, std::greater<int>> by_m;
  auto put = [&](GroupDatum g) { by_m.emplace(g.m, std::move(g)); };
  switch (t) {
    case GroupType::A: {
      GroupDatum g;
      g.type = t;
      g.n = n;
      g.m = n;
      g.d = 1;
      put(g);
      break;
    }
    case GroupType::A2:
      for (int d = 1; d <= n; ++d)
        if (n % d == 0 && (n / d) % 2 == 1) put(detail::make_unitary(n, d, false));
      for (int d = 1; d < n - 1; ++d)
        if ((n - 1) % d == 0 && ((n - 1) / d) % 2 == 1) put(detail::make_unitary(n, d, true));
      break;
    case GroupType::C:
      for (int d = 1; d <= n; ++d)
        if (n % d == 0) put(detail::make_symplectic(n, d));
      break;
    case GroupType::B:
      for (int d = 1; d <= n; ++d)
        if (n % d == 0) put(detail::make_orthogonal(t, n, d, false));
      break;
    case GroupType::D:
    case GroupType::D2: {
      const int first_parity = t == GroupType::D ? 0 : 1;
      for (int d = 1; d <= n; ++d)
        if (n % d == 0 && d % 2 == first_parity) put(detail::make_orthogonal(t, n, d, false));
      // m = 2 arises from both rules with the same decomposition; keep the first.
      for (int d = 1; d <= n - 1; ++d)
        if ((n - 1) % d == 0 && d % 2 != first_parity) put(detail::make_orthogonal(t, n, d, true));
      break;
    }
  }
  std::vector<GroupDatum> out;
  for (auto& kv : by_m) out.push_back(kv.second);
  return out;
}

// The datum for (type, n, m); d, if given, must agree.
inline GroupDatum classify(GroupType t, int n, int m, std::optional<int> d = std::nullopt) {
  for (const auto& g : admissible_data(t, n)) {
    if (g.m != m) continue;
    if (d && *d != g.d) {
      throw classification_error("d=" + std::to_string(*d) + " is inconsistent with m=" + std::to_string(m) + " for type " +
                                 to_string(t) + " n=" + std::to_string(n) + " (expected d=" + std::to_string(g.d) + ")");
    }
    return g;
  }
  throw classification_error(std::string(divisor_rule(t)) + " (got type " + to_string(t) + ", n=" + std::to_string(n) +
                             ", m=" + std::to_string(m) + ")");
}

// M with its form: the symmetric bilinear form (x,y) = q(x+y)-q(x)-q(y)
// for unitary/orthogonal data, or the symplectic form for type C.
class GradedSpace {
 public:
  GradedSpace(FieldPtr field, GroupDatum datum, std::uint64_t seed = 0) : F_(std::move(field)), g_(std::move(datum)), seed_(seed) {
    if (g_.family() == Family::split) throw classification_error("split type A has no graded quadratic space; use the classical Kloosterman sum");
    std::size_t off = 0;
    for (int x : g_.dims) {
      offsets_.push_back(off);
      off += static_cast<std::size_t>(x);
    }
    N_ = off;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<elem> unit(1, F_->size() - 1);
    for (int lab : g_.labels)
      if (self_paired(lab)) {
        std::vector<elem> c(static_cast<std::size_t>(g_.dim(lab)), 1);
        if (seed != 0)
          for (auto& x : c) x = unit(rng);
        coeffs_[lab] = c;
      }
    build_gram();
  }

  const Field& field() const { return *F_; }
  const FieldPtr& field_ptr() const { return F_; }
  const GroupDatum& datum() const { return g_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t dim() const { return N_; }
  const Mat& gram() const { return gram_; }
  // q(v) = v^T Q v; only for unitary/orthogonal data.
  const Mat& quad() const { return quad_; }

  std::size_t offset(int label) const { return offsets_[g_.index_of(label)]; }
  std::size_t block_dim(int label) const { return static_cast<std::size_t>(g_.dim(label)); }

  // Label of the block paired with `label`.
  int dual_label(int label) const {
    switch (g_.family()) {
      case Family::unitary: return -label;
      case Family::symplectic: return g_.m + 1 - label;
      case Family::orthogonal: return label == 0 ? 0 : g_.m - label;
      default: return label;
    }
  }
  bool self_paired(int label) const { return g_.family() != Family::symplectic && dual_label(label) == label; }
  const std::vector<elem>& self_coeffs(int label) const { return coeffs_.at(label); }

  Mat gram_block(int i, int j) const { return submatrix(gram_, offset(i), block_dim(i), offset(j), block_dim(j)); }
  // Matrix of q restricted to a self-paired block.
  Mat block_quad(int label) const { return submatrix(quad_, offset(label), block_dim(label), offset(label), block_dim(label)); }

  elem pair(const Vec& x, const Vec& y) const { return bilinear(*F_, gram_, x, y); }
  elem q(const Vec& v) const { return bilinear(*F_, quad_, v, v); }

  Vec block(const Vec& v, int label) const {
    const std::size_t o = offset(label), k = block_dim(label);
    return Vec(v.begin() + static_cast<std::ptrdiff_t>(o), v.begin() + static_cast<std::ptrdiff_t>(o + k));
  }
  Vec embed_block(const Vec& x, int label) const {
    Vec v(N_, 0);
    std::copy(x.begin(), x.end(), v.begin() + static_cast<std::ptrdiff_t>(offset(label)));
    return v;
  }
  // Projection of v onto the blocks whose labels satisfy keep(label).
  template <class Pred>
  Vec truncate(const Vec& v, Pred keep) const {
    Vec r(N_, 0);
    for (int lab : g_.labels)
      if (keep(lab)) {
        const std::size_t o = offset(lab);
        for (std::size_t a = 0; a < block_dim(lab); ++a) r[o + a] = v[o + a];
      }
    return r;
  }

  // Same space over F_{q^k}, coefficients embedded.
  GradedSpace base_change(const FieldExtension& ext) const {
    GradedSpace s = *this;
    s.F_ = ext.ext();
    for (auto& kv : s.coeffs_)
      for (auto& x : kv.second) x = ext.embed(x);
    s.build_gram();
    return s;
  }

 private:
  void build_gram() {
    const Field& F = *F_;
    gram_ = Mat(N_, N_);
    for (int lab : g_.labels) {
      const int dual = dual_label(lab);
      const std::size_t o = offset(lab), k = block_dim(lab);
      if (g_.family() == Family::symplectic) {
        const elem s = lab <= g_.ell ? 1 : F.neg(1);
        const std::size_t od = offset(dual);
        for (std::size_t a = 0; a < k; ++a) gram_(o + a, od + a) = s;
      } else if (dual == lab) {
        const auto& c = coeffs_.at(lab);
        for (std::size_t a = 0; a < k; ++a) gram_(o + a, o + a) = F.add(c[a], c[a]);
      } else {
        const std::size_t od = offset(dual);
        for (std::size_t a = 0; a < k; ++a) gram_(o + a, od + a) = 1;
      }
    }
    if (g_.family() != Family::symplectic) quad_ = mat_scale(F, gram_, F.inv(2));
  }

  FieldPtr F_;
  GroupDatum g_;
  std::uint64_t seed_;
  std::size_t N_ = 0;
  std::vector<std::size_t> offsets_;
  std::map<int, std::vector<elem>> coeffs_;
  Mat gram_, quad_;
};

// Dual-quiver data phi. Conventions:
//   unitary:    maps[i] : M_i -> M_{i+1} (i = 0..l-1); form = phi_l, a
//               quadratic form y^T S y on M_l.
//   symplectic: maps[i-1] : M_i -> M_{i+1} (i = 1..l-1); form = phi_l and
//               form_m = phi_m as symmetric bilinear forms
//               b(v,u) = omega(phi v, u) on M_l and M_m.
//   orthogonal: maps[i] : M_i -> M_{i+1} (i = 0..l-1).
struct StableFunctional {
  std::vector<Mat> maps;
  Mat form;
  Mat form_m;

  bool operator==(const StableFunctional& o) const { return maps == o.maps && form == o.form && form_m == o.form_m; }

  StableFunctional base_change(const FieldExtension& ext) const {
    StableFunctional r = *this;
    auto emb = [&](Mat& A) {
      for (auto& x : A.a) x = ext.embed(x);
    };
    for (auto& A : r.maps) emb(A);
    emb(r.form);
    emb(r.form_m);
    return r;
  }
  StableFunctional scaled_form(const Field& F, elem c) const {
    StableFunctional r = *this;
    r.form = mat_scale(F, r.form, c);
    return r;
  }
};

// Source and target labels of maps[i].
inline std::pair<int, int> map_endpoints(const GroupDatum& g, std::size_t i) {
  const int src = g.family() == Family::symplectic ? static_cast<int>(i) + 1 : static_cast<int>(i);
  return {src, src + 1};
}

inline std::size_t map_count(const GroupDatum& g) {
  switch (g.family()) {
    case Family::unitary: return static_cast<std::size_t>(g.ell);
    case Family::symplectic: return static_cast<std::size_t>(g.ell - 1);
    case Family::orthogonal: return static_cast<std::size_t>(g.ell);
    default: return 0;
  }
}

inline void check_shapes(const GradedSpace& S, const StableFunctional& phi) {
  const GroupDatum& g = S.datum();
  if (phi.maps.size() != map_count(g))
    throw shape_error("expected " + std::to_string(map_count(g)) + " quiver maps, got " + std::to_string(phi.maps.size()));
  for (std::size_t i = 0; i < phi.maps.size(); ++i) {
    auto [src, dst] = map_endpoints(g, i);
    if (phi.maps[i].rows != S.block_dim(dst) || phi.maps[i].cols != S.block_dim(src))
      throw shape_error("map " + std::to_string(src) + "->" + std::to_string(dst) + " has shape " + std::to_string(phi.maps[i].rows) + "x" +
                        std::to_string(phi.maps[i].cols));
  }
  auto need_form = [&](const Mat& A, int label, const char* what) {
    const std::size_t k = S.block_dim(label);
    if (A.rows != k || A.cols != k) throw shape_error(std::string(what) + " must be a " + std::to_string(k) + "x" + std::to_string(k) + " matrix");
    if (!is_symmetric(A)) throw shape_error(std::string(what) + " must be symmetric");
  };
  if (g.family() == Family::unitary) need_form(phi.form, g.ell, "phi_l");
  if (g.family() == Family::symplectic) {
    need_form(phi.form, g.ell, "phi_l");
    need_form(phi.form_m, g.m, "phi_m");
  }
}

// Map form of the symplectic phi_l : M_l -> M_{l+1} and phi_m : M_m -> M_1,
// determined by omega(phi v, u) = b(v, u).
inline Mat symplectic_form_to_map(const GradedSpace& S, const Mat& b, int label) {
  const Field& F = S.field();
  const int target = label == S.datum().m ? 1 : label + 1;
  const Mat W = S.gram_block(target, label);  // omega(e_target, e_label)
  auto inv = mat_inverse(F, transpose(W));
  if (!inv) throw invariant_violation("symplectic pairing block is singular");
  return mat_mul(F, *inv, b);
}

struct Pencil {
  Poly charpoly;  // det(phi - x q), leading coefficient may vanish
  int dimension = 0;
  int infinity_multiplicity = 0;
  RootMultiset rational;
  bool squarefree = false;
  int distinct_points = 0;  // over P^1 of the algebraic closure

  bool general_position() const { return squarefree && infinity_multiplicity <= 1 && distinct_points == dimension; }
  bool all_rational() const {
    return infinity_multiplicity == 0 && static_cast<int>(rational.roots.size()) == poly_degree(charpoly);
  }
  std::vector<elem> rational_roots() const {
    std::vector<elem> r;
    for (auto& [x, mult] : rational.roots) r.push_back(x);
    return r;
  }
};

// Product of the distinct monic irreducible factors of f.
inline Poly poly_radical(const Field& F, const Poly& f) {
  if (f.size() <= 1) return Poly{1};
  const Poly d = poly_derivative(F, f);
  Poly c = d.empty() ? poly_monic(F, f) : poly_gcd(F, f, d);
  Poly w = poly_divmod(F, poly_monic(F, f), c).first;
  Poly rad = w;
  for (;;) {
    const Poly h = poly_gcd(F, c, w);
    if (h.size() <= 1) break;
    c = poly_divmod(F, c, h).first;
  }
  if (c.size() > 1) {
    // c is a p-th power: take coefficientwise p-th roots.
    const std::uint32_t p = F.p();
    Poly root((c.size() - 1) / p + 1, 0);
    const std::uint64_t inv_frob = F.size() / p;  // x -> x^{q/p} inverts x -> x^p
    for (std::size_t i = 0; i < root.size(); ++i) root[i] = F.pow(c[i * p], static_cast<std::int64_t>(inv_frob));
    poly_trim(root);
    const Poly r2 = poly_radical(F, root);
    // Factors of r2 are disjoint from those of w by construction.
    rad = poly_mul(F, rad, r2);
  }
  return poly_monic(F, rad);
}

inline Pencil pencil_degeneracy(const Field& F, const Mat& q, const Mat& phi) {
  if (!q.is_square() || q.rows != phi.rows || phi.rows != phi.cols) throw shape_error("pencil forms must be square of equal size");
  if (mat_det(F, q) == 0) throw degenerate_input("reference form q of the pencil is degenerate");
  Pencil P;
  P.dimension = static_cast<int>(q.rows);
  P.charpoly = pencil_polynomial(F, q, phi);
  if (P.charpoly.empty()) throw invariant_violation("pencil polynomial vanishes although q is nondegenerate");
  P.infinity_multiplicity = P.dimension - poly_degree(P.charpoly);
  P.rational = poly_roots(F, P.charpoly);
  P.squarefree = P.rational.squarefree && P.infinity_multiplicity <= 1;
  P.distinct_points = poly_degree(poly_radical(F, P.charpoly)) + (P.infinity_multiplicity > 0 ? 1 : 0);
  return P;
}

struct StabilityResult {
  bool stable = false;
  std::string reason;  // empty when stable
};

// The pair of forms whose general position decides stability
// (reference, other), both on M_0 (unitary/orthogonal) or M_m (symplectic).
inline std::pair<Mat, Mat> stability_pencil_forms(const GradedSpace& S, const StableFunctional& phi) {
  const Field& F = S.field();
  const GroupDatum& g = S.datum();
  switch (g.family()) {
    case Family::unitary: {
      Mat T = Mat::identity(S.block_dim(0));
      for (const auto& A : phi.maps) T = mat_mul(F, A, T);
      return {S.block_quad(0), mat_mul(F, transpose(T), mat_mul(F, phi.form, T))};
    }
    case Family::symplectic: {
      Mat T = symplectic_form_to_map(S, phi.form_m, g.m);
      for (const auto& A : phi.maps) T = mat_mul(F, A, T);
      return {phi.form_m, mat_mul(F, transpose(T), mat_mul(F, phi.form, T))};
    }
    case Family::orthogonal: {
      Mat T = Mat::identity(S.block_dim(0));
      for (const auto& A : phi.maps) T = mat_mul(F, A, T);
      return {S.block_quad(0), mat_mul(F, transpose(T), mat_mul(F, S.block_quad(g.ell), T))};
    }
    default: throw shape_error("no stability pencil for split type A");
  }
}

inline StabilityResult is_stable(const GradedSpace& S, const StableFunctional& phi) {
  check_shapes(S, phi);
  const Field& F = S.field();
  const GroupDatum& g = S.datum();
  for (std::size_t i = 0; i < phi.maps.size(); ++i) {
    const Mat& A = phi.maps[i];
    const std::size_t want = g.family() == Family::symplectic ? A.rows : std::min(A.rows, A.cols);
    if (mat_rank(F, A) != want || (g.family() == Family::symplectic && !A.is_square())) {
      auto [src, dst] = map_endpoints(g, i);
      return {false, "rank: phi_" + std::to_string(src) + " : M_" + std::to_string(src) + " -> M_" + std::to_string(dst) + " is not of maximal rank"};
    }
  }
  if (g.family() == Family::symplectic) {
    if (mat_det(F, phi.form) == 0) return {false, "rank: phi_l is not an isomorphism"};
    if (mat_det(F, phi.form_m) == 0) return {false, "rank: phi_m is not an isomorphism"};
  }
  auto [ref, other] = stability_pencil_forms(S, phi);
  const Pencil P = pencil_degeneracy(F, ref, other);
  if (!P.squarefree) return {false, "pencil has repeated degeneracy point"};
  if (P.distinct_points != P.dimension)
    return {false, "pencil degenerate at " + std::to_string(P.distinct_points) + " points, expected " + std::to_string(P.dimension)};
  return {true, ""};
}

inline Pencil stability_pencil(const GradedSpace& S, const StableFunctional& phi) {
  check_shapes(S, phi);
  auto [ref, other] = stability_pencil_forms(S, phi);
  return pencil_degeneracy(S.field(), ref, other);
}

// Identity or projection/inclusion maps everywhere, `values` placed on
// the self-paired part: phi_l = diag(values) (unitary, symplectic) or the
// last map phi_{l-1} = diag(values) (orthogonal). phi_m = identity.
inline StableFunctional diagonal_functional(const GradedSpace& S, const std::vector<elem>& values) {
  const GroupDatum& g = S.datum();
  StableFunctional phi;
  for (std::size_t i = 0; i < map_count(g); ++i) {
    auto [src, dst] = map_endpoints(g, i);
    phi.maps.push_back(Mat::rect_identity(S.block_dim(dst), S.block_dim(src)));
  }
  auto need = [&](std::size_t k) {
    if (values.size() != k)
      throw shape_error("diagonal functional needs " + std::to_string(k) + " entries, got " + std::to_string(values.size()));
  };
  for (elem v : values)
    if (v >= S.field().size()) throw shape_error("diagonal entry " + std::to_string(v) + " is not a field element");
  switch (g.family()) {
    case Family::unitary:
      need(S.block_dim(g.ell));
      phi.form = Mat::diagonal(values);
      break;
    case Family::symplectic:
      need(S.block_dim(g.ell));
      phi.form = Mat::diagonal(values);
      phi.form_m = Mat::identity(S.block_dim(g.m));
      break;
    case Family::orthogonal: {
      Mat& last = phi.maps.back();
      need(std::min(last.rows, last.cols));
      for (std::size_t a = 0; a < values.size(); ++a) last(a, a) = values[a];
      break;
    }
    default: throw shape_error("no functional for split type A");
  }
  return phi;
}

// Diagonal functional whose pencil roots are distinct, nonzero and
// rational; throws if the field is too small to provide them.
inline StableFunctional canonical_functional(const GradedSpace& S) {
  const Field& F = S.field();
  const GroupDatum& g = S.datum();
  std::vector<elem> values;
  switch (g.family()) {
    case Family::unitary: {
      // Pencil roots are values[j] / c_j with c the M_0 coefficients.
      const auto& c = S.self_coeffs(0);
      for (std::size_t j = 0; j < S.block_dim(g.ell); ++j) {
        if (j + 1 >= F.size()) throw degenerate_input("field too small for a canonical stable functional");
        values.push_back(F.mul(static_cast<elem>(j + 1), c[j]));
      }
      break;
    }
    case Family::symplectic:
      for (std::size_t j = 0; j < S.block_dim(g.ell); ++j) {
        if (j + 1 >= F.size()) throw degenerate_input("field too small for a canonical stable functional");
        values.push_back(static_cast<elem>(j + 1));
      }
      break;
    case Family::orthogonal: {
      // Roots c_l[j] a_j^2 / c_0[j]: pick a_j greedily so they are distinct.
      const auto& c0 = S.self_coeffs(0);
      const auto& cl = S.self_coeffs(g.ell);
      const std::size_t r = std::min(S.block_dim(g.ell), g.ell == 1 ? S.block_dim(0) : static_cast<std::size_t>(g.d));
      std::set<elem> used;
      elem a = 1;
      for (std::size_t j = 0; j < r; ++j) {
        for (;; ++a) {
          if (a >= F.size()) throw degenerate_input("field too small for a canonical stable functional");
          const elem root = F.div(F.mul(cl[j], F.mul(a, a)), c0[j]);
          if (!used.count(root)) {
            used.insert(root);
            values.push_back(a);
            ++a;
            break;
          }
        }
      }
      break;
    }
    default: throw shape_error("no functional for split type A");
  }
  StableFunctional phi = diagonal_functional(S, values);
  const StabilityResult st = is_stable(S, phi);
  if (!st.stable) throw degenerate_input("field too small for a canonical stable functional: " + st.reason);
  return phi;
}

// Projective zeros of v^T Q v in P^{N-1}(F_q), by enumeration.
inline std::uint64_t quadric_point_count(const Field& F, const Mat& Q) {
  if (!Q.is_square() || Q.rows == 0) throw shape_error("quadric needs a square form on a nonzero space");
  const ProjectiveSpace P(F.size(), Q.rows);
  std::vector<elem> v;
  P.decode(0, v);
  std::uint64_t count = 0;
  do {
    if (bilinear(F, Q, v, v) == 0) ++count;
  } while (P.next(v));
  return count;
}

// Classical count for a nondegenerate quadric in N variables.
inline std::uint64_t quadric_point_count_formula(const Field& F, const Mat& Q) {
  const std::uint64_t q = F.size();
  const std::size_t N = Q.rows;
  const elem det = mat_det(F, Q);
  if (det == 0) throw degenerate_input("closed form needs a nondegenerate quadric");
  const std::uint64_t base = (ipow(q, static_cast<unsigned>(N - 1)) - 1) / (q - 1);
  if (N % 2 == 1) return base;
  const std::size_t r = N / 2;
  elem disc = det;
  if (r % 2 == 1) disc = F.neg(disc);
  const int eps = F.quadratic_char(disc);
  const std::int64_t corr = eps * static_cast<std::int64_t>(ipow(q, static_cast<unsigned>(r - 1)));
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(base) + corr);
}

}  // namespace epikl
