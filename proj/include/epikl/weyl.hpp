#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epikl/errors.hpp"
#include "epikl/quadform.hpp"

namespace epikl {

// Ambient classical type of the dual group side: gl_N (A), so_{2r+1} (B),
// sp_{2r} (C), so_{2r} (D).
enum class Ambient { A, B, C, D };

inline std::string to_string(Ambient a) {
  switch (a) {
    case Ambient::A: return "A";
    case Ambient::B: return "B";
    case Ambient::C: return "C";
    case Ambient::D: return "D";
  }
  return "?";
}

inline int ambient_size(Ambient a, int rank) {
  switch (a) {
    case Ambient::A: return rank + 1;
    case Ambient::B: return 2 * rank + 1;
    case Ambient::C: return 2 * rank;
    case Ambient::D: return 2 * rank;
  }
  return 0;
}

inline std::string lie_algebra_name(Ambient a, int rank) {
  const int N = ambient_size(a, rank);
  switch (a) {
    case Ambient::A: return "gl" + std::to_string(N);
    case Ambient::B:
    case Ambient::D: return "so" + std::to_string(N);
    case Ambient::C: return "sp" + std::to_string(N);
  }
  return "";
}

using Partition = std::vector<int>;

inline Partition normalize_partition(Partition p) {
  p.erase(std::remove_if(p.begin(), p.end(), [](int x) { return x <= 0; }), p.end());
  std::sort(p.begin(), p.end(), std::greater<int>());
  return p;
}

inline Partition conjugate_partition(const Partition& p) {
  Partition c;
  if (p.empty()) return c;
  for (int k = 1; k <= p.front(); ++k) {
    int cnt = 0;
    for (int x : p) cnt += x >= k;
    c.push_back(cnt);
  }
  return c;
}

// Compact form with multiplicities, e.g. [3,2^2] or [1^5].
inline std::string partition_string(const Partition& p) {
  std::string s = "[";
  for (std::size_t i = 0; i < p.size();) {
    std::size_t j = i;
    while (j < p.size() && p[j] == p[i]) ++j;
    if (i) s += ",";
    s += std::to_string(p[i]);
    if (j - i > 1) s += "^" + std::to_string(j - i);
    i = j;
  }
  return s + "]";
}

struct UnipotentClass {
  Ambient ambient = Ambient::A;
  int ambient_rank = 0;
  Partition partition;  // classical data
  std::string label;    // Bala-Carter label for exceptional data

  bool exceptional() const { return partition.empty() && !label.empty(); }
  int size() const {
    int s = 0;
    for (int x : partition) s += x;
    return s;
  }
  std::string describe() const {
    if (exceptional()) return label;
    return partition_string(partition) + " in " + lie_algebra_name(ambient, ambient_rank);
  }
};

// Empty when the partition is admissible for its ambient algebra.
inline std::optional<std::string> partition_violation(const UnipotentClass& u) {
  const int N = ambient_size(u.ambient, u.ambient_rank);
  if (u.size() != N) return "partition size " + std::to_string(u.size()) + " differs from ambient size " + std::to_string(N);
  std::map<int, int> mult;
  for (int x : u.partition) {
    if (x <= 0) return std::string("nonpositive part");
    ++mult[x];
  }
  if (u.ambient == Ambient::C) {
    for (auto [part, k] : mult)
      if (part % 2 == 1 && k % 2 == 1) return "odd part " + std::to_string(part) + " has odd multiplicity in type C";
  } else if (u.ambient == Ambient::B || u.ambient == Ambient::D) {
    for (auto [part, k] : mult)
      if (part % 2 == 0 && k % 2 == 1)
        return "even part " + std::to_string(part) + " has odd multiplicity in type " + to_string(u.ambient);
  }
  return std::nullopt;
}

// dim of the centralizer of a nilpotent with Jordan type u.partition.
inline int centralizer_dim(const UnipotentClass& u) {
  if (auto err = partition_violation(u)) throw degenerate_input(*err);
  const Partition c = conjugate_partition(u.partition);
  int sq = 0;
  for (int x : c) sq += x * x;
  int odd = 0;
  for (int x : u.partition) odd += x % 2;
  switch (u.ambient) {
    case Ambient::A: return sq;
    case Ambient::C: return (sq + odd) / 2;
    case Ambient::B:
    case Ambient::D: return (sq - odd) / 2;
  }
  return 0;
}

inline int ambient_lie_rank(Ambient a, int rank) { return a == Ambient::A ? rank + 1 : rank; }

// dim B_u = (dim Z(u) - rank) / 2.
inline int springer_fiber_dim(const UnipotentClass& u) {
  if (u.exceptional()) throw inapplicable("no Springer fiber dimension for exceptional labels");
  const int z = centralizer_dim(u), r = ambient_lie_rank(u.ambient, u.ambient_rank);
  if ((z - r) % 2 != 0) throw invariant_violation("centralizer dimension and rank have different parity");
  return (z - r) / 2;
}

// Dual-side ambient (type, rank) for a group type of rank parameter n.
inline std::pair<Ambient, int> dual_ambient(GroupType t, int n) {
  switch (t) {
    case GroupType::A: return {Ambient::A, n - 1};
    case GroupType::A2: return n % 2 == 1 ? std::pair{Ambient::B, (n - 1) / 2} : std::pair{Ambient::C, n / 2};
    case GroupType::B: return {Ambient::C, n};
    case GroupType::C: return {Ambient::B, n};
    case GroupType::D: return {Ambient::D, n};
    case GroupType::D2: return {Ambient::B, n - 1};
  }
  return {Ambient::A, 0};
}

// Number of roots of the absolute root system.
inline int root_count(GroupType t, int n) {
  switch (t) {
    case GroupType::A:
    case GroupType::A2: return n * (n - 1);
    case GroupType::B:
    case GroupType::C: return 2 * n * n;
    case GroupType::D:
    case GroupType::D2: return 2 * n * (n - 1);
  }
  return 0;
}

// Regular elliptic numbers with divisor parameter, sorted by decreasing m.
inline std::vector<std::pair<int, int>> regular_elliptic_numbers(GroupType t, int n) {
  if (n > 12) throw classification_error("classical types are supported for n <= 12");
  std::vector<std::pair<int, int>> out;
  for (const auto& g : admissible_data(t, n)) out.emplace_back(g.m, g.d);
  return out;
}

namespace detail {

inline Partition blocks(std::initializer_list<std::pair<int, int>> spec) {
  Partition p;
  for (auto [size, count] : spec)
    for (int i = 0; i < count; ++i) p.push_back(size);
  return normalize_partition(p);
}

}  // namespace detail

// The unipotent class u_m attached to the admissible datum.
inline UnipotentClass unipotent_monodromy_class(const GroupDatum& g) {
  const auto [amb, rank] = dual_ambient(g.type, g.n);
  UnipotentClass u;
  u.ambient = amb;
  u.ambient_rank = rank;
  const int m = g.m, d = g.d, n = g.n;
  using detail::blocks;
  switch (g.type) {
    case GroupType::A: u.partition = {n}; break;
    case GroupType::A2:
      if (n % 2 == 1) {
        u.partition = g.second_series ? blocks({{1, 1}, {m / 2, d}}) : blocks({{m / 2, d}});
      } else {
        u.partition = g.second_series ? blocks({{m / 2, d - 1}, {m / 2 + 1, 1}}) : blocks({{m / 2 - 1, 1}, {m / 2, d - 2}, {m / 2 + 1, 1}});
      }
      break;
    case GroupType::B: u.partition = blocks({{m, d}}); break;
    case GroupType::C:
      u.partition = d % 2 == 1 ? blocks({{m, d - 1}, {m + 1, 1}}) : blocks({{1, 1}, {m - 1, 1}, {m, d - 2}, {m + 1, 1}});
      break;
    case GroupType::D:
      u.partition = g.second_series ? blocks({{1, 1}, {m, d - 1}, {m + 1, 1}}) : blocks({{m - 1, 1}, {m, d - 2}, {m + 1, 1}});
      break;
    case GroupType::D2:
      u.partition = g.second_series ? blocks({{1, 1}, {m, d}}) : blocks({{m - 1, 1}, {m, d - 1}});
      break;
  }
  return u;
}

inline UnipotentClass unipotent_monodromy_class(GroupType t, int n, int m) { return unipotent_monodromy_class(classify(t, n, m)); }

struct LeviFactor {
  enum Kind { GL, SO, Torus } kind = GL;
  int size = 0;

  int dim() const {
    switch (kind) {
      case GL: return size * size;
      case SO: return size * (size - 1) / 2;
      case Torus: return size;
    }
    return 0;
  }
  int rank() const {
    switch (kind) {
      case GL: return size;
      case SO: return size / 2;
      case Torus: return size;
    }
    return 0;
  }
  int positive_roots() const {
    switch (kind) {
      case GL: return size * (size - 1) / 2;
      case SO: return size % 2 == 1 ? (size / 2) * (size / 2) : (size / 2) * (size / 2 - 1);
      case Torus: return 0;
    }
    return 0;
  }
  std::string describe() const {
    switch (kind) {
      case GL: return "GL" + std::to_string(size);
      case SO: return "SO" + std::to_string(size);
      case Torus: return "T" + std::to_string(size);
    }
    return "";
  }
};

struct ParahoricDatum {
  GroupDatum datum;
  std::vector<LeviFactor> levi;
  int roots = 0;  // #Phi

  int dim_levi() const {
    int s = 0;
    for (const auto& f : levi) s += f.dim();
    return s;
  }
  int rank_levi() const {
    int s = 0;
    for (const auto& f : levi) s += f.rank();
    return s;
  }
  // #Psi(L_P): all roots of L_P, from dimension minus rank.
  int levi_root_count() const { return dim_levi() - rank_levi(); }
  std::string describe_levi() const {
    std::string s;
    for (const auto& f : levi) {
      if (f.kind == LeviFactor::SO && f.size <= 1) continue;
      if (!s.empty()) s += " x ";
      s += f.describe();
    }
    return s.empty() ? "1" : s;
  }
};

inline ParahoricDatum parahoric_datum(const GroupDatum& g) {
  ParahoricDatum P;
  P.datum = g;
  P.roots = root_count(g.type, g.n);
  auto gl = [&](int k) { P.levi.push_back({LeviFactor::GL, k}); };
  auto so = [&](int k) { P.levi.push_back({LeviFactor::SO, k}); };
  switch (g.family()) {
    case Family::split: P.levi.push_back({LeviFactor::Torus, g.n - 1}); break;
    case Family::unitary:
      for (int i = 1; i <= g.ell; ++i) gl(g.dim(i));
      so(g.dim(0));
      break;
    case Family::symplectic:
      for (int i = 1; i <= g.ell; ++i) gl(g.dim(i));
      break;
    case Family::orthogonal:
      so(g.dim(0));
      for (int i = 1; i < g.ell; ++i) gl(g.dim(i));
      so(g.dim(g.ell));
      break;
  }
  return P;
}

// l(w_P): the number of positive roots of L_P, factor by factor.
inline int levi_length(const ParahoricDatum& P) {
  int s = 0;
  for (const auto& f : P.levi) s += f.positive_roots();
  return s;
}

struct ConsistencyRow {
  GroupType type = GroupType::A;
  int n = 0, m = 0, d = 0;
  UnipotentClass u;
  std::string levi;
  std::optional<std::string> partition_error;
  int springer = -1;
  int levi_length = -1;
  int half_levi_roots = -1;
  int dim_levi = -1;
  int roots = 0;
  bool small_rank = false;  // outside the n >= 3 range for 2A, D, 2D
  bool pass = false;
  std::vector<std::string> failures;
};

inline bool small_rank_flag(GroupType t, int n) { return n < 3 && (t == GroupType::A2 || t == GroupType::D || t == GroupType::D2); }

// Checks one row: partition validity, dim B_u = l(w_P) = #Psi(L_P)/2 and
// dim L_P * m = #Phi.
inline ConsistencyRow check_row(const ParahoricDatum& P, const UnipotentClass& u) {
  const GroupDatum& g = P.datum;
  ConsistencyRow r;
  r.type = g.type;
  r.n = g.n;
  r.m = g.m;
  r.d = g.d;
  r.u = u;
  r.levi = P.describe_levi();
  r.roots = P.roots;
  r.small_rank = small_rank_flag(g.type, g.n);
  r.levi_length = levi_length(P);
  r.dim_levi = P.dim_levi();
  const int psi = P.levi_root_count();
  if (psi % 2 != 0) r.failures.push_back("#Psi(L_P) is odd");
  r.half_levi_roots = psi / 2;
  const auto expected = dual_ambient(g.type, g.n);
  if (u.ambient != expected.first || u.ambient_rank != expected.second) r.failures.push_back("ambient type mismatch");
  r.partition_error = partition_violation(u);
  if (r.partition_error) {
    r.failures.push_back("partition: " + *r.partition_error);
  } else {
    r.springer = springer_fiber_dim(u);
    if (r.springer != r.levi_length) r.failures.push_back("dim B_u != l(w_P)");
  }
  if (r.levi_length != r.half_levi_roots) r.failures.push_back("l(w_P) != #Psi(L_P)/2");
  if (r.dim_levi * g.m != r.roots) r.failures.push_back("dim L_P * m != #Phi");
  r.pass = r.failures.empty();
  return r;
}

struct ConsistencyReport {
  GroupType type = GroupType::A;
  std::vector<ConsistencyRow> rows;
  bool all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const ConsistencyRow& r) { return r.pass; });
  }
};

inline ConsistencyReport consistency_check(GroupType t, int n) {
  ConsistencyReport rep;
  rep.type = t;
  for (const auto& g : admissible_data(t, n)) {
    const ParahoricDatum P = parahoric_datum(g);
    rep.rows.push_back(check_row(P, unipotent_monodromy_class(g)));
  }
  return rep;
}

// All rows for n from the smallest supported rank up to n_max.
inline ConsistencyReport consistency_check_range(GroupType t, int n_max) {
  ConsistencyReport rep;
  rep.type = t;
  for (int n = min_rank(t); n <= n_max; ++n) {
    auto part = consistency_check(t, n);
    rep.rows.insert(rep.rows.end(), part.rows.begin(), part.rows.end());
  }
  return rep;
}

struct ExceptionalRow {
  std::string group;
  int m = 0;
  std::string label;
  std::string ambient;
};

inline const std::vector<std::string>& exceptional_groups() {
  static const std::vector<std::string> names = {"E6", "2E6", "E7", "E8", "F4", "3D4", "G2"};
  return names;
}

inline bool is_exceptional_name(const std::string& s) {
  const auto& v = exceptional_groups();
  return std::find(v.begin(), v.end(), s) != v.end();
}

inline std::vector<ExceptionalRow> exceptional_rows(const std::string& group) {
  static const std::vector<ExceptionalRow> all = {
      {"E6", 3, "2A2+A1", "E6"},   {"E6", 6, "E6(a3)", "E6"},      {"E6", 9, "E6(a1)", "E6"},     {"E6", 12, "E6", "E6"},
      {"2E6", 2, "A1", "F4"},      {"2E6", 4, "A2+~A1", "F4"},     {"2E6", 6, "F4(a3)", "F4"},    {"2E6", 12, "F4(a1)", "F4"},
      {"2E6", 18, "F4", "F4"},     {"E7", 2, "4A1", "E7"},         {"E7", 6, "E7(a5)", "E7"},     {"E7", 14, "E7(a1)", "E7"},
      {"E7", 18, "E7", "E7"},      {"E8", 2, "4A1", "E8"},         {"E8", 3, "2A2+2A1", "E8"},    {"E8", 4, "2A3", "E8"},
      {"E8", 5, "A4+A3", "E8"},    {"E8", 6, "E8(a7)", "E8"},      {"E8", 8, "A7", "E8"},         {"E8", 10, "E8(a6)", "E8"},
      {"E8", 12, "E8(a5)", "E8"},  {"E8", 15, "E8(a4)", "E8"},     {"E8", 20, "E8(a2)", "E8"},    {"E8", 24, "E8(a1)", "E8"},
      {"E8", 30, "E8", "E8"},      {"F4", 2, "A1+~A1", "F4"},      {"F4", 3, "~A2+A1", "F4"},     {"F4", 4, "F4(a3)", "F4"},
      {"F4", 6, "F4(a2)", "F4"},   {"F4", 8, "F4(a1)", "F4"},      {"F4", 12, "F4", "F4"},        {"3D4", 3, "A1", "G2"},
      {"3D4", 6, "G2(a1)", "G2"},  {"3D4", 12, "G2", "G2"},        {"G2", 2, "~A1", "G2"},        {"G2", 3, "G2(a1)", "G2"},
      {"G2", 6, "G2", "G2"},
  };
  if (!is_exceptional_name(group)) throw classification_error("unknown exceptional type " + group);
  std::vector<ExceptionalRow> out;
  for (const auto& r : all)
    if (r.group == group) out.push_back(r);
  return out;
}

inline std::vector<int> exceptional_elliptic_numbers(const std::string& group) {
  std::vector<int> out;
  for (const auto& r : exceptional_rows(group)) out.push_back(r.m);
  return out;
}

inline UnipotentClass exceptional_monodromy_class(const std::string& group, int m) {
  for (const auto& r : exceptional_rows(group))
    if (r.m == m) {
      UnipotentClass u;
      u.label = r.label;
      return u;
    }
  throw classification_error("m=" + std::to_string(m) + " is not a regular elliptic number for " + group);
}

}  // namespace epikl
