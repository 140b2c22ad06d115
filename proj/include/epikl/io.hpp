#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "epikl/engine.hpp"
#include "epikl/verify.hpp"
#include "epikl/weyl.hpp"

namespace epikl {

using json = nlohmann::json;

inline constexpr const char* version_string = "0.1.0";
inline constexpr int schema_version = 1;

// How phi is chosen: "canonical", "diag" (values), "explicit" (matrices
// inline), or "search" (first stable form found by enumeration, see
// search_functional).
struct PhiSpec {
  std::string kind = "canonical";
  std::vector<elem> values;
  std::optional<StableFunctional> matrices;

  bool operator==(const PhiSpec& o) const { return kind == o.kind && values == o.values && matrices == o.matrices; }
};

struct RunConfig {
  std::string command = "trace";
  std::string suite;
  std::string type = "2A";
  int n = 3;
  int m = 2;
  std::optional<int> d;
  std::uint32_t p = 7;
  unsigned e = 1;
  std::vector<std::uint32_t> modulus;  // empty: chosen by field_seed
  std::uint64_t field_seed = 0;
  std::uint64_t space_seed = 0;
  PhiSpec phi;
  std::vector<std::int64_t> chi;  // empty: trivial
  elem psi = 1;
  std::string format = "json";
  unsigned threads = 1;
  int n_max = 8;
  int k_max = 8;
  bool degenerate = false;
  std::uint64_t samples = 0;
  std::uint64_t seed = 1;

  bool operator==(const RunConfig& o) const = default;
};

// ---------------------------------------------------------------------------
// Matrices and functionals.

inline json mat_to_json(const Mat& A) {
  json rows = json::array();
  for (std::size_t i = 0; i < A.rows; ++i) {
    json r = json::array();
    for (std::size_t j = 0; j < A.cols; ++j) r.push_back(A(i, j));
    rows.push_back(r);
  }
  return json{{"rows", A.rows}, {"cols", A.cols}, {"entries", rows}};
}

inline Mat mat_from_json(const json& j) {
  // Accept {"rows","cols","entries"} or a bare array of rows.
  const json& e = j.is_object() ? j.at("entries") : j;
  std::size_t r = e.size(), c = r ? e.at(0).size() : 0;
  if (j.is_object()) {
    r = j.at("rows").get<std::size_t>();
    c = j.at("cols").get<std::size_t>();
  }
  Mat A(r, c);
  if (e.size() != r) throw shape_error("matrix has the wrong number of rows");
  for (std::size_t i = 0; i < r; ++i) {
    if (e[i].size() != c) throw shape_error("matrix rows have unequal length");
    for (std::size_t k = 0; k < c; ++k) A(i, k) = e[i][k].get<elem>();
  }
  return A;
}

inline json functional_to_json(const StableFunctional& phi) {
  json maps = json::array();
  for (const auto& A : phi.maps) maps.push_back(mat_to_json(A));
  return json{{"maps", maps}, {"form", mat_to_json(phi.form)}, {"form_m", mat_to_json(phi.form_m)}};
}

inline StableFunctional functional_from_json(const json& j) {
  StableFunctional phi;
  for (const auto& A : j.value("maps", json::array())) phi.maps.push_back(mat_from_json(A));
  if (j.contains("form")) phi.form = mat_from_json(j.at("form"));
  if (j.contains("form_m")) phi.form_m = mat_from_json(j.at("form_m"));
  return phi;
}

// ---------------------------------------------------------------------------
// PhiSpec / RunConfig serialization.

inline std::vector<std::int64_t> parse_int_list(const std::string& s) {
  std::vector<std::int64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw shape_error("not an integer: '" + item + "'");
    }
    if (used != item.size()) throw shape_error("not an integer: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// "canonical" | "search" | "diag:1,2,3" | "json:path"
inline PhiSpec parse_phi_spec(const std::string& s) {
  PhiSpec spec;
  if (s == "canonical" || s == "search") {
    spec.kind = s;
  } else if (s.rfind("diag:", 0) == 0) {
    spec.kind = "diag";
    for (auto v : parse_int_list(s.substr(5))) {
      if (v < 0) throw shape_error("diagonal entries are field element codes >= 0");
      spec.values.push_back(static_cast<elem>(v));
    }
  } else if (s.rfind("json:", 0) == 0) {
    std::ifstream in(s.substr(5));
    if (!in) throw shape_error("cannot open " + s.substr(5));
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw shape_error(std::string("bad phi JSON: ") + e.what());
    }
    spec.kind = "explicit";
    spec.matrices = functional_from_json(j.contains("phi") ? j.at("phi") : j);
  } else {
    throw shape_error("phi must be canonical, search, diag:v1,v2,... or json:path");
  }
  return spec;
}

inline void to_json(json& j, const PhiSpec& s) {
  j = json{{"kind", s.kind}};
  if (s.kind == "diag") j["values"] = s.values;
  if (s.matrices) j["matrices"] = functional_to_json(*s.matrices);
}

inline void from_json(const json& j, PhiSpec& s) {
  s = PhiSpec{};
  s.kind = j.at("kind").get<std::string>();
  if (j.contains("values")) s.values = j.at("values").get<std::vector<elem>>();
  if (j.contains("matrices")) s.matrices = functional_from_json(j.at("matrices"));
}

inline void to_json(json& j, const RunConfig& c) {
  j = json{{"command", c.command}, {"suite", c.suite},         {"type", c.type},     {"n", c.n},
           {"m", c.m},             {"p", c.p},                 {"e", c.e},           {"modulus", c.modulus},
           {"field_seed", c.field_seed}, {"space_seed", c.space_seed}, {"phi", c.phi}, {"chi", c.chi},
           {"psi", c.psi},         {"format", c.format},       {"threads", c.threads}, {"n_max", c.n_max},
           {"k_max", c.k_max},     {"degenerate", c.degenerate}, {"samples", c.samples}, {"seed", c.seed}};
  j["d"] = c.d ? json(*c.d) : json(nullptr);
}

inline void from_json(const json& j, RunConfig& c) {
  c = RunConfig{};
  c.command = j.at("command").get<std::string>();
  c.suite = j.value("suite", std::string());
  c.type = j.at("type").get<std::string>();
  c.n = j.at("n").get<int>();
  c.m = j.at("m").get<int>();
  if (j.contains("d") && !j.at("d").is_null()) c.d = j.at("d").get<int>();
  c.p = j.at("p").get<std::uint32_t>();
  c.e = j.at("e").get<unsigned>();
  c.modulus = j.value("modulus", std::vector<std::uint32_t>{});
  c.field_seed = j.value("field_seed", std::uint64_t{0});
  c.space_seed = j.value("space_seed", std::uint64_t{0});
  if (j.contains("phi")) c.phi = j.at("phi").get<PhiSpec>();
  c.chi = j.value("chi", std::vector<std::int64_t>{});
  c.psi = j.value("psi", elem{1});
  c.format = j.value("format", std::string("json"));
  c.threads = j.value("threads", 1u);
  c.n_max = j.value("n_max", 8);
  c.k_max = j.value("k_max", 8);
  c.degenerate = j.value("degenerate", false);
  c.samples = j.value("samples", std::uint64_t{0});
  c.seed = j.value("seed", std::uint64_t{1});
}

inline RunConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw shape_error(std::string("bad config JSON: ") + e.what());
  }
  // A result file embeds its configuration under "config".
  try {
    return (j.contains("config") ? j.at("config") : j).get<RunConfig>();
  } catch (const json::exception& e) {
    throw shape_error(std::string("bad config: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Resolution of a configuration into objects.

inline FieldPtr config_field(const RunConfig& c) {
  if (!c.modulus.empty()) {
    if (c.modulus.size() != c.e + 1) throw degenerate_input("modulus degree differs from e");
    return std::make_shared<const Field>(c.p, c.modulus);
  }
  return make_field(c.p, c.e, c.field_seed);
}

inline GroupDatum config_datum(const RunConfig& c) { return classify(parse_group_type(c.type), c.n, c.m, c.d); }

inline CharacterTuple config_character(const RunConfig& c, const GroupDatum& g) {
  return c.chi.empty() ? CharacterTuple::trivial(g) : CharacterTuple::from_list(g, c.chi);
}

inline StableFunctional resolve_phi(const GradedSpace& S, const RunConfig& c) {
  const PhiSpec& s = c.phi;
  if (s.kind == "canonical") return canonical_functional(S);
  if (s.kind == "search") return search_functional(S, c.degenerate);
  if (s.kind == "diag") return diagonal_functional(S, s.values);
  if (s.kind == "explicit") {
    if (!s.matrices) throw shape_error("explicit phi without matrices");
    for (const Mat* A : {&s.matrices->form, &s.matrices->form_m})
      for (elem x : A->a)
        if (x >= S.field().size()) throw shape_error("phi entry " + std::to_string(x) + " is not a field element");
    for (const auto& A : s.matrices->maps)
      for (elem x : A.a)
        if (x >= S.field().size()) throw shape_error("phi entry " + std::to_string(x) + " is not a field element");
    check_shapes(S, *s.matrices);
    return *s.matrices;
  }
  throw shape_error("unknown phi kind '" + s.kind + "'");
}

// ---------------------------------------------------------------------------
// Output documents.

inline json field_to_json(const Field& F) {
  return json{{"p", F.p()}, {"e", F.degree()}, {"q", F.size()}, {"modulus", F.modulus()}, {"seed", F.seed()}, {"primitive_root", F.primitive_root()},
              {"description", F.describe()}};
}

inline json document_header(const RunConfig& c) { return json{{"schema_version", schema_version}, {"version", version_string}, {"config", c}}; }

inline json trace_value_to_json(elem t, const TraceValue& v, int w, std::uint64_t q) {
  json e{{"t", t}, {"re", v.value.real()}, {"im", v.value.imag()}};
  if (v.exact) e["coeffs"] = v.exact->coeffs();
  else e["error_bound"] = v.error_bound;
  e["normalized_abs"] = std::abs(normalized_trace(v, w, q));
  return e;
}

inline json table_to_json(const TraceTable& T, const RunConfig& c) {
  json j = document_header(c);
  j["field"] = field_to_json(*T.field);
  j["datum"] = T.datum.describe();
  if (T.datum.family() != Family::split) j["phi"] = functional_to_json(T.phi);
  j["chi"] = T.chi.to_list(T.datum);
  j["psi"] = T.psi_multiplier;
  j["stability"] = json{{"stable", T.stability.stable}, {"reason", T.stability.reason}};
  j["domain_size"] = T.domain_size;
  j["normalization"] = json{{"w", T.weight}, {"sign", T.weight % 2 == 0 ? 1 : -1}, {"scale", "q^(-w/2)"}};
  j["exact"] = T.exact();
  json entries = json::array();
  for (std::size_t i = 0; i < T.ts.size(); ++i) entries.push_back(trace_value_to_json(T.ts[i], T.values[i], T.weight, T.field->size()));
  j["entries"] = entries;
  return j;
}

inline std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Columns: t, |normalized trace|, Re S(t), Im S(t).
inline std::string table_to_csv(const TraceTable& T) {
  std::string out = "t,normalized_abs,re,im\n";
  for (std::size_t i = 0; i < T.ts.size(); ++i) {
    out += std::to_string(T.ts[i]) + "," + fmt_double(std::abs(T.normalized(i))) + "," + fmt_double(T.values[i].value.real()) + "," +
           fmt_double(T.values[i].value.imag()) + "\n";
  }
  return out;
}

inline json consistency_row_to_json(const ConsistencyRow& r) {
  json j{{"type", to_string(r.type)},
         {"n", r.n},
         {"m", r.m},
         {"d", r.d},
         {"partition", partition_string(r.u.partition)},
         {"ambient", lie_algebra_name(r.u.ambient, r.u.ambient_rank)},
         {"levi", r.levi},
         {"dim_B_u", r.springer},
         {"l_w_P", r.levi_length},
         {"half_levi_roots", r.half_levi_roots},
         {"dim_L_P", r.dim_levi},
         {"roots_over_m", r.roots / r.m},
         {"small_rank", r.small_rank},
         {"pass", r.pass},
         {"failures", r.failures}};
  return j;
}

inline std::string consistency_to_csv(const ConsistencyReport& rep) {
  std::string out = "type,n,m,d,partition,ambient,dim_B_u,l_w_P,roots_over_m,pass\n";
  for (const auto& r : rep.rows) {
    out += to_string(r.type) + "," + std::to_string(r.n) + "," + std::to_string(r.m) + "," + std::to_string(r.d) + ",\"" + partition_string(r.u.partition) + "\"," +
           lie_algebra_name(r.u.ambient, r.u.ambient_rank) + "," + std::to_string(r.springer) + "," + std::to_string(r.levi_length) + "," +
           std::to_string(r.roots / r.m) + "," + (r.pass ? "true" : "false") + "\n";
  }
  return out;
}

inline json span_result_to_json(const SpanTestResult& r) {
  json coeffs = json::array();
  for (const auto& c : r.coefficients) coeffs.push_back(json::array({c.real(), c.imag()}));
  return json{{"basis", r.basis},           {"residual", r.residual}, {"target_norm", r.target_norm}, {"relative_residual", r.relative_residual()},
              {"basis_rank", r.basis_rank}, {"length", r.length},     {"vacuous", r.vacuous()},       {"pass", r.pass},
              {"coefficients", coeffs}};
}

inline json purity_to_json(const PurityResult& r) {
  return json{{"max_ratio", r.max_ratio}, {"t_at_max", r.t_at_max}, {"rank", r.rank}, {"weight", r.weight}, {"pass", r.pass}};
}

inline json euler_to_json(const ProonyEstimate& E) {
  auto cvec = [](const std::vector<cplx>& v) {
    json a = json::array();
    for (const auto& c : v) a.push_back(json::array({c.real(), c.imag()}));
    return a;
  };
  return json{{"k_max", E.k_max},
              {"k_achieved", E.k_achieved},
              {"complete", E.complete},
              {"power_sums", cvec(E.power_sums)},
              {"scaled_power_sums", cvec(E.scaled)},
              {"singular_values", E.singular_values},
              {"tolerance", E.tolerance},
              {"estimate", E.estimate},
              {"gap", std::isfinite(E.gap) ? json(E.gap) : json("inf")},
              {"confident", E.confident},
              {"prony_roots", cvec(E.roots)},
              {"prony_multiplicities", cvec(E.multiplicities)},
              {"prony_sum", json::array({E.prony_sum.real(), E.prony_sum.imag()})},
              {"cost", E.cost},
              {"assumptions", E.assumptions}};
}

inline json sweep_to_json(const ReconstructionSweep& r) {
  return json{{"candidates", r.candidates},
              {"domain_points", r.domain_points},
              {"matched", r.matched},
              {"membership_disagreements", r.membership_disagreements},
              {"mismatches", r.mismatches},
              {"first_failure", r.first_failure},
              {"pass", r.pass()}};
}

}  // namespace epikl
