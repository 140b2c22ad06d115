#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "epikl/errors.hpp"
#include "epikl/io.hpp"

using namespace epikl;

namespace {

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST(Io, ParseIntList) {
  EXPECT_EQ(parse_int_list("1,2,-3"), (std::vector<std::int64_t>{1, 2, -3}));
  EXPECT_EQ(parse_int_list(""), std::vector<std::int64_t>{});
  EXPECT_EQ(parse_int_list("4,,5"), (std::vector<std::int64_t>{4, 5}));
  EXPECT_THROW(parse_int_list("1,x"), shape_error);
  EXPECT_THROW(parse_int_list("1.5"), shape_error);
}

TEST(Io, ParsePhiSpec) {
  EXPECT_EQ(parse_phi_spec("canonical").kind, "canonical");
  EXPECT_EQ(parse_phi_spec("search").kind, "search");
  const PhiSpec d = parse_phi_spec("diag:1,2,3");
  EXPECT_EQ(d.kind, "diag");
  EXPECT_EQ(d.values, (std::vector<elem>{1, 2, 3}));
  EXPECT_THROW(parse_phi_spec("diag:1,-2"), shape_error);
  EXPECT_THROW(parse_phi_spec("identity"), shape_error);
  EXPECT_THROW(parse_phi_spec("json:/nonexistent/phi.json"), shape_error);

  auto F = make_field(7);
  GradedSpace S(F, classify(GroupType::A2, 3, 2));
  const StableFunctional phi = diagonal_functional(S, {1, 2, 3});
  const std::string path = testing::TempDir() + "epikl_phi.json";
  {
    std::ofstream out(path);
    out << json{{"phi", functional_to_json(phi)}}.dump();
  }
  const PhiSpec e = parse_phi_spec("json:" + path);
  EXPECT_EQ(e.kind, "explicit");
  ASSERT_TRUE(e.matrices.has_value());
  EXPECT_EQ(e.matrices->form, phi.form);
  std::remove(path.c_str());
}

TEST(Io, MatrixJson) {
  Mat A(2, 3);
  A(0, 1) = 4;
  A(1, 2) = 6;
  EXPECT_EQ(mat_from_json(mat_to_json(A)), A);
  EXPECT_EQ(mat_from_json(json::parse("[[0,4,0],[0,0,6]]")), A);
}

TEST(Io, RunConfigRoundTrip) {
  RunConfig c;
  c.command = "verify";
  c.suite = "euler";
  c.type = "C";
  c.n = 2;
  c.m = 4;
  c.d = 1;
  c.p = 5;
  c.e = 2;
  c.field_seed = 3;
  c.space_seed = 4;
  c.phi = parse_phi_spec("diag:2,1");
  c.chi = {1, 0};
  c.psi = 2;
  c.format = "csv";
  c.threads = 2;
  c.n_max = 5;
  c.k_max = 6;
  c.degenerate = true;
  c.samples = 17;
  c.seed = 99;
  const json j = c;
  EXPECT_EQ(j.get<RunConfig>(), c);
  EXPECT_EQ(config_from_json_text(j.dump()), c);
  EXPECT_EQ(config_from_json_text(document_header(c).dump()), c);
  c.d.reset();
  EXPECT_EQ(config_from_json_text(json(c).dump()), c);
  EXPECT_THROW(config_from_json_text("{not json"), shape_error);
  EXPECT_THROW(config_from_json_text("{\"n\": 3}"), shape_error);
}

TEST(Io, ConfigResolution) {
  RunConfig c;
  c.p = 3;
  c.e = 2;
  c.modulus = {1, 0, 1};
  EXPECT_EQ(config_field(c)->size(), 9u);
  c.modulus = {1, 1};
  EXPECT_THROW(config_field(c), degenerate_input);
  c.modulus.clear();
  c.type = "E8";
  EXPECT_THROW(config_datum(c), classification_error);

  auto F = make_field(7);
  GradedSpace S(F, classify(GroupType::A2, 3, 2));
  RunConfig r;
  r.phi.kind = "explicit";
  StableFunctional bad = diagonal_functional(S, {1, 2, 3});
  bad.form(0, 0) = 9;
  r.phi.matrices = bad;
  EXPECT_THROW(resolve_phi(S, r), shape_error);
  r.phi.kind = "mystery";
  EXPECT_THROW(resolve_phi(S, r), shape_error);
}

TEST(Io, TableDocuments) {
  auto F = make_field(7);
  GradedSpace S(F, classify(GroupType::A2, 3, 2));
  const TraceTable T = trace_table(S, diagonal_functional(S, {1, 2, 3}), CharacterTuple::trivial(S.datum()), AdditiveCharacter(F));
  RunConfig c;
  const json j = table_to_json(T, c);
  EXPECT_EQ(j.at("schema_version"), schema_version);
  EXPECT_EQ(j.at("config").get<RunConfig>(), c);
  ASSERT_EQ(j.at("entries").size(), 6u);
  EXPECT_TRUE(j.at("exact").get<bool>());
  for (std::size_t i = 0; i < 6; ++i) {
    const json& e = j.at("entries")[i];
    EXPECT_EQ(e.at("t").get<elem>(), T.ts[i]);
    EXPECT_DOUBLE_EQ(e.at("re").get<double>(), T.values[i].value.real());
    EXPECT_EQ(e.at("coeffs").size(), 7u);
  }

  const auto lines = split_lines(table_to_csv(T));
  ASSERT_EQ(lines.size(), 7u);
  EXPECT_EQ(lines[0], "t,normalized_abs,re,im");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::stringstream ss(lines[i]);
    std::string t, nabs, re, im;
    std::getline(ss, t, ',');
    std::getline(ss, nabs, ',');
    std::getline(ss, re, ',');
    std::getline(ss, im, ',');
    EXPECT_EQ(std::stoul(t), T.ts[i - 1]);
    EXPECT_DOUBLE_EQ(std::stod(re), T.values[i - 1].value.real());
    EXPECT_DOUBLE_EQ(std::stod(nabs), std::abs(T.normalized(i - 1)));
  }
}

TEST(Io, ConsistencyCsv) {
  const ConsistencyReport rep = consistency_check(GroupType::C, 3);
  const auto lines = split_lines(consistency_to_csv(rep));
  ASSERT_EQ(lines.size(), rep.rows.size() + 1);
  EXPECT_EQ(lines[0], "type,n,m,d,partition,ambient,dim_B_u,l_w_P,roots_over_m,pass");
  for (std::size_t i = 1; i < lines.size(); ++i) EXPECT_NE(lines[i].find(",true"), std::string::npos);
  const json j = consistency_row_to_json(rep.rows.front());
  EXPECT_TRUE(j.at("pass").get<bool>());
  EXPECT_EQ(j.at("dim_B_u"), j.at("l_w_P"));
}
