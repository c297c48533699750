#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qbf/cli.hpp"
#include "qbf/io.hpp"

using namespace qbf;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
  const auto dir = std::filesystem::temp_directory_path() / "qbf_cli_tests";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::ofstream(p) << body;
  return p;
}

std::string pairing_file(double delta) {
  return form_to_json(bcs_form({1.0, 0.3, delta, 0.0}), BcsParams{1.0, 0.3, delta, 0.0}).dump();
}

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "qbf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(FormFile, RoundTrip) {
  const auto f = bcs_form({1.0, 0.3, 0.5, 0.05});
  const auto back = parse_form(form_to_json(f).dump());
  EXPECT_EQ(back.form.A(), f.A());
  EXPECT_EQ(back.form.B(), f.B());
  EXPECT_EQ(back.digest.size(), 16u);
  EXPECT_FALSE(back.bcs);
}

TEST(FormFile, Errors) {
  auto code_of = [](const std::string& text) {
    try {
      parse_form(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code_of(""), ErrorCode::ParseError);
  EXPECT_EQ(code_of("{\"n_modes\": 1,\n \"A\": [[[1, 0]]],\n \"B\": [[[0, 0]]]"),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of(R"({"n_modes": 1, "A": [[[1, 0]]]})"), ErrorCode::ParseError);
  EXPECT_EQ(code_of(R"({"n_modes": 2, "A": [[[1, 0]]], "B": [[[0, 0]]]})"), ErrorCode::ParseError);
  EXPECT_EQ(code_of(R"({"n_modes": 1, "A": [[[1, "x"]]], "B": [[[0, 0]]]})"),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of(R"({"n_modes": 1, "A": [[[NaN, 0]]], "B": [[[0, 0]]]})"),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of(R"({"n_modes": 1, "A": [[[1e999, 0]]], "B": [[[0, 0]]]})"),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of(R"({"n_modes": 2, "A": [[[1, 0], [0, 1]], [[0, 0], [1, 0]]],
                        "B": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]})"),
            ErrorCode::StructureViolation);
  try {
    parse_form("{\"n_modes\": 1,\n \"A\": [[[1, 0]]],\n \"B\": [[[0, 0]]]");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line"), std::string::npos);
  }
  try {
    parse_form(R"({"n_modes": 1, "A": [[[1, 0]]], "B": [[[0]]]})");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("B[0][0]"), std::string::npos);
  }
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(1e-300), "1e-300");
  EXPECT_EQ(std::stod(format_double(0.8660254037844386)), 0.8660254037844386);
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
}

TEST(Grid, InclusiveEndpoints) {
  const Grid g = parse_grid("0:1.5:301");
  EXPECT_EQ(g.steps, 301);
  EXPECT_DOUBLE_EQ(g.at(0), 0.0);
  EXPECT_DOUBLE_EQ(g.at(300), 1.5);
  EXPECT_DOUBLE_EQ(g.at(150), 0.75);
  auto code_of = [](const char* s) {
    try {
      parse_grid(s);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code_of("0:1:1"), ErrorCode::BadRange);
  EXPECT_EQ(code_of("1:0:5"), ErrorCode::BadRange);
  EXPECT_EQ(code_of("1:1:5"), ErrorCode::BadRange);
  EXPECT_EQ(code_of("a:1:5"), ErrorCode::ParseError);
}

TEST(Cli, AnalyzePositive) {
  const auto p = write_temp("bcs05.json", pairing_file(0.5));
  const auto r = run({"analyze", p.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = Json::parse(r.out);
  EXPECT_EQ(doc["classification"], "PositiveDefinite");
  EXPECT_EQ(doc["classification_code"], 0);
  EXPECT_NEAR(doc["modes"][0]["lambda"][0].get<double>(), 1.1660254037844386, 1e-12);
  EXPECT_NEAR(doc["modes"][1]["lambda"][0].get<double>(), 0.5660254037844386, 1e-12);
  EXPECT_TRUE(doc.contains("thresholds"));
  EXPECT_EQ(doc["input_digest"].get<std::string>().size(), 16u);
  // Byte-identical on repeat.
  EXPECT_EQ(run({"analyze", p.string()}).out, r.out);
}

TEST(Cli, AnalyzeJordanPoint) {
  const auto p = write_temp("bcs10.json", pairing_file(1.0));
  const auto r = run({"analyze", p.string(), "--emit-modes"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = Json::parse(r.out);
  EXPECT_EQ(doc["classification"], "NonDiagonalizable");
  bool found = false;
  for (const auto& w : doc["warnings"]) {
    found |= w.get<std::string>() == "eigenvalues all real and non-zero; Jordan blocks detected";
  }
  EXPECT_TRUE(found);
}

TEST(Cli, AnalyzeEmitModesAndCsv) {
  const auto p = write_temp("bcs12.json", pairing_file(1.2));
  const auto r = run({"analyze", p.string(), "--emit-modes"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = Json::parse(r.out);
  EXPECT_TRUE(doc.contains("diagonal_form"));
  EXPECT_EQ(doc["invariants"].size(), 2u);
  const auto c = run({"--format", "csv", "analyze", p.string()});
  ASSERT_EQ(c.code, 0);
  const auto ls = lines(c.out);
  ASSERT_EQ(ls.size(), 3u);
  EXPECT_EQ(ls[0], "mode,lambda_re,lambda_im,hermitian,norm_residual,classification_code");
}

TEST(Cli, AnalyzeErrors) {
  const auto empty = write_temp("empty.json", "");
  EXPECT_EQ(run({"analyze", empty.string()}).code, kExitParse);
  const auto bad = write_temp("bad.json", R"({"n_modes": 1, "A": [[[1, 1]]], "B": [[[0, 0]]]})");
  const auto r = run({"analyze", bad.string()});
  EXPECT_EQ(r.code, kExitStructure);
  EXPECT_NE(r.err.find("StructureViolation"), std::string::npos);
  EXPECT_EQ(run({"analyze"}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
}

TEST(Cli, SweepTransitions) {
  const auto r = run({"sweep", "--delta", "0:1.5:301", "--jobs", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 302u);
  EXPECT_EQ(ls[0], "delta,kappa,gamma,class,max_imag,min_sigma");
  std::vector<int> codes;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    std::stringstream ss(ls[i]);
    std::string cell;
    for (int c = 0; c < 4; ++c) std::getline(ss, cell, ',');
    codes.push_back(std::stoi(cell));
  }
  EXPECT_EQ(codes[0], 0);
  EXPECT_EQ(codes[190], 0);   // 0.95
  EXPECT_EQ(codes[191], 1);   // 0.955
  EXPECT_EQ(codes[199], 1);   // 0.995
  EXPECT_EQ(codes[200], 3);   // 1.0
  EXPECT_EQ(codes[201], 2);   // 1.005
  EXPECT_EQ(run({"sweep", "--delta", "0:1.5:301", "--jobs", "1"}).out, r.out);
}

TEST(Cli, SweepBadRange) {
  EXPECT_EQ(run({"sweep", "--delta", "0:1:1"}).code, kExitBadRange);
  EXPECT_EQ(run({"sweep", "--delta", "1:0:10"}).code, kExitBadRange);
  EXPECT_EQ(run({"sweep"}).code, kExitBadRange);
}

TEST(Cli, EvolveGrowthRate) {
  const auto p = write_temp("bcs12e.json", pairing_file(1.2));
  const auto r = run({"evolve", p.string(), "--t", "0:10:11"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 12u);
  EXPECT_EQ(ls[0], "t_re,t_im,max_abs_u,symplectic_residual,adjoint_residual,mode0_abs,mode1_abs");
  auto max_u = [&](int row) {
    std::stringstream ss(ls[row]);
    std::string cell;
    for (int c = 0; c < 3; ++c) std::getline(ss, cell, ',');
    return std::stod(cell);
  };
  const double slope = (std::log(max_u(11)) - std::log(max_u(6))) / 5.0;
  EXPECT_NEAR(slope, 0.66332495807107996, 0.01 * 0.6633);
}

TEST(Cli, EvolveIdentityAtZero) {
  const auto p = write_temp("bcs05e.json", pairing_file(0.5));
  const auto r = run({"evolve", p.string(), "--t", "0"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out)[1], "0,0,1,0,0,1,1");
  const auto c = run({"evolve", p.string(), "--t", "1", "--complex-time", "1"});
  EXPECT_EQ(c.code, 0);
}

TEST(Cli, BcsRowsAndThresholds) {
  const auto r = run({"bcs", "--delta", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).size(), 2u);
  const auto s = run({"bcs", "--sweep", "0:1.5:7"});
  EXPECT_EQ(lines(s.out).size(), 8u);
  const auto t = run({"bcs", "--kappa", "0.05", "--thresholds"});
  ASSERT_EQ(t.code, 0);
  EXPECT_NE(t.out.find("outer_numeric,"), std::string::npos);
  EXPECT_NE(t.out.find("outer_literal,"), std::string::npos);
  EXPECT_NE(t.out.find("note,"), std::string::npos);
  EXPECT_EQ(run({"bcs", "--gamma", "2"}).code, kExitUsage);
}

TEST(Cli, OracleTableAndRegime) {
  const auto p = write_temp("bcs05o.json", pairing_file(0.5));
  const auto r = run({"oracle", "--input", p.string(), "--nmax", "10", "--levels", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).size(), 5u);
  const auto q = write_temp("bcs97o.json", pairing_file(0.97));
  EXPECT_EQ(run({"oracle", "--input", q.string(), "--nmax", "10"}).code, kExitWrongRegime);
  const auto d = run({"oracle", "--input", q.string(), "--nmax-list", "8,12"});
  EXPECT_EQ(d.code, 0);
  EXPECT_EQ(lines(d.out).size(), 3u);
}

TEST(Cli, OutFile) {
  const auto out = std::filesystem::temp_directory_path() / "qbf_cli_tests" / "sweep.csv";
  const auto r = run({"--out", out.string(), "sweep", "--delta", "0:1:3"});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "delta,kappa,gamma,class,max_imag,min_sigma");
}

TEST(Cli, HelpMentionsLegend) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0 PositiveDefinite"), std::string::npos);
}
