#include "qbf/io.hpp"

#include <charconv>
#include <cmath>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qbf {

namespace {

[[noreturn]] void parse_fail(const std::string& msg) {
  throw Error(ErrorCode::ParseError, msg);
}

double read_number(const Json& v, const std::string& where) {
  if (!v.is_number()) parse_fail(where + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) parse_fail(where + ": NaN/Inf entries are not allowed");
  return x;
}

CMatrix read_matrix(const Json& doc, const char* key, int n) {
  const std::string name(key);
  if (!doc.contains(key)) parse_fail("missing field \"" + name + "\"");
  const Json& rows = doc.at(key);
  if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
    parse_fail("field \"" + name + "\": expected " + std::to_string(n) + " rows");
  }
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    const Json& row = rows[i];
    const std::string rname = name + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      parse_fail("field \"" + rname + "\": expected " + std::to_string(n) + " entries");
    }
    for (int j = 0; j < n; ++j) {
      const std::string where = "field \"" + rname + "[" + std::to_string(j) + "]\"";
      const Json& e = row[j];
      if (!e.is_array() || e.size() != 2) parse_fail(where + ": expected a [re, im] pair");
      m(i, j) = cplx(read_number(e[0], where), read_number(e[1], where));
    }
  }
  return m;
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

FormFile parse_form(std::string_view text, double tol_struct) {
  bool blank = true;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
  }
  if (blank) parse_fail("empty form file");

  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end(), nullptr, true, false);
  } catch (const Json::exception& e) {
    parse_fail(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) parse_fail("top level must be an object");
  if (!doc.contains("n_modes")) parse_fail("missing field \"n_modes\"");
  const Json& nm = doc.at("n_modes");
  if (!nm.is_number_integer() || nm.get<long long>() < 1) {
    parse_fail("field \"n_modes\": expected a positive integer");
  }
  const int n = static_cast<int>(nm.get<long long>());

  std::optional<BcsParams> bcs;
  if (doc.contains("bcs")) {
    const Json& b = doc.at("bcs");
    if (!b.is_object()) parse_fail("field \"bcs\": expected an object");
    BcsParams p;
    auto opt = [&](const char* k, double& dst) {
      if (b.contains(k)) dst = read_number(b.at(k), std::string("field \"bcs.") + k + "\"");
    };
    opt("epsilon", p.epsilon);
    opt("gamma", p.gamma);
    opt("delta", p.delta);
    opt("kappa", p.kappa);
    bcs = p;
  }

  const CMatrix a = read_matrix(doc, "A", n);
  const CMatrix bm = read_matrix(doc, "B", n);
  return FormFile{QuadraticForm::build(a, bm, tol_struct), bcs, fnv1a_hex(text)};
}

FormFile read_form_file(const std::filesystem::path& path, double tol_struct) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_fail("cannot read form file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_form(ss.str(), tol_struct);
}

Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json form_to_json(const QuadraticForm& f, const std::optional<BcsParams>& bcs) {
  Json doc;
  doc["n_modes"] = f.n_modes();
  doc["A"] = to_json(f.A());
  doc["B"] = to_json(f.B());
  if (bcs) {
    doc["bcs"] = {{"epsilon", bcs->epsilon},
                  {"gamma", bcs->gamma},
                  {"delta", bcs->delta},
                  {"kappa", bcs->kappa}};
  }
  return doc;
}

Json to_json(const StabilityReport& r) {
  Json doc;
  doc["classification"] = std::string(to_string(r.classification));
  doc["classification_code"] = static_cast<int>(r.classification);
  doc["diagonalizable"] = r.diagonalizable;
  doc["zero_mode_count"] = r.zero_mode_count;
  doc["max_imag"] = r.max_imag();
  Json h = Json::array();
  for (double x : r.h_eigenvalues) h.push_back(x);
  doc["h_eigenvalues"] = std::move(h);

  Json modes = Json::array();
  const int n = static_cast<int>(r.mode_frequencies.size());
  for (int i = 0; i < n; ++i) {
    Json m;
    m["mode"] = i;
    m["lambda"] = to_json(r.mode_frequencies[i]);
    if (r.transform) {
      const auto& bt = *r.transform;
      const CVector wp = bt.W.col(i);
      const CVector wm = bt.W.col(n + i);
      m["hermitian"] = static_cast<bool>(bt.hermitian[i]);
      m["norm_residual"] = std::abs(metric_product(wm, wp) - 1.0);
    }
    modes.push_back(std::move(m));
  }
  doc["modes"] = std::move(modes);

  Json clusters = Json::array();
  for (const auto& c : r.spectrum.clusters) {
    clusters.push_back({{"value", to_json(c.value)},
                        {"algebraic", c.algebraic},
                        {"geometric", c.geometric},
                        {"max_block", c.max_block}});
  }
  doc["clusters"] = std::move(clusters);
  if (r.transform) {
    doc["transform"] = {{"symplectic_residual", r.transform->symplectic_residual},
                        {"inverse_residual", r.transform->inverse_residual},
                        {"condition", r.transform->condition}};
  }
  doc["warnings"] = r.warnings;
  return doc;
}

Json to_json(const DiagonalForm& d) {
  Json doc;
  Json lambdas = Json::array();
  for (const auto& l : d.lambdas) lambdas.push_back(to_json(l));
  doc["lambdas"] = std::move(lambdas);
  doc["zero_point_energy"] = to_json(d.zero_point_energy);
  doc["extract_b"] = to_json(d.extract_b);
  doc["extract_bbar"] = to_json(d.extract_bbar);
  Json flags = Json::array();
  for (bool b : d.hermitian_flags) flags.push_back(b);
  doc["hermitian"] = std::move(flags);
  const int n = d.n_modes();
  doc["commutator_residual"] =
      (d.commutator_b_bbar() - CMatrix::Identity(n, n)).norm() + d.commutator_b_b().norm();
  return doc;
}

Json to_json(const InvariantSet& k) {
  Json arr = Json::array();
  for (const auto& m : k.K) arr.push_back(to_json(m));
  return arr;
}

Json to_json(const BcsThresholds& t) {
  Json doc;
  doc["positivity"] = t.positivity;
  doc["dynamical"] = t.dynamical;
  doc["reentry_kappa_limit"] = t.reentry_kappa_limit;
  if (t.instability_onset) doc["instability_onset"] = *t.instability_onset;
  if (t.inner_upper) doc["inner_upper"] = *t.inner_upper;
  if (t.reentry_window) {
    doc["reentry_window"] = Json::array({t.reentry_window->first, t.reentry_window->second});
  }
  if (t.outer_numeric) doc["outer_numeric"] = *t.outer_numeric;
  doc["outer_sqrt"] = t.outer_sqrt;
  doc["outer_literal"] = t.outer_literal;
  return doc;
}

}  // namespace qbf
