#include "qbf/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "qbf/io.hpp"
#include "qbf/oracle.hpp"

namespace qbf {

namespace {

constexpr int kFormatVersion = 1;

constexpr const char* kLegend =
    "Classification codes: 0 PositiveDefinite, 1 StableNonPositive, "
    "2 UnstableComplex, 3 NonDiagonalizable.\n"
    "Exit codes: 0 ok, 1 other error, 2 usage, 3 parse error, 4 structure "
    "violation, 5 numerical failure (overflow, defective, pairing), 6 bad range, "
    "7 wrong regime.\n"
    "Ranges are written min:max:steps and include both endpoints.";

constexpr const char* kOuterNote =
    "outer threshold located by bisection on the dense spectrum; outer_sqrt = "
    "eps*sqrt(1+kappa^2/gamma^2) and outer_literal = eps^2*(1+kappa^2/gamma^2) "
    "are the two readings of the closed form";

struct Globals {
  double tol_eig = Tolerances{}.eig;
  double tol_struct = Tolerances{}.structural;
  int jobs = 1;
  std::string out_path;
  std::string format;

  Tolerances tolerances() const {
    Tolerances t;
    t.eig = tol_eig;
    t.structural = tol_struct;
    return t;
  }
  bool doc(const char* fallback = "csv") const {
    return (format.empty() ? std::string(fallback) : format) == "doc";
  }
};

std::string fmt(double x) { return format_double(x); }

std::string csv_quote(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

double parse_number(const std::string& s) {
  double x = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(x)) {
    throw Error(ErrorCode::ParseError, "not a finite number: \"" + s + "\"");
  }
  return x;
}

// Runs job(k) for k in [0, count) on `jobs` threads; rethrows the error of the
// lowest failing index.
void parallel_for(int count, int jobs, const std::function<void(int)>& job) {
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min(jobs, std::max(count, 1));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < count; k = next++) {
      try {
        job(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double min_sigma(const StabilityReport& r) { return r.h_eigenvalues.minCoeff(); }

void write_doc(std::ostream& os, const Json& doc) { os << doc.dump(2) << '\n'; }

// ---------------------------------------------------------------- analyze

void cmd_analyze(const Globals& g, const std::string& path, bool emit_modes,
                 std::ostream& os) {
  const Tolerances tol = g.tolerances();
  const FormFile file = read_form_file(path, tol.structural);
  const StabilityReport report = classify(file.form, tol);

  if (!g.doc("doc")) {
    os << "mode,lambda_re,lambda_im,hermitian,norm_residual,classification_code\n";
    const int n = file.form.n_modes();
    for (int i = 0; i < n; ++i) {
      const cplx l = report.mode_frequencies[i];
      os << i << ',' << fmt(l.real()) << ',' << fmt(l.imag()) << ',';
      if (report.transform) {
        const auto& bt = *report.transform;
        const double res =
            std::abs(metric_product(bt.W.col(n + i), bt.W.col(i)) - 1.0);
        os << (bt.hermitian[i] ? 1 : 0) << ',' << fmt(res);
      } else {
        os << ",";
      }
      os << ',' << static_cast<int>(report.classification) << '\n';
    }
    return;
  }

  Json doc;
  doc["format_version"] = kFormatVersion;
  doc["input_digest"] = file.digest;
  doc["n_modes"] = file.form.n_modes();
  doc["tolerances"] = {{"eig", tol.eig}, {"structural", tol.structural}};
  Json body = to_json(report);
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
  const GrowthClass growth = growth_class(report.spectrum, tol);
  doc["growth"] = {{"kind", std::string(to_string(growth.kind))},
                   {"rate", growth.rate},
                   {"poly_degree", growth.poly_degree}};
  if (report.transform) {
    const DiagonalForm df = diagonal_form(*report.transform, tol);
    doc["zero_point_energy"] = to_json(df.zero_point_energy);
    if (emit_modes) {
      doc["diagonal_form"] = to_json(df);
      doc["invariants"] = to_json(invariants(*report.transform));
    }
  }
  if (file.bcs) {
    Json t = to_json(bcs_thresholds(*file.bcs, tol));
    t["note"] = kOuterNote;
    doc["thresholds"] = std::move(t);
  }
  write_doc(os, doc);
}

// ---------------------------------------------------------------- sweep

struct SweepAxis {
  std::string name;
  Grid grid;
};

void cmd_sweep(const Globals& g, const BcsParams& base, const std::string& delta,
               const std::string& kappa, const std::string& gamma, std::ostream& os) {
  std::vector<SweepAxis> axes;
  BcsParams fixed = base;
  auto take = [&](const char* name, const std::string& text, double& slot) {
    if (text.empty()) return;
    if (text.find(':') == std::string::npos) {
      slot = parse_number(text);
    } else {
      axes.push_back({name, parse_grid(text)});
    }
  };
  take("delta", delta, fixed.delta);
  take("kappa", kappa, fixed.kappa);
  take("gamma", gamma, fixed.gamma);
  if (axes.empty() || axes.size() > 2) {
    throw Error(ErrorCode::BadRange,
                "sweep needs one or two ranges among --delta, --kappa, --gamma");
  }
  const int outer = axes[0].grid.steps;
  const int inner = axes.size() == 2 ? axes[1].grid.steps : 1;
  const int count = outer * inner;
  const Tolerances tol = g.tolerances();

  struct Row {
    BcsParams p;
    int code = 0;
    double max_imag = 0.0;
    double min_sigma = 0.0;
  };
  std::vector<Row> rows(count);
  auto assign = [](BcsParams& p, const std::string& name, double v) {
    if (name == "delta") p.delta = v;
    if (name == "kappa") p.kappa = v;
    if (name == "gamma") p.gamma = v;
  };
  fixed.validate();
  parallel_for(count, g.jobs, [&](int k) {
    Row& r = rows[k];
    r.p = fixed;
    assign(r.p, axes[0].name, axes[0].grid.at(k / inner));
    if (axes.size() == 2) assign(r.p, axes[1].name, axes[1].grid.at(k % inner));
    const StabilityReport rep = classify(bcs_form(r.p), tol);
    r.code = static_cast<int>(rep.classification);
    r.max_imag = rep.max_imag();
    r.min_sigma = min_sigma(rep);
  });

  if (g.doc()) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["epsilon"] = fixed.epsilon;
    Json arr = Json::array();
    for (const auto& r : rows) {
      arr.push_back({{"delta", r.p.delta},
                     {"kappa", r.p.kappa},
                     {"gamma", r.p.gamma},
                     {"class", r.code},
                     {"max_imag", r.max_imag},
                     {"min_sigma", r.min_sigma}});
    }
    doc["rows"] = std::move(arr);
    write_doc(os, doc);
    return;
  }
  os << "delta,kappa,gamma,class,max_imag,min_sigma\n";
  for (const auto& r : rows) {
    os << fmt(r.p.delta) << ',' << fmt(r.p.kappa) << ',' << fmt(r.p.gamma) << ','
       << r.code << ',' << fmt(r.max_imag) << ',' << fmt(r.min_sigma) << '\n';
  }
}

// ---------------------------------------------------------------- evolve

void cmd_evolve(const Globals& g, const std::string& path, const std::string& times,
                double imag_time, std::ostream& os) {
  const Tolerances tol = g.tolerances();
  const FormFile file = read_form_file(path, tol.structural);
  const Grid grid = parse_grid(times);
  const DynamicalMatrix d = dynamical_matrix(file.form);
  const SpectralDecomposition spec = eigen_pairs(d, tol);
  std::vector<cplx> lambdas;
  for (const auto& p : spec.pairs) lambdas.push_back(p.lambda);
  const int n = file.form.n_modes();

  std::vector<Propagator> props(grid.steps);
  parallel_for(grid.steps, g.jobs, [&](int k) {
    props[k] = propagate(d, cplx(grid.at(k), imag_time));
  });

  auto max_abs = [](const CMatrix& u) { return u.cwiseAbs().maxCoeff(); };
  if (g.doc()) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["input_digest"] = file.digest;
    Json arr = Json::array();
    for (const auto& p : props) {
      Json modes = Json::array();
      for (const auto& m : mode_evolution(lambdas, p.t)) modes.push_back(std::abs(m.first));
      arr.push_back({{"t", to_json(p.t)},
                     {"max_abs_u", max_abs(p.U)},
                     {"symplectic_residual", p.symplectic_residual},
                     {"adjoint_residual", p.adjoint_residual},
                     {"mode_abs", std::move(modes)}});
    }
    doc["rows"] = std::move(arr);
    write_doc(os, doc);
    return;
  }
  os << "t_re,t_im,max_abs_u,symplectic_residual,adjoint_residual";
  for (int i = 0; i < n; ++i) os << ",mode" << i << "_abs";
  os << '\n';
  for (const auto& p : props) {
    os << fmt(p.t.real()) << ',' << fmt(p.t.imag()) << ',' << fmt(max_abs(p.U)) << ','
       << fmt(p.symplectic_residual) << ',' << fmt(p.adjoint_residual);
    for (const auto& m : mode_evolution(lambdas, p.t)) os << ',' << fmt(std::abs(m.first));
    os << '\n';
  }
}

// ---------------------------------------------------------------- bcs

void cmd_bcs(const Globals& g, const BcsParams& base, const std::string& sweep,
             bool thresholds, std::ostream& os) {
  const Tolerances tol = g.tolerances();
  base.validate();
  if (thresholds) {
    const BcsThresholds t = bcs_thresholds(base, tol);
    if (g.doc()) {
      Json doc = to_json(t);
      doc["note"] = kOuterNote;
      write_doc(os, doc);
      return;
    }
    os << "quantity,value\n";
    const Json doc = to_json(t);
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      if (it.value().is_array()) {
        os << it.key() << "_lower," << fmt(it.value()[0].get<double>()) << '\n';
        os << it.key() << "_upper," << fmt(it.value()[1].get<double>()) << '\n';
      } else {
        os << it.key() << ',' << fmt(it.value().get<double>()) << '\n';
      }
    }
    os << "note," << csv_quote(kOuterNote) << '\n';
    return;
  }

  std::vector<double> deltas;
  if (sweep.empty()) {
    deltas.push_back(base.delta);
  } else {
    const Grid grid = parse_grid(sweep);
    for (int k = 0; k < grid.steps; ++k) deltas.push_back(grid.at(k));
  }
  struct Row {
    double delta = 0.0;
    int code = 0;
    BcsLambda lambda;
    std::array<double, 4> sigma{};
  };
  std::vector<Row> rows(deltas.size());
  parallel_for(static_cast<int>(deltas.size()), g.jobs, [&](int k) {
    BcsParams p = base;
    p.delta = deltas[k];
    rows[k].delta = p.delta;
    rows[k].code = static_cast<int>(classify(bcs_form(p), tol).classification);
    rows[k].lambda = bcs_lambda(p, tol);
    rows[k].sigma = bcs_sigma(p);
  });

  if (g.doc()) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["params"] = {{"epsilon", base.epsilon}, {"gamma", base.gamma}, {"kappa", base.kappa}};
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json row{{"delta", r.delta},
               {"class", r.code},
               {"lambda_plus", to_json(r.lambda.plus)},
               {"lambda_minus", to_json(r.lambda.minus)},
               {"sigma", Json::array({r.sigma[0], r.sigma[1], r.sigma[2], r.sigma[3]})}};
      if (r.lambda.from_dense_solve) {
        row["closed_form_deviation"] = r.lambda.analytic_deviation;
        row["literal_form_deviation"] = r.lambda.literal_deviation;
      }
      arr.push_back(std::move(row));
    }
    doc["rows"] = std::move(arr);
    write_doc(os, doc);
    return;
  }
  os << "delta,class,lambda_plus_re,lambda_plus_im,lambda_minus_re,lambda_minus_im,"
        "sigma_0,sigma_1,sigma_2,sigma_3\n";
  for (const auto& r : rows) {
    os << fmt(r.delta) << ',' << r.code << ',' << fmt(r.lambda.plus.real()) << ','
       << fmt(r.lambda.plus.imag()) << ',' << fmt(r.lambda.minus.real()) << ','
       << fmt(r.lambda.minus.imag());
    for (double s : r.sigma) os << ',' << fmt(s);
    os << '\n';
  }
}

// ---------------------------------------------------------------- oracle

void cmd_oracle(const Globals& g, const std::string& path, int n_max, int levels,
                const std::vector<int>& n_max_list, std::ostream& os) {
  const Tolerances tol = g.tolerances();
  const FormFile file = read_form_file(path, tol.structural);

  if (!n_max_list.empty()) {
    std::vector<double> energies(n_max_list.size());
    parallel_for(static_cast<int>(n_max_list.size()), g.jobs, [&](int k) {
      energies[k] = ground_energy(file.form, n_max_list[k]);
    });
    if (g.doc()) {
      Json arr = Json::array();
      for (std::size_t k = 0; k < energies.size(); ++k) {
        arr.push_back({{"n_max", n_max_list[k]}, {"ground_energy", energies[k]}});
      }
      write_doc(os, Json{{"format_version", kFormatVersion}, {"ground_energies", arr}});
      return;
    }
    os << "n_max,ground_energy\n";
    for (std::size_t k = 0; k < energies.size(); ++k) {
      os << n_max_list[k] << ',' << fmt(energies[k]) << '\n';
    }
    return;
  }

  const FockSpectrumCheck c = fock_spectrum_check(file.form, n_max, levels, tol);
  auto occupation = [](const std::vector<int>& occ) {
    std::string s;
    for (std::size_t i = 0; i < occ.size(); ++i) s += (i ? " " : "") + std::to_string(occ[i]);
    return s;
  };
  if (g.doc()) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["input_digest"] = file.digest;
    doc["n_max"] = c.n_max;
    doc["zero_point"] = c.zero_point;
    doc["max_deviation"] = c.max_deviation;
    Json lv = Json::array();
    for (std::size_t k = 0; k < c.levels.size(); ++k) {
      lv.push_back({{"fock", c.levels[k]},
                    {"predicted", c.predicted[k]},
                    {"occupation", c.predicted_occupations[k]}});
    }
    doc["levels"] = std::move(lv);
    Json tr = Json::array();
    for (const auto& [m, e] : c.ground_trend) tr.push_back({{"n_max", m}, {"ground_energy", e}});
    doc["ground_trend"] = std::move(tr);
    doc["trend_from_above"] = c.trend_from_above;
    write_doc(os, doc);
    return;
  }
  os << "level,fock,predicted,deviation,occupation\n";
  for (std::size_t k = 0; k < c.levels.size(); ++k) {
    os << k << ',' << fmt(c.levels[k]) << ',' << fmt(c.predicted[k]) << ','
       << fmt(c.levels[k] - c.predicted[k]) << ',' << occupation(c.predicted_occupations[k])
       << '\n';
  }
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return kExitParse;
    case ErrorCode::DimensionMismatch:
    case ErrorCode::StructureViolation: return kExitStructure;
    case ErrorCode::PairingFailure:
    case ErrorCode::NullNorm:
    case ErrorCode::NotDiagonalizable:
    case ErrorCode::Overflow:
    case ErrorCode::DegenerateGap:
    case ErrorCode::NotDegenerate:
    case ErrorCode::DimensionCap: return kExitNumeric;
    case ErrorCode::BadRange: return kExitBadRange;
    case ErrorCode::WrongRegime: return kExitWrongRegime;
    case ErrorCode::InvalidArgument: return kExitUsage;
  }
  return kExitOther;
}

double Grid::at(int k) const {
  if (steps == 1) return min;
  if (k == steps - 1) return max;
  return min + (max - min) * static_cast<double>(k) / static_cast<double>(steps - 1);
}

Grid parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  Grid g;
  if (parts.size() == 1) {
    g.min = g.max = parse_number(parts[0]);
    return g;
  }
  if (parts.size() != 3) {
    throw Error(ErrorCode::ParseError, "range \"" + text + "\" is not min:max:steps");
  }
  g.min = parse_number(parts[0]);
  g.max = parse_number(parts[1]);
  long long steps = 0;
  const auto res = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), steps);
  if (res.ec != std::errc() || res.ptr != parts[2].data() + parts[2].size()) {
    throw Error(ErrorCode::ParseError, "range \"" + text + "\": steps must be an integer");
  }
  if (steps < 2 || steps > 10'000'000) {
    throw Error(ErrorCode::BadRange, "range \"" + text + "\": steps must be >= 2");
  }
  if (!(g.min < g.max)) {
    throw Error(ErrorCode::BadRange, "range \"" + text + "\": min must be < max");
  }
  g.steps = static_cast<int>(steps);
  return g;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Normal modes, stability and evolution of quadratic boson forms", "qbf"};
  app.footer(kLegend);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--tol-eig", g.tol_eig, "Relative tolerance for eigenvalue tests")
      ->check(CLI::PositiveNumber);
  app.add_option("--tol-struct", g.tol_struct, "Relative tolerance for A, B structure")
      ->check(CLI::PositiveNumber);
  app.add_option("--jobs", g.jobs, "Worker threads for grids (0: all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", g.out_path, "Write output to this file instead of stdout");
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"csv", "doc"}));

  std::string path;
  bool emit_modes = false;
  auto* analyze = app.add_subcommand("analyze", "Classify a form file and report its normal modes");
  analyze->add_option("file", path, "Form file")->required();
  analyze->add_flag("--emit-modes", emit_modes, "Include transforms and invariants");

  BcsParams bp;
  std::string s_delta, s_kappa, s_gamma;
  auto* sweep = app.add_subcommand("sweep", "Classification over a grid of the pairing model");
  sweep->add_option("--epsilon", bp.epsilon, "Mean mode energy");
  sweep->add_option("--delta", s_delta, "Pairing strength: value or min:max:steps");
  sweep->add_option("--kappa", s_kappa, "Mode mixing: value or min:max:steps");
  sweep->add_option("--gamma", s_gamma, "Energy splitting: value or min:max:steps");

  std::string times = "0";
  double imag_time = 0.0;
  auto* evolve = app.add_subcommand("evolve", "Propagator diagnostics on a time grid");
  evolve->add_option("file", path, "Form file")->required();
  evolve->add_option("--t", times, "Time: value or min:max:steps");
  evolve->add_option("--complex-time", imag_time, "Imaginary part added to every time");

  std::string delta_sweep;
  bool thresholds = false;
  auto* bcs = app.add_subcommand("bcs", "Closed-form pairing model: frequencies and thresholds");
  bcs->add_option("--epsilon", bp.epsilon, "Mean mode energy");
  bcs->add_option("--gamma", bp.gamma, "Energy splitting");
  bcs->add_option("--delta", bp.delta, "Pairing strength");
  bcs->add_option("--kappa", bp.kappa, "Mode mixing");
  bcs->add_option("--sweep", delta_sweep, "Pairing grid min:max:steps");
  bcs->add_flag("--thresholds", thresholds, "Report regime boundaries");

  int n_max = 14;
  int levels = 6;
  std::vector<int> n_max_list;
  auto* oracle = app.add_subcommand("oracle", "Compare against a truncated Fock-space solve");
  oracle->add_option("--input", path, "Form file")->required();
  oracle->add_option("--nmax", n_max, "Per-mode occupation cutoff")->check(CLI::PositiveNumber);
  oracle->add_option("--levels", levels, "Number of levels to compare")
      ->check(CLI::PositiveNumber);
  oracle->add_option("--nmax-list", n_max_list, "Only report ground energies at these cutoffs")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::ostringstream buffer;
  try {
    if (analyze->parsed()) {
      cmd_analyze(g, path, emit_modes, buffer);
    } else if (sweep->parsed()) {
      if (s_delta.empty() && s_kappa.empty() && s_gamma.empty()) {
        throw Error(ErrorCode::BadRange, "sweep needs a range for --delta, --kappa or --gamma");
      }
      if (s_gamma.empty()) s_gamma = format_double(bp.gamma);
      cmd_sweep(g, bp, s_delta, s_kappa, s_gamma, buffer);
    } else if (evolve->parsed()) {
      cmd_evolve(g, path, times, imag_time, buffer);
    } else if (bcs->parsed()) {
      cmd_bcs(g, bp, delta_sweep, thresholds, buffer);
    } else if (oracle->parsed()) {
      cmd_oracle(g, path, n_max, levels, n_max_list, buffer);
    }
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitOther;
  }

  if (g.out_path.empty()) {
    out << buffer.str();
  } else {
    std::ofstream file(g.out_path, std::ios::binary);
    if (!file) {
      err << "error: cannot write " << g.out_path << '\n';
      return kExitOther;
    }
    file << buffer.str();
  }
  return kExitOk;
}

}  // namespace qbf
