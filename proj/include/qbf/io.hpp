#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "qbf/bcs.hpp"
#include "qbf/normal_modes.hpp"

namespace qbf {

// Form file: one JSON document
//   {
//     "n_modes": 2,
//     "A": [[[1.3, 0], [0, 0]], [[0, 0], [0.7, 0]]],
//     "B": [[[0, 0], [0.5, 0]], [[0.5, 0], [0, 0]]],
//     "bcs": {"epsilon": 1, "gamma": 0.3, "delta": 0.5, "kappa": 0}   (optional)
//   }
// Every matrix entry is a [re, im] pair. NaN and Inf are rejected.

using Json = nlohmann::ordered_json;

struct FormFile {
  QuadraticForm form;
  std::optional<BcsParams> bcs;
  std::string digest;  // FNV-1a of the raw bytes, 16 hex digits
};

/// Throws ParseError naming the line/column or field at fault.
FormFile parse_form(std::string_view text, double tol_struct = Tolerances{}.structural);
FormFile read_form_file(const std::filesystem::path& path,
                        double tol_struct = Tolerances{}.structural);

Json form_to_json(const QuadraticForm& f, const std::optional<BcsParams>& bcs = {});

/// Shortest representation that reads back to the same double; "nan",
/// "inf", "-inf" for non-finite values.
std::string format_double(double x);

std::string fnv1a_hex(std::string_view bytes);

Json to_json(cplx z);
Json to_json(const CMatrix& m);
Json to_json(const StabilityReport& r);
Json to_json(const DiagonalForm& d);
Json to_json(const InvariantSet& k);
Json to_json(const BcsThresholds& t);

}  // namespace qbf
