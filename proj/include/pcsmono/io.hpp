#pragma once

// JSON state files, JSON reports and CSV number formatting.
//
// State file: { "n", "d", "a": [[[re, im], ...], ...], "p", "lambda" } with one row
// per party and one column per level 1..d-1. Party indices in reports are 1-based.

#include "pcsmono/monogamy.hpp"
#include "pcsmono/states.hpp"

#include <json.hpp>

#include <ostream>
#include <string>

namespace pcsmono {

using Json = nlohmann::json;

/// Malformed or unreadable input files.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Json coefficients_to_json(const WClassCoefficients& coeffs);
/// Reads n, d and a; validates shape and normalization.
WClassCoefficients coefficients_from_json(const Json& j);

Json state_to_json(const PCSState& pcs);
PCSState state_from_json(const Json& j);

Json matrix_to_json(const Matrix& m);

Json report_to_json(const MonogamyReport& report);
Json verification_to_json(const VerificationReport& report);

Json read_json_file(const std::string& path);
/// Writes `text` to `path`; an empty path or "-" writes to `console`.
void write_text(const std::string& path, const std::string& text, std::ostream& console);

/// Locale-independent formatting with 17 significant digits.
std::string format_number(double v);

}  // namespace pcsmono
