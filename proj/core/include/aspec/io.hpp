#pragma once

/**
 * @file io.hpp
 * @brief JSON and CSV encodings for matrices, closures, reports and parameters.
 *
 * Conventions:
 *   - exact angles are {"num": k, "den": N}; numbers that do not fit in 64
 *     bits are written as decimal strings;
 *   - approximate angles are {"turns": "<%.17g>", "uncertainty": "<%.17g>"};
 *   - complex entries are [re, im];
 *   - rationals in reports are "num/den" strings next to a 12-digit decimal.
 *
 * Decoders throw FormatError on malformed input.
 */

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aspec/circle.hpp"
#include "aspec/constructions.hpp"
#include "aspec/groups.hpp"
#include "aspec/linalg.hpp"
#include "aspec/measure.hpp"

namespace aspec::io {

using nlohmann::json;

/// %.17g, round-trips a double.
std::string format_double(double v);
/// 12 significant digits, for people.
std::string format_decimal(double v);
double parse_double(const json& j);

json to_json(const BigInt& v);
BigInt big_int_from_json(const json& j);

json to_json(const RationalAngle& a);
RationalAngle rational_angle_from_json(const json& j);
json to_json(const UnitPoint& z);
UnitPoint unit_point_from_json(const json& j);
json to_json(const Magnitude& m);
Magnitude magnitude_from_json(const json& j);

json to_json(const UMatrix& m);
UMatrix matrix_from_json(const json& j);

struct ClosureDocument {
    std::vector<UMatrix> generators;
    std::optional<std::size_t> order;
    std::optional<bool> complete;
    std::optional<std::vector<std::uint32_t>> cayley;
};

json closure_to_json(const GroupClosure& g, bool include_cayley = false);
/// Accepts a closure export or a bare {"generators": [...]} document.
ClosureDocument closure_from_json(const json& j);

/// `timestamp` is written unless empty.
json to_json(const AsmReport& r, const std::string& timestamp = {});
AsmReport report_from_json(const json& j);
/// One summary row; per-pair rows instead when `pairs` is set.
std::string report_csv(const AsmReport& r, bool pairs = false);
/// set_name,angle,exactness rows for every set in the witness.
std::string plotdata_csv(const AsmReport& r);

json to_json(const TadpoleParams& t);
TadpoleParams tadpole_from_json(const json& j);
json to_json(const MillerMorenoParams& mm);
MillerMorenoParams miller_moreno_from_json(const json& j);
json to_json(const SrParams& s);
SrParams sr_from_json(const json& j);
json to_json(const QSetParams& q);
QSetParams qset_params_from_json(const json& j);

json to_json(const QSetResult& r, const QSetParams& params);
json to_json(const GapAnalysis& g);

/// Current UTC time as ISO 8601.
std::string utc_timestamp();

} // namespace aspec::io
