#pragma once

#include "rfcsim/scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace rfcsim {

/// Knobs of the two built-in studies.
struct BuiltinOptions {
    double line_length_km = 100.0;   ///< whole catenary section
    double fault_distance_km = 10.0; ///< from RFC 1
    double fault_admittance = 1e6;   ///< p.u., purely conductive
    double fault_on = 1.8;
    double fault_off = 2.0;
};

/// "case1": one converter feeding the section from one end.
/// "case2": converters at both ends of the section.
/// Throws ScenarioError for any other name.
Scenario builtin_scenario(std::string_view name, const BuiltinOptions& opts = {});

bool is_builtin(std::string_view name);

/// Parse the sectioned key/value scenario format. Unspecified machine and
/// exciter fields take the Q48/Q49 and default AC5A values.
Scenario parse_scenario(std::istream& in, const std::string& source = "<input>");

/// Builtin name or file path.
Scenario load_scenario(const std::string& name_or_path, const BuiltinOptions& opts = {});

/// Canonical text form; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& s);

/// Apply one `key=value` override. Recognized keys: dt, t_end, output_stride,
/// K_U, U_0, exciter.<field> (all converters), <rfc>.h_motor, <rfc>.h_generator,
/// <rfc>.<motor|generator|exciter>.<field>, fault_admittance.
/// Throws ScenarioError for unknown keys or malformed values.
void apply_override(Scenario& s, std::string_view key, std::string_view value);

/// Consume overrides that shape a builtin (line_length, fault_distance,
/// fault_admittance). Returns false if the key is not one of them.
bool apply_builtin_override(BuiltinOptions& opts, std::string_view key, std::string_view value);

}  // namespace rfcsim
