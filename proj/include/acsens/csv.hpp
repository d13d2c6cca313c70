#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

namespace acsens {

/// Shortest form that round-trips ("%.17g").
std::string format_number(double v);

/// Quote a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

/// One `# key: value` line per top-level key of a JSON object.
void write_comment_header(std::ostream& os, const nlohmann::json& meta);

}  // namespace acsens
