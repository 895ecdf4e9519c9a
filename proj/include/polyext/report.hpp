#pragma once

#include <ostream>
#include <string>

#include "json.hpp"
#include "polyext/suite.hpp"

namespace polyext {

enum class ReportFormat { json, text };

ReportFormat parse_report_format(const std::string& name);

/// Report document; NaN measurements are written as null. Wall-clock data lives under "timing".
nlohmann::json to_json(const VerificationReport& report);
nlohmann::json to_json(const CheckValue& check);

/// Inverse of to_json. Throws std::runtime_error on malformed input.
VerificationReport report_from_json(const nlohmann::json& doc);

/// Aligned table, one row per check, failures marked FAIL, summary last.
std::string format_text(const VerificationReport& report);

void write_report(const VerificationReport& report, ReportFormat format, std::ostream& out);

/// Writes to `path`, or to stdout when it is empty or "-". Throws std::runtime_error on I/O failure.
void write_report(const VerificationReport& report, ReportFormat format, const std::string& path);

}  // namespace polyext
