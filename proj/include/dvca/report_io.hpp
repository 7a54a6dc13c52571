#pragma once

// Report rendering: human-readable tables, JSON (full precision, round-trips
// through the report types) and CSV.

#include <string>
#include <string_view>
#include <vector>

#include "dvca/assessment.hpp"

namespace dvca {

enum class OutputFormat { Table, Json, Csv };

std::string render_report_table(const AssessmentReport& report, bool with_trace);
std::string render_report_json(const AssessmentReport& report);
AssessmentReport report_from_json(std::string_view text);

// Iteration rows x concept columns; row numbering starts at 1.
std::string render_trace_table(const std::vector<std::string>& concepts,
                               const std::vector<ActivationState>& states);
std::string render_trace_csv(const std::vector<std::string>& concepts,
                             const std::vector<ActivationState>& states);

std::string render_comparison_table(const ComparisonReport& report);
std::string render_comparison_json(const ComparisonReport& report);
std::string render_comparison_csv(const ComparisonReport& report);
ComparisonReport comparison_from_json(std::string_view text);

// Fixed-point decimal text ("0.8387").
std::string format_fixed(double value, int decimals);

}  // namespace dvca
