#pragma once

#include <iosfwd>
#include <string>

#include "selint/montecarlo.hpp"

namespace selint {

enum class ReportFormat { Csv, Json, Markdown };

ReportFormat parse_report_format(const std::string& text);

// CSV: one block per panel, one row per rho, and per alpha the columns
// sq_bias, sd, rmse_scaled and failed.
void write_report_csv(std::ostream& out, const MonteCarloReport& report);
void write_report_json(std::ostream& out, const MonteCarloReport& report);
void write_report_markdown(std::ostream& out, const MonteCarloReport& report);
void write_report(std::ostream& out, const MonteCarloReport& report, ReportFormat format);

}  // namespace selint
