#include "selint/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "selint/error.hpp"

namespace selint {

ReportFormat parse_report_format(const std::string& text) {
  if (text == "csv") return ReportFormat::Csv;
  if (text == "json") return ReportFormat::Json;
  if (text == "markdown" || text == "md") return ReportFormat::Markdown;
  fail(ErrorKind::InvalidArgument, "unknown format '" + text + "' (valid: csv, json, markdown)");
}

namespace {

std::string num(double v, int digits = 10) {
  if (std::isnan(v)) return "NaN";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string fixed(double v, int decimals) {
  if (std::isnan(v)) return "NaN";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_report_csv(std::ostream& out, const MonteCarloReport& report) {
  out << "panel,rho";
  for (double alpha : report.alphas) {
    const std::string a = fixed(alpha, 2);
    out << ",sq_bias_a" << a << ",sd_a" << a << ",rmse_scaled_a" << a << ",failed_a" << a;
  }
  out << '\n';
  for (std::size_t p = 0; p < report.cells.size(); ++p) {
    for (std::size_t r = 0; r < report.rhos.size(); ++r) {
      out << quote(report.panel_labels[p]) << ',' << num(report.rhos[r]);
      for (std::size_t a = 0; a < report.alphas.size(); ++a) {
        const CellStats& c = report.at(p, r, a);
        out << ',' << num(c.sq_bias) << ',' << num(c.sd) << ',' << num(c.rmse_scaled) << ',' << c.reps_failed;
      }
      out << '\n';
    }
  }
}

void write_report_json(std::ostream& out, const MonteCarloReport& report) {
  nlohmann::json doc;
  doc["family"] = to_string(report.family);
  doc["n"] = report.n;
  doc["reps"] = report.reps;
  doc["base_seed"] = report.base_seed;
  doc["rhos"] = report.rhos;
  doc["alphas"] = report.alphas;
  auto& panels = doc["panels"] = nlohmann::json::array();
  for (std::size_t p = 0; p < report.cells.size(); ++p) {
    nlohmann::json panel;
    panel["label"] = report.panel_labels[p];
    auto& cells = panel["cells"] = nlohmann::json::array();
    for (std::size_t r = 0; r < report.rhos.size(); ++r) {
      for (std::size_t a = 0; a < report.alphas.size(); ++a) {
        const CellStats& c = report.at(p, r, a);
        cells.push_back({{"rho", report.rhos[r]},
                         {"alpha", report.alphas[a]},
                         {"sq_bias", c.sq_bias},
                         {"sd", c.sd},
                         {"rmse_scaled", c.rmse_scaled},
                         {"reps_ok", c.reps_ok},
                         {"reps_failed", c.reps_failed},
                         {"unstable", c.unstable()}});
      }
    }
    panels.push_back(std::move(panel));
  }
  out << doc.dump(2) << '\n';
}

void write_report_markdown(std::ostream& out, const MonteCarloReport& report) {
  out << "# " << to_string(report.family) << ", n = " << report.n << ", " << report.reps << " replications\n";
  for (std::size_t p = 0; p < report.cells.size(); ++p) {
    out << "\n## " << report.panel_labels[p] << "\n\n| rho |";
    for (double alpha : report.alphas) {
      const std::string a = fixed(alpha, 2);
      out << " sq bias " << a << " | sd " << a << " | rmse " << a << " |";
    }
    out << "\n|---|";
    for (std::size_t a = 0; a < report.alphas.size(); ++a) out << "---|---|---|";
    out << '\n';
    for (std::size_t r = 0; r < report.rhos.size(); ++r) {
      out << "| " << fixed(report.rhos[r], 2) << " |";
      for (std::size_t a = 0; a < report.alphas.size(); ++a) {
        const CellStats& c = report.at(p, r, a);
        out << ' ' << fixed(c.sq_bias, 4) << " | " << fixed(c.sd, 4) << " | " << fixed(c.rmse_scaled, 4);
        if (c.reps_failed > 0) out << " (" << c.reps_failed << " failed)";
        out << " |";
      }
      out << '\n';
    }
  }
}

void write_report(std::ostream& out, const MonteCarloReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Csv: write_report_csv(out, report); break;
    case ReportFormat::Json: write_report_json(out, report); break;
    case ReportFormat::Markdown: write_report_markdown(out, report); break;
  }
}

}  // namespace selint
