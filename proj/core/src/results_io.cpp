#include "race/results_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace race {
namespace {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

double rounded(double value) { return std::stod(format_number(value)); }

}  // namespace

ResultFormat parse_result_format(std::string_view name) {
  if (name == "csv") return ResultFormat::csv;
  if (name == "json") return ResultFormat::json;
  throw std::invalid_argument("unknown result format '" + std::string(name) + "' (expected csv or json)");
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

void write_results_csv(const MetricsTable& table, std::ostream& out) {
  out << kResultsCsvHeader << '\n';
  for (const MetricsRow& r : table) {
    out << csv_field(r.scheme) << ',' << format_number(r.snr_db) << ',' << format_number(r.pee) << ','
        << format_number(r.pee_ci95) << ',' << format_number(r.avg_measurements) << ','
        << format_number(r.avg_feedback_bits) << ',' << format_number(r.avg_alpha_mse) << ',' << r.trials
        << '\n';
  }
}

nlohmann::json results_to_json(const MetricsTable& table) {
  nlohmann::json doc = nlohmann::json::array();
  for (const MetricsRow& r : table) {
    nlohmann::json row = {{"scheme", r.scheme},
                          {"snr_db", rounded(r.snr_db)},
                          {"pee", rounded(r.pee)},
                          {"pee_ci95", rounded(r.pee_ci95)},
                          {"avg_measurements", rounded(r.avg_measurements)},
                          {"avg_feedback_bits", rounded(r.avg_feedback_bits)},
                          {"avg_alpha_mse", rounded(r.avg_alpha_mse)},
                          {"trials", r.trials}};
    if (r.pee_above_outage) row["pee_above_outage"] = rounded(*r.pee_above_outage);
    doc.push_back(std::move(row));
  }
  return doc;
}

MetricsTable results_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw std::invalid_argument("results: expected a JSON array");
  MetricsTable table;
  for (const nlohmann::json& row : doc) {
    MetricsRow r;
    r.scheme = row.at("scheme").get<std::string>();
    r.snr_db = row.at("snr_db").get<double>();
    r.pee = row.at("pee").get<double>();
    r.pee_ci95 = row.at("pee_ci95").get<double>();
    r.avg_measurements = row.at("avg_measurements").get<double>();
    r.avg_feedback_bits = row.at("avg_feedback_bits").get<double>();
    r.avg_alpha_mse = row.at("avg_alpha_mse").get<double>();
    r.trials = row.at("trials").get<std::size_t>();
    if (row.contains("pee_above_outage")) r.pee_above_outage = row.at("pee_above_outage").get<double>();
    table.push_back(std::move(r));
  }
  return table;
}

void emit_results(const MetricsTable& table, ResultFormat format, const std::filesystem::path& path) {
  if (table.empty()) throw std::invalid_argument("emit_results: empty table");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  if (format == ResultFormat::csv) {
    write_results_csv(table, out);
  } else {
    out << results_to_json(table).dump(2) << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace race
