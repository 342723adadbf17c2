#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "race/harness.hpp"

namespace race {

enum class ResultFormat { csv, json };

ResultFormat parse_result_format(std::string_view name);

inline constexpr std::string_view kResultsCsvHeader =
    "scheme,snr_db,pee,pee_ci95,avg_measurements,avg_feedback_bits,avg_alpha_mse,trials";

/// Six significant digits, shortest form ("%.6g").
std::string format_number(double value);

void write_results_csv(const MetricsTable& table, std::ostream& out);
nlohmann::json results_to_json(const MetricsTable& table);
MetricsTable results_from_json(const nlohmann::json& doc);

/// Writes the table to `path`. Throws std::runtime_error naming the path when
/// the file cannot be written, std::invalid_argument for an empty table.
void emit_results(const MetricsTable& table, ResultFormat format,
                  const std::filesystem::path& path);

}  // namespace race
