// io.hpp
// CSV and JSON serialization for run reports, rate estimates and curve
// tables. CSV is RFC-4180-style: comma separated, one header row, LF line
// endings; numbers carry 9 significant digits so files diff cleanly.
#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qsdc/analysis.hpp"
#include "qsdc/protocol.hpp"
#include "qsdc/version.hpp"

namespace qsdc::io {

using Fields = std::vector<std::pair<std::string, std::string>>;

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string bits_to_string(const BitString& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

inline Fields report_fields(const RunReport& rep) {
  return {
      {"decoys_checked", std::to_string(rep.decoys_checked)},
      {"detections", std::to_string(rep.detections)},
      {"empirical_detection_rate", format_number(rep.empirical_detection_rate)},
      {"analytic_detection_rate", format_number(rep.analytic_detection_rate)},
      {"aborted", rep.aborted ? "true" : "false"},
      {"first_check_count", std::to_string(rep.first_check_count)},
      {"first_check_detections", std::to_string(rep.first_check_detections)},
      {"second_check_count", std::to_string(rep.second_check_count)},
      {"second_check_detections", std::to_string(rep.second_check_detections)},
      {"bit_error_count", std::to_string(rep.bit_error_count)},
      {"recovered_bits", bits_to_string(rep.recovered_bits)},
  };
}

inline Fields estimate_fields(const RateEstimate& est, double analytic) {
  return {
      {"trials", std::to_string(est.trials)},
      {"detections", std::to_string(est.detections)},
      {"empirical_detection_rate", format_number(est.rate)},
      {"standard_error", format_number(est.standard_error)},
      {"analytic_detection_rate", format_number(analytic)},
  };
}

/// One header row plus one value row.
inline std::string fields_csv(const Fields& fields) {
  std::string header;
  std::string row;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) {
      header.push_back(',');
      row.push_back(',');
    }
    header += fields[i].first;
    row += fields[i].second;
  }
  return header + "\n" + row + "\n";
}

inline nlohmann::json fields_json(const Fields& fields) {
  nlohmann::json obj = nlohmann::json::object();
  for (const auto& [key, value] : fields) obj[key] = value;
  return obj;
}

inline std::string table_csv(const analysis::CurveTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out.push_back(',');
    out += table.columns[i];
  }
  out.push_back('\n');
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out.push_back(',');
      out += format_number(row[i]);
    }
    out.push_back('\n');
  }
  return out;
}

inline nlohmann::json table_json(const analysis::CurveTable& table) {
  nlohmann::json obj;
  obj["columns"] = table.columns;
  obj["rows"] = table.rows;
  return obj;
}

}  // namespace qsdc::io
