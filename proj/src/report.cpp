#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "riskfix/errors.hpp"
#include "riskfix/experiment.hpp"

namespace riskfix {

namespace {

using nlohmann::json;

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw ConfigError("unterminated quote in CSV line");
  return fields;
}

double parse_double(const std::string& text) {
  if (text.empty()) return ExperimentRecord::kNaN;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("bad number '" + text + "' in report");
  return value;
}

long long parse_integer(const std::string& text) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("bad integer '" + text + "' in report");
  return value;
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double json_number(const json& value) {
  return value.is_null() ? ExperimentRecord::kNaN : value.get<double>();
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buffer{};
  const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), ptr);
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  throw ConfigError("unknown report format '" + std::string(name) + "' (expected csv or json)");
}

std::string format_report(const std::vector<ExperimentRecord>& records, ReportFormat format) {
  if (format == ReportFormat::Json) {
    json out = json::array();
    for (const auto& r : records) {
      json row = json::object();
      row["experiment_id"] = r.experiment_id;
      row["n"] = r.n;
      row["m"] = r.m;
      row["sigma"] = number_or_null(r.sigma);
      row["constraint"] = r.constraint;
      row["signal"] = r.signal;
      row["r_theory_sq"] = number_or_null(r.r_theory_sq);
      row["r_theory_se"] = number_or_null(r.r_theory_se);
      row["risk_emp_mean"] = number_or_null(r.risk_emp_mean);
      row["risk_emp_se"] = number_or_null(r.risk_emp_se);
      row["ratio"] = number_or_null(r.ratio);
      row["r2_statistic"] = number_or_null(r.r2_statistic);
      row["regime"] = r.regime;
      row["runtime_seconds"] = number_or_null(r.runtime_seconds);
      if (!r.error.empty()) row["error"] = r.error;
      out.push_back(std::move(row));
    }
    return out.dump(2) + "\n";
  }

  std::ostringstream os;
  os << kReportHeader << '\n';
  for (const auto& r : records) {
    os << csv_field(r.experiment_id) << ',' << r.n << ',' << r.m << ',' << format_double(r.sigma)
       << ',' << csv_field(r.constraint) << ',' << csv_field(r.signal) << ','
       << format_double(r.r_theory_sq) << ',' << format_double(r.r_theory_se) << ','
       << format_double(r.risk_emp_mean) << ',' << format_double(r.risk_emp_se) << ','
       << format_double(r.ratio) << ',' << format_double(r.r2_statistic) << ','
       << csv_field(r.regime) << ',' << format_double(r.runtime_seconds) << '\n';
  }
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

void emit_report(const std::vector<ExperimentRecord>& records, ReportFormat format,
                 const std::string& path) {
  if (records.empty()) throw DomainError("emit_report needs at least one record");
  write_text(path, format_report(records, format));
}

std::vector<ExperimentRecord> parse_report_csv(std::string_view text) {
  std::vector<ExperimentRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader)
    throw ConfigError("report CSV does not start with the expected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 14)
      throw ConfigError("report CSV row has " + std::to_string(f.size()) + " fields, expected 14");
    ExperimentRecord r;
    r.experiment_id = f[0];
    r.n = parse_integer(f[1]);
    r.m = parse_integer(f[2]);
    r.sigma = parse_double(f[3]);
    r.constraint = f[4];
    r.signal = f[5];
    r.r_theory_sq = parse_double(f[6]);
    r.r_theory_se = parse_double(f[7]);
    r.risk_emp_mean = parse_double(f[8]);
    r.risk_emp_se = parse_double(f[9]);
    r.ratio = parse_double(f[10]);
    r.r2_statistic = parse_double(f[11]);
    r.regime = f[12];
    r.runtime_seconds = parse_double(f[13]);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ExperimentRecord> parse_report_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("report JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ConfigError("report JSON must be an array");
  std::vector<ExperimentRecord> out;
  try {
    for (const auto& row : doc) {
      ExperimentRecord r;
      r.experiment_id = row.at("experiment_id").get<std::string>();
      r.n = row.at("n").get<long long>();
      r.m = row.at("m").get<long long>();
      r.sigma = json_number(row.at("sigma"));
      r.constraint = row.at("constraint").get<std::string>();
      r.signal = row.at("signal").get<std::string>();
      r.r_theory_sq = json_number(row.at("r_theory_sq"));
      r.r_theory_se = json_number(row.at("r_theory_se"));
      r.risk_emp_mean = json_number(row.at("risk_emp_mean"));
      r.risk_emp_se = json_number(row.at("risk_emp_se"));
      r.ratio = json_number(row.at("ratio"));
      r.r2_statistic = json_number(row.at("r2_statistic"));
      r.regime = row.at("regime").get<std::string>();
      r.runtime_seconds = json_number(row.at("runtime_seconds"));
      if (row.contains("error")) r.error = row.at("error").get<std::string>();
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("report JSON: ") + e.what());
  }
  return out;
}

}  // namespace riskfix
