#include "qreduce/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace qreduce::cli {

namespace {

double round_significant(double x) {
  if (!std::isfinite(x)) return x;
  return std::stod(format_number(x, 12));
}

bool same_number(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

bool same_cell(const Cell& a, const Cell& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<double>(&a)) return same_number(*x, std::get<double>(b));
  return std::get<std::string>(a) == std::get<std::string>(b);
}

nlohmann::ordered_json number_json(double x) {
  if (std::isnan(x)) return nullptr;
  return x;
}

double json_number(const nlohmann::ordered_json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c, int digits) {
  if (const auto* x = std::get_if<double>(&c)) return format_number(*x, digits);
  return std::get<std::string>(c);
}

/// Display width in code points, so aligned text survives UTF-8 labels.
std::size_t display_width(const std::string& s) {
  return std::size_t(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

std::string pad(const std::string& s, std::size_t width) {
  return s + std::string(width > display_width(s) ? width - display_width(s) : 0, ' ');
}

}  // namespace

std::string to_string(Format f) {
  switch (f) {
    case Format::text:
      return "text";
    case Format::csv:
      return "csv";
    case Format::json:
      return "json";
  }
  return "text";
}

std::string format_number(double value, int digits) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // drop the sign of negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

void ResultRecord::add_result(std::string name, double value) {
  results.emplace_back(std::move(name), round_significant(value));
}

void ResultRecord::add_row(std::vector<Cell> row) {
  for (auto& c : row) {
    if (auto* x = std::get_if<double>(&c)) *x = round_significant(*x);
  }
  rows.push_back(std::move(row));
}

std::optional<double> ResultRecord::result(const std::string& name) const {
  for (const auto& [k, v] : results) {
    if (k == name) return v;
  }
  return std::nullopt;
}

bool operator==(const ResultRecord& a, const ResultRecord& b) {
  if (a.config != b.config || a.provenance != b.provenance || a.messages != b.messages ||
      a.columns != b.columns || !same_number(a.duration_seconds, b.duration_seconds)) {
    return false;
  }
  if (a.results.size() != b.results.size() || a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    if (a.results[i].first != b.results[i].first || !same_number(a.results[i].second, b.results[i].second)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].size() != b.rows[i].size()) return false;
    for (std::size_t k = 0; k < a.rows[i].size(); ++k) {
      if (!same_cell(a.rows[i][k], b.rows[i][k])) return false;
    }
  }
  return true;
}

nlohmann::ordered_json to_json(const ResultRecord& r, bool with_timing) {
  nlohmann::ordered_json j;
  j["config"] = r.config;
  auto& results = j["results"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.results) results[k] = number_json(v);
  auto& provenance = j["provenance"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.provenance) provenance[k] = v;
  j["messages"] = r.messages;
  j["columns"] = r.columns;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& c : row) {
      if (const auto* x = std::get_if<double>(&c)) {
        out.push_back(number_json(*x));
      } else {
        out.push_back(std::get<std::string>(c));
      }
    }
    rows.push_back(std::move(out));
  }
  if (with_timing) j["duration_seconds"] = r.duration_seconds;
  return j;
}

ResultRecord record_from_json(const nlohmann::ordered_json& j) {
  ResultRecord r;
  r.config = j.at("config");
  for (const auto& [k, v] : j.at("results").items()) r.results.emplace_back(k, json_number(v));
  for (const auto& [k, v] : j.at("provenance").items()) r.provenance.emplace_back(k, v.get<std::string>());
  r.messages = j.at("messages").get<std::vector<std::string>>();
  r.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& row : j.at("rows")) {
    std::vector<Cell> cells;
    for (const auto& c : row) {
      if (c.is_string()) {
        cells.emplace_back(c.get<std::string>());
      } else {
        cells.emplace_back(json_number(c));
      }
    }
    r.rows.push_back(std::move(cells));
  }
  if (j.contains("duration_seconds")) r.duration_seconds = j["duration_seconds"].get<double>();
  return r;
}

std::string render_json(const ResultRecord& r, bool with_timing) {
  return to_json(r, with_timing).dump(2) + "\n";
}

std::string render_csv(const ResultRecord& r) {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << csv_field(fields[i]);
    out << "\n";
  };
  if (r.columns.empty()) {
    line({"name", "value"});
    for (const auto& [k, v] : r.results) line({k, format_number(v, 12)});
    return out.str();
  }
  line(r.columns);
  for (const auto& row : r.rows) {
    std::vector<std::string> fields;
    for (const auto& c : row) fields.push_back(cell_text(c, 12));
    line(fields);
  }
  return out.str();
}

std::string render_text(const ResultRecord& r) {
  std::ostringstream out;
  if (r.messages.empty() && r.rows.empty() && r.results.size() == 1) {
    out << format_number(r.results.front().second, 6) << "\n";
    return out.str();
  }
  for (const auto& m : r.messages) out << m << "\n";
  std::size_t name_width = 0;
  for (const auto& [k, v] : r.results) name_width = std::max(name_width, display_width(k));
  for (const auto& [k, v] : r.results) out << pad(k, name_width) << "  " << format_number(v, 6) << "\n";
  if (!r.columns.empty() && !r.rows.empty()) {
    if (!r.messages.empty() || !r.results.empty()) out << "\n";
    std::vector<std::vector<std::string>> grid{r.columns};
    for (const auto& row : r.rows) {
      std::vector<std::string> fields;
      for (const auto& c : row) fields.push_back(cell_text(c, 6));
      grid.push_back(std::move(fields));
    }
    std::vector<std::size_t> widths(r.columns.size(), 0);
    for (const auto& row : grid) {
      for (std::size_t k = 0; k < row.size() && k < widths.size(); ++k) {
        widths[k] = std::max(widths[k], display_width(row[k]));
      }
    }
    for (const auto& row : grid) {
      std::string text;
      for (std::size_t k = 0; k < row.size(); ++k) {
        text += k + 1 < row.size() ? pad(row[k], widths[k]) + "  " : row[k];
      }
      out << text << "\n";
    }
  }
  return out.str();
}

}  // namespace qreduce::cli
