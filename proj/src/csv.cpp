#include "survmix/csv.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "survmix/error.hpp"

namespace survmix {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

// Plain decimal parse; rejects partial consumption ("1.5x"), hex, inf/nan.
bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
          c == '+' || c == '-' || c == 'e' || c == 'E'))
      return false;
  }
  std::size_t pos = 0;
  try {
    out = std::stod(s, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == s.size();
}

bool parse_int_field(const std::string& s, long& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stol(s, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == s.size();
}

[[noreturn]] void bad_row(std::size_t row, const std::string& what) {
  std::ostringstream msg;
  msg << "read_csv: row " << row << ": " << what;
  throw data_error(msg.str());
}

}  // namespace

Dataset read_csv(std::istream& in) {
  std::string line;
  // Header. An entirely empty stream is a data problem, a wrong header a
  // format problem.
  bool saw_header = false;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    header = split_fields(line);
    saw_header = true;
    break;
  }
  if (!saw_header) throw data_error("read_csv: file is empty");

  if (header.size() < 2 || header[0] != "time" || header[1] != "event")
    throw format_error("read_csv: header must start with time,event");
  bool has_arm = false;
  bool has_truth = false;
  std::size_t col = 2;
  if (col < header.size() && header[col] == "arm") {
    has_arm = true;
    ++col;
  }
  if (col < header.size() && header[col] == "component_truth") {
    has_truth = true;
    ++col;
  }
  if (col != header.size())
    throw format_error("read_csv: unrecognized header column '" +
                       (col < header.size() ? header[col] : std::string()) +
                       "'");
  const std::size_t n_cols = header.size();

  Dataset data;
  if (has_truth) data.component_truth.emplace();
  // The header is row 1; the first data row is row 2.
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() != n_cols) bad_row(row, "expected " + std::to_string(n_cols) + " fields");

    Observation obs;
    double t = 0.0;
    if (!parse_double(fields[0], t)) bad_row(row, "time '" + fields[0] + "' is not a decimal number");
    if (!(t > 0.0)) bad_row(row, "time must be positive");
    obs.time = t;

    long ev = 0;
    if (!parse_int_field(fields[1], ev) || (ev != 0 && ev != 1))
      bad_row(row, "event '" + fields[1] + "' must be 0 or 1");
    obs.event = (ev == 1);

    std::size_t f = 2;
    if (has_arm) {
      long a = 0;
      if (!parse_int_field(fields[f], a) || (a != 0 && a != 1))
        bad_row(row, "arm '" + fields[f] + "' must be 0 or 1");
      obs.arm = (a == 1) ? Arm::Treated : Arm::Control;
      ++f;
    }
    if (has_truth) {
      long c = 0;
      if (!parse_int_field(fields[f], c) || c < 1)
        bad_row(row, "component_truth '" + fields[f] + "' must be a component index >= 1");
      data.component_truth->push_back(static_cast<int>(c));
    }
    data.observations.push_back(obs);
  }
  if (data.observations.empty()) throw data_error("read_csv: no data rows");
  return data;
}

Dataset read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw format_error("cannot open '" + path + "' for reading");
  return read_csv(in);
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void write_csv(std::ostream& out, const Dataset& data, bool with_truth) {
  const bool arm = data.has_arms();
  const bool truth = with_truth && data.component_truth.has_value();
  out << "time,event";
  if (arm) out << ",arm";
  if (truth) out << ",component_truth";
  out << "\n";
  for (std::size_t i = 0; i < data.n(); ++i) {
    const Observation& obs = data.observations[i];
    out << format_number(obs.time) << ',' << (obs.event ? 1 : 0);
    if (arm) out << ',' << (obs.arm == Arm::Treated ? 1 : 0);
    if (truth) out << ',' << (*data.component_truth)[i];
    out << "\n";
  }
}

}  // namespace survmix
