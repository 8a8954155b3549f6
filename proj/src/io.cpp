#include "reachlab/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace reachlab {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error("csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string cloud_to_csv(const PointCloud& cloud) {
  std::string out;
  for (std::size_t j = 0; j < cloud.dim(); ++j) {
    if (j) out += ',';
    out += "x" + std::to_string(j);
  }
  out += '\n';
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    auto p = cloud.point(i);
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j) out += ',';
      out += format_double(p[j]);
    }
    out += '\n';
  }
  return out;
}

PointCloud cloud_from_csv(const std::string& text, double resolution) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw Error("csv: empty cloud file");
  const std::size_t dim = split(lines[0], ',').size();
  std::vector<double> coords;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto cells = split(lines[i], ',');
    if (cells.size() != dim) throw Error("csv line " + std::to_string(i + 1) + ": expected " + std::to_string(dim) + " columns");
    for (const auto& c : cells) coords.push_back(parse_double(c, i + 1));
  }
  return PointCloud(dim, std::move(coords), resolution);
}

std::string rows_to_csv(const SweepReport& report) {
  std::string out = "delta,rho_h,dir_ab,dir_ba,slack,slack_dedup,slack_integration,slack_net";
  for (const auto& c : report.extra_columns) out += "," + c;
  out += '\n';
  for (const auto& row : report.rows) {
    const double cells[] = {row.delta, row.rho_h, row.dir_ab, row.dir_ba, row.slack,
                            row.terms.dedup, row.terms.integration, row.terms.net};
    bool first = true;
    for (double c : cells) {
      if (!first) out += ',';
      first = false;
      out += format_double(c);
    }
    for (double c : row.extra) out += "," + format_double(c);
    out += '\n';
  }
  return out;
}

SweepReport rows_from_csv(const std::string& text, SweepKind kind) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw Error("csv: empty rows file");
  const auto header = split(lines[0], ',');
  constexpr std::size_t kFixed = 8;
  if (header.size() < kFixed || header[0] != "delta" || header[1] != "rho_h") {
    throw Error("csv: not a rows file (header '" + lines[0] + "')");
  }
  SweepReport report;
  report.kind = kind;
  report.extra_columns.assign(header.begin() + kFixed, header.end());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != header.size()) throw Error("csv line " + std::to_string(i + 1) + ": column count mismatch");
    std::vector<double> v;
    for (const auto& c : cells) v.push_back(parse_double(c, i + 1));
    SweepRow row;
    row.delta = v[0];
    row.rho_h = v[1];
    row.dir_ab = v[2];
    row.dir_ba = v[3];
    row.slack = v[4];
    row.terms = {v[5], v[6], v[7]};
    row.extra.assign(v.begin() + kFixed, v.end());
    report.rows.push_back(std::move(row));
  }
  judge(report);
  return report;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
    if (!out.flush()) throw Error("cannot write '" + path + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace reachlab
