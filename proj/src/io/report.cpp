#include "gcops/io/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gcops/error.hpp"

namespace gcops::io {

namespace {

std::string escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

double to_double(const std::string& s) {
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  if (s == "nan") return NAN;
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::InvalidArgument, "not a number: '" + s + "'");
  return v;
}

std::string format_p(double p) { return p < 1e-15 ? "<1e-15" : format_float(p); }

bool close(double a, double b) {
  if (a == b) return true;
  if (std::isnan(a) && std::isnan(b)) return true;
  return std::abs(a - b) <= 1e-8 * std::max(std::abs(a), std::abs(b));
}

}  // namespace

std::string format_float(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::size_t Csv::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw Error(ErrorCode::InvalidArgument, "no column named " + name);
}

std::string Csv::str() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << escape(cells[i]);
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return os.str();
}

Csv Csv::parse(const std::string& text) {
  Csv out;
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false, any = false;
  auto end_row = [&] {
    cells.push_back(std::move(cell));
    cell.clear();
    if (out.header.empty()) out.header = std::move(cells);
    else out.rows.push_back(std::move(cells));
    cells.clear();
    any = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') cell += text[++i];
      else if (c == '"') quoted = false;
      else cell += c;
    } else if (c == '"') {
      quoted = any = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\n') {
      end_row();
    } else if (c != '\r') {
      cell += c;
      any = true;
    }
  }
  if (any || !cell.empty()) end_row();
  return out;
}

std::string to_key_value(const TestReport& r) {
  std::ostringstream os;
  os << "n=" << r.stats.n << '\n'
     << "p1_hat=" << format_float(r.stats.p1_hat) << '\n'
     << "p2_hat=" << format_float(r.stats.p2_hat) << '\n'
     << "p12_hat=" << format_float(r.stats.p12_hat) << '\n'
     << "d_hat=" << format_float(r.stats.d_hat) << '\n'
     << "c0_1=" << format_float(r.c0_1) << '\n'
     << "c0_2=" << format_float(r.c0_2) << '\n'
     << "delta=" << format_float(r.delta) << '\n'
     << "max_lag=" << r.max_lag_used << '\n'
     << "s_hat=" << format_float(r.s_hat) << '\n'
     << "t=" << format_float(r.t) << '\n'
     << "p_bilateral=" << format_p(r.p_bilateral) << '\n'
     << "p_coloc=" << format_p(r.p_coloc) << '\n'
     << "p_anticoloc=" << format_p(r.p_anticoloc) << '\n'
     << "undersized=" << (r.undersized ? 1 : 0) << '\n';
  for (std::size_t i = 0; i < r.warnings.size(); ++i)
    os << "warning." << i << '=' << r.warnings[i] << '\n';
  return os.str();
}

std::vector<std::string> report_columns() {
  return {"n",     "p1_hat", "p2_hat", "p12_hat", "d_hat",       "c0_1",    "c0_2",
          "delta", "max_lag", "s_hat", "t",       "p_bilateral", "p_coloc", "p_anticoloc",
          "undersized", "warnings"};
}

std::vector<std::string> report_row(const TestReport& r) {
  std::string warnings;
  for (std::size_t i = 0; i < r.warnings.size(); ++i) warnings += (i ? "; " : "") + r.warnings[i];
  return {std::to_string(r.stats.n), format_float(r.stats.p1_hat), format_float(r.stats.p2_hat),
          format_float(r.stats.p12_hat), format_float(r.stats.d_hat), format_float(r.c0_1),
          format_float(r.c0_2), format_float(r.delta), std::to_string(r.max_lag_used),
          format_float(r.s_hat), format_float(r.t), format_float(r.p_bilateral),
          format_float(r.p_coloc), format_float(r.p_anticoloc), r.undersized ? "1" : "0",
          warnings};
}

TestReport report_from_row(const Csv& table, std::size_t row) {
  const auto& cells = table.rows.at(row);
  auto get = [&](const char* name) -> const std::string& { return cells.at(table.column(name)); };
  TestReport r;
  r.stats.n = std::stoull(get("n"));
  r.stats.p1_hat = to_double(get("p1_hat"));
  r.stats.p2_hat = to_double(get("p2_hat"));
  r.stats.p12_hat = to_double(get("p12_hat"));
  r.stats.d_hat = to_double(get("d_hat"));
  r.c0_1 = to_double(get("c0_1"));
  r.c0_2 = to_double(get("c0_2"));
  r.delta = to_double(get("delta"));
  r.max_lag_used = std::stoi(get("max_lag"));
  r.s_hat = to_double(get("s_hat"));
  r.t = to_double(get("t"));
  r.p_bilateral = to_double(get("p_bilateral"));
  r.p_coloc = to_double(get("p_coloc"));
  r.p_anticoloc = to_double(get("p_anticoloc"));
  r.undersized = get("undersized") == "1";
  const std::string& w = get("warnings");
  for (std::size_t start = 0; start < w.size();) {
    const auto end = w.find("; ", start);
    r.warnings.push_back(w.substr(start, end - start));
    if (end == std::string::npos) break;
    start = end + 2;
  }
  return r;
}

bool same_record(const TestReport& a, const TestReport& b) {
  return a.stats.n == b.stats.n && close(a.stats.p1_hat, b.stats.p1_hat) &&
         close(a.stats.p2_hat, b.stats.p2_hat) && close(a.stats.p12_hat, b.stats.p12_hat) &&
         close(a.stats.d_hat, b.stats.d_hat) && close(a.c0_1, b.c0_1) && close(a.c0_2, b.c0_2) &&
         close(a.delta, b.delta) && a.max_lag_used == b.max_lag_used &&
         close(a.s_hat, b.s_hat) && close(a.t, b.t) && close(a.p_bilateral, b.p_bilateral) &&
         close(a.p_coloc, b.p_coloc) && close(a.p_anticoloc, b.p_anticoloc) &&
         a.undersized == b.undersized && a.warnings == b.warnings;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace gcops::io
