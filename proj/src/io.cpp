#include "speco/io.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace speco {

namespace {

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

bool is_nan_token(const std::string& cell) {
  if (cell.size() != 3) return false;
  return std::tolower(static_cast<unsigned char>(cell[0])) == 'n' &&
         std::tolower(static_cast<unsigned char>(cell[1])) == 'a' &&
         std::tolower(static_cast<unsigned char>(cell[2])) == 'n';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_cell(const std::string& cell, const std::string& path, std::size_t line_no,
                  std::size_t col) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw IoError(path + ":" + std::to_string(line_no) + ": column " + std::to_string(col) +
                  ": cannot parse '" + cell + "' as a number");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_csv(const std::string& path, const Mat& values, const Mat* mask) {
  if (mask && (mask->rows() != values.rows() || mask->cols() != values.cols()))
    throw std::invalid_argument("write_matrix_csv: mask dimensions must match values");
  std::ostringstream out;
  for (std::size_t j = 0; j < values.cols(); ++j) {
    if (j) out << ',';
    out << 'j' << j;
  }
  out << '\n';
  for (std::size_t i = 0; i < values.rows(); ++i) {
    for (std::size_t j = 0; j < values.cols(); ++j) {
      if (j) out << ',';
      if (!mask || (*mask)(i, j) != 0.0) out << format_double(values(i, j));
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

MatrixFile read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty data file: " + path);
  const std::size_t p = split_csv_line(strip_cr(line)).size();
  if (p < 1) throw IoError(path + ":1: empty header row");

  std::vector<double> values;
  std::vector<double> mask;
  std::size_t n = 0;
  std::size_t line_no = 1;
  std::size_t observed = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;  // trailing newline
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != p)
      throw IoError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(p) +
                    " columns, found " + std::to_string(cells.size()));
    for (std::size_t j = 0; j < p; ++j) {
      const std::string& cell = cells[j];
      if (cell.empty() || is_nan_token(cell)) {
        values.push_back(0.0);
        mask.push_back(0.0);
      } else {
        values.push_back(parse_cell(cell, path, line_no, j));
        mask.push_back(1.0);
        ++observed;
      }
    }
    ++n;
  }
  if (n == 0) throw IoError("no data rows in file: " + path);

  MatrixFile out;
  out.values = Mat(n, p, std::move(values));
  out.mask = Mat(n, p, std::move(mask));
  out.observed_fraction = static_cast<double>(observed) / static_cast<double>(n * p);
  return out;
}

void write_result_csv(const std::string& path, const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "scenario,omega,delta_label,replication_index,estimator_name,error,iterations,"
         "runtime_ms,seed\n";
  for (const ResultRow& r : rows) {
    out << r.scenario << ',' << format_double(r.omega) << ',' << r.delta_label << ','
        << r.replication_index << ',' << r.estimator_name << ',' << format_double(r.error) << ','
        << r.iterations << ',' << format_double(r.runtime_ms) << ',' << r.seed << '\n';
  }
  write_text_file(path, out.str());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open output file for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("short write to output file: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on file: " + path);
  return buf.str();
}

}  // namespace speco
