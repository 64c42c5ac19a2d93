#include "sfe/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace sfe {

namespace {

double parse_double(std::string_view tok, const std::string& path, size_t lineno) {
  // trim surrounding whitespace
  while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.front()))) tok.remove_prefix(1);
  while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back()))) tok.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    std::ostringstream os;
    os << path << ":" << lineno << ": cannot parse '" << std::string(tok) << "' as a double";
    throw io_error(os.str());
  }
  return v;
}

std::string fmt_full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Matrix read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    size_t start = 0;
    while (true) {
      const size_t comma = line.find(',', start);
      const std::string_view tok(line.data() + start,
                                 (comma == std::string::npos ? line.size() : comma) - start);
      row.push_back(parse_double(tok, path, lineno));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream os;
      os << path << ":" << lineno << ": ragged row (" << row.size() << " vs "
         << rows.front().size() << " columns)";
      throw io_error(os.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw io_error(path + ": empty matrix file");
  Matrix A(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) A(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  return A;
}

Matrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  std::string line;
  size_t lineno = 0;
  if (!std::getline(in, line)) throw io_error(path + ": empty file");
  ++lineno;
  {
    std::string lower = line;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower.rfind("%%matrixmarket", 0) != 0 || lower.find("array") == std::string::npos ||
        lower.find("real") == std::string::npos)
      throw io_error(path + ": expected '%%MatrixMarket matrix array real general' header");
    if (lower.find("general") == std::string::npos)
      throw io_error(path + ": only 'general' symmetry is supported");
  }
  // skip comments
  do {
    if (!std::getline(in, line)) throw io_error(path + ": missing size line");
    ++lineno;
  } while (!line.empty() && line[0] == '%');

  Index m = 0, n = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> m >> n) || m < 1 || n < 1)
      throw io_error(path + ": bad size line '" + line + "'");
  }
  Matrix A(m, n);
  Index count = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '%') continue;
    // one value per line in the array format; be lenient about several
    size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      if (pos >= line.size()) break;
      size_t end = pos;
      while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
      if (count >= m * n) throw io_error(path + ": more values than m*n");
      const double v = parse_double(std::string_view(line.data() + pos, end - pos), path, lineno);
      A(count % m, count / m) = v;  // column-major order
      ++count;
      pos = end;
    }
  }
  if (count != m * n) {
    std::ostringstream os;
    os << path << ": expected " << m * n << " values, found " << count;
    throw io_error(os.str());
  }
  return A;
}

Matrix read_matrix(const std::string& path) {
  const auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == "mtx" || ext == "mm") return read_matrix_market(path);
  return read_csv_matrix(path);
}

Vector read_vector(const std::string& path) {
  const Matrix A = read_matrix(path);
  if (A.cols() == 1) return A.col(0);
  if (A.rows() == 1) return A.row(0).transpose();
  std::ostringstream os;
  os << path << ": expected a vector, got " << A.rows() << "x" << A.cols();
  throw io_error(os.str());
}

void write_csv_matrix(const Matrix& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open " + path + " for writing");
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) {
      if (j) out << ',';
      out << fmt_full(A(i, j));
    }
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

void write_matrix_market(const Matrix& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << "%%MatrixMarket matrix array real general\n";
  out << A.rows() << ' ' << A.cols() << '\n';
  for (Index j = 0; j < A.cols(); ++j)
    for (Index i = 0; i < A.rows(); ++i) out << fmt_full(A(i, j)) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace sfe
