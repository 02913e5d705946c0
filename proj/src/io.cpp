#include "schwarz/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace schwarz::io {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("MatrixMarket: empty input");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket" || lower(object) != "matrix")
    throw FormatError("MatrixMarket: missing banner");
  if (lower(format) != "coordinate") throw FormatError("MatrixMarket: only coordinate format is supported");
  field = lower(field);
  if (field != "real" && field != "integer" && field != "double")
    throw FormatError("MatrixMarket: unsupported field '" + field + "'");
  symmetry = lower(symmetry);
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") throw FormatError("MatrixMarket: unsupported symmetry '" + symmetry + "'");

  do {
    if (!std::getline(in, line)) throw FormatError("MatrixMarket: missing size line");
  } while (line.empty() || line[0] == '%');
  std::istringstream size_line(line);
  std::size_t rows = 0, cols = 0, entries = 0;
  if (!(size_line >> rows >> cols >> entries)) throw FormatError("MatrixMarket: malformed size line");

  std::vector<Triplet> t;
  t.reserve(symmetric ? 2 * entries : entries);
  for (std::size_t k = 0; k < entries;) {
    if (!std::getline(in, line)) throw FormatError("MatrixMarket: expected " + std::to_string(entries) + " entries");
    if (line.empty() || line[0] == '%') continue;
    std::istringstream e(line);
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (!(e >> i >> j >> v) || i == 0 || j == 0 || i > rows || j > cols)
      throw FormatError("MatrixMarket: malformed entry '" + line + "'");
    t.push_back({i - 1, j - 1, v});
    if (symmetric && i != j) t.push_back({j - 1, i - 1, v});
    ++k;
  }
  return SparseMatrix(rows, cols, std::move(t));
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& a, bool symmetric) {
  auto t = a.triplets();
  if (symmetric) {
    std::erase_if(t, [](const Triplet& e) { return e.col > e.row; });
  }
  out << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general") << '\n';
  out << a.rows() << ' ' << a.cols() << ' ' << t.size() << '\n';
  out << std::setprecision(17);
  for (const auto& e : t) out << e.row + 1 << ' ' << e.col + 1 << ' ' << e.value << '\n';
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a, bool symmetric) {
  auto out = open_out(path);
  write_matrix_market(out, a, symmetric);
}

Vector read_vector(std::istream& in) {
  Vector v;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%' || line[first] == '#') continue;
    std::istringstream s(line);
    double x = 0.0;
    if (!(s >> x)) throw FormatError("vector: malformed line '" + line + "'");
    v.push_back(x);
  }
  return v;
}

Vector read_vector(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_vector(in);
}

void write_vector(std::ostream& out, std::span<const double> v) {
  out << std::setprecision(17);
  for (double x : v) out << x << '\n';
}

void write_vector(const std::filesystem::path& path, std::span<const double> v) {
  auto out = open_out(path);
  write_vector(out, v);
}

}  // namespace schwarz::io
