#include "gep/linalg/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace gep {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

SymmetricMatrix parse_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty input");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix" || format != "coordinate") {
    throw ParseError("only 'matrix coordinate' files are supported");
  }
  if (field != "real" && field != "integer" && field != "double") {
    throw ParseError("unsupported field '" + field + "'");
  }
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") {
    throw ParseError("unsupported symmetry qualifier '" + symmetry + "'");
  }

  std::size_t rows = 0, cols = 0, count = 0;
  bool have_size = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%' || is_blank(line)) continue;
    std::istringstream size_line(line);
    long long r = -1, c = -1, k = -1;
    if (!(size_line >> r >> c >> k) || r <= 0 || c <= 0 || k < 0) {
      throw ParseError("malformed size line '" + line + "'");
    }
    rows = static_cast<std::size_t>(r);
    cols = static_cast<std::size_t>(c);
    count = static_cast<std::size_t>(k);
    have_size = true;
    break;
  }
  if (!have_size) throw ParseError("missing size line");
  if (rows != cols) {
    throw NotSquare(std::to_string(rows) + " x " + std::to_string(cols));
  }
  const std::size_t n = rows;

  std::vector<Triplet> entries;
  entries.reserve(count);
  std::size_t seen = 0;
  while (seen < count && std::getline(in, line)) {
    if (line.empty() || line[0] == '%' || is_blank(line)) continue;
    std::istringstream entry(line);
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(entry >> i >> j >> v)) throw ParseError("malformed entry '" + line + "'");
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > n || static_cast<std::size_t>(j) > n) {
      throw ParseError("index out of range in '" + line + "'");
    }
    entries.push_back({static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), v});
    ++seen;
  }
  if (seen < count) {
    throw ParseError("expected " + std::to_string(count) + " entries, found " +
                     std::to_string(seen));
  }

  if (symmetric) {
    for (Triplet& t : entries) {
      if (t.col > t.row) std::swap(t.row, t.col);
    }
    return SymmetricMatrix::from_triplets(n, entries);
  }

  std::map<std::pair<std::size_t, std::size_t>, double> full;
  for (const Triplet& t : entries) full[{t.row, t.col}] += t.value;
  std::vector<Triplet> lower_entries;
  for (const auto& [key, v] : full) {
    const auto [i, j] = key;
    if (i == j) {
      lower_entries.push_back({i, j, v});
      continue;
    }
    const auto mirror = full.find({j, i});
    const double w = mirror == full.end() ? 0.0 : mirror->second;
    if (std::fabs(v - w) > 1e-12 * std::max(1.0, std::fabs(v))) {
      throw AsymmetricEntries("(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
    }
    if (i > j) lower_entries.push_back({i, j, v});
  }
  return SymmetricMatrix::from_triplets(n, lower_entries);
}

SymmetricMatrix read_matrix_market(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const SymmetricMatrix& m) {
  std::vector<Triplet> entries;
  for (std::size_t i = 0; i < m.size(); ++i) {
    m.for_each_lower(i, [&](std::size_t j, double v) {
      if (m.storage() == Storage::sparse || v != 0.0) entries.push_back({i, j, v});
    });
  }
  const auto precision = out.precision(17);
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << m.size() << ' ' << m.size() << ' ' << entries.size() << '\n';
  for (const Triplet& t : entries) out << t.row + 1 << ' ' << t.col + 1 << ' ' << t.value << '\n';
  out.precision(precision);
}

void write_matrix_market(const std::filesystem::path& path, const SymmetricMatrix& m) {
  auto out = open_output(path);
  write_matrix_market(out, m);
  if (!out) throw IoError("write failed for " + path.string());
}

SymmetricMatrix parse_dense_text(std::istream& in) {
  long long n = 0;
  if (!(in >> n)) throw ParseError("empty input");
  if (n <= 0) throw ParseError("matrix order must be positive");
  const auto order = static_cast<std::size_t>(n);
  Vector packed(order * (order + 1) / 2);
  for (double& v : packed) {
    if (!(in >> v)) throw ParseError("too few lower-triangle values");
  }
  std::string extra;
  if (in >> extra) throw ParseError("trailing data after lower triangle");
  return SymmetricMatrix::dense(order, std::move(packed));
}

SymmetricMatrix read_dense_text(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_dense_text(in);
}

void write_dense_text(const std::filesystem::path& path, const SymmetricMatrix& m) {
  auto out = open_output(path);
  out << m.size() << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) out << (j ? " " : "") << m(i, j);
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

SymmetricMatrix read_matrix(const std::filesystem::path& path) {
  auto in = open_input(path);
  char c = 0;
  while (in.get(c) && std::isspace(static_cast<unsigned char>(c))) {
  }
  in.clear();
  in.seekg(0);
  if (c == '%') return parse_matrix_market(in);
  return parse_dense_text(in);
}

}  // namespace gep
