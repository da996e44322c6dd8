#include "tvgm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace tvgm {

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, delim)) cells.push_back(cell);
  if (!line.empty() && line.back() == delim) cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

bool parse_number(const std::string& text, double& value) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end && std::isfinite(value);
}

struct ColumnRef {
  int subject;  // 0 = x / s1, 1 = y / s2, ...
  int index;    // 1-based variable index
};

// Accepts "x3", "y12", "s2_7".
bool parse_column_name(const std::string& name, Layout& layout, ColumnRef& ref) {
  if (name.size() < 2) return false;
  try {
    if (name[0] == 'x' || name[0] == 'y') {
      std::size_t used = 0;
      ref.index = std::stoi(name.substr(1), &used);
      if (used != name.size() - 1) return false;
      ref.subject = name[0] == 'x' ? 0 : 1;
      layout = Layout::paired;
      return true;
    }
    if (name[0] == 's') {
      const auto us = name.find('_');
      if (us == std::string::npos) return false;
      std::size_t used = 0;
      ref.subject = std::stoi(name.substr(1, us - 1), &used) - 1;
      if (used != us - 1) return false;
      ref.index = std::stoi(name.substr(us + 1), &used);
      if (used != name.size() - us - 1) return false;
      layout = Layout::multi_subject;
      return true;
    }
  } catch (const std::exception&) {
    return false;
  }
  return false;
}

}  // namespace

// Shortest text that reads back to the same double.
std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

AnyDataset load_dataset(std::istream& in, Layout layout) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("dataset is empty; expected a header row");
  const char delim = header.find('\t') != std::string::npos ? '\t' : ',';
  const auto names = split(header, delim);
  if (names.size() < 3) throw ParseError("header needs a time column and at least two data columns");

  Layout detected = Layout::automatic;
  std::vector<ColumnRef> refs;
  int subjects = 0;
  int d = 0;
  for (std::size_t c = 1; c < names.size(); ++c) {
    Layout kind = Layout::automatic;
    ColumnRef ref{};
    const std::string name = trim(names[c]);
    if (!parse_column_name(name, kind, ref) || ref.index < 1 || ref.subject < 0)
      throw ParseError("header column " + std::to_string(c + 1) + " ('" + name +
                       "') is not of the form x<j>, y<j> or s<l>_<j>");
    if (detected == Layout::automatic) detected = kind;
    if (kind != detected)
      throw ParseError("header mixes paired (x/y) and multi-subject (s<l>_<j>) columns");
    refs.push_back(ref);
    subjects = std::max(subjects, ref.subject + 1);
    d = std::max(d, ref.index);
  }
  if (layout != Layout::automatic && layout != detected)
    throw ParseError("header layout does not match the requested layout");
  if (static_cast<std::size_t>(subjects) * d != refs.size())
    throw ParseError("header lists " + std::to_string(refs.size()) + " data columns but " +
                     std::to_string(subjects) + " groups of " + std::to_string(d) +
                     " were implied");
  std::map<std::pair<int, int>, int> seen;
  for (std::size_t c = 0; c < refs.size(); ++c)
    if (!seen.emplace(std::make_pair(refs[c].subject, refs[c].index), 1).second)
      throw ParseError("header column '" + trim(names[c + 1]) + "' is duplicated");

  std::vector<double> z;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, delim);
    const std::size_t row = rows.size() + 1;
    if (cells.size() != names.size())
      throw ParseError("row " + std::to_string(row) + " (line " + std::to_string(line_no) +
                       ") has " + std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(names.size()));
    std::vector<double> values(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      if (!parse_number(cells[c], values[c]))
        throw ParseError("row " + std::to_string(row) + " (line " + std::to_string(line_no) +
                         "), column '" + trim(names[c]) + "': '" + trim(cells[c]) +
                         "' is not a finite number");
    z.push_back(values[0]);
    rows.push_back(std::move(values));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n < 2) throw ParseError("dataset has " + std::to_string(n) + " rows; need n >= 2");

  Vector zv = Eigen::Map<Vector>(z.data(), n);
  normalize_time(zv);
  std::vector<Matrix> blocks(subjects, Matrix(n, d));
  for (Eigen::Index i = 0; i < n; ++i)
    for (std::size_t c = 0; c < refs.size(); ++c)
      blocks[refs[c].subject](i, refs[c].index - 1) = rows[i][c + 1];

  if (detected == Layout::paired) {
    if (subjects != 2) throw ParseError("paired layout needs both x and y columns");
    PairedDataset ds{zv, std::move(blocks[0]), std::move(blocks[1])};
    ds.validate();
    return ds;
  }
  MultiSubjectDataset ds{zv, std::move(blocks)};
  ds.validate();
  return ds;
}

AnyDataset load_dataset_file(const std::string& path, Layout layout) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset file '" + path + "'");
  return load_dataset(in, layout);
}

PairedDataset load_paired_file(const std::string& path) {
  AnyDataset any = load_dataset_file(path);
  if (auto* paired = std::get_if<PairedDataset>(&any)) return std::move(*paired);
  // Multi-subject input: split subjects into two halves and average each.
  auto& multi = std::get<MultiSubjectDataset>(any);
  const std::size_t half = multi.subjects.size() / 2;
  PairedDataset ds;
  ds.z = multi.z;
  ds.x = Matrix::Zero(multi.n(), multi.d());
  ds.y = Matrix::Zero(multi.n(), multi.d());
  for (std::size_t s = 0; s < multi.subjects.size(); ++s)
    (s < half ? ds.x : ds.y) += multi.subjects[s];
  ds.x /= static_cast<double>(half);
  ds.y /= static_cast<double>(multi.subjects.size() - half);
  return ds;
}

void write_dataset(std::ostream& out, const PairedDataset& ds) {
  out << "z";
  for (Eigen::Index j = 1; j <= ds.d(); ++j) out << ",x" << j;
  for (Eigen::Index j = 1; j <= ds.d(); ++j) out << ",y" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    out << format_double(ds.z(i));
    for (Eigen::Index j = 0; j < ds.d(); ++j) out << ',' << format_double(ds.x(i, j));
    for (Eigen::Index j = 0; j < ds.d(); ++j) out << ',' << format_double(ds.y(i, j));
    out << '\n';
  }
}

void write_dataset(std::ostream& out, const MultiSubjectDataset& ds) {
  out << "z";
  for (std::size_t s = 1; s <= ds.subjects.size(); ++s)
    for (Eigen::Index j = 1; j <= ds.d(); ++j) out << ",s" << s << '_' << j;
  out << '\n';
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    out << format_double(ds.z(i));
    for (const Matrix& m : ds.subjects)
      for (Eigen::Index j = 0; j < ds.d(); ++j) out << ',' << format_double(m(i, j));
    out << '\n';
  }
}

void write_matrix(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Matrix read_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(line, line.find('\t') != std::string::npos ? '\t' : ',');
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      if (!parse_number(cells[c], row[c]))
        throw ParseError("matrix row " + std::to_string(rows.size() + 1) + ", column " +
                         std::to_string(c + 1) + " is not a finite number");
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("matrix row " + std::to_string(rows.size() + 1) + " is ragged");
    rows.push_back(std::move(row));
  }
  Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_edge_list(std::ostream& out, const EdgeSet& es) {
  for (const Edge& e : es) out << e.u + 1 << ' ' << e.v + 1 << '\n';
}

EdgeSet read_edge_list(std::istream& in, int d) {
  EdgeSet es(d);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream fields(t);
    long j = 0, k = 0;
    std::string rest;
    if (!(fields >> j >> k) || (fields >> rest) || j < 1 || k < 1 || j > d || k > d || j == k)
      throw ParseError("edge list line " + std::to_string(line_no) + ": '" + t +
                       "' is not a valid 1-based pair for d = " + std::to_string(d));
    es.insert({static_cast<int>(j - 1), static_cast<int>(k - 1)});
  }
  return es;
}

void write_edge_lists(std::ostream& out, const std::vector<double>& z,
                      const std::vector<EdgeSet>& sets) {
  if (z.size() != sets.size()) throw DataError("edge list count does not match the time grid");
  for (std::size_t g = 0; g < z.size(); ++g) {
    out << "# z=" << format_double(z[g]) << '\n';
    write_edge_list(out, sets[g]);
  }
}

std::vector<std::pair<double, EdgeSet>> read_edge_lists(std::istream& in, int d) {
  std::vector<std::pair<double, EdgeSet>> out;
  std::string line;
  std::string block;
  double z = 0.0;
  bool open = false;
  auto flush = [&] {
    if (!open) return;
    std::istringstream body(block);
    out.emplace_back(z, read_edge_list(body, d));
    block.clear();
  };
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.rfind("# z=", 0) == 0) {
      flush();
      if (!parse_number(t.substr(4), z)) throw ParseError("bad section header '" + t + "'");
      open = true;
    } else if (!t.empty() && t[0] != '#') {
      if (!open) throw ParseError("edge line '" + t + "' precedes the first '# z=' header");
      block += t + '\n';
    }
  }
  flush();
  return out;
}

void write_column(std::ostream& out, const std::string& header,
                  const std::vector<double>& values) {
  out << header << '\n';
  for (double v : values) out << format_double(v) << '\n';
}

std::vector<double> read_column(std::istream& in) {
  std::string line;
  std::getline(in, line);
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    double v = 0.0;
    if (!parse_number(line, v))
      throw ParseError("column value '" + trim(line) + "' is not a finite number");
    values.push_back(v);
  }
  return values;
}

}  // namespace tvgm
