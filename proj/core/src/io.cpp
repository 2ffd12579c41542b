#include "decs/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "decs/error.hpp"

namespace decs::io {
namespace {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string strip_quotes(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view field) {
  field = trim(field);
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) return std::nullopt;
  return v;
}

model::Dataset parse_dataset_csv(std::istream& in) {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t width = 0;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw InvalidInput("CSV line " + std::to_string(line_no) + ": expected " +
                         std::to_string(width) + " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    bool numeric = true;
    for (const auto& f : fields) {
      auto v = parse_double(f);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (names.empty() && rows.empty()) {
        for (const auto& f : fields) names.push_back(strip_quotes(f));
        continue;
      }
      throw InvalidInput("CSV line " + std::to_string(line_no) + ": non-numeric field");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput("CSV contains no observations");

  Matrix values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) values(i, j) = rows[i][j];
  }
  return model::Dataset(std::move(values), std::move(names));
}

model::Dataset read_dataset_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const model::Dataset& data) {
  if (data.has_names()) {
    for (int j = 0; j < data.cols(); ++j) out << (j ? "," : "") << data.names()[j];
    out << '\n';
  }
  const Matrix& v = data.values();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) out << (j ? "," : "") << format_double(v(i, j));
    out << '\n';
  }
}

void write_dataset_csv(const std::filesystem::path& path, const model::Dataset& data) {
  auto out = open_out(path);
  write_dataset_csv(out, data);
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<double> row;
    if (!trim(line).empty()) {
      for (const auto& f : split(line, ',')) {
        auto v = parse_double(f);
        if (!v) throw InvalidInput("matrix CSV '" + path.string() + "': non-numeric field");
        row.push_back(*v);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InvalidInput("matrix CSV '" + path.string() + "': ragged rows");
    }
    rows.push_back(std::move(row));
  }
  const Eigen::Index cols = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  Matrix m(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<RawEdge> parse_edge_list(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("edge list: empty file");
  const auto header = split(trim(line), '\t');
  if (header.size() < 2 || header[0] != "source" || header[1] != "target") {
    throw InvalidInput("edge list: expected header 'source<TAB>target<TAB>weight'");
  }
  std::vector<RawEdge> edges;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(trim(line), '\t');
    if (fields.size() < 2 || fields.size() > 3) {
      throw InvalidInput("edge list line " + std::to_string(line_no) + ": expected 2 or 3 fields");
    }
    RawEdge e{std::string(trim(fields[0])), std::string(trim(fields[1])), 1.0};
    if (fields.size() == 3) {
      auto w = parse_double(fields[2]);
      if (!w || !std::isfinite(*w)) {
        throw InvalidInput("edge list line " + std::to_string(line_no) + ": bad weight");
      }
      e.weight = *w;
    }
    edges.push_back(std::move(e));
  }
  return edges;
}

std::vector<RawEdge> read_edge_list(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_edge_list(in);
}

model::WeightedAdjacency resolve_edges(const std::vector<RawEdge>& edges, std::optional<int> dim,
                                       const std::vector<std::string>& names) {
  std::unordered_map<std::string, int> by_name;
  for (std::size_t i = 0; i < names.size(); ++i) by_name.emplace(names[i], static_cast<int>(i));

  auto resolve = [&](const std::string& token) -> int {
    if (auto it = by_name.find(token); it != by_name.end()) return it->second;
    int id = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), id);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size() || id < 1) {
      throw InvalidInput("edge list: unknown node '" + token + "'");
    }
    return id - 1;
  };

  std::vector<std::tuple<int, int, double>> resolved;
  int max_id = -1;
  for (const auto& e : edges) {
    const int s = resolve(e.source);
    const int t = resolve(e.target);
    if (s == t) throw InvalidInput("edge list: self-loop at node '" + e.source + "'");
    max_id = std::max({max_id, s, t});
    resolved.emplace_back(s, t, e.weight);
  }
  const int p = dim.value_or(names.empty() ? max_id + 1 : static_cast<int>(names.size()));
  if (p < 1) throw InvalidInput("edge list: cannot infer graph dimension");
  if (max_id >= p) {
    throw InvalidInput("edge list: node id " + std::to_string(max_id + 1) +
                       " exceeds dimension " + std::to_string(p));
  }
  model::WeightedAdjacency w(p);
  for (const auto& [s, t, weight] : resolved) w.set(s, t, weight);
  return w;
}

void write_edge_list(std::ostream& out, const model::WeightedAdjacency& w, double threshold,
                     const std::vector<std::string>& names) {
  auto label = [&](int i) { return names.empty() ? std::to_string(i + 1) : names[i]; };
  out << "source\ttarget\tweight\n";
  for (const auto& e : model::edges_of(w, threshold)) {
    out << label(e.from) << '\t' << label(e.to) << '\t' << format_double(e.weight) << '\n';
  }
}

void write_edge_list(const std::filesystem::path& path, const model::WeightedAdjacency& w,
                     double threshold, const std::vector<std::string>& names) {
  auto out = open_out(path);
  write_edge_list(out, w, threshold, names);
}

std::string read_text(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace decs::io
