#include "sep/graph_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace sep {

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write to " + path.string() + " failed");
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_u32(std::string_view s, NodeId& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_f64(std::string_view s, double& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Graph parse_edge_list(const std::string& text, bool weighted) {
  std::vector<Edge> edges;
  std::size_t max_id = 0;
  bool any_node = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line(text.data() + pos,
                          (nl == std::string::npos ? text.size() : nl) - pos);
    pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
    ++line_no;

    auto fields = split_ws(line);
    if (fields.empty() || fields[0].front() == '#') continue;
    if (fields.size() < 2 || fields.size() > 3)
      throw ParseError("edge list line " + std::to_string(line_no) +
                       ": expected 'u v [w]', got " + std::to_string(fields.size()) +
                       " fields");
    Edge e;
    if (!parse_u32(fields[0], e.u) || !parse_u32(fields[1], e.v))
      throw ParseError("edge list line " + std::to_string(line_no) +
                       ": node ids must be nonnegative integers");
    e.w = 1.0;
    if (weighted && fields.size() == 3) {
      if (!parse_f64(fields[2], e.w))
        throw ParseError("edge list line " + std::to_string(line_no) +
                         ": bad weight '" + std::string(fields[2]) + "'");
      if (e.w < 0.0)
        throw DomainError("edge list line " + std::to_string(line_no) +
                          ": negative weight");
    }
    any_node = true;
    max_id = std::max<std::size_t>(max_id, std::max(e.u, e.v));
    edges.push_back(e);
  }

  std::size_t n = any_node ? max_id + 1 : 0;
  return Graph::from_edges(n, std::move(edges));
}

Graph load_edge_list(const std::filesystem::path& path, bool weighted) {
  return parse_edge_list(read_file(path), weighted);
}

std::string format_edge_list(const Graph& g) {
  std::string out;
  for (const Edge& e : g.edges()) {
    out += std::to_string(e.u);
    out += ' ';
    out += std::to_string(e.v);
    out += ' ';
    out += format_double(e.w);
    out += '\n';
  }
  return out;
}

void save_edge_list(const Graph& g, const std::filesystem::path& path) {
  write_file(path, format_edge_list(g));
}

FeatureMatrix parse_features_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool first_data_line = true;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line(text.data() + pos,
                          (nl == std::string::npos ? text.size() : nl) - pos);
    pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty()) continue;

    std::vector<double> vals;
    bool numeric = true;
    std::size_t i = 0;
    while (i <= line.size()) {
      std::size_t comma = line.find(',', i);
      std::string_view field = line.substr(i, (comma == std::string_view::npos ? line.size() : comma) - i);
      while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
      while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
      double v = 0.0;
      if (!parse_f64(field, v)) {
        numeric = false;
        break;
      }
      vals.push_back(v);
      if (comma == std::string_view::npos) break;
      i = comma + 1;
    }
    if (!numeric) {
      if (first_data_line) {  // header row
        first_data_line = false;
        continue;
      }
      throw ParseError("features line " + std::to_string(line_no) + ": non-numeric field");
    }
    first_data_line = false;
    if (!rows.empty() && vals.size() != rows.front().size())
      throw ParseError("features line " + std::to_string(line_no) + ": expected " +
                       std::to_string(rows.front().size()) + " columns, got " +
                       std::to_string(vals.size()));
    rows.push_back(std::move(vals));
  }

  FeatureMatrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m.at(r, c) = rows[r][c];
  return m;
}

FeatureMatrix load_features_csv(const std::filesystem::path& path) {
  return parse_features_csv(read_file(path));
}

std::string format_features_csv(const FeatureMatrix& m) {
  std::string out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m.at(r, c));
    }
    out += '\n';
  }
  return out;
}

void save_features_csv(const FeatureMatrix& m, const std::filesystem::path& path) {
  write_file(path, format_features_csv(m));
}

}  // namespace sep
