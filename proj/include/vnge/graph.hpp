#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "vnge/error.hpp"

namespace vnge {

using Vertex = std::uint32_t;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  double w = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Weighted undirected simple graph.
///
/// Edges are stored once per unordered pair as (u, v, w) with u < v, sorted
/// lexicographically, and every stored weight is strictly positive. The
/// Laplacian L = S - W is implicit: S is the degree (strength) vector and the
/// off-diagonal entries are -w for each stored edge.
class Graph {
 public:
  Graph() = default;

  std::size_t num_vertices() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const double> degrees() const noexcept { return degrees_; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  friend Graph build_graph(std::size_t n, std::vector<Edge> raw_edges);

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> degrees_;
};

/// Per-vertex strength recomputed from an edge list, accumulating in edge order.
inline std::vector<double> strengths_from_edges(std::size_t n, std::span<const Edge> edges) {
  std::vector<double> s(n, 0.0);
  for (const auto& e : edges) {
    s[e.u] += e.w;
    s[e.v] += e.w;
  }
  return s;
}

/// Validates and canonicalizes an edge list. Endpoints are swapped so that
/// u < v, zero-weight edges are dropped, and the result is sorted.
inline Graph build_graph(std::size_t n, std::vector<Edge> raw_edges) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "graph needs at least one vertex");
  if (n > std::size_t{0xffffffffu}) throw Error(ErrorCode::InvalidArgument, "too many vertices");

  std::vector<Edge> edges;
  edges.reserve(raw_edges.size());
  for (auto e : raw_edges) {
    if (e.u >= n || e.v >= n) {
      throw Error(ErrorCode::VertexOutOfRange, "edge (" + std::to_string(e.u) + ", " +
                                                   std::to_string(e.v) + ") with n = " +
                                                   std::to_string(n));
    }
    if (e.u == e.v) throw Error(ErrorCode::SelfLoop, "vertex " + std::to_string(e.u));
    if (!(e.w >= 0.0)) {
      throw Error(ErrorCode::NegativeWeight, "edge (" + std::to_string(e.u) + ", " +
                                                 std::to_string(e.v) + ") weight " +
                                                 std::to_string(e.w));
    }
    if (e.w == 0.0) continue;
    if (e.u > e.v) std::swap(e.u, e.v);
    edges.push_back(e);
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  auto dup = std::adjacent_find(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.u == b.u && a.v == b.v;
  });
  if (dup != edges.end()) {
    throw Error(ErrorCode::DuplicateEdge,
                "(" + std::to_string(dup->u) + ", " + std::to_string(dup->v) + ")");
  }

  Graph g;
  g.n_ = n;
  g.degrees_ = strengths_from_edges(n, edges);
  g.edges_ = std::move(edges);
  return g;
}

/// tr(L), the sum of vertex strengths.
inline double trace_laplacian(const Graph& g) {
  double total = 0.0;
  for (double s : g.degrees()) total += s;
  return total;
}

struct EdgeListOptions {
  int indexing = 0;  // 0 or 1
  bool weighted = true;
  std::optional<std::size_t> num_vertices;
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r' || line[i] == ',')) ++i;
    std::size_t j = i;
    while (j < line.size() && !(line[j] == ' ' || line[j] == '\t' || line[j] == '\r' || line[j] == ',')) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  if constexpr (std::is_floating_point_v<T>) {
    if (first != last && *first == '+') ++first;
  }
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

// "# vertices N" pins the vertex count so trailing isolated vertices survive
// a write/read cycle.
inline std::optional<std::size_t> vertices_directive(std::string_view line) {
  auto fields = split_fields(line.substr(1));
  if (fields.size() == 2 && fields[0] == "vertices") {
    std::size_t n = 0;
    if (parse_number(fields[1], n)) return n;
  }
  return std::nullopt;
}

}  // namespace detail

/// Reads a whitespace-separated edge list ("u v" or "u v w" per line).
/// Lines starting with '#' or '%' are comments.
inline Graph read_edge_list(std::istream& in, const EdgeListOptions& options = {}) {
  if (options.indexing != 0 && options.indexing != 1) {
    throw Error(ErrorCode::InvalidArgument, "indexing must be 0 or 1");
  }
  std::vector<Edge> edges;
  std::optional<std::size_t> declared_n;
  std::size_t max_id_plus_one = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    auto first = view.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    view.remove_prefix(first);
    if (view[0] == '#' || view[0] == '%') {
      if (auto n = detail::vertices_directive(view)) declared_n = n;
      continue;
    }
    auto fields = detail::split_fields(view);
    if (fields.size() < 2 || fields.size() > 3) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 'u v [w]'");
    }
    std::uint64_t u = 0, v = 0;
    if (!detail::parse_number(fields[0], u) || !detail::parse_number(fields[1], v)) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad vertex id");
    }
    double w = 1.0;
    if (fields.size() == 3 && options.weighted && !detail::parse_number(fields[2], w)) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad weight");
    }
    if (options.indexing == 1) {
      if (u == 0 || v == 0) {
        throw Error(ErrorCode::VertexOutOfRange,
                    "line " + std::to_string(line_no) + ": vertex id 0 in a 1-indexed file");
      }
      --u;
      --v;
    }
    if (u >= 0xffffffffu || v >= 0xffffffffu) {
      throw Error(ErrorCode::VertexOutOfRange, "line " + std::to_string(line_no));
    }
    max_id_plus_one = std::max<std::size_t>(max_id_plus_one, std::max(u, v) + 1);
    edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v), w});
  }
  std::size_t n = options.num_vertices.value_or(declared_n.value_or(max_id_plus_one));
  return build_graph(std::max<std::size_t>(n, 1), std::move(edges));
}

inline Graph load_edge_list(const std::string& path, const EdgeListOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_edge_list(in, options);
}

/// Writes the 0-indexed weighted edge-list format, preceded by a
/// "# vertices N" directive.
inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# vertices " << g.num_vertices() << '\n';
  char buf[64];
  for (const auto& e : g.edges()) {
    std::snprintf(buf, sizeof buf, "%u %u %.17g\n", e.u, e.v, e.w);
    out << buf;
  }
}

}  // namespace vnge
