#include "gapcert/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gapcert {

Graph::Graph(int32_t vertex_count, const std::vector<std::pair<Vertex, Vertex>>& edges) {
  if (vertex_count <= 0) throw std::invalid_argument("graph: vertex count must be positive");
  adj_.assign(vertex_count, {});
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count)
      throw std::invalid_argument("graph: vertex id out of range");
    if (u == v) throw std::invalid_argument("graph: self-loop at " + std::to_string(u));
    adj_[u].push_back(v);
    adj_[v].push_back(u);
  }
  for (auto& row : adj_) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  auto d = distances(0);
  if (std::find(d.begin(), d.end(), -1) != d.end())
    throw std::invalid_argument("graph: disconnected");
}

std::size_t Graph::edge_count() const {
  std::size_t m = 0;
  for (const auto& row : adj_) m += row.size();
  return m / 2;
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  const auto& row = adj_[u];
  return std::binary_search(row.begin(), row.end(), v);
}

std::vector<int32_t> Graph::distances(Vertex src) const {
  std::vector<int32_t> dist(adj_.size(), -1);
  std::vector<Vertex> queue{src};
  dist[src] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Vertex u = queue[head];
    for (Vertex v : adj_[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

Graph read_edge_list(std::istream& in) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  Vertex max_id = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    long long u, v;
    if (!(ls >> u)) continue;
    if (!(ls >> v) || u < 0 || v < 0)
      throw std::invalid_argument("edge list: bad line " + std::to_string(lineno));
    std::string rest;
    if (ls >> rest) throw std::invalid_argument("edge list: trailing data on line " + std::to_string(lineno));
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    max_id = std::max<Vertex>(max_id, static_cast<Vertex>(std::max(u, v)));
  }
  if (edges.empty()) throw std::invalid_argument("edge list: no edges");
  return Graph(max_id + 1, edges);
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  for (Vertex u = 0; u < g.size(); ++u)
    for (Vertex v : g.neighbors(u))
      if (u < v) out << u << ' ' << v << '\n';
}

VertexSet ball(const Graph& g, Vertex u, int32_t r) {
  if (u < 0 || u >= g.size()) throw std::out_of_range("ball: invalid vertex");
  if (r < 0) throw std::invalid_argument("ball: negative radius");
  return r_neighborhood(g, {u}, r);
}

VertexSet r_neighborhood(const Graph& g, const VertexSet& a, int32_t r) {
  if (a.empty()) throw std::invalid_argument("r_neighborhood: empty set");
  if (r < 0) throw std::invalid_argument("r_neighborhood: negative radius");
  std::vector<int32_t> dist(g.size(), -1);
  std::vector<Vertex> queue;
  for (Vertex u : a) {
    if (u < 0 || u >= g.size()) throw std::out_of_range("r_neighborhood: invalid vertex");
    if (dist[u] < 0) {
      dist[u] = 0;
      queue.push_back(u);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Vertex u = queue[head];
    if (dist[u] == r) continue;
    for (Vertex v : g.neighbors(u)) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  std::sort(queue.begin(), queue.end());
  return queue;
}

namespace {

std::vector<int64_t> shell_counts(const Graph& g, Vertex u) {
  auto dist = g.distances(u);
  int32_t ecc = *std::max_element(dist.begin(), dist.end());
  std::vector<int64_t> sizes(ecc + 1, 0);
  for (int32_t d : dist) ++sizes[d];
  for (int32_t r = 1; r <= ecc; ++r) sizes[r] += sizes[r - 1];
  return sizes;
}

}  // namespace

std::vector<std::vector<int64_t>> ball_sizes(const Graph& g, Exec exec) {
  const int32_t n = g.size();
  std::vector<std::vector<int64_t>> out(n);
  if (exec == Exec::Serial) {
    for (Vertex u = 0; u < n; ++u) out[u] = shell_counts(g, u);
  } else {
    GAPCERT_OMP("omp parallel for schedule(dynamic, 16)")
    for (Vertex u = 0; u < n; ++u) out[u] = shell_counts(g, u);
  }
  return out;
}

GrowthProfile growth_profile(const Graph& g, Exec exec) {
  const int32_t n = g.size();
  GrowthProfile gp;
  if (exec == Exec::Serial) {
    for (Vertex u = 0; u < n; ++u) {
      auto s = shell_counts(g, u);
      if (s.size() > gp.gamma.size()) gp.gamma.resize(s.size(), 0);
      for (std::size_t r = 0; r < s.size(); ++r) gp.gamma[r] = std::max(gp.gamma[r], s[r]);
    }
  } else {
    GAPCERT_OMP("omp parallel")
    {
      std::vector<int64_t> local;
      GAPCERT_OMP("omp for schedule(dynamic, 16) nowait")
      for (Vertex u = 0; u < n; ++u) {
        auto s = shell_counts(g, u);
        if (s.size() > local.size()) local.resize(s.size(), 0);
        for (std::size_t r = 0; r < s.size(); ++r) local[r] = std::max(local[r], s[r]);
      }
      GAPCERT_OMP("omp critical")
      {
        if (local.size() > gp.gamma.size()) gp.gamma.resize(local.size(), 0);
        for (std::size_t r = 0; r < local.size(); ++r) gp.gamma[r] = std::max(gp.gamma[r], local[r]);
      }
    }
  }
  // Vertices with smaller eccentricity already cover the graph at larger radii.
  for (std::size_t r = 1; r < gp.gamma.size(); ++r)
    gp.gamma[r] = std::max(gp.gamma[r], gp.gamma[r - 1]);
  for (auto& v : gp.gamma) v = std::min<int64_t>(v, n);
  gp.diameter = static_cast<int32_t>(gp.gamma.size()) - 1;
  return gp;
}

int32_t diameter(const Graph& g) { return growth_profile(g).diameter; }

int32_t set_distance(const Graph& g, const VertexSet& x, const VertexSet& y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("set_distance: empty set");
  std::vector<int32_t> dist(g.size(), -1);
  std::vector<Vertex> queue;
  for (Vertex u : x) {
    if (dist[u] < 0) {
      dist[u] = 0;
      queue.push_back(u);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Vertex u = queue[head];
    for (Vertex v : g.neighbors(u)) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  int32_t best = g.size();
  for (Vertex v : y) best = std::min(best, dist[v]);
  return best;
}

Graph cycle_graph(int32_t n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph(n, e);
}

Graph path_graph(int32_t n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, e);
}

Graph complete_graph(int32_t n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, e);
}

Graph torus_grid(int32_t dims, int32_t side) {
  if (dims < 1 || side < 2) throw std::invalid_argument("torus_grid: need dims >= 1, side >= 2");
  int64_t total = 1;
  for (int32_t k = 0; k < dims; ++k) total *= side;
  std::vector<std::pair<Vertex, Vertex>> e;
  for (int64_t v = 0; v < total; ++v) {
    int64_t stride = 1;
    for (int32_t k = 0; k < dims; ++k) {
      int64_t coord = (v / stride) % side;
      int64_t w = v + (((coord + 1) % side) - coord) * stride;
      e.emplace_back(static_cast<Vertex>(v), static_cast<Vertex>(w));
      stride *= side;
    }
  }
  return Graph(static_cast<int32_t>(total), e);
}

}  // namespace gapcert
