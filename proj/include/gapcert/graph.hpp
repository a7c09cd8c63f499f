#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gapcert/omp.hpp"

namespace gapcert {

using Vertex = int32_t;
using VertexSet = std::vector<Vertex>;  // always sorted, unique

class Graph {
 public:
  Graph() = default;
  // Builds from an edge list. Duplicate edges are merged; self-loops and
  // disconnected input throw std::invalid_argument.
  Graph(int32_t vertex_count, const std::vector<std::pair<Vertex, Vertex>>& edges);

  int32_t size() const { return static_cast<int32_t>(adj_.size()); }
  const std::vector<Vertex>& neighbors(Vertex u) const { return adj_[u]; }
  std::size_t edge_count() const;
  bool has_edge(Vertex u, Vertex v) const;

  // Single-source BFS distances (-1 never appears: the graph is connected).
  std::vector<int32_t> distances(Vertex src) const;

 private:
  std::vector<std::vector<Vertex>> adj_;
};

struct GrowthProfile {
  std::vector<int64_t> gamma;  // gamma[r] = max_u |ball(u, r)|, r = 0..diameter
  int32_t diameter = 0;
};

Graph read_edge_list(std::istream& in);
Graph load_edge_list(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);

VertexSet ball(const Graph& g, Vertex u, int32_t r);
VertexSet r_neighborhood(const Graph& g, const VertexSet& a, int32_t r);

GrowthProfile growth_profile(const Graph& g, Exec exec = Exec::Parallel);
int32_t diameter(const Graph& g);

// Per-vertex ball-size histogram: row u holds |ball(u, r)| for r = 0..ecc(u).
std::vector<std::vector<int64_t>> ball_sizes(const Graph& g, Exec exec = Exec::Parallel);

// Minimum distance between two vertex sets.
int32_t set_distance(const Graph& g, const VertexSet& x, const VertexSet& y);

Graph cycle_graph(int32_t n);
Graph path_graph(int32_t n);
Graph complete_graph(int32_t n);
// Periodic hypercubic lattice Z_L^d with nearest-neighbour edges.
Graph torus_grid(int32_t dims, int32_t side);

}  // namespace gapcert
