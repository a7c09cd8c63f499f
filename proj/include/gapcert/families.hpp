#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gapcert/graph.hpp"
#include "gapcert/stabilizer.hpp"

namespace gapcert {

// Closed quadrilateral surface. Faces list four edge ids in cyclic order.
// Parallel edges are allowed (the 2x2 torus has them); self-loops are not.
struct QuadComplex {
  int32_t n_vertices = 0;
  std::vector<std::pair<Vertex, Vertex>> edges;
  std::vector<std::array<int32_t, 4>> faces;

  int32_t euler_characteristic() const {
    return n_vertices - static_cast<int32_t>(edges.size()) + static_cast<int32_t>(faces.size());
  }
};

// Corner walk of a face: side s joins corners[s] and corners[(s+1)%4], and
// forward[s] says whether that edge is stored as (corners[s], corners[s+1]).
struct FaceCorners {
  std::array<Vertex, 4> corners;
  std::array<bool, 4> forward;
};

FaceCorners face_corners(const QuadComplex& cx, int32_t face);

// Throws std::invalid_argument unless every face is a 4-cycle of distinct
// edges, every edge borders exactly two faces, and the Euler characteristic
// is even and at most 2.
void validate(const QuadComplex& cx);

QuadComplex read_complex(std::istream& in);
QuadComplex load_complex(const std::string& path);
void write_complex(std::ostream& out, const QuadComplex& cx);

QuadComplex torus_complex(int32_t l1, int32_t l2);
// Replaces every face by an l x l grid.
QuadComplex subdivide(const QuadComplex& cx, int32_t l);

struct FamilyInstance {
  StabilizerCode code;
  Graph graph;
  std::string label;
  int32_t n = 0;
  int32_t k = 0;
  std::optional<int32_t> d;  // known from the construction, when it is
};

// Qubits on edges, Z on vertex stars, X on faces.
FamilyInstance surface_code_from_complex(const QuadComplex& cx, std::string label = "surface");
FamilyInstance toric_code(int32_t l1, int32_t l2);

// L^(d-2) toric(L,L) layers. Site (x_0..x_{d-1}) of the periodic hypercube
// hosts the two edge qubits h(x_0,x_1), v(x_0,x_1) of layer (x_2..x_{d-1});
// qubit id = 2*site + {0 for h, 1 for v}, sites numbered with x_0 fastest.
// The graph joins qubits on equal or adjacent sites plus the code's own edges.
FamilyInstance stacked_toric(int32_t d, int32_t l);

}  // namespace gapcert
