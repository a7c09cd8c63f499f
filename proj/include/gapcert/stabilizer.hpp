#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gapcert/graph.hpp"
#include "gapcert/pauli.hpp"

namespace gapcert {

struct StabilizerCode {
  int32_t n_qubits = 0;
  std::vector<PauliString> generators;
};

// Throws std::invalid_argument on size mismatch, identity generators, or
// anticommuting pairs.
void validate(const StabilizerCode& code);

StabilizerCode read_code(std::istream& in);
StabilizerCode load_code(const std::string& path);
void write_code(std::ostream& out, const StabilizerCode& code);

// Lowest-index qubit in the generator's support.
Vertex anchor(const PauliString& g);

// Qubit adjacency induced by shared generator supports (may be disconnected).
std::vector<std::vector<Vertex>> qubit_adjacency(const StabilizerCode& code);
// Same adjacency as a Graph; disconnected codes are rejected.
Graph interaction_graph(const StabilizerCode& code);

int32_t num_logicals(const StabilizerCode& code);

struct DistanceResult {
  int32_t value = 0;
  bool exact = true;  // false: no logical of weight <= cap, value = cap + 1 is a lower bound
};

DistanceResult distance(const StabilizerCode& code, int32_t weight_cap, Exec exec = Exec::Parallel);

struct RegionReport {
  VertexSet region;
  bool indistinguishable = true;
  std::optional<PauliString> witness;
};

// Generators whose support lies inside `region`.
std::vector<std::size_t> generators_within(const StabilizerCode& code, const VertexSet& region);

RegionReport is_locally_indistinguishable(const StabilizerCode& code, const VertexSet& a, const Graph& g);

struct RadiusReport {
  int32_t rho = 1;
  bool flagged = false;        // even radius-0 balls fail; rho reported as 1
  bool capped = false;         // every radius below r_cap passed
  int32_t failing_radius = -1;
  Vertex failing_vertex = -1;
  std::optional<PauliString> witness;
};

RadiusReport indistinguishability_radius(const StabilizerCode& code, const Graph& g, int32_t r_cap);

}  // namespace gapcert
