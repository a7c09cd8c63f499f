#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gapcert/filters.hpp"
#include "gapcert/operators.hpp"
#include "gapcert/stabilizer.hpp"

namespace gapcert {

// H0 = sum_g (I - g) / 2 over the code's generators.
PauliSum build_H0(const StabilizerCode& code);

struct FieldSpec {
  double h_x = 0.0, h_z = 0.0;
  double strength() const { return std::fabs(h_x) + std::fabs(h_z); }
};

// V = sum_i (h_x X_i + h_z Z_i).
PauliSum build_perturbation(int n_qubits, const FieldSpec& field);

// Dense projectors (n <= kDenseMaxQubits).
CMat generators_projector(const StabilizerCode& code, const std::vector<std::size_t>& gens);
CMat ground_projector(const StabilizerCode& code);
// Projector of the generators supported inside `region`.
CMat region_projector(const StabilizerCode& code, const VertexSet& region);

struct Sector {
  std::vector<uint8_t> syndrome;  // 1 = generator violated
  int weight = 0;
  CMat projector;
};

// All nonzero P_lambda = prod_g (I + (-1)^lambda_g g) / 2. Dependent generators make
// the other syndromes vanish; they are skipped.
std::vector<Sector> sector_projectors(const StabilizerCode& code);

// E_{u,i} = P_{B_u(i-1)} - P_{B_u(i)} for i = 1 .. ecc(u); the last ball is the whole graph,
// so the sum is P_{B_u(0)} - P.
std::vector<CMat> defect_filtration(const StabilizerCode& code, Vertex u, const Graph& g);

struct SpectrumTrace {
  std::vector<double> s;
  std::vector<std::vector<double>> levels;  // per s, lowest m, ascending
  int ground_degeneracy = 0;                // zeros of H0 among its lowest m levels
  bool degeneracy_resolved = true;          // false when all m levels of H0 were zero
  // (s index, level) pairs where a level moved more than ||V|| ds between neighbours.
  std::vector<std::pair<std::size_t, std::size_t>> jumps;
};

SpectrumTrace spectrum_trace(const PauliSum& h0, const PauliSum& v, const std::vector<double>& s_grid, std::size_t m,
                             const LowestOptions& opt = {}, Exec exec = Exec::Parallel);

struct IntervalReport {
  bool contained = true;
  std::size_t violations = 0;
  double shift = 0.0;         // subtracted from every level first
  double min_bJ = 0.0;        // smallest bJ that works with the given delta (inf if none)
  double min_delta = 0.0;     // smallest delta that works with the given bJ
};

// Membership of every level in the union over k >= 0 of [k(1-bJ) - delta, k(1+bJ) + delta].
IntervalReport interval_check(const std::vector<double>& levels, double bJ, double delta, double shift = 0.0);
IntervalReport interval_check(const SpectrumTrace& trace, double bJ, double delta, bool shift_to_ground = false);

struct DenseRegionReport {
  VertexSet region;
  bool indistinguishable = true;
  double max_violation = 0.0;  // worst ||<i|O|j> - c delta_ij|| over the tested set
  std::size_t code_dim = 0;    // rank of P_B on b_1(A)
  bool pauli_enumeration = false;
  std::optional<PauliString> witness;  // only from the Pauli enumeration
};

// Checks P_B O P_B = c P_B on B = b_1(A) for every operator O on A at once: it holds for all O
// iff the reduced operators tr_{B\A} |psi_j><psi_i| equal delta_ij sigma on a basis of the
// range of P_B. With enumerate_paulis (|A| <= 8) the 4^|A| Pauli basis is also iterated and the
// worst Pauli is returned as a witness.
DenseRegionReport indist_dense_check(const StabilizerCode& code, const VertexSet& a, const Graph& g,
                                     bool enumerate_paulis = false, double tol = 1e-9);

struct LcgcReport {
  bool applicable = true;  // A indistinguishable and every C contains b_1(A)
  double norm_global = 0.0;
  std::vector<double> norm_regions;
  double max_abs_diff = 0.0;
  bool holds = true;
};

// ||O P|| against ||O P_C|| for each C. `o` acts on the qubits of `a` in local bit order.
LcgcReport lcgc_check(const StabilizerCode& code, const VertexSet& a, const CMat& o,
                      const std::vector<VertexSet>& c_list, const Graph& g, double tol = 1e-9);

struct RelboundReport {
  double b = 0.0;
  double measured_ratio = 0.0;  // max ||W psi|| / ||H0 psi|| over random psi
  bool kernel_ok = true;        // W vanishes on ker H0
  bool contained = true;        // every level of H0 + W in some [(1-b) l, (1+b) l]
  double worst_excess = 0.0;    // largest distance outside the intervals
};

// W = H0 M H0 with M a random Hermitian matrix scaled so that ||H0 M|| = b, which gives
// ||W psi|| <= b ||H0 psi||. `inject` adds inject * |g><g| for a ground vector g (negative control).
RelboundReport relbound_check(const CMat& h0, double b, uint64_t seed, double inject = 0.0, double tol = 1e-9);

// Exact quasi-adiabatic generator D = int W(t) e^{iHt} dH e^{-iHt} dt, which in the eigenbasis
// of H is D_ij = W~(E_j - E_i) dH_ij.
CMat qac_generator(const EigenResult& eig, const CMat& dh, const TransferCache& wt);

struct FlowOptions {
  int steps = 1000;
  std::size_t ground_dim = 0;     // 0: the number of zero levels of H0
  double min_gap_required = 0.5;  // the transport statement needs this gap along the path
  int sign = +1;                  // dU/ds = sign * i D U; -1 only as a negative control
};

struct FlowReport {
  CMat U;
  double residual = 0.0;  // ||U^dag P(s_end) U - P(0)||
  double min_gap = 0.0;   // min over evaluated s of E_M - E_{M-1}
  bool checked = true;    // false when the gap condition failed somewhere
  double unitarity_error = 0.0;
};

// RK4 on dU/ds = i D_s U for H_s = H0 + s V. Throws if levels collide across the cut.
FlowReport qac_flow(const CMat& h0, const CMat& v, double s_end, const FlowOptions& opt, const TransferCache& wt);

struct ExpTailBound {
  double mu = 1.0;
  double J = 0.0;  // perturbation strength
  double s = 1.0;
};

struct EtaTailBound {
  double c = 1.0, J = 0.0, a = 1.0 / 14.0, b = 1.0;
  int m = 0, n = 0;
};

using LrBoundModel = std::variant<ExpTailBound, EtaTailBound>;

struct LrSample {
  double t, norm, bound;
};

struct LrProfile {
  std::vector<LrSample> samples;
  bool below_bound = true;
  double velocity = 0.0;
  int32_t distance = 0;
};

// Velocity of the bound for growth profile gamma (gamma(r) = gamma.back() beyond its end).
double lr_velocity(const LrBoundModel& model, const std::vector<int64_t>& gamma);

// g(t) = ||[e^{iHt} A e^{-iHt}, B]|| against 2 ||A|| ||B|| |X| F(t, d(X, Y)). A and B are full
// operators with supports x and y. H is dense and Hermitian.
LrProfile lr_profile(const CMat& h, const CMat& a, const VertexSet& x, const CMat& b, const VertexSet& y,
                     const Graph& g, const std::vector<double>& t_grid, const LrBoundModel& model);

struct LocalPiece {
  int32_t r = 0;
  VertexSet ball;
  CMat op;                  // O_{u,r} on the ball's qubits
  double norm = 0.0;
  double tail_error = 0.0;  // ||O - O'_{u,r}||
};

// O = sum_r O_{u,r} with O'_{u,r} the normalised partial trace onto ball(u, r) and
// O_{u,r} = O'_{u,r} - O'_{u,r-1}. `o` acts on all g.size() qubits.
std::vector<LocalPiece> local_decomposition(const CMat& o, Vertex u, const Graph& g);

}  // namespace gapcert
