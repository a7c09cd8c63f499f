#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "gapcert/graph.hpp"
#include "gapcert/omp.hpp"
#include "gapcert/pauli.hpp"

namespace gapcert {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

constexpr int kDenseMaxQubits = 12;
constexpr int kSparseMaxQubits = 20;

// Basis index bit q is qubit q. Local operators on a qubit list use bit j for list[j].

struct PauliTerm {
  double coeff;
  PauliString op;
};

// Real combination of Pauli strings (hence Hermitian), applied without forming the matrix.
class PauliSum {
 public:
  explicit PauliSum(int n_qubits);

  int qubits() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }

  void add(double coeff, const PauliString& p);
  PauliSum& operator+=(const PauliSum& o);
  PauliSum scaled(double s) const;
  // sum |coeff|, an upper bound on the operator norm.
  double norm_bound() const;
  // Union of the supports of all non-identity terms.
  VertexSet support() const;

  // Row-parallel: each output entry is summed in the same order in both modes.
  void apply(const CMat& in, CMat& out, Exec exec = Exec::Parallel) const;
  CVec apply(const CVec& in, Exec exec = Exec::Parallel) const;
  // Only for real operators (every term has an even number of Y factors).
  void apply(const RMat& in, RMat& out, Exec exec = Exec::Parallel) const;
  bool is_real() const;
  CMat dense() const;

 private:
  struct Packed {
    uint64_t z;
    cplx factor;  // coeff * sign * i^{|x & z|}
  };
  struct Group {
    uint64_t x;
    std::vector<Packed> terms;
  };
  template <class Scalar>
  void apply_impl(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& in,
                  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& out, Exec exec) const;

  int n_;
  std::vector<PauliTerm> terms_;
  std::vector<Group> groups_;  // terms sharing an X pattern share a permutation
};

// Left-multiplies m (rows indexed by basis states of p.qubits() qubits) by the Pauli p.
void apply_pauli(const PauliString& p, CMat& m);
// m <- (I + sign p) m / 2.
void apply_pauli_projector(const PauliString& p, int sign, CMat& m);
// p restricted to the listed qubits, renumbered 0..|qubits|-1. Support outside is an error.
PauliString restrict_pauli(const PauliString& p, const VertexSet& qubits);

// Embeds an operator on `qubits` (local bit order) into n qubits as op (x) I.
CMat embed(const CMat& local, const VertexSet& qubits, int n);
// (1 / 2^|S|) tr_S(o) as an operator on `keep`, where S is the complement of keep.
CMat partial_average(const CMat& o, int n, const VertexSet& keep);

double spectral_norm(const CMat& m);
double hermiticity_error(const CMat& m);

struct EigenResult {
  Eigen::VectorXd values;  // ascending
  CMat vectors;            // columns; may be empty when only values were asked for
};

EigenResult dense_eigen(const CMat& h, bool with_vectors = true);

struct LowestOptions {
  std::size_t count = 4;
  std::size_t block = 0;  // 0: count + 4
  double tol = 1e-8;      // residual norm, relative to max(1, |lambda|)
  int max_iter = 1000;
  uint64_t seed = 1;
  int dense_max_qubits = kDenseMaxQubits;
};

// Lowest `count` eigenpairs: dense up to dense_max_qubits, block LOBPCG above.
EigenResult lowest_eigenpairs(const PauliSum& h, const LowestOptions& opt, Exec exec = Exec::Parallel);
// Always iterative; throws std::runtime_error if it does not converge.
EigenResult lobpcg(const PauliSum& h, const LowestOptions& opt, Exec exec = Exec::Parallel);

struct KrylovSpectrum {
  std::vector<double> values;   // distinct eigenvalues carrying weight in the start vector
  std::vector<double> weights;  // |<e|v0>|^2 per value
  bool invariant = false;       // the Krylov space closed, so `values` is the full set
};

// Lanczos with full reorthogonalisation from a random start. For an operator with few
// distinct eigenvalues the space closes after that many steps, giving all of them.
KrylovSpectrum krylov_distinct_spectrum(const PauliSum& h, uint64_t seed, int max_dim = 256,
                                        Exec exec = Exec::Parallel);

}  // namespace gapcert
