#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace gapcert {

class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t nbits) : n_(nbits), w_((nbits + 63) / 64, 0) {}

  std::size_t size() const { return n_; }
  bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool v = true) {
    if (v) w_[i >> 6] |= uint64_t{1} << (i & 63);
    else w_[i >> 6] &= ~(uint64_t{1} << (i & 63));
  }
  void flip(std::size_t i) { w_[i >> 6] ^= uint64_t{1} << (i & 63); }
  BitVec& operator^=(const BitVec& o) {
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
    return *this;
  }
  bool any() const {
    for (auto x : w_)
      if (x) return true;
    return false;
  }
  std::size_t popcount() const {
    std::size_t c = 0;
    for (auto x : w_) c += std::popcount(x);
    return c;
  }
  // Index of the lowest set bit, or size() when zero.
  std::size_t lowest() const {
    for (std::size_t k = 0; k < w_.size(); ++k)
      if (w_[k]) return k * 64 + std::countr_zero(w_[k]);
    return n_;
  }
  bool operator==(const BitVec& o) const { return n_ == o.n_ && w_ == o.w_; }
  const std::vector<uint64_t>& words() const { return w_; }
  std::vector<uint64_t>& words() { return w_; }

  friend bool and_parity(const BitVec& a, const BitVec& b) {
    uint64_t acc = 0;
    for (std::size_t k = 0; k < a.w_.size(); ++k) acc ^= a.w_[k] & b.w_[k];
    return std::popcount(acc) & 1;
  }

 private:
  std::size_t n_ = 0;
  std::vector<uint64_t> w_;
};

// Pauli operator sign * X^x Z^z (per qubit, with Y = iXZ when both bits are set).
// Phases beyond +-1 are not tracked.
struct PauliString {
  BitVec x, z;
  int sign = 1;

  PauliString() = default;
  explicit PauliString(std::size_t n) : x(n), z(n) {}

  std::size_t qubits() const { return x.size(); }
  bool acts_on(std::size_t q) const { return x.get(q) || z.get(q); }
  bool is_identity() const { return !x.any() && !z.any(); }
  std::vector<int32_t> support() const;
  std::size_t weight() const { return support().size(); }

  static PauliString parse(const std::string& text);
  static PauliString single(std::size_t n, std::size_t q, char op);
  std::string str() const;

  // Symplectic vector (x_0..x_{n-1}, z_0..z_{n-1}).
  BitVec symplectic() const;
  static PauliString from_symplectic(const BitVec& v);

  bool operator==(const PauliString& o) const { return x == o.x && z == o.z && sign == o.sign; }
};

// <x_p, z_q> + <z_p, x_q> mod 2; 0 iff p and q commute.
int symplectic_inner(const PauliString& p, const PauliString& q);

// Incrementally maintained reduced row echelon basis over GF(2). Each row's
// pivot is its lowest set column and is cleared from every other row, so
// membership tests and witnesses do not depend on insertion order of equal spans.
class Gf2Basis {
 public:
  explicit Gf2Basis(std::size_t ncols) : ncols_(ncols) {}
  std::size_t rank() const { return rows_.size(); }
  std::size_t cols() const { return ncols_; }
  // Returns true if v was independent and has been added.
  bool add(const BitVec& v);
  BitVec reduce(BitVec v) const;
  bool contains(const BitVec& v) const { return !reduce(v).any(); }
  const std::vector<BitVec>& rows() const { return rows_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }

 private:
  std::size_t ncols_;
  std::vector<BitVec> rows_;
  std::vector<std::size_t> pivots_;
};

std::size_t gf2_rank(const std::vector<BitVec>& rows, std::size_t ncols);

// Basis of {v : <row, v> = 0 for all rows}, one vector per free column (ascending).
std::vector<BitVec> gf2_nullspace(const std::vector<BitVec>& rows, std::size_t ncols);

}  // namespace gapcert
