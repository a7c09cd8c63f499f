#include "gapcert/pauli.hpp"

#include <algorithm>
#include <stdexcept>

namespace gapcert {

std::vector<int32_t> PauliString::support() const {
  std::vector<int32_t> s;
  for (std::size_t q = 0; q < qubits(); ++q)
    if (acts_on(q)) s.push_back(static_cast<int32_t>(q));
  return s;
}

PauliString PauliString::parse(const std::string& text) {
  std::size_t start = 0;
  int sign = 1;
  if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
    sign = text[0] == '-' ? -1 : 1;
    start = 1;
  }
  PauliString p(text.size() - start);
  p.sign = sign;
  for (std::size_t i = start; i < text.size(); ++i) {
    std::size_t q = i - start;
    switch (text[i]) {
      case 'I': case '_': break;
      case 'X': p.x.set(q); break;
      case 'Z': p.z.set(q); break;
      case 'Y': p.x.set(q); p.z.set(q); break;
      default: throw std::invalid_argument(std::string("pauli: bad character '") + text[i] + "'");
    }
  }
  return p;
}

PauliString PauliString::single(std::size_t n, std::size_t q, char op) {
  PauliString p(n);
  if (op == 'X' || op == 'Y') p.x.set(q);
  if (op == 'Z' || op == 'Y') p.z.set(q);
  return p;
}

std::string PauliString::str() const {
  std::string s = sign < 0 ? "-" : "";
  for (std::size_t q = 0; q < qubits(); ++q) {
    bool xb = x.get(q), zb = z.get(q);
    s += xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
  }
  return s;
}

BitVec PauliString::symplectic() const {
  const std::size_t n = qubits();
  BitVec v(2 * n);
  for (std::size_t q = 0; q < n; ++q) {
    if (x.get(q)) v.set(q);
    if (z.get(q)) v.set(n + q);
  }
  return v;
}

PauliString PauliString::from_symplectic(const BitVec& v) {
  const std::size_t n = v.size() / 2;
  PauliString p(n);
  for (std::size_t q = 0; q < n; ++q) {
    if (v.get(q)) p.x.set(q);
    if (v.get(n + q)) p.z.set(q);
  }
  return p;
}

int symplectic_inner(const PauliString& p, const PauliString& q) {
  if (p.qubits() != q.qubits()) throw std::invalid_argument("symplectic_inner: size mismatch");
  return and_parity(p.x, q.z) ^ and_parity(p.z, q.x);
}

bool Gf2Basis::add(const BitVec& v) {
  BitVec r = reduce(v);
  std::size_t p = r.lowest();
  if (p >= ncols_) return false;
  for (auto& row : rows_)
    if (row.get(p)) row ^= r;
  auto pos = std::lower_bound(pivots_.begin(), pivots_.end(), p) - pivots_.begin();
  pivots_.insert(pivots_.begin() + pos, p);
  rows_.insert(rows_.begin() + pos, std::move(r));
  return true;
}

BitVec Gf2Basis::reduce(BitVec v) const {
  for (std::size_t i = 0; i < rows_.size(); ++i)
    if (v.get(pivots_[i])) v ^= rows_[i];
  return v;
}

std::size_t gf2_rank(const std::vector<BitVec>& rows, std::size_t ncols) {
  Gf2Basis b(ncols);
  for (const auto& r : rows) b.add(r);
  return b.rank();
}

std::vector<BitVec> gf2_nullspace(const std::vector<BitVec>& rows, std::size_t ncols) {
  Gf2Basis b(ncols);
  for (const auto& r : rows) b.add(r);
  const auto& piv = b.pivots();
  std::vector<BitVec> out;
  std::size_t next = 0;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (next < piv.size() && piv[next] == c) {
      ++next;
      continue;
    }
    BitVec v(ncols);
    v.set(c);
    for (std::size_t i = 0; i < piv.size(); ++i)
      if (b.rows()[i].get(c)) v.set(piv[i]);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace gapcert
