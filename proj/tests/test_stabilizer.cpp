#include <set>
#include <sstream>

#include "doctest.h"
#include "gapcert/families.hpp"
#include "gapcert/stabilizer.hpp"

using namespace gapcert;

namespace {

StabilizerCode make(int n, std::initializer_list<const char*> gens) {
  StabilizerCode c{n, {}};
  for (auto g : gens) c.generators.push_back(PauliString::parse(g));
  return c;
}

bool commutes_with_all(const PauliString& p, const StabilizerCode& c, const std::vector<std::size_t>& which) {
  for (auto i : which)
    if (symplectic_inner(p, c.generators[i])) return false;
  return true;
}

// All elements of the group generated by `which`, as symplectic strings.
std::set<std::string> group_elements(const StabilizerCode& c, const std::vector<std::size_t>& which) {
  std::set<std::string> out{PauliString(c.n_qubits).str()};
  for (auto i : which) {
    std::set<std::string> next = out;
    for (const auto& s : out) {
      auto p = PauliString::parse(s);
      p.x ^= c.generators[i].x;
      p.z ^= c.generators[i].z;
      p.sign = 1;
      next.insert(p.str());
    }
    out.swap(next);
  }
  return out;
}

// Enumerates every Pauli of weight w and reports whether one is a nontrivial logical.
bool brute_logical_of_weight(const StabilizerCode& c, int w) {
  std::vector<std::size_t> all(c.generators.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto group = group_elements(c, all);
  const int n = c.n_qubits;
  std::vector<int> pos(w);
  for (int i = 0; i < w; ++i) pos[i] = i;
  while (true) {
    int combos = 1;
    for (int i = 0; i < w; ++i) combos *= 3;
    for (int m = 0; m < combos; ++m) {
      PauliString p(n);
      int code = m;
      for (int i = 0; i < w; ++i, code /= 3) {
        int op = code % 3;
        if (op != 1) p.x.set(pos[i]);
        if (op != 0) p.z.set(pos[i]);
      }
      if (commutes_with_all(p, c, all) && !group.count(p.str())) return true;
    }
    int i = w - 1;
    while (i >= 0 && pos[i] == n - w + i) --i;
    if (i < 0) return false;
    ++pos[i];
    for (int j = i + 1; j < w; ++j) pos[j] = pos[j - 1] + 1;
  }
}

int brute_distance(const StabilizerCode& c, int cap) {
  for (int w = 1; w <= cap; ++w)
    if (brute_logical_of_weight(c, w)) return w;
  return cap + 1;
}

// Indistinguishability by enumerating all 4^|A| Paulis and the group of S_B.
bool brute_indistinguishable(const StabilizerCode& c, const VertexSet& a, const Graph& g) {
  auto sb = generators_within(c, r_neighborhood(g, a, 1));
  auto group = group_elements(c, sb);
  const std::size_t total = std::size_t{1} << (2 * a.size());
  for (std::size_t m = 1; m < total; ++m) {
    PauliString p(c.n_qubits);
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (m >> (2 * j) & 1) p.x.set(a[j]);
      if (m >> (2 * j + 1) & 1) p.z.set(a[j]);
    }
    if (commutes_with_all(p, c, sb) && !group.count(p.str())) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("pauli parsing and symplectic product") {
  auto p = PauliString::parse("-XIZY");
  CHECK(p.sign == -1);
  CHECK(p.str() == "-XIZY");
  CHECK(p.support() == std::vector<int32_t>{0, 2, 3});
  CHECK(PauliString::from_symplectic(p.symplectic()).str() == "XIZY");
  CHECK_THROWS(PauliString::parse("XQ"));
  CHECK(symplectic_inner(PauliString::parse("XI"), PauliString::parse("ZI")) == 1);
  CHECK(symplectic_inner(PauliString::parse("XI"), PauliString::parse("XI")) == 0);
  CHECK(symplectic_inner(PauliString::parse("XZ"), PauliString::parse("ZX")) == 0);
  CHECK(symplectic_inner(PauliString::parse("YI"), PauliString::parse("ZI")) == 1);
}

TEST_CASE("gf2 rank and nullspace") {
  std::vector<BitVec> rows(3, BitVec(4));
  rows[0].set(0); rows[0].set(1);
  rows[1].set(1); rows[1].set(2);
  rows[2].set(0); rows[2].set(2);
  CHECK(gf2_rank(rows, 4) == 2);
  auto ns = gf2_nullspace(rows, 4);
  CHECK(ns.size() == 2);
  for (const auto& v : ns)
    for (const auto& r : rows) CHECK_FALSE(and_parity(v, r));
}

TEST_CASE("code validation and file format") {
  CHECK_THROWS(validate(make(2, {"XI", "ZI"})));
  CHECK_THROWS(validate(make(2, {"II"})));
  CHECK_THROWS(validate(make(2, {"XII"})));
  std::istringstream in("# repetition\n3 2\nZZI\nIZZ\n");
  auto c = read_code(in);
  CHECK(c.n_qubits == 3);
  std::ostringstream out;
  write_code(out, c);
  CHECK(out.str() == "3 2\nZZI\nIZZ\n");
  std::istringstream short_file("3 2\nZZI\n");
  CHECK_THROWS(read_code(short_file));
  CHECK(anchor(PauliString::parse("IIXZ")) == 2);
}

TEST_CASE("interaction graph") {
  auto g = interaction_graph(make(2, {"XX"}));
  CHECK(g.has_edge(0, 1));
  CHECK_THROWS(interaction_graph(make(4, {"XXII", "IIZZ"})));
  auto t3 = toric_code(3, 3);
  auto adj = qubit_adjacency(t3.code);
  // Direct enumeration: union of the supports of the generators touching each qubit.
  for (Vertex q = 0; q < t3.code.n_qubits; ++q) {
    std::set<int32_t> nb;
    for (const auto& gen : t3.code.generators)
      if (gen.acts_on(q))
        for (auto s : gen.support())
          if (s != q) nb.insert(s);
    CHECK(adj[q].size() == nb.size());
    CHECK(t3.graph.neighbors(q).size() == 8);
    CHECK(adj[q].size() <= 4 * 4);
  }
}

TEST_CASE("num_logicals") {
  CHECK(toric_code(2, 2).k == 2);
  CHECK(num_logicals(make(3, {"ZII", "IZI", "IIZ"})) == 0);
  CHECK(num_logicals(StabilizerCode{5, {}}) == 5);
}

TEST_CASE("distance against exhaustive enumeration") {
  auto rep = make(3, {"ZZI", "IZZ"});
  CHECK(distance(rep, 3).value == 1);
  CHECK(brute_distance(rep, 3) == 1);
  for (auto [l1, l2] : {std::pair{2, 2}, {3, 3}, {2, 3}}) {
    auto t = toric_code(l1, l2);
    int want = brute_distance(t.code, std::min(l1, l2));
    CHECK(want == std::min(l1, l2));
    CHECK(distance(t.code, 6, Exec::Serial).value == want);
    CHECK(distance(t.code, 6, Exec::Parallel).value == want);
  }
  CHECK(distance(toric_code(4, 4).code, 4).value == 4);
  auto five = make(5, {"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"});
  CHECK(distance(five, 5).value == brute_distance(five, 5));
  auto capped = distance(toric_code(4, 4).code, 3);
  CHECK(capped.value == 4);
  CHECK_FALSE(capped.exact);
  CHECK_THROWS(distance(make(2, {"ZI", "IZ"}), 2));
}

TEST_CASE("distance on a code with disconnected qubit adjacency") {
  // Two copies of the [[4,2,2]] code side by side.
  auto c = make(8, {"XXXXIIII", "ZZZZIIII", "IIIIXXXX", "IIIIZZZZ"});
  CHECK(distance(c, 4).value == 2);
  CHECK(brute_distance(c, 2) == 2);
}

TEST_CASE("local indistinguishability examples") {
  auto t4 = toric_code(4, 4);
  // Support of a plaquette: the X generator on face 0.
  auto plaq = t4.code.generators[16].support();
  VertexSet a(plaq.begin(), plaq.end());
  auto rep = is_locally_indistinguishable(t4.code, a, t4.graph);
  CHECK(rep.indistinguishable);
  CHECK_FALSE(rep.witness.has_value());
  CHECK(is_locally_indistinguishable(t4.code, {5}, t4.graph).indistinguishable);

  auto t3 = toric_code(3, 3);
  // Horizontal edges of row 0 form a noncontractible cycle carrying an X logical.
  VertexSet loop{0, 1, 2};
  auto fail = is_locally_indistinguishable(t3.code, loop, t3.graph);
  REQUIRE_FALSE(fail.indistinguishable);
  REQUIRE(fail.witness.has_value());
  auto sb = generators_within(t3.code, r_neighborhood(t3.graph, loop, 1));
  CHECK(commutes_with_all(*fail.witness, t3.code, sb));
  CHECK_FALSE(group_elements(t3.code, sb).count(fail.witness->str()));
  for (auto q : fail.witness->support()) CHECK(std::binary_search(loop.begin(), loop.end(), q));
  CHECK_THROWS(is_locally_indistinguishable(t3.code, {}, t3.graph));
}

TEST_CASE("symplectic criterion matches enumeration on every ball") {
  std::vector<FamilyInstance> codes{toric_code(2, 2), toric_code(2, 3), toric_code(3, 3)};
  for (const auto& fi : codes) {
    for (int r = 0; r <= 2; ++r)
      for (Vertex u = 0; u < fi.n; ++u) {
        auto b = ball(fi.graph, u, r);
        if (b.size() > 8) continue;
        CHECK(is_locally_indistinguishable(fi.code, b, fi.graph).indistinguishable ==
              brute_indistinguishable(fi.code, b, fi.graph));
      }
  }
}

TEST_CASE("indistinguishability radius") {
  auto t2 = toric_code(2, 2);
  auto r2 = indistinguishability_radius(t2.code, t2.graph, 4);
  CHECK(r2.rho == 1);
  auto t4 = toric_code(4, 4);
  auto r4 = indistinguishability_radius(t4.code, t4.graph, 6);
  CHECK(r4.rho >= 2);
  CHECK(r4.rho <= 3);
  CHECK_FALSE(r4.capped);
  CHECK(r4.witness.has_value());
  // A weight-1 logical makes even radius-0 balls fail.
  auto bad = make(3, {"ZZI", "IZZ"});
  Graph g = interaction_graph(bad);
  auto rb = indistinguishability_radius(bad, g, 3);
  CHECK(rb.rho == 1);
  CHECK(rb.flagged);
  CHECK(rb.failing_radius == 0);
}
