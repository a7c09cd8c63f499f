#include <sstream>

#include "doctest.h"
#include "gapcert/families.hpp"

using namespace gapcert;

namespace {

QuadComplex genus2() { return load_complex(GAPCERT_TEST_DATA "/genus2.quad"); }

}  // namespace

TEST_CASE("toric parameters") {
  for (auto [l1, l2] : {std::pair{2, 2}, {3, 3}, {2, 3}, {4, 3}}) {
    auto t = toric_code(l1, l2);
    CHECK(t.n == 2 * l1 * l2);
    CHECK(t.k == 2);
    CHECK(distance(t.code, 4).value == std::min(l1, l2));
    CHECK(*t.d == std::min(l1, l2));
  }
  CHECK_THROWS(toric_code(1, 3));
}

TEST_CASE("torus complex gives the toric code") {
  auto fi = surface_code_from_complex(torus_complex(2, 2));
  auto t = toric_code(2, 2);
  REQUIRE(fi.code.generators.size() == t.code.generators.size());
  for (std::size_t i = 0; i < fi.code.generators.size(); ++i) CHECK(fi.code.generators[i] == t.code.generators[i]);
  CHECK(surface_code_from_complex(torus_complex(3, 3)).k == 2);
}

TEST_CASE("genus-2 complex from file") {
  auto cx = genus2();
  CHECK(cx.n_vertices == 14);
  CHECK(cx.edges.size() == 32);
  CHECK(cx.faces.size() == 16);
  CHECK(cx.euler_characteristic() == -2);
  auto fi = surface_code_from_complex(cx);
  CHECK(fi.k == 4);
  std::ostringstream out;
  write_complex(out, cx);
  std::istringstream in(out.str());
  CHECK(read_complex(in).edges == cx.edges);
}

TEST_CASE("complex validation") {
  auto cx = torus_complex(3, 3);
  auto broken = cx;
  broken.faces.pop_back();
  CHECK_THROWS(validate(broken));
  broken = cx;
  broken.faces[0][1] = broken.faces[0][0];
  CHECK_THROWS(validate(broken));
  broken = cx;
  std::swap(broken.faces[0][1], broken.faces[0][2]);
  CHECK_THROWS(validate(broken));
  broken = cx;
  broken.edges[0].second = broken.edges[0].first;
  CHECK_THROWS(validate(broken));
  std::istringstream bad("4 1 0\n0 1 2\n");
  CHECK_THROWS(read_complex(bad));
  CHECK_THROWS(subdivide(cx, 0));
}

TEST_CASE("subdivision counts and invariants") {
  for (const auto& base : {torus_complex(2, 2), torus_complex(3, 2), genus2()}) {
    const int chi = base.euler_characteristic();
    const int k = surface_code_from_complex(base).k;
    for (int l : {1, 2, 3}) {
      auto sub = subdivide(base, l);
      CHECK(sub.euler_characteristic() == chi);
      CHECK(sub.faces.size() == base.faces.size() * l * l);
      auto fi = surface_code_from_complex(sub);
      CHECK(fi.n == static_cast<int>(2 * base.faces.size() * l * l));
      CHECK(fi.k == k);
    }
  }
  auto once = subdivide(torus_complex(2, 2), 4);
  auto twice = subdivide(subdivide(torus_complex(2, 2), 2), 2);
  auto a = surface_code_from_complex(once), b = surface_code_from_complex(twice);
  CHECK(a.n == b.n);
  CHECK(a.k == b.k);
  CHECK(growth_profile(a.graph).gamma == growth_profile(b.graph).gamma);
}

TEST_CASE("subdivided torus matches the larger torus") {
  for (auto [L, l] : {std::pair{2, 2}, {2, 3}, {3, 2}}) {
    auto sub = surface_code_from_complex(subdivide(torus_complex(L, L), l));
    auto big = toric_code(L * l, L * l);
    CHECK(sub.n == big.n);
    CHECK(sub.k == big.k);
    CHECK(growth_profile(sub.graph).gamma == growth_profile(big.graph).gamma);
    CHECK(distance(sub.code, L * l).value == L * l);
  }
}

TEST_CASE("stacked toric codes") {
  auto s2 = stacked_toric(2, 3);
  auto t3 = toric_code(3, 3);
  CHECK(s2.n == 18);
  CHECK(s2.k == 2);
  // One layer is the plain toric code.
  CHECK(s2.k == t3.k);
  CHECK(distance(s2.code, 3).value == 3);
  auto s3 = stacked_toric(3, 2);
  CHECK(s3.n == 16);
  CHECK(s3.k == 4);
  CHECK(stacked_toric(4, 2).k == 8);
  CHECK(distance(s3.code, 3).value == 2);
  // Every hypercube neighbour pair of sites is joined in the graph.
  auto lattice = torus_grid(3, 2);
  for (Vertex s = 0; s < lattice.size(); ++s)
    for (Vertex t : lattice.neighbors(s)) CHECK(s3.graph.has_edge(2 * s, 2 * t + 1));
  CHECK_THROWS(stacked_toric(1, 3));
  CHECK_THROWS(stacked_toric(3, 1));
}
