#include "gapcert/families.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gapcert {

FaceCorners face_corners(const QuadComplex& cx, int32_t face) {
  const auto& f = cx.faces.at(face);
  const auto edge = [&](int s) { return cx.edges.at(f[s]); };
  const auto other = [](std::pair<Vertex, Vertex> e, Vertex x) -> Vertex {
    if (e.first == x) return e.second;
    if (e.second == x) return e.first;
    return -1;
  };
  for (int flip = 0; flip < 2; ++flip) {
    FaceCorners fc;
    auto e0 = edge(0);
    fc.corners[0] = flip ? e0.second : e0.first;
    fc.corners[1] = flip ? e0.first : e0.second;
    bool ok = true;
    for (int s = 1; s < 3 && ok; ++s) {
      Vertex nxt = other(edge(s), fc.corners[s]);
      ok = nxt >= 0;
      if (ok) fc.corners[s + 1] = nxt;
    }
    if (!ok || other(edge(3), fc.corners[3]) != fc.corners[0]) continue;
    for (int s = 0; s < 4; ++s) fc.forward[s] = edge(s).first == fc.corners[s];
    return fc;
  }
  throw std::invalid_argument("complex: face " + std::to_string(face) + " is not a closed 4-cycle");
}

void validate(const QuadComplex& cx) {
  if (cx.n_vertices <= 0) throw std::invalid_argument("complex: no vertices");
  const int32_t ne = static_cast<int32_t>(cx.edges.size());
  for (int32_t e = 0; e < ne; ++e) {
    auto [u, v] = cx.edges[e];
    if (u < 0 || v < 0 || u >= cx.n_vertices || v >= cx.n_vertices)
      throw std::invalid_argument("complex: edge " + std::to_string(e) + " has an invalid endpoint");
    if (u == v) throw std::invalid_argument("complex: edge " + std::to_string(e) + " is a self-loop");
  }
  std::vector<std::vector<int32_t>> faces_of(ne);
  for (int32_t f = 0; f < static_cast<int32_t>(cx.faces.size()); ++f) {
    const auto& fe = cx.faces[f];
    for (int s = 0; s < 4; ++s) {
      if (fe[s] < 0 || fe[s] >= ne) throw std::invalid_argument("complex: face " + std::to_string(f) + " has an invalid edge");
      for (int t = 0; t < s; ++t)
        if (fe[s] == fe[t]) throw std::invalid_argument("complex: face " + std::to_string(f) + " repeats an edge");
      faces_of[fe[s]].push_back(f);
    }
    face_corners(cx, f);
  }
  for (int32_t e = 0; e < ne; ++e)
    if (faces_of[e].size() != 2)
      throw std::invalid_argument("complex: edge " + std::to_string(e) + " borders " +
                                  std::to_string(faces_of[e].size()) + " faces, expected 2");
  const int32_t chi = cx.euler_characteristic();
  if (chi > 2 || chi % 2 != 0)
    throw std::invalid_argument("complex: Euler characteristic " + std::to_string(chi) +
                                " is not that of a closed orientable surface");

  // Orient faces so every edge is traversed once each way; fails on non-orientable input.
  const int32_t nf = static_cast<int32_t>(cx.faces.size());
  std::vector<FaceCorners> walk(nf);
  for (int32_t f = 0; f < nf; ++f) walk[f] = face_corners(cx, f);
  auto direction = [&](int32_t f, int32_t e) {
    for (int s = 0; s < 4; ++s)
      if (cx.faces[f][s] == e) return walk[f].forward[s] ? 1 : -1;
    return 0;
  };
  std::vector<int> orient(nf, 0);
  for (int32_t start = 0; start < nf; ++start) {
    if (orient[start]) continue;
    orient[start] = 1;
    std::vector<int32_t> stack{start};
    while (!stack.empty()) {
      int32_t f = stack.back();
      stack.pop_back();
      for (int32_t e : cx.faces[f]) {
        int32_t g = faces_of[e][0] == f ? faces_of[e][1] : faces_of[e][0];
        int want = -orient[f] * direction(f, e) * direction(g, e);
        if (!orient[g]) {
          orient[g] = want;
          stack.push_back(g);
        } else if (orient[g] != want) {
          throw std::invalid_argument("complex: surface is not orientable");
        }
      }
    }
  }
}

QuadComplex read_complex(std::istream& in) {
  std::vector<long long> nums;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        nums.push_back(std::stoll(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw std::invalid_argument("complex file: bad token '" + tok + "'");
      }
    }
  }
  if (nums.size() < 3) throw std::invalid_argument("complex file: missing 'V E F' header");
  QuadComplex cx;
  cx.n_vertices = static_cast<int32_t>(nums[0]);
  const long long ne = nums[1], nf = nums[2];
  if (ne < 0 || nf < 0 || static_cast<long long>(nums.size()) != 3 + 2 * ne + 4 * nf)
    throw std::invalid_argument("complex file: token count does not match header");
  std::size_t p = 3;
  for (long long e = 0; e < ne; ++e, p += 2)
    cx.edges.emplace_back(static_cast<Vertex>(nums[p]), static_cast<Vertex>(nums[p + 1]));
  for (long long f = 0; f < nf; ++f, p += 4)
    cx.faces.push_back({static_cast<int32_t>(nums[p]), static_cast<int32_t>(nums[p + 1]),
                        static_cast<int32_t>(nums[p + 2]), static_cast<int32_t>(nums[p + 3])});
  validate(cx);
  return cx;
}

QuadComplex load_complex(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_complex(in);
}

void write_complex(std::ostream& out, const QuadComplex& cx) {
  out << cx.n_vertices << ' ' << cx.edges.size() << ' ' << cx.faces.size() << '\n';
  for (auto [u, v] : cx.edges) out << u << ' ' << v << '\n';
  for (const auto& f : cx.faces) out << f[0] << ' ' << f[1] << ' ' << f[2] << ' ' << f[3] << '\n';
}

QuadComplex torus_complex(int32_t l1, int32_t l2) {
  if (l1 < 2 || l2 < 2) throw std::invalid_argument("torus_complex: sides must be >= 2");
  QuadComplex cx;
  cx.n_vertices = l1 * l2;
  auto vid = [&](int32_t i, int32_t j) { return (i % l1) + l1 * (j % l2); };
  const int32_t nh = l1 * l2;
  for (int32_t j = 0; j < l2; ++j)
    for (int32_t i = 0; i < l1; ++i) cx.edges.emplace_back(vid(i, j), vid(i + 1, j));
  for (int32_t j = 0; j < l2; ++j)
    for (int32_t i = 0; i < l1; ++i) cx.edges.emplace_back(vid(i, j), vid(i, j + 1));
  for (int32_t j = 0; j < l2; ++j)
    for (int32_t i = 0; i < l1; ++i)
      cx.faces.push_back({vid(i, j), nh + vid(i + 1, j), vid(i, j + 1), nh + vid(i, j)});
  return cx;
}

QuadComplex subdivide(const QuadComplex& cx, int32_t l) {
  if (l <= 0) throw std::invalid_argument("subdivide: l must be positive");
  validate(cx);
  if (l == 1) return cx;
  const int32_t nv = cx.n_vertices;
  const int32_t ne = static_cast<int32_t>(cx.edges.size());
  const int32_t nf = static_cast<int32_t>(cx.faces.size());
  const int32_t m = l - 1;

  QuadComplex out;
  out.n_vertices = nv + ne * m + nf * m * m;
  // Point t along edge e, counted from its first endpoint.
  auto edge_point = [&](int32_t e, int32_t t) -> Vertex {
    if (t == 0) return cx.edges[e].first;
    if (t == l) return cx.edges[e].second;
    return nv + e * m + (t - 1);
  };
  for (int32_t e = 0; e < ne; ++e)
    for (int32_t t = 0; t < l; ++t) out.edges.emplace_back(edge_point(e, t), edge_point(e, t + 1));

  for (int32_t f = 0; f < nf; ++f) {
    const auto fc = face_corners(cx, f);
    const auto& fe = cx.faces[f];
    const Vertex inner0 = nv + ne * m + f * m * m;
    const int32_t edge0 = ne * l + f * 2 * l * m;
    // Segment p (counted from corner s) of side s.
    auto side_segment = [&](int s, int32_t p) { return fe[s] * l + (fc.forward[s] ? p : l - 1 - p); };
    auto point = [&](int32_t i, int32_t j) -> Vertex {
      auto along = [&](int s, int32_t p) { return edge_point(fe[s], fc.forward[s] ? p : l - p); };
      if (j == 0) return along(0, i);
      if (i == l) return along(1, j);
      if (j == l) return along(2, l - i);
      if (i == 0) return along(3, l - j);
      return inner0 + (i - 1) + m * (j - 1);
    };
    // Edge from (i,j) to (i+1,j).
    auto hseg = [&](int32_t i, int32_t j) {
      if (j == 0) return side_segment(0, i);
      if (j == l) return side_segment(2, l - 1 - i);
      return edge0 + i + l * (j - 1);
    };
    // Edge from (i,j) to (i,j+1).
    auto vseg = [&](int32_t i, int32_t j) {
      if (i == l) return side_segment(1, j);
      if (i == 0) return side_segment(3, l - 1 - j);
      return edge0 + l * m + j + l * (i - 1);
    };
    for (int32_t j = 1; j < l; ++j)
      for (int32_t i = 0; i < l; ++i) out.edges.emplace_back(point(i, j), point(i + 1, j));
    for (int32_t i = 1; i < l; ++i)
      for (int32_t j = 0; j < l; ++j) out.edges.emplace_back(point(i, j), point(i, j + 1));
    for (int32_t j = 0; j < l; ++j)
      for (int32_t i = 0; i < l; ++i) out.faces.push_back({hseg(i, j), vseg(i + 1, j), hseg(i, j + 1), vseg(i, j)});
  }
  validate(out);
  return out;
}

FamilyInstance surface_code_from_complex(const QuadComplex& cx, std::string label) {
  validate(cx);
  const int32_t nq = static_cast<int32_t>(cx.edges.size());
  FamilyInstance fi;
  fi.code.n_qubits = nq;
  for (Vertex v = 0; v < cx.n_vertices; ++v) {
    PauliString star(nq);
    for (int32_t e = 0; e < nq; ++e)
      if (cx.edges[e].first == v || cx.edges[e].second == v) star.z.set(e);
    if (!star.is_identity()) fi.code.generators.push_back(std::move(star));
  }
  for (const auto& f : cx.faces) {
    PauliString plaq(nq);
    for (int32_t e : f) plaq.x.set(e);
    fi.code.generators.push_back(std::move(plaq));
  }
  validate(fi.code);
  fi.graph = interaction_graph(fi.code);
  fi.label = std::move(label);
  fi.n = nq;
  fi.k = num_logicals(fi.code);
  return fi;
}

FamilyInstance toric_code(int32_t l1, int32_t l2) {
  auto fi = surface_code_from_complex(torus_complex(l1, l2),
                                      "toric(" + std::to_string(l1) + "," + std::to_string(l2) + ")");
  fi.d = std::min(l1, l2);
  return fi;
}

FamilyInstance stacked_toric(int32_t d, int32_t l) {
  if (d < 2) throw std::invalid_argument("stacked_toric: d must be >= 2");
  if (l < 2) throw std::invalid_argument("stacked_toric: L must be >= 2");
  int64_t sites = 1, layers = 1;
  for (int32_t k = 0; k < d; ++k) sites *= l;
  for (int32_t k = 2; k < d; ++k) layers *= l;
  if (2 * sites > (int64_t{1} << 26)) throw std::invalid_argument("stacked_toric: instance too large");
  const int32_t nq = static_cast<int32_t>(2 * sites);
  const int32_t plane = l * l;

  const FamilyInstance base = toric_code(l, l);
  FamilyInstance fi;
  fi.code.n_qubits = nq;
  // Base qubit q < plane is h(i,j) on site i + l*j; q >= plane is v(i,j).
  auto lift = [&](int32_t q, int64_t layer) -> int32_t {
    int64_t site = (q % plane) + plane * layer;
    return static_cast<int32_t>(2 * site + (q >= plane ? 1 : 0));
  };
  for (int64_t layer = 0; layer < layers; ++layer) {
    for (const auto& g : base.code.generators) {
      PauliString p(nq);
      for (auto q : g.support()) {
        if (g.x.get(q)) p.x.set(lift(q, layer));
        if (g.z.get(q)) p.z.set(lift(q, layer));
      }
      fi.code.generators.push_back(std::move(p));
    }
  }
  validate(fi.code);

  const Graph lattice = torus_grid(d, l);
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex s = 0; s < lattice.size(); ++s) {
    edges.emplace_back(2 * s, 2 * s + 1);
    for (Vertex t : lattice.neighbors(s)) {
      if (t < s) continue;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) edges.emplace_back(2 * s + a, 2 * t + b);
    }
  }
  const auto adj = qubit_adjacency(fi.code);
  for (Vertex u = 0; u < nq; ++u)
    for (Vertex v : adj[u])
      if (u < v) edges.emplace_back(u, v);
  fi.graph = Graph(nq, edges);
  fi.label = "stacked_toric(" + std::to_string(d) + "," + std::to_string(l) + ")";
  fi.n = nq;
  fi.k = num_logicals(fi.code);
  fi.d = l;
  return fi;
}

}  // namespace gapcert
