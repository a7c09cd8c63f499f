#include "gapcert/stabilizer.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gapcert {

void validate(const StabilizerCode& code) {
  if (code.n_qubits <= 0) throw std::invalid_argument("code: qubit count must be positive");
  for (std::size_t i = 0; i < code.generators.size(); ++i) {
    const auto& g = code.generators[i];
    if (static_cast<int32_t>(g.qubits()) != code.n_qubits)
      throw std::invalid_argument("code: generator " + std::to_string(i) + " has wrong length");
    if (g.is_identity()) throw std::invalid_argument("code: generator " + std::to_string(i) + " is the identity");
  }
  for (std::size_t i = 0; i < code.generators.size(); ++i)
    for (std::size_t j = i + 1; j < code.generators.size(); ++j)
      if (symplectic_inner(code.generators[i], code.generators[j]))
        throw std::invalid_argument("code: generators " + std::to_string(i) + " and " + std::to_string(j) +
                                    " anticommute");
}

StabilizerCode read_code(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string t;
    while (ls >> t) tokens.push_back(t);
  }
  if (tokens.size() < 2) throw std::invalid_argument("code file: missing 'N m' header");
  StabilizerCode code;
  std::size_t m = 0;
  try {
    code.n_qubits = std::stoi(tokens[0]);
    m = std::stoul(tokens[1]);
  } catch (const std::exception&) {
    throw std::invalid_argument("code file: header must be two integers");
  }
  if (tokens.size() != 2 + m)
    throw std::invalid_argument("code file: expected " + std::to_string(m) + " generators, found " +
                                std::to_string(tokens.size() - 2));
  for (std::size_t i = 0; i < m; ++i) code.generators.push_back(PauliString::parse(tokens[2 + i]));
  validate(code);
  return code;
}

StabilizerCode load_code(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_code(in);
}

void write_code(std::ostream& out, const StabilizerCode& code) {
  out << code.n_qubits << ' ' << code.generators.size() << '\n';
  for (const auto& g : code.generators) out << g.str() << '\n';
}

Vertex anchor(const PauliString& g) {
  for (std::size_t q = 0; q < g.qubits(); ++q)
    if (g.acts_on(q)) return static_cast<Vertex>(q);
  throw std::invalid_argument("anchor: identity generator");
}

std::vector<std::vector<Vertex>> qubit_adjacency(const StabilizerCode& code) {
  std::vector<std::vector<Vertex>> adj(code.n_qubits);
  for (const auto& g : code.generators) {
    if (g.is_identity()) throw std::invalid_argument("interaction graph: identity generator");
    auto s = g.support();
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j)
        if (i != j) adj[s[i]].push_back(s[j]);
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return adj;
}

Graph interaction_graph(const StabilizerCode& code) {
  auto adj = qubit_adjacency(code);
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex u = 0; u < code.n_qubits; ++u)
    for (Vertex v : adj[u])
      if (u < v) edges.emplace_back(u, v);
  return Graph(code.n_qubits, edges);
}

int32_t num_logicals(const StabilizerCode& code) {
  std::vector<BitVec> rows;
  for (const auto& g : code.generators) rows.push_back(g.symplectic());
  return code.n_qubits - static_cast<int32_t>(gf2_rank(rows, 2 * code.n_qubits));
}

namespace {

Gf2Basis stabilizer_span(const StabilizerCode& code, const std::vector<std::size_t>& which) {
  Gf2Basis b(2 * code.n_qubits);
  for (auto i : which) b.add(code.generators[i].symplectic());
  return b;
}

std::vector<std::vector<std::size_t>> generators_by_qubit(const StabilizerCode& code) {
  std::vector<std::vector<std::size_t>> by(code.n_qubits);
  for (std::size_t i = 0; i < code.generators.size(); ++i)
    for (auto q : code.generators[i].support()) by[q].push_back(i);
  return by;
}

// Does some Pauli supported on `s` commute with every generator yet lie outside
// the stabilizer span? Supports are small here, so the local system fits in 64 bits.
class LogicalProbe {
 public:
  LogicalProbe(const StabilizerCode& code, const Gf2Basis& span)
      : code_(code), span_(span), by_qubit_(generators_by_qubit(code)), local_(code.n_qubits, -1) {}

  bool supports_logical(const std::vector<Vertex>& s) {
    const int w = static_cast<int>(s.size());
    for (int j = 0; j < w; ++j) local_[s[j]] = j;
    touched_.clear();
    for (Vertex q : s)
      for (auto gi : by_qubit_[q]) touched_.push_back(gi);
    std::sort(touched_.begin(), touched_.end());
    touched_.erase(std::unique(touched_.begin(), touched_.end()), touched_.end());

    // Row-reduce the commutation constraints; pivot = lowest column.
    rows_.clear();
    for (auto gi : touched_) {
      const auto& g = code_.generators[gi];
      uint64_t row = 0;
      for (int j = 0; j < w; ++j) {
        if (g.z.get(s[j])) row |= uint64_t{1} << j;
        if (g.x.get(s[j])) row |= uint64_t{1} << (w + j);
      }
      for (auto r : rows_)
        if (row & (r & -r)) row ^= r;
      if (!row) continue;
      uint64_t p = row & -row;
      for (auto& r : rows_)
        if (r & p) r ^= row;
      rows_.push_back(row);
    }
    uint64_t pivmask = 0;
    for (auto r : rows_) pivmask |= r & -r;

    bool found = false;
    const int ncols = 2 * w;
    for (int c = 0; c < ncols && !found; ++c) {
      uint64_t bit = uint64_t{1} << c;
      if (pivmask & bit) continue;
      uint64_t v = bit;
      for (auto r : rows_)
        if (r & bit) v |= r & -r;
      BitVec full(2 * code_.n_qubits);
      for (int j = 0; j < w; ++j) {
        if (v >> j & 1) full.set(s[j]);
        if (v >> (w + j) & 1) full.set(code_.n_qubits + s[j]);
      }
      found = !span_.contains(full);
    }
    for (Vertex q : s) local_[q] = -1;
    return found;
  }

 private:
  const StabilizerCode& code_;
  const Gf2Basis& span_;
  std::vector<std::vector<std::size_t>> by_qubit_;
  std::vector<int> local_;
  std::vector<std::size_t> touched_;
  std::vector<uint64_t> rows_;
};

// Enumerates connected vertex sets of exactly size k containing `root` as their
// minimum vertex (ESU scheme); stops early once `visit` returns true.
template <class Visit>
bool enumerate_connected(const std::vector<std::vector<Vertex>>& adj, Vertex root, int k, Visit&& visit) {
  std::vector<Vertex> sub{root};
  auto excluded = [&](Vertex u) {
    for (Vertex s : sub) {
      if (s == u) return true;
      const auto& row = adj[s];
      if (std::binary_search(row.begin(), row.end(), u)) return true;
    }
    return false;
  };
  auto extend = [&](auto&& self, std::vector<Vertex> ext) -> bool {
    if (static_cast<int>(sub.size()) == k) return visit(sub);
    while (!ext.empty()) {
      Vertex w = ext.back();
      ext.pop_back();
      std::vector<Vertex> next = ext;
      for (Vertex u : adj[w])
        if (u > root && !excluded(u) && std::find(next.begin(), next.end(), u) == next.end()) next.push_back(u);
      sub.push_back(w);
      // `visit` sees the set in sorted order.
      bool done;
      if (static_cast<int>(sub.size()) == k) {
        std::vector<Vertex> sorted = sub;
        std::sort(sorted.begin(), sorted.end());
        done = visit(sorted);
      } else {
        done = self(self, next);
      }
      sub.pop_back();
      if (done) return true;
    }
    return false;
  };
  if (k == 1) return visit(sub);
  std::vector<Vertex> ext;
  for (Vertex u : adj[root])
    if (u > root) ext.push_back(u);
  return extend(extend, ext);
}

}  // namespace

DistanceResult distance(const StabilizerCode& code, int32_t weight_cap, Exec exec) {
  validate(code);
  if (num_logicals(code) == 0) throw std::invalid_argument("distance: code encodes no logical qubits");
  if (weight_cap < 1) throw std::invalid_argument("distance: weight cap must be >= 1");
  if (weight_cap > 32) throw std::invalid_argument("distance: weight cap above 32 is not supported");
  std::vector<std::size_t> all(code.generators.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const Gf2Basis span = stabilizer_span(code, all);
  const auto adj = qubit_adjacency(code);
  const int32_t n = code.n_qubits;

  // A minimum-weight logical has connected support in the qubit adjacency:
  // components that share no generator commute with the stabilizers separately.
  for (int32_t w = 1; w <= std::min(weight_cap, n); ++w) {
    std::atomic<bool> hit{false};
    if (exec == Exec::Serial) {
      LogicalProbe probe(code, span);
      for (Vertex root = 0; root < n && !hit; ++root)
        if (enumerate_connected(adj, root, w, [&](const std::vector<Vertex>& s) { return probe.supports_logical(s); }))
          hit = true;
    } else {
      GAPCERT_OMP("omp parallel")
      {
        LogicalProbe probe(code, span);
        GAPCERT_OMP("omp for schedule(dynamic, 1)")
        for (Vertex root = 0; root < n; ++root) {
          if (hit.load(std::memory_order_relaxed)) continue;
          if (enumerate_connected(adj, root, w, [&](const std::vector<Vertex>& s) {
                return hit.load(std::memory_order_relaxed) || probe.supports_logical(s);
              }))
            hit = true;
        }
      }
    }
    if (hit) return {w, true};
  }
  return {weight_cap + 1, false};
}

std::vector<std::size_t> generators_within(const StabilizerCode& code, const VertexSet& region) {
  std::vector<char> in(code.n_qubits, 0);
  for (Vertex v : region) in[v] = 1;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < code.generators.size(); ++i) {
    bool inside = true;
    for (auto q : code.generators[i].support())
      if (!in[q]) {
        inside = false;
        break;
      }
    if (inside) out.push_back(i);
  }
  return out;
}

RegionReport is_locally_indistinguishable(const StabilizerCode& code, const VertexSet& a, const Graph& g) {
  if (a.empty()) throw std::invalid_argument("indistinguishability: empty region");
  if (g.size() != code.n_qubits) throw std::invalid_argument("indistinguishability: graph/code size mismatch");
  RegionReport rep;
  rep.region = a;
  const VertexSet b = r_neighborhood(g, a, 1);
  const auto sb = generators_within(code, b);
  const Gf2Basis span = stabilizer_span(code, sb);
  const int32_t n = code.n_qubits;
  const std::size_t w = a.size();

  std::vector<BitVec> constraints;
  for (auto gi : sb) {
    const auto& gen = code.generators[gi];
    BitVec row(2 * w);
    for (std::size_t j = 0; j < w; ++j) {
      if (gen.z.get(a[j])) row.set(j);
      if (gen.x.get(a[j])) row.set(w + j);
    }
    if (row.any()) constraints.push_back(std::move(row));
  }
  for (const auto& v : gf2_nullspace(constraints, 2 * w)) {
    BitVec full(2 * n);
    for (std::size_t j = 0; j < w; ++j) {
      if (v.get(j)) full.set(a[j]);
      if (v.get(w + j)) full.set(n + a[j]);
    }
    if (!span.contains(full)) {
      rep.indistinguishable = false;
      rep.witness = PauliString::from_symplectic(full);
      break;
    }
  }
  return rep;
}

RadiusReport indistinguishability_radius(const StabilizerCode& code, const Graph& g, int32_t r_cap) {
  if (r_cap < 1) throw std::invalid_argument("indistinguishability_radius: r_cap must be >= 1");
  RadiusReport rep;
  const int32_t n = code.n_qubits;
  for (int32_t r = 0; r < r_cap; ++r) {
    std::vector<RegionReport> results(n);
    GAPCERT_OMP("omp parallel for schedule(dynamic, 4)")
    for (Vertex u = 0; u < n; ++u) results[u] = is_locally_indistinguishable(code, ball(g, u, r), g);
    for (Vertex u = 0; u < n; ++u) {
      if (!results[u].indistinguishable) {
        rep.failing_radius = r;
        rep.failing_vertex = u;
        rep.witness = results[u].witness;
        rep.rho = std::max(r, 1);
        rep.flagged = (r == 0);
        return rep;
      }
    }
  }
  rep.rho = r_cap;
  rep.capped = true;
  return rep;
}

}  // namespace gapcert
