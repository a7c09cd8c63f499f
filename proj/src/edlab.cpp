#include "gapcert/edlab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace gapcert {

namespace {

constexpr double kZeroLevel = 1e-9;

void require_dense(int n, const char* what) {
  if (n > kDenseMaxQubits) throw std::invalid_argument(std::string(what) + ": too many qubits for dense algebra");
}

CMat identity(int n) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
  return CMat::Identity(d, d);
}

std::size_t generator_rank(const StabilizerCode& code, const std::vector<std::size_t>& gens) {
  std::vector<BitVec> rows;
  for (auto i : gens) rows.push_back(code.generators[i].symplectic());
  return gf2_rank(rows, 2 * static_cast<std::size_t>(code.n_qubits));
}

// Orthonormal basis of the range of prod (I + g)/2 over `gens`, on the qubits of `region`.
CMat region_range_basis(const StabilizerCode& code, const VertexSet& region, uint64_t seed) {
  const auto gens = generators_within(code, region);
  const int nb = static_cast<int>(region.size());
  const std::size_t rank = generator_rank(code, gens);
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << nb);
  const auto m = static_cast<Eigen::Index>(std::size_t{1} << (nb - static_cast<int>(rank)));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CMat v(d, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < d; ++i) v(i, j) = cplx(nd(rng), nd(rng));
  for (auto gi : gens) apply_pauli_projector(restrict_pauli(code.generators[gi], region), +1, v);
  Eigen::HouseholderQR<CMat> qr(v);
  CMat q = qr.householderQ() * CMat::Identity(d, m);
  return q;
}

// Positions of `sub` inside the sorted set `super`.
VertexSet positions_in(const VertexSet& sub, const VertexSet& super) {
  VertexSet pos;
  for (Vertex q : sub) {
    auto it = std::lower_bound(super.begin(), super.end(), q);
    if (it == super.end() || *it != q) throw std::invalid_argument("region is not contained in its superset");
    pos.push_back(static_cast<Vertex>(it - super.begin()));
  }
  return pos;
}

bool contains_all(const VertexSet& super, const VertexSet& sub) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

// Bit patterns: local index i on `pos` -> bits in an nb-qubit register, plus complements.
struct Layout {
  std::vector<uint64_t> scatter, rest;
};

Layout layout(const VertexSet& pos, int nb) {
  Layout l;
  uint64_t mask = 0;
  for (Vertex p : pos) mask |= uint64_t{1} << p;
  l.scatter.resize(std::size_t{1} << pos.size());
  for (std::size_t i = 0; i < l.scatter.size(); ++i) {
    uint64_t b = 0;
    for (std::size_t j = 0; j < pos.size(); ++j)
      if ((i >> j) & 1) b |= uint64_t{1} << pos[j];
    l.scatter[i] = b;
  }
  const uint64_t comp = ((uint64_t{1} << nb) - 1) & ~mask;
  uint64_t e = 0;
  do {
    l.rest.push_back(e);
    e = (e - comp) & comp;
  } while (e != 0);
  std::sort(l.rest.begin(), l.rest.end());
  return l;
}

// (O (x) I) v for every column of v, O acting on the local positions described by `l`.
CMat apply_local(const CMat& o, const Layout& l, const CMat& v) {
  CMat out = CMat::Zero(v.rows(), v.cols());
  const auto k = static_cast<Eigen::Index>(l.scatter.size());
  for (Eigen::Index c = 0; c < v.cols(); ++c)
    for (uint64_t e : l.rest)
      for (Eigen::Index i = 0; i < k; ++i) {
        cplx s = 0.0;
        for (Eigen::Index j = 0; j < k; ++j) s += o(i, j) * v(static_cast<Eigen::Index>(l.scatter[j] | e), c);
        out(static_cast<Eigen::Index>(l.scatter[i] | e), c) = s;
      }
  return out;
}

std::vector<double> distinct_levels(const Eigen::VectorXd& vals, double tol) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (out.empty() || vals(i) - out.back() > tol) out.push_back(vals(i));
  return out;
}

}  // namespace

PauliSum build_H0(const StabilizerCode& code) {
  PauliSum h(code.n_qubits);
  if (code.generators.empty()) return h;
  h.add(0.5 * static_cast<double>(code.generators.size()), PauliString(static_cast<std::size_t>(code.n_qubits)));
  for (const auto& g : code.generators) h.add(-0.5, g);
  return h;
}

PauliSum build_perturbation(int n_qubits, const FieldSpec& field) {
  PauliSum v(n_qubits);
  for (int q = 0; q < n_qubits; ++q) {
    const auto nq = static_cast<std::size_t>(n_qubits);
    if (field.h_x != 0.0) v.add(field.h_x, PauliString::single(nq, static_cast<std::size_t>(q), 'X'));
    if (field.h_z != 0.0) v.add(field.h_z, PauliString::single(nq, static_cast<std::size_t>(q), 'Z'));
  }
  return v;
}

CMat generators_projector(const StabilizerCode& code, const std::vector<std::size_t>& gens) {
  require_dense(code.n_qubits, "projector");
  CMat p = identity(code.n_qubits);
  for (auto gi : gens) apply_pauli_projector(code.generators.at(gi), +1, p);
  return p;
}

CMat ground_projector(const StabilizerCode& code) {
  std::vector<std::size_t> all(code.generators.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return generators_projector(code, all);
}

CMat region_projector(const StabilizerCode& code, const VertexSet& region) {
  return generators_projector(code, generators_within(code, region));
}

std::vector<Sector> sector_projectors(const StabilizerCode& code) {
  require_dense(code.n_qubits, "sector_projectors");
  std::vector<Sector> out;
  const std::size_t m = code.generators.size();
  std::vector<uint8_t> bits(m, 0);
  // Depth-first over generators, pruning as soon as the partial product vanishes.
  auto dfs = [&](auto&& self, std::size_t i, const CMat& p) -> void {
    if (p.cwiseAbs2().sum() < 0.25) return;  // squared Frobenius norm = rank
    if (i == m) {
      Sector s;
      s.syndrome = bits;
      s.weight = static_cast<int>(std::count(bits.begin(), bits.end(), uint8_t{1}));
      s.projector = p;
      out.push_back(std::move(s));
      return;
    }
    for (uint8_t b : {uint8_t{0}, uint8_t{1}}) {
      CMat q = p;
      apply_pauli_projector(code.generators[i], b ? -1 : +1, q);
      bits[i] = b;
      self(self, i + 1, q);
    }
    bits[i] = 0;
  };
  dfs(dfs, 0, identity(code.n_qubits));
  return out;
}

std::vector<CMat> defect_filtration(const StabilizerCode& code, Vertex u, const Graph& g) {
  require_dense(code.n_qubits, "defect_filtration");
  if (g.size() != code.n_qubits) throw std::invalid_argument("defect_filtration: graph/code size mismatch");
  const auto dist = g.distances(u);
  const int32_t ecc = *std::max_element(dist.begin(), dist.end());
  std::vector<CMat> e;
  CMat prev = region_projector(code, ball(g, u, 0));
  for (int32_t i = 1; i <= ecc; ++i) {
    CMat cur = region_projector(code, ball(g, u, i));
    e.push_back(prev - cur);
    prev = std::move(cur);
  }
  return e;
}

SpectrumTrace spectrum_trace(const PauliSum& h0, const PauliSum& v, const std::vector<double>& s_grid, std::size_t m,
                             const LowestOptions& opt, Exec exec) {
  if (m == 0) throw std::invalid_argument("spectrum_trace: need at least one level");
  if (h0.qubits() != v.qubits()) throw std::invalid_argument("spectrum_trace: qubit count mismatch");
  LowestOptions o = opt;
  o.count = std::min<std::size_t>(m, h0.dim());
  auto levels_at = [&](double s) {
    PauliSum h = h0;
    h += v.scaled(s);
    Eigen::VectorXd vals;
    if (h.qubits() <= o.dense_max_qubits) vals = dense_eigen(h.dense(), false).values.head(static_cast<Eigen::Index>(o.count));
    else vals = lobpcg(h, o, Exec::Serial).values;
    return std::vector<double>(vals.data(), vals.data() + vals.size());
  };
  SpectrumTrace tr;
  tr.s = s_grid;
  tr.levels.resize(s_grid.size());
  const auto ns = static_cast<std::ptrdiff_t>(s_grid.size());
  if (exec == Exec::Parallel) {
    GAPCERT_OMP("omp parallel for schedule(dynamic)")
    for (std::ptrdiff_t i = 0; i < ns; ++i) tr.levels[static_cast<std::size_t>(i)] = levels_at(s_grid[static_cast<std::size_t>(i)]);
  } else {
    for (std::ptrdiff_t i = 0; i < ns; ++i) tr.levels[static_cast<std::size_t>(i)] = levels_at(s_grid[static_cast<std::size_t>(i)]);
  }
  const auto base = levels_at(0.0);
  tr.ground_degeneracy = static_cast<int>(std::count_if(base.begin(), base.end(), [](double e) { return std::fabs(e) <= kZeroLevel; }));
  tr.degeneracy_resolved = static_cast<std::size_t>(tr.ground_degeneracy) < base.size();
  // Weyl: each level moves by at most ||V|| |ds|.
  const double lip = v.norm_bound();
  for (std::size_t i = 1; i < s_grid.size(); ++i) {
    const double ds = std::fabs(s_grid[i] - s_grid[i - 1]);
    for (std::size_t k = 0; k < tr.levels[i].size(); ++k)
      if (std::fabs(tr.levels[i][k] - tr.levels[i - 1][k]) > lip * ds + 1e-9) tr.jumps.emplace_back(i, k);
  }
  return tr;
}

IntervalReport interval_check(const std::vector<double>& levels, double bJ, double delta, double shift) {
  if (!(bJ >= 0)) throw std::invalid_argument("interval_check: bJ must be nonnegative");
  IntervalReport rep;
  rep.shift = shift;
  rep.min_bJ = 0.0;
  rep.min_delta = 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  for (double e0 : levels) {
    const double e = e0 - shift;
    // Membership: only k near e / (1 +- bJ) can matter, but scanning a short range is simpler.
    const double kmax = bJ < 1.0 ? std::ceil((std::fabs(e) + std::fabs(delta)) / (1.0 - bJ)) + 1.0 : std::ceil(std::fabs(e)) + 1.0;
    bool in = false;
    for (double k = 0.0; k <= std::min(kmax, 1e7) && !in; k += 1.0)
      in = k * (1.0 - bJ) - delta <= e && e <= k * (1.0 + bJ) + delta;
    if (!in) {
      rep.contained = false;
      ++rep.violations;
    }
    // Smallest bJ at this delta: the best k is floor(e) or ceil(e) (or 0).
    double need_b = std::fabs(e) <= delta ? 0.0 : inf;
    for (double k : {std::floor(e), std::ceil(e)})
      if (k >= 1.0) need_b = std::min(need_b, std::max(0.0, (std::fabs(e - k) - delta) / k));
    rep.min_bJ = std::max(rep.min_bJ, need_b);
    // Smallest delta at this bJ: distance to the nearest interval core [k(1-bJ), k(1+bJ)].
    double need_d = std::fabs(e);
    std::vector<double> ks{std::floor(e), std::ceil(e), std::floor(e / (1.0 + bJ)), std::ceil(e / (1.0 + bJ))};
    if (bJ < 1.0) {
      ks.push_back(std::floor(e / (1.0 - bJ)));
      ks.push_back(std::ceil(e / (1.0 - bJ)));
    }
    for (double k : ks) {
      if (k < 0.0) continue;
      const double lo = k * (1.0 - bJ), hi = k * (1.0 + bJ);
      need_d = std::min(need_d, e < lo ? lo - e : (e > hi ? e - hi : 0.0));
    }
    rep.min_delta = std::max(rep.min_delta, need_d);
  }
  return rep;
}

IntervalReport interval_check(const SpectrumTrace& trace, double bJ, double delta, bool shift_to_ground) {
  IntervalReport total;
  for (const auto& lv : trace.levels) {
    const double shift = shift_to_ground && !lv.empty() ? lv.front() : 0.0;
    const auto r = interval_check(lv, bJ, delta, shift);
    total.contained = total.contained && r.contained;
    total.violations += r.violations;
    total.min_bJ = std::max(total.min_bJ, r.min_bJ);
    total.min_delta = std::max(total.min_delta, r.min_delta);
  }
  return total;
}

DenseRegionReport indist_dense_check(const StabilizerCode& code, const VertexSet& a, const Graph& g,
                                     bool enumerate_paulis, double tol) {
  if (g.size() != code.n_qubits) throw std::invalid_argument("indist_dense_check: graph/code size mismatch");
  DenseRegionReport rep;
  rep.region = a;
  if (a.empty()) return rep;  // vacuous
  const VertexSet b = r_neighborhood(g, a, 1);
  if (b.size() > static_cast<std::size_t>(kDenseMaxQubits))
    throw std::invalid_argument("indist_dense_check: b_1(A) too large for dense algebra");
  const int nb = static_cast<int>(b.size());
  const CMat v = region_range_basis(code, b, 0x5eed + static_cast<uint64_t>(a.front()));
  const Eigen::Index m = v.cols();
  rep.code_dim = static_cast<std::size_t>(m);
  const VertexSet pos = positions_in(a, b);
  const Layout l = layout(pos, nb);
  const auto ka = static_cast<Eigen::Index>(l.scatter.size());
  const auto kr = static_cast<Eigen::Index>(l.rest.size());

  // psi_i as a (2^|A| x rest) matrix.
  std::vector<CMat> psi(static_cast<std::size_t>(m), CMat(ka, kr));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index r = 0; r < kr; ++r)
      for (Eigen::Index s = 0; s < ka; ++s) psi[static_cast<std::size_t>(i)](s, r) = v(static_cast<Eigen::Index>(l.scatter[s] | l.rest[r]), i);
  CMat sigma = CMat::Zero(ka, ka);
  for (const auto& p : psi) sigma += p * p.adjoint();
  sigma /= static_cast<double>(m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i; j < m; ++j) {
      CMat mij = psi[static_cast<std::size_t>(j)] * psi[static_cast<std::size_t>(i)].adjoint();
      if (i == j) mij -= sigma;
      rep.max_violation = std::max(rep.max_violation, mij.norm());
    }

  if (enumerate_paulis) {
    if (a.size() > 8) throw std::invalid_argument("indist_dense_check: Pauli enumeration is limited to |A| <= 8");
    rep.pauli_enumeration = true;
    const std::size_t count = std::size_t{1} << (2 * a.size());
    double worst = -1.0;
    for (std::size_t code_word = 1; code_word < count; ++code_word) {
      PauliString o(static_cast<std::size_t>(nb));
      for (std::size_t j = 0; j < a.size(); ++j) {
        const std::size_t t = (code_word >> (2 * j)) & 3;
        if (t & 1) o.x.set(static_cast<std::size_t>(pos[j]));
        if (t & 2) o.z.set(static_cast<std::size_t>(pos[j]));
      }
      CMat ov = v;
      apply_pauli(o, ov);
      CMat t = v.adjoint() * ov;
      const cplx c = t.trace() / static_cast<double>(m);
      t -= c * CMat::Identity(m, m);
      const double viol = t.norm();
      rep.max_violation = std::max(rep.max_violation, viol);
      if (viol > worst) {
        worst = viol;
        PauliString full(static_cast<std::size_t>(code.n_qubits));
        for (std::size_t j = 0; j < a.size(); ++j) {
          const auto q = static_cast<std::size_t>(a[j]), pj = static_cast<std::size_t>(pos[j]);
          if (o.x.get(pj)) full.x.set(q);
          if (o.z.get(pj)) full.z.set(q);
        }
        rep.witness = full;
      }
    }
    if (worst <= tol) rep.witness.reset();
  }
  rep.indistinguishable = rep.max_violation <= tol;
  return rep;
}

LcgcReport lcgc_check(const StabilizerCode& code, const VertexSet& a, const CMat& o, const std::vector<VertexSet>& c_list,
                      const Graph& g, double tol) {
  if (a.empty()) throw std::invalid_argument("lcgc_check: empty region");
  const auto ka = static_cast<Eigen::Index>(std::size_t{1} << a.size());
  if (o.rows() != ka || o.cols() != ka) throw std::invalid_argument("lcgc_check: operator size does not match the region");
  LcgcReport rep;
  const VertexSet b = r_neighborhood(g, a, 1);
  rep.applicable = is_locally_indistinguishable(code, a, g).indistinguishable;
  auto norm_on = [&](const VertexSet& c) {
    if (c.size() > static_cast<std::size_t>(kDenseMaxQubits)) throw std::invalid_argument("lcgc_check: region too large");
    const CMat v = region_range_basis(code, c, 0xc0de + c.size());
    const CMat x = apply_local(o, layout(positions_in(a, c), static_cast<int>(c.size())), v);
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (x.adjoint() * x + (x.adjoint() * x).adjoint()), Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  };
  VertexSet all(static_cast<std::size_t>(code.n_qubits));
  for (int32_t q = 0; q < code.n_qubits; ++q) all[static_cast<std::size_t>(q)] = q;
  rep.norm_global = norm_on(all);
  for (const auto& c : c_list) {
    if (!contains_all(c, b)) rep.applicable = false;
    if (!contains_all(c, a)) throw std::invalid_argument("lcgc_check: C must contain A");
    const double nc = norm_on(c);
    rep.norm_regions.push_back(nc);
    rep.max_abs_diff = std::max(rep.max_abs_diff, std::fabs(nc - rep.norm_global));
  }
  rep.holds = rep.max_abs_diff <= tol;
  return rep;
}

RelboundReport relbound_check(const CMat& h0, double b, uint64_t seed, double inject, double tol) {
  if (!(b >= 0)) throw std::invalid_argument("relbound_check: b must be nonnegative");
  const Eigen::Index d = h0.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CMat k(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) k(i, j) = cplx(nd(rng), nd(rng));
  k = (0.5 * (k + k.adjoint())).eval();
  const double hk = spectral_norm(h0 * k);
  CMat w = h0 * ((b / hk) * k) * h0;
  w = (0.5 * (w + w.adjoint())).eval();
  const EigenResult e0 = dense_eigen(h0);
  if (inject != 0.0) w += inject * e0.vectors.col(0) * e0.vectors.col(0).adjoint();

  RelboundReport rep;
  rep.b = b;
  for (int s = 0; s < 64; ++s) {
    CVec psi(d);
    for (Eigen::Index i = 0; i < d; ++i) psi(i) = cplx(nd(rng), nd(rng));
    const double den = (h0 * psi).norm();
    if (den > 1e-12) rep.measured_ratio = std::max(rep.measured_ratio, (w * psi).norm() / den);
  }
  for (Eigen::Index i = 0; i < d && e0.values(i) <= kZeroLevel; ++i)
    if ((w * e0.vectors.col(i)).norm() > tol) rep.kernel_ok = false;

  const auto lam = distinct_levels(e0.values, 1e-9);
  const Eigen::VectorXd ev = dense_eigen(h0 + w, false).values;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (double l : lam) {
      const double lo = std::min((1.0 - b) * l, (1.0 + b) * l), hi = std::max((1.0 - b) * l, (1.0 + b) * l);
      best = std::min(best, ev(i) < lo ? lo - ev(i) : (ev(i) > hi ? ev(i) - hi : 0.0));
    }
    rep.worst_excess = std::max(rep.worst_excess, best);
  }
  rep.contained = rep.worst_excess <= tol;
  return rep;
}

CMat qac_generator(const EigenResult& eig, const CMat& dh, const TransferCache& wt) {
  const Eigen::Index d = eig.values.size();
  CMat m = eig.vectors.adjoint() * dh * eig.vectors;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) m(i, j) *= wt(eig.values(j) - eig.values(i));
  return eig.vectors * m * eig.vectors.adjoint();
}

FlowReport qac_flow(const CMat& h0, const CMat& v, double s_end, const FlowOptions& opt, const TransferCache& wt) {
  if (opt.steps < 1) throw std::invalid_argument("qac_flow: steps must be positive");
  const Eigen::Index d = h0.rows();
  const EigenResult e0 = dense_eigen(h0);
  std::size_t mg = opt.ground_dim;
  if (mg == 0)
    while (mg < static_cast<std::size_t>(d) && e0.values(static_cast<Eigen::Index>(mg)) <= kZeroLevel) ++mg;
  if (mg == 0 || mg >= static_cast<std::size_t>(d)) throw std::invalid_argument("qac_flow: no gapped ground space");
  const auto mi = static_cast<Eigen::Index>(mg);

  FlowReport rep;
  rep.min_gap = std::numeric_limits<double>::infinity();
  auto generator = [&](double s) {
    const EigenResult e = dense_eigen(h0 + s * v);
    const double gap = e.values(mi) - e.values(mi - 1);
    if (gap <= 1e-9) throw std::runtime_error("qac_flow: levels collide across the ground-space cut");
    rep.min_gap = std::min(rep.min_gap, gap);
    return CMat(cplx(0.0, static_cast<double>(opt.sign)) * qac_generator(e, v, wt));
  };
  auto projector = [&](double s) {
    const EigenResult e = dense_eigen(h0 + s * v);
    const CMat q = e.vectors.leftCols(mi);
    return CMat(q * q.adjoint());
  };

  const double h = s_end / opt.steps;
  CMat u = CMat::Identity(d, d);
  CMat a0 = generator(0.0);
  for (int k = 0; k < opt.steps; ++k) {
    const double s = k * h;
    const CMat am = generator(s + 0.5 * h), a1 = generator(s + h);
    const CMat k1 = a0 * u;
    const CMat k2 = am * (u + 0.5 * h * k1);
    const CMat k3 = am * (u + 0.5 * h * k2);
    const CMat k4 = a1 * (u + h * k3);
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    a0 = a1;
  }
  const CMat diff = u.adjoint() * projector(s_end) * u - projector(0.0);
  rep.residual = spectral_norm(0.5 * (diff + diff.adjoint()));
  rep.unitarity_error = (u.adjoint() * u - CMat::Identity(d, d)).cwiseAbs().maxCoeff();
  rep.checked = rep.min_gap >= opt.min_gap_required;
  rep.U = std::move(u);
  return rep;
}

double lr_velocity(const LrBoundModel& model, const std::vector<int64_t>& gamma) {
  if (gamma.empty()) throw std::invalid_argument("lr_velocity: empty growth profile");
  auto gam = [&](std::size_t r) { return static_cast<double>(r < gamma.size() ? gamma[r] : gamma.back()); };
  if (const auto* e = std::get_if<ExpTailBound>(&model)) {
    if (!(e->mu > 0)) throw std::invalid_argument("lr_velocity: mu must be positive");
    double sum = 0.0;
    for (std::size_t r = 0; r < gamma.size(); ++r) sum += gam(r) * gam(r) * std::exp(-e->mu * r / 2.0);
    const double nn = gam(gamma.size());
    sum += nn * nn * std::exp(-e->mu * gamma.size() / 2.0) / (1.0 - std::exp(-e->mu / 2.0));
    return 8.0 * (std::exp(e->mu) + e->s * e->J) / e->mu * sum;
  }
  const auto& t = std::get<EtaTailBound>(model);
  if (!(t.a > 0 && t.b > 0)) throw std::invalid_argument("lr_velocity: eta parameters must be positive");
  double sum = 0.0;
  for (std::size_t r = 0;; ++r) {
    const double term = std::pow(static_cast<double>(r), t.m) * std::pow(gam(r), 2.0 + t.n) * eta(t.a / 2.0, r / t.b);
    sum += term;
    if (r >= gamma.size() && r > 0 && term * static_cast<double>(r) < 1e-17 * sum) break;
    if (r > 100000000) throw std::runtime_error("lr_velocity: eta sum did not settle");
  }
  return t.c * t.J * sum;
}

LrProfile lr_profile(const CMat& h, const CMat& a, const VertexSet& x, const CMat& b, const VertexSet& y, const Graph& g,
                     const std::vector<double>& t_grid, const LrBoundModel& model) {
  if (x.empty() || y.empty()) throw std::invalid_argument("lr_profile: supports must be nonempty");
  LrProfile prof;
  prof.distance = set_distance(g, x, y);
  if (prof.distance <= 0) throw std::invalid_argument("lr_profile: supports must be disjoint");
  prof.velocity = lr_velocity(model, growth_profile(g).gamma);
  const EigenResult e = dense_eigen(h);
  const CMat at = e.vectors.adjoint() * a * e.vectors, bt = e.vectors.adjoint() * b * e.vectors;
  const double pre = 2.0 * spectral_norm(a) * spectral_norm(b) * static_cast<double>(x.size());
  const Eigen::Index d = h.rows();
  for (double t : t_grid) {
    CMat ev = at;
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = 0; i < d; ++i) ev(i, j) *= std::exp(cplx(0.0, (e.values(i) - e.values(j)) * t));
    const double nrm = spectral_norm(ev * bt - bt * ev);
    double bound;
    if (const auto* ex = std::get_if<ExpTailBound>(&model))
      bound = pre * std::exp(ex->mu / 4.0 * (prof.velocity * std::fabs(t) - prof.distance));
    else {
      const auto& et = std::get<EtaTailBound>(model);
      bound = pre * std::exp(2.0 * prof.velocity * std::fabs(t)) * eta(et.a / 2.0, prof.distance / (2.0 * et.b));
    }
    prof.samples.push_back({t, nrm, bound});
    prof.below_bound = prof.below_bound && nrm <= bound;
  }
  return prof;
}

std::vector<LocalPiece> local_decomposition(const CMat& o, Vertex u, const Graph& g) {
  const int n = g.size();
  require_dense(n, "local_decomposition");
  if (o.rows() != (Eigen::Index{1} << n) || o.cols() != o.rows())
    throw std::invalid_argument("local_decomposition: operator size does not match the graph");
  const auto dist = g.distances(u);
  const int32_t ecc = *std::max_element(dist.begin(), dist.end());
  std::vector<LocalPiece> out;
  CMat prev;
  VertexSet prev_ball;
  for (int32_t r = 0; r <= ecc; ++r) {
    LocalPiece p;
    p.r = r;
    p.ball = ball(g, u, r);
    const CMat avg = partial_average(o, n, p.ball);
    p.op = avg;
    if (r > 0) p.op -= embed(prev, positions_in(prev_ball, p.ball), static_cast<int>(p.ball.size()));
    p.norm = spectral_norm(p.op);
    p.tail_error = spectral_norm(o - embed(avg, p.ball, n));
    prev = avg;
    prev_ball = p.ball;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace gapcert
