#include <doctest.h>

#include <cmath>
#include <random>

#include "gapcert/edlab.hpp"
#include "gapcert/families.hpp"

using namespace gapcert;

namespace {

const TransferCache& transfer() {
  static const Filter f;
  static const TransferCache wt(f);
  return wt;
}

StabilizerCode corpus(const std::string& name) { return load_code(std::string(GAPCERT_TEST_DATA) + "/codes/" + name); }

PauliString pauli(const std::string& s) { return PauliString::parse(s); }

bool is_projector(const CMat& p) { return (p * p - p).cwiseAbs().maxCoeff() < 1e-10 && hermiticity_error(p) < 1e-12; }

// Transverse-field Ising chain: sum Z_i Z_{i+1} + hx sum X_i.
PauliSum ising_chain(int n, double hx) {
  PauliSum h(n);
  for (int i = 0; i + 1 < n; ++i) {
    PauliString p(static_cast<std::size_t>(n));
    p.z.set(static_cast<std::size_t>(i));
    p.z.set(static_cast<std::size_t>(i + 1));
    h.add(1.0, p);
  }
  h += build_perturbation(n, {hx, 0.0});
  return h;
}

}  // namespace

TEST_CASE("PauliSum matches its dense matrix, serial and parallel agree") {
  PauliSum h(4);
  h.add(0.7, pauli("XYZI"));
  h.add(-0.3, pauli("ZZII"));
  h.add(1.1, pauli("IIYY"));
  h.add(0.2, pauli("IIII"));
  const CMat dense = h.dense();
  CHECK(hermiticity_error(dense) < 1e-15);
  CMat in = CMat::Random(16, 3), out_p, out_s;
  h.apply(in, out_p, Exec::Parallel);
  h.apply(in, out_s, Exec::Serial);
  CHECK(out_p == out_s);
  CHECK((dense * in - out_p).cwiseAbs().maxCoeff() < 1e-13);
  CHECK_FALSE(h.is_real());

  // Y on qubit 0 alone: Y|0> = i|1>.
  PauliSum y(1);
  y.add(1.0, pauli("Y"));
  CHECK(std::abs(y.dense()(1, 0) - cplx(0, 1)) < 1e-15);

  const PauliSum real = ising_chain(5, 0.4);
  CHECK(real.is_real());
  RMat r = RMat::Random(32, 2), rout;
  real.apply(r, rout);
  CHECK((real.dense().real() * r - rout).cwiseAbs().maxCoeff() < 1e-13);
  CHECK_THROWS_AS(h.apply(RMat::Random(16, 1), rout), std::invalid_argument);
  CHECK(h.norm_bound() == doctest::Approx(2.3));
}

TEST_CASE("H0 spectrum: integers and code-space degeneracy") {
  const auto t22 = toric_code(2, 2);
  const CMat h0 = build_H0(t22.code).dense();
  const auto e = dense_eigen(h0, false).values;
  int zeros = 0;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    CHECK(std::fabs(e(i) - std::round(e(i))) < 1e-9);
    CHECK(e(i) > -1e-9);
    CHECK(e(i) < 8.0 + 1e-9);
    if (std::fabs(e(i)) < 1e-9) ++zeros;
  }
  CHECK(zeros == 4);

  StabilizerCode zz{2, {pauli("ZZ")}};
  const auto ez = dense_eigen(build_H0(zz).dense(), false).values;
  CHECK(ez(0) == doctest::Approx(0.0));
  CHECK(ez(1) == doctest::Approx(0.0));
  CHECK(ez(2) == doctest::Approx(1.0));
  CHECK(ez(3) == doctest::Approx(1.0));

  StabilizerCode empty{3, {}};
  CHECK(build_H0(empty).dense().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("syndrome sectors resolve H0") {
  for (const char* name : {"four_two_two.code", "five_qubit.code", "steane.code"}) {
    const auto code = corpus(name);
    const CMat h0 = build_H0(code).dense();
    const auto sectors = sector_projectors(code);
    CHECK(sectors.size() == (std::size_t{1} << code.generators.size()));
    CMat sum = CMat::Zero(h0.rows(), h0.cols()), weighted = sum;
    for (const auto& s : sectors) {
      CHECK(is_projector(s.projector));
      sum += s.projector;
      weighted += static_cast<double>(s.weight) * s.projector;
    }
    CHECK((sum - CMat::Identity(h0.rows(), h0.cols())).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((weighted - h0).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((sectors.front().projector - ground_projector(code)).cwiseAbs().maxCoeff() < 1e-10);
  }
  // A dependent generator: only syndromes consistent with the product survive.
  StabilizerCode dep{3, {pauli("ZZI"), pauli("IZZ"), pauli("ZIZ")}};
  CHECK(sector_projectors(dep).size() == 4);
}

TEST_CASE("defect filtration telescopes") {
  const auto t22 = toric_code(2, 2);
  const auto pieces = defect_filtration(t22.code, 0, t22.graph);
  REQUIRE_FALSE(pieces.empty());
  const CMat p = ground_projector(t22.code);
  const CMat pb0 = region_projector(t22.code, ball(t22.graph, 0, 0));
  CMat sum = CMat::Zero(p.rows(), p.cols());
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    CHECK(is_projector(pieces[i]));
    for (std::size_t j = 0; j < i; ++j) CHECK((pieces[i] * pieces[j]).cwiseAbs().maxCoeff() < 1e-10);
    sum += pieces[i];
  }
  CHECK((sum - (pb0 - p)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("perturbation norm") {
  const PauliSum v = build_perturbation(6, {0.03, -0.04});
  CHECK(v.norm_bound() == doctest::Approx(6 * 0.07));
  CHECK(spectral_norm(v.dense()) <= 6 * 0.07 + 1e-12);
  CHECK(spectral_norm(v.dense()) == doctest::Approx(6 * 0.05).epsilon(1e-10));
}

TEST_CASE("spectrum trace on toric(2,2)") {
  const auto t22 = toric_code(2, 2);
  const PauliSum h0 = build_H0(t22.code);
  const PauliSum v = build_perturbation(8, {1.0, 0.0});
  const auto tr = spectrum_trace(h0, v, {0.0, 0.01, 0.02}, 8);
  CHECK(tr.ground_degeneracy == 4);
  CHECK(tr.degeneracy_resolved);
  CHECK(tr.jumps.empty());
  for (double e : tr.levels[0]) CHECK(std::fabs(e - std::round(e)) < 1e-9);
  const auto& l = tr.levels[2];
  CHECK(l[3] - l[0] <= 1e-2);
  CHECK(l[4] - l[3] > 0.9);

  const auto at0 = interval_check(tr.levels[0], 0.0, 1e-9);
  CHECK(at0.contained);
  CHECK(at0.min_bJ == 0.0);
  CHECK(at0.min_delta < 1e-9);
  const auto ok = interval_check(tr, 0.3, 1e-2, true);
  CHECK(ok.contained);
  CHECK(ok.min_bJ <= 0.3);
  const auto bad = interval_check(tr, 0.0, -1.0);
  CHECK_FALSE(bad.contained);
  CHECK(bad.violations > 0);

  // Serial and parallel traces agree exactly.
  const auto ser = spectrum_trace(h0, v, {0.0, 0.01, 0.02}, 8, {}, Exec::Serial);
  CHECK(ser.levels == tr.levels);
}

TEST_CASE("interval membership by hand") {
  const auto r = interval_check({0.0, 0.95, 2.1, 3.0}, 0.1, 0.0);
  CHECK(r.contained);
  CHECK(r.min_bJ == doctest::Approx(0.05));
  CHECK_FALSE(interval_check({1.5}, 0.1, 0.1).contained);
  CHECK(interval_check({1.5}, 0.1, 0.1).min_delta == doctest::Approx(0.3));
  CHECK(interval_check({1.3}, 0.1, 0.0, 0.2).contained);
  CHECK_THROWS_AS(interval_check({1.0}, -0.1, 0.0), std::invalid_argument);
}

TEST_CASE("LOBPCG agrees with the dense solver") {
  const PauliSum h = ising_chain(10, 0.7);
  LowestOptions o;
  o.count = 4;
  o.tol = 1e-10;
  const auto it = lobpcg(h, o);
  const auto ref = dense_eigen(h.dense(), false).values;
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(it.values(i) == doctest::Approx(ref(i)).epsilon(1e-9));
  const CMat hv = h.dense() * it.vectors;
  for (Eigen::Index i = 0; i < 4; ++i) CHECK((hv.col(i) - it.values(i) * it.vectors.col(i)).norm() < 1e-8);

  PauliSum c(10);
  c += ising_chain(10, 0.7);
  c.add(0.3, pauli("YZIIIIIIII"));
  CHECK_FALSE(c.is_real());
  const auto itc = lobpcg(c, o);
  const auto refc = dense_eigen(c.dense(), false).values;
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(itc.values(i) == doctest::Approx(refc(i)).epsilon(1e-9));
}

TEST_CASE("Krylov spectrum of a stabilizer Hamiltonian closes on its distinct levels") {
  const auto t22 = toric_code(2, 2);
  const auto ks = krylov_distinct_spectrum(build_H0(t22.code), 5);
  CHECK(ks.invariant);
  REQUIRE(ks.values.size() == 5);
  for (std::size_t i = 0; i < ks.values.size(); ++i) CHECK(ks.values[i] == doctest::Approx(2.0 * i).epsilon(1e-9));
  double w = 0.0;
  for (double x : ks.weights) w += x;
  CHECK(w == doctest::Approx(1.0));
}

TEST_CASE("dense indistinguishability agrees with the symplectic test") {
  auto compare = [](const StabilizerCode& code, const Graph& g) {
    int checked = 0;
    for (Vertex u = 0; u < g.size(); ++u)
      for (int32_t r = 0; r <= 2; ++r) {
        const VertexSet a = ball(g, u, r);
        if (r_neighborhood(g, a, 1).size() > static_cast<std::size_t>(kDenseMaxQubits)) continue;
        const auto sym = is_locally_indistinguishable(code, a, g);
        const auto dense = indist_dense_check(code, a, g);
        CHECK(sym.indistinguishable == dense.indistinguishable);
        ++checked;
      }
    return checked;
  };
  const auto t22 = toric_code(2, 2);
  CHECK(compare(t22.code, t22.graph) > 0);
  for (const char* name : {"four_two_two.code", "five_qubit.code", "steane.code", "shor.code", "repetition5.code"}) {
    const auto code = corpus(name);
    CHECK(compare(code, interaction_graph(code)) > 0);
  }

  // Empty region: trivially indistinguishable.
  CHECK(indist_dense_check(t22.code, {}, t22.graph).indistinguishable);
  // Full support of a logical: distinguishable, and the enumeration finds a logical witness.
  const auto c422 = corpus("four_two_two.code");
  const auto g422 = interaction_graph(c422);
  const auto rep = indist_dense_check(c422, {0, 1}, g422, true);
  CHECK_FALSE(rep.indistinguishable);
  REQUIRE(rep.witness.has_value());
  CHECK_FALSE(rep.witness->is_identity());
}

TEST_CASE("local consistency of global and regional ground projectors") {
  const auto t22 = toric_code(2, 2);
  CMat x(2, 2);
  x << 0, 1, 1, 0;
  const VertexSet a{0};
  const VertexSet b1 = r_neighborhood(t22.graph, a, 1);
  VertexSet all(8);
  for (int i = 0; i < 8; ++i) all[static_cast<std::size_t>(i)] = i;
  const auto rep = lcgc_check(t22.code, a, x, {b1, all}, t22.graph);
  CHECK(rep.applicable);
  CHECK(rep.holds);
  CHECK(rep.max_abs_diff < 1e-9);
  CHECK_THROWS_AS(lcgc_check(t22.code, a, CMat::Identity(4, 4), {b1}, t22.graph), std::invalid_argument);
}

TEST_CASE("relatively bounded perturbations keep levels in their intervals") {
  const CMat h0 = build_H0(corpus("steane.code")).dense();
  const auto zero = relbound_check(h0, 0.0, 3);
  CHECK(zero.contained);
  CHECK(zero.worst_excess < 1e-9);
  const auto ok = relbound_check(h0, 0.1, 3);
  CHECK(ok.kernel_ok);
  CHECK(ok.contained);
  CHECK(ok.measured_ratio <= 0.1 + 1e-9);
  const auto bad = relbound_check(h0, 0.1, 3, 0.5);
  CHECK_FALSE(bad.kernel_ok);
  CHECK_FALSE(bad.contained);
}

TEST_CASE("quasi-adiabatic flow transports the ground space") {
  const auto code = corpus("four_two_two.code");
  const CMat h0 = build_H0(code).dense();
  const CMat v = build_perturbation(4, {0.05, 0.0}).dense();
  const auto& wt = transfer();

  FlowOptions o;
  const auto still = qac_flow(h0, CMat::Zero(16, 16), 1.0, o, wt);
  CHECK((still.U - CMat::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-12);

  o.steps = 4;
  const auto coarse = qac_flow(h0, v, 1.0, o, wt);
  o.steps = 8;
  const auto fine = qac_flow(h0, v, 1.0, o, wt);
  CHECK(fine.checked);
  CHECK(fine.min_gap >= 0.9);
  CHECK(fine.unitarity_error < 1e-6);
  const double slope = std::log2(coarse.residual / fine.residual);
  CHECK(slope == doctest::Approx(4.0).epsilon(0.1));

  o.steps = 32;
  CHECK(qac_flow(h0, v, 1.0, o, wt).residual <= 1e-6);
  o.sign = -1;
  CHECK(qac_flow(h0, v, 1.0, o, wt).residual > 1e-2);

  // Along a path that closes the gap below the required margin the result is flagged.
  FlowOptions weak;
  weak.steps = 4;
  const auto flagged = qac_flow(h0, build_perturbation(4, {0.5, 0.0}).dense(), 1.0, weak, wt);
  CHECK(flagged.min_gap < 0.5);
  CHECK_FALSE(flagged.checked);
}

TEST_CASE("Lieb-Robinson profile stays below the bound") {
  const int n = 8;
  const Graph g = path_graph(n);
  const CMat h = ising_chain(n, 0.5).dense();
  const CMat a = embed((CMat(2, 2) << 0, 1, 1, 0).finished(), {0}, n);
  const CMat b = embed((CMat(2, 2) << 1, 0, 0, -1).finished(), {n - 1}, n);
  const auto prof = lr_profile(h, a, {0}, b, {n - 1}, g, {0.0, 0.25, 0.5, 1.0, 2.0}, ExpTailBound{1.0, 0.5, 1.0});
  CHECK(prof.below_bound);
  CHECK(prof.distance == n - 1);
  CHECK(prof.samples[0].norm < 1e-12);

  // Commuting dynamics never spread a Z.
  PauliSum zz = ising_chain(n, 0.0);
  const CMat az = embed((CMat(2, 2) << 1, 0, 0, -1).finished(), {0}, n);
  const auto still = lr_profile(zz.dense(), az, {0}, b, {n - 1}, g, {1.0, 5.0}, ExpTailBound{});
  for (const auto& s : still.samples) CHECK(s.norm < 1e-12);

  const auto eta_prof = lr_profile(h, a, {0}, b, {n - 1}, g, {0.0, 0.5}, EtaTailBound{1.0, 0.5, 1.0 / 14.0, 1.0, 0, 0});
  CHECK(eta_prof.below_bound);
  CHECK(eta_prof.velocity > 0.0);
  CHECK_THROWS_AS(lr_profile(h, a, {0}, b, {0}, g, {1.0}, ExpTailBound{}), std::invalid_argument);

  // Larger growth means a larger velocity.
  CHECK(lr_velocity(ExpTailBound{}, {1, 3, 5}) < lr_velocity(ExpTailBound{}, {1, 5, 13}));
}

TEST_CASE("local decomposition reconstructs the operator") {
  const int n = 5;
  const Graph g = path_graph(n);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  CMat o(32, 32);
  for (Eigen::Index j = 0; j < 32; ++j)
    for (Eigen::Index i = 0; i < 32; ++i) o(i, j) = cplx(nd(rng), nd(rng));
  const auto pieces = local_decomposition(o, 2, g);
  CMat sum = CMat::Zero(32, 32);
  for (const auto& p : pieces) sum += embed(p.op, p.ball, n);
  CHECK((sum - o).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(pieces.back().tail_error < 1e-10);
  for (std::size_t i = 1; i < pieces.size(); ++i) CHECK(pieces[i].tail_error <= pieces[i - 1].tail_error + 1e-10);

  const CMat id = CMat::Identity(32, 32);
  const auto idp = local_decomposition(id, 2, g);
  CHECK(idp[0].norm == doctest::Approx(1.0));
  for (std::size_t i = 1; i < idp.size(); ++i) CHECK(idp[i].norm < 1e-12);

  // An operator on the centre qubit has nothing beyond radius 0.
  const CMat xc = embed((CMat(2, 2) << 0, 1, 1, 0).finished(), {2}, n);
  const auto xp = local_decomposition(xc, 2, g);
  CHECK(xp[0].norm == doctest::Approx(1.0));
  for (std::size_t i = 1; i < xp.size(); ++i) CHECK(xp[i].norm < 1e-12);
}
