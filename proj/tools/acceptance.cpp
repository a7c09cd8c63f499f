// One line per acceptance criterion. Tolerances and time limits are fixed here; the exit
// status is 0 exactly when the failing set equals --expect-red.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "gapcert/certifier.hpp"
#include "gapcert/edlab.hpp"
#include "gapcert/families.hpp"
#include "gapcert/filters.hpp"
#include "reference_sums.hpp"

using namespace gapcert;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [FAILED: " << what << "]";
    }
  }
};

std::vector<double> logspace(double e0, double e1, double step) {
  std::vector<double> v;
  for (double e = e0; e <= e1 + 1e-9; e += step) v.push_back(std::pow(10.0, e));
  return v;
}

std::string corpus_path(const std::string& name) { return std::string(GAPCERT_TEST_DATA) + "/codes/" + name; }

struct NamedCode {
  std::string name;
  StabilizerCode code;
  Graph graph;
};

// Every code of at most 12 qubits in the test corpus.
std::vector<NamedCode> small_corpus() {
  std::vector<NamedCode> out;
  for (const char* f : {"four_two_two.code", "five_qubit.code", "repetition5.code", "steane.code", "shor.code"}) {
    auto c = load_code(corpus_path(f));
    out.push_back({f, c, interaction_graph(c)});
  }
  for (auto [a, b] : {std::pair{2, 2}, {2, 3}}) {
    auto t = toric_code(a, b);
    out.push_back({t.label, t.code, t.graph});
  }
  return out;
}

double ground_splitting(const Eigen::VectorXd& e) { return e(3) - e(0); }

// ---------------------------------------------------------------------------------------------

void criterion_unperturbed_spectra(Outcome& o) {
  constexpr double tol = 1e-9;
  auto integral = [&](double e) { return e > -tol && std::fabs(e - std::round(e)) <= tol; };

  const auto t22 = toric_code(2, 2);
  const auto e22 = dense_eigen(build_H0(t22.code).dense(), false).values;
  bool ints = std::all_of(e22.begin(), e22.end(), integral);
  const auto deg22 = std::count_if(e22.begin(), e22.end(), [&](double e) { return std::fabs(e) <= tol; });
  o.detail << "toric(2,2): 256 levels integral=" << ints << " degeneracy=" << deg22;
  o.require(ints && deg22 == 4, "toric(2,2) spectrum");

  // 2^18 states: the distinct levels come from a Krylov space that closes, the degeneracy
  // from the lowest six eigenpairs.
  const auto t33 = toric_code(3, 3);
  const PauliSum h33 = build_H0(t33.code);
  const auto ks = krylov_distinct_spectrum(h33, 7);
  ints = ks.invariant && std::all_of(ks.values.begin(), ks.values.end(), integral);
  LowestOptions lo;
  lo.count = 6;
  lo.tol = 1e-9;
  lo.seed = 7;
  const auto low = lobpcg(h33, lo).values;
  const auto deg33 = std::count_if(low.begin(), low.end(), [&](double e) { return std::fabs(e) <= tol; });
  o.detail << "; toric(3,3): " << ks.values.size() << " distinct levels integral=" << ints
           << " degeneracy=" << deg33 << " next=" << low(4);
  o.require(ints && deg33 == 4 && integral(low(4)), "toric(3,3) spectrum");
}

void criterion_interval_structure(Outcome& o) {
  constexpr double bJ = 0.3, delta = 1e-2, min_ratio = 5.0, J_split = 0.02;
  const auto t22 = toric_code(2, 2);
  const CMat h0 = build_H0(t22.code).dense();
  double split22 = 0;
  for (double J : {0.01, 0.02, 0.05}) {
    const CMat h = h0 + build_perturbation(8, {J, 0.0}).dense();
    const auto e = dense_eigen(h, false).values;
    std::vector<double> levels(e.begin(), e.end());
    const auto r = interval_check(levels, bJ, delta, levels.front());
    o.detail << (J == 0.01 ? "" : "; ") << "J=" << J << ": contained=" << r.contained << " min_delta=" << std::setprecision(3) << r.min_delta
             << " min_bJ=" << r.min_bJ;
    std::ostringstream what;
    what << "toric(2,2) J=" << J << " outside the intervals";
    o.require(r.contained, what.str());
    if (J == J_split) split22 = ground_splitting(e);
  }
  const auto t33 = toric_code(3, 3);
  const PauliSum h33 = build_H0(t33.code) += build_perturbation(18, {J_split, 0.0});
  LowestOptions lo;
  lo.count = 4;
  lo.tol = 1e-10;
  lo.seed = 3;
  const double split33 = ground_splitting(lobpcg(h33, lo).values);
  const double ratio = split22 / split33;
  o.detail << "; splitting at J=0.02: toric(2,2) " << split22 << ", toric(3,3) " << split33 << ", ratio " << ratio;
  o.require(ratio >= min_ratio, "splitting ratio below 5");
}

void criterion_transport(Outcome& o) {
  constexpr double J = 0.05, min_gap = 0.9, residual_tol = 1e-3, slope_tol = 0.3, floor = 1e-12;
  const auto t22 = toric_code(2, 2);
  const CMat h0 = build_H0(t22.code).dense(), v = build_perturbation(8, {J, 0.0}).dense();
  const Filter f;
  const TransferCache wt(f);
  std::vector<std::pair<double, double>> pts;
  double finest = 0, gap = std::numeric_limits<double>::infinity();
  o.detail << "toric(2,2), J=0.05: residuals";
  for (int steps : {8, 16, 32}) {
    FlowOptions fo;
    fo.steps = steps;
    fo.min_gap_required = min_gap;
    const auto fr = qac_flow(h0, v, 1.0, fo, wt);
    o.detail << " " << std::setprecision(3) << fr.residual;
    if (fr.residual > floor) pts.emplace_back(std::log(1.0 / steps), std::log(fr.residual));
    finest = fr.residual;
    gap = std::min(gap, fr.min_gap);
  }
  double slope = std::nan("");
  if (pts.size() >= 2) {
    double mx = 0, my = 0;
    for (auto [x, y] : pts) mx += x, my += y;
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0, sxx = 0;
    for (auto [x, y] : pts) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx);
    slope = sxy / sxx;
  }
  o.detail << "; slope " << std::setprecision(4) << slope << "; min gap " << gap;
  o.require(gap >= min_gap, "path gap");
  o.require(finest <= residual_tol, "residual");
  o.require(std::fabs(slope - 4.0) <= slope_tol, "convergence order");
}

void criterion_filter_suite(Outcome& o) {
  constexpr double unit_tol = 1e-6, stop_tol = 1e-4, transfer_tol = 1e-4;
  const Filter f;
  const double w0 = std::abs(f.w_hat(0.0) - 1.0);
  double stop = 0;
  for (double om : {0.5, 0.6, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0}) stop = std::max({stop, std::abs(f.w_hat(om)), std::abs(f.w_hat(-om))});
  const double W0 = std::fabs(f.W(0.0) - 0.5);
  double transfer = 0;
  for (double om : {0.75, 1.0, 2.0}) transfer = std::max(transfer, std::abs(f.W_hat(om) - std::complex<double>(0, -1.0 / om)));
  std::vector<double> ts;
  for (double t = 0.0; t <= 2000.0; t += 7.3) ts.push_back(t);
  const auto bounds = verify_bounds(f, ts);

  std::mt19937_64 rng(11);
  int admissible = 0, held = 0;
  while (admissible < 20) {
    const int k = static_cast<int>(rng() % 5);
    const double a = std::exp(std::uniform_real_distribution<double>(std::log(0.05), std::log(5.0))(rng));
    const double t = std::exp(std::uniform_real_distribution<double>(4.0, 9.0)(rng));
    const auto r = intua_check(k, a, t);
    if (!r.precondition_met) continue;
    ++admissible;
    held += r.holds;
  }
  o.detail << std::setprecision(3) << "|w~(0)-1|=" << w0 << " max|w~(|w|>=0.5)|=" << stop << " |W(0)-1/2|=" << W0
           << " max|W~+i/w|=" << transfer << " w-bound on " << bounds.samples.size()
           << " samples (margin " << bounds.min_margin << ") tail lemma " << held << "/20";
  o.require(w0 <= unit_tol, "w~(0)");
  o.require(stop <= stop_tol, "stop band");
  o.require(W0 <= unit_tol, "W(0)");
  o.require(transfer <= transfer_tol, "W~ against -i/w");
  o.require(bounds.w_bound_holds && !bounds.samples.empty(), "w bound");
  o.require(held == 20, "tail lemma");
}

void criterion_family_trends(Outcome& o) {
  constexpr double max_spread = 0.2;
  const Perturbation p{0.01, 5.0};
  std::vector<double> j0;
  bool all_certified = true, all_decreasing = true;
  for (double a : {0.1, 0.2, 0.3, 0.4, 0.5}) {
    SemiHyperbolicSpec s;
    s.a = a;
    s.l_grid = logspace(10, 15, 0.5);
    const auto rep = certify(model_semi_hyperbolic(s), p);
    all_certified = all_certified && rep.verdict == Verdict::CertifiedTrend;
    for (std::size_t i = 1; i < rep.points.size(); ++i)
      all_decreasing = all_decreasing && rep.points[i].ln_delta < rep.points[i - 1].ln_delta;
    j0.push_back(rep.points.back().ln_J0);
  }
  const auto [lo, hi] = std::minmax_element(j0.begin(), j0.end());
  const double spread = std::expm1(*hi - *lo);

  std::vector<ScanInput> in;
  for (int d = 3; d <= 8; ++d) in.push_back({static_cast<double>(d), std::nan(""), model_stacked(d, logspace(9, 15, 1))});
  const auto rows = threshold_scan(in, p);
  bool stacked_decreasing = true;
  for (std::size_t i = 1; i < rows.size(); ++i) stacked_decreasing = stacked_decreasing && rows[i].ln_J0 < rows[i - 1].ln_J0;

  const auto hyp = certify(model_hyperbolic(1.0, 0.5, logspace(2, 6, 1)), p).verdict;
  o.detail << "semi-hyperbolic certified=" << all_certified << " delta decreasing=" << all_decreasing
           << " J0 spread=" << std::setprecision(3) << spread << "; stacked ln J0";
  for (const auto& r : rows) o.detail << " " << std::setprecision(5) << r.ln_J0;
  o.detail << "; hyperbolic " << verdict_name(hyp);
  o.require(all_certified, "semi-hyperbolic verdicts");
  o.require(all_decreasing, "delta not decreasing");
  o.require(spread <= max_spread, "J0 spread");
  o.require(stacked_decreasing, "stacked J0 not decreasing");
  o.require(hyp != Verdict::CertifiedTrend, "hyperbolic limit certified");
}

void criterion_stretched_growth(Outcome& o) {
  const auto lnN = logspace(20, 24, 0.5);
  const auto good = certify(model_stretched(0.5, 1.5, lnN), {0.01, 5.0}).verdict;
  const auto bad = certify(model_stretched(0.5, 1.0, lnN), {0.01, 5.0}).verdict;
  o.detail << "rho*=ln^1.5 N: " << verdict_name(good) << "; rho*=ln N: " << verdict_name(bad);
  o.require(good == Verdict::CertifiedTrend, "ln^1.5 N");
  o.require(bad != Verdict::CertifiedTrend, "ln N");
}

void criterion_oracle_equivalence(Outcome& o) {
  constexpr double tol = 1e-9;
  const auto corpus = small_corpus();
  std::size_t regions = 0, disagreements = 0;
  for (const auto& c : corpus) {
    for (Vertex u = 0; u < c.graph.size(); ++u) {
      const auto dist = c.graph.distances(u);
      const int32_t ecc = *std::max_element(dist.begin(), dist.end());
      for (int32_t r = 0; r <= ecc; ++r) {
        const VertexSet a = ball(c.graph, u, r);
        const bool sym = is_locally_indistinguishable(c.code, a, c.graph).indistinguishable;
        const bool den = indist_dense_check(c.code, a, c.graph, false, tol).indistinguishable;
        ++regions;
        disagreements += sym != den;
      }
    }
  }
  o.detail << regions << " balls over " << corpus.size() << " codes, " << disagreements << " disagreements";
  o.require(disagreements == 0, "symplectic vs dense");

  // Local consistency: random (A, O, C) with A indistinguishable and C enclosing b_1(A).
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd;
  int triples = 0;
  double worst = 0;
  bool applicable = true;
  while (triples < 20) {
    const auto& c = corpus[rng() % corpus.size()];
    const int n = c.code.n_qubits;
    const Vertex u = static_cast<Vertex>(rng() % static_cast<uint64_t>(n));
    VertexSet a = ball(c.graph, u, static_cast<int32_t>(rng() % 2));
    if (a.size() > 3) a.resize(1 + rng() % 3);
    if (!is_locally_indistinguishable(c.code, a, c.graph).indistinguishable) continue;
    const Eigen::Index dim = Eigen::Index{1} << a.size();
    CMat op(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j) op(i, j) = {nd(rng), nd(rng)};
    VertexSet cset = r_neighborhood(c.graph, a, 1);
    for (Vertex v = 0; v < n; ++v)
      if (rng() % 3 == 0) cset.push_back(v);
    std::sort(cset.begin(), cset.end());
    cset.erase(std::unique(cset.begin(), cset.end()), cset.end());
    const auto rep = lcgc_check(c.code, a, op, {cset}, c.graph, tol);
    applicable = applicable && rep.applicable;
    worst = std::max(worst, rep.max_abs_diff);
    ++triples;
  }
  o.detail << "; norm identity on 20 triples, worst diff " << std::setprecision(3) << worst;
  o.require(applicable && worst <= tol, "norm identity");

  // Relatively bounded perturbations on the stabilizer Hamiltonians of three corpus codes.
  int contained = 0;
  std::uniform_real_distribution<double> ub(0.05, 0.5);
  for (int i = 0; i < 20; ++i) {
    const auto& c = corpus[static_cast<std::size_t>(3 + i % 3)];  // steane, shor, toric(2,2)
    const auto r = relbound_check(build_H0(c.code).dense(), ub(rng), rng());
    contained += r.contained && r.kernel_ok;
  }
  o.detail << "; relative bound " << contained << "/20";
  o.require(contained == 20, "relatively bounded containment");

  // Commutator growth on 8-10 qubit instances against the exponential-tail bound.
  std::vector<double> t_grid;
  for (double t = 0; t <= 3.0 + 1e-12; t += 0.25) t_grid.push_back(t);
  const CMat x = (CMat(2, 2) << 0, 1, 1, 0).finished(), z = (CMat(2, 2) << 1, 0, 0, -1).finished();
  auto lr_instance = [&](const std::string& label, const StabilizerCode& code, const Graph& g, double J) {
    const int n = code.n_qubits;
    const CMat h = build_H0(code).dense() + build_perturbation(n, {J, 0.0}).dense();
    const auto dist = g.distances(0);
    const Vertex far = static_cast<Vertex>(std::max_element(dist.begin(), dist.end()) - dist.begin());
    const auto prof = lr_profile(h, embed(x, {0}, n), {0}, embed(z, {far}, n), {far}, g, t_grid,
                                 ExpTailBound{1.0, J, 1.0});
    double ratio = 0;
    for (const auto& s : prof.samples) ratio = std::max(ratio, s.norm / s.bound);
    o.detail << "; LR " << label << " max norm/bound " << std::setprecision(3) << ratio;
    o.require(prof.below_bound, "LR bound on " + label);
  };
  const auto t22 = toric_code(2, 2);
  lr_instance("toric(2,2)", t22.code, t22.graph, 0.05);
  lr_instance("shor", corpus[4].code, corpus[4].graph, 0.05);
  StabilizerCode rep10{10, {}};
  for (int i = 0; i + 1 < 10; ++i) {
    PauliString p(10);
    p.z.set(static_cast<std::size_t>(i));
    p.z.set(static_cast<std::size_t>(i + 1));
    rep10.generators.push_back(p);
  }
  lr_instance("repetition(10)", rep10, interaction_graph(rep10), 0.5);
}

void criterion_certifier_numerics(Outcome& o) {
  constexpr double tol = 1e-9, mu = 5.0;
  struct Table {
    std::vector<double> gamma;
    double D, rho, ln_N;
  };
  std::vector<Table> tables;
  std::vector<double> g1(10001), g2(10001), g3(10001);
  for (std::size_t r = 0; r < g1.size(); ++r) {
    g1[r] = 2.0 * r + 1.0;
    g2[r] = 2.0 * r * r + 2.0 * r + 1.0;
    g3[r] = std::floor(std::exp(0.3 * std::pow(r, 0.6)));
  }
  tables.push_back({g1, 10000, 700, std::log(20001.0)});
  tables.push_back({g2, 10000, 5000, 20.0});
  tables.push_back({g3, 10000, 3000, 200.0});
  tables.push_back({{1, 5, 13, 25, 41}, 300, 40, 8.0});
  double worst = 0;
  for (const auto& t : tables) {
    ModelPoint pt;
    pt.ln_N = t.ln_N;
    pt.D = t.D;
    pt.rho_star = t.rho;
    pt.gamma = tabulated_growth(t.gamma);
    const TailSums ts(pt, {0.01, mu}, Constants{});
    const auto ref = reference::reference_sums(t.gamma, t.D, t.rho, t.ln_N, mu);
    // Differences of logarithms are relative errors of the sums.
    worst = std::max({worst, std::fabs(ts.ln_v1() - ref.ln_v1), std::fabs(ts.f_series().log_total() - ref.ln_f_total),
                      std::fabs(ts.ln_b0() - ref.ln_b0), std::fabs(ts.ln_b() - ref.ln_b),
                      std::fabs(ts.ln_delta() - ref.ln_delta) / std::max(1.0, std::fabs(ref.ln_delta))});
    for (std::size_t r = 1; r <= ref.ln_fbar.size(); r += 97)
      worst = std::max(worst, std::fabs(ts.ln_fbar(static_cast<double>(r)) - ref.ln_fbar[r - 1]));
  }
  o.detail << "log sums vs 50 digits on " << tables.size() << " tables: worst " << std::setprecision(3) << worst;
  o.require(worst <= tol, "log-domain sums");

  for (auto [L, l] : {std::pair{2, 2}, {2, 3}, {3, 2}}) {
    const auto sub = surface_code_from_complex(subdivide(torus_complex(L, L), l));
    const auto big = toric_code(L * l, L * l);
    const bool same = sub.n == big.n && sub.k == big.k &&
                      distance(sub.code, L * l).value == distance(big.code, L * l).value &&
                      growth_profile(sub.graph).gamma == growth_profile(big.graph).gamma;
    o.detail << "; subdivide(" << L << "," << l << ")=" << (same ? "match" : "MISMATCH");
    o.require(same, "subdivision " + std::to_string(L) + "," + std::to_string(l));
  }
}

struct Criterion {
  int id;
  const char* title;
  double time_limit_s;  // 0: none
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite: one pass/fail line per criterion"};
  std::vector<int> expect_red, only;
  app.add_option("--expect-red", expect_red, "criteria known to fail; the exit status checks the failing set");
  app.add_option("--only", only, "run just these criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "unperturbed spectra", 60, criterion_unperturbed_spectra},
      {2, "interval structure and splitting", 600, criterion_interval_structure},
      {3, "transport by the quasi-adiabatic flow", 300, criterion_transport},
      {4, "filter suite", 120, criterion_filter_suite},
      {5, "family trends", 300, criterion_family_trends},
      {6, "stretched growth", 60, criterion_stretched_growth},
      {7, "oracle equivalence", 900, criterion_oracle_equivalence},
      {8, "certifier numerics", 0, criterion_certifier_numerics},
  };
  std::set<int> red;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit_s > 0) o.require(secs < c.time_limit_s, "time limit " + std::to_string(c.time_limit_s) + " s");
    if (!o.pass) red.insert(c.id);
    std::cout << "criterion " << c.id << " " << (o.pass ? "PASS" : "FAIL") << " " << c.title << " ("
              << std::fixed << std::setprecision(1) << secs << " s): " << std::defaultfloat << o.detail.str()
              << std::endl;
  }
  std::set<int> expected;
  for (int id : expect_red)
    if (only.empty() || std::find(only.begin(), only.end(), id) != only.end()) expected.insert(id);
  if (red != expected) {
    std::cout << "failing set differs from --expect-red\n";
    return 1;
  }
  return 0;
}
