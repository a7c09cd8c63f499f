#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <random>

#include "gapcert/certifier.hpp"
#include "gapcert/logsum.hpp"
#include "reference_sums.hpp"

using namespace gapcert;
using reference::mp;
using reference::mp_log;
using reference::reference_sums;

namespace {

ModelPoint tabulated_point(const std::vector<double>& gamma, double D, double rho, double ln_N) {
  ModelPoint pt;
  pt.ln_N = ln_N;
  pt.D = D;
  pt.rho_star = rho;
  pt.gamma = tabulated_growth(gamma);
  return pt;
}

void check_against_reference(const std::vector<double>& gamma, double D, double rho, double ln_N) {
  const double mu = 5.0, tol = 1e-9;
  auto pt = tabulated_point(gamma, D, rho, ln_N);
  TailSums ts(pt, {0.01, mu}, Constants{});
  auto ref = reference_sums(gamma, D, rho, ln_N, mu);
  CHECK(std::fabs(ts.ln_v1() - ref.ln_v1) <= tol);
  CHECK(std::fabs(ts.f_series().log_total() - ref.ln_f_total) <= tol);
  CHECK(std::fabs(ts.ln_b0() - ref.ln_b0) <= tol);
  CHECK(std::fabs(ts.ln_b() - ref.ln_b) <= tol);
  CHECK(std::fabs(ts.ln_delta() - ref.ln_delta) <= tol * std::max(1.0, std::fabs(ref.ln_delta)));
  double worst = 0;
  for (std::size_t r = 1; r <= ref.ln_fbar.size(); r += 97)
    worst = std::max(worst, std::fabs(ts.ln_fbar(static_cast<double>(r)) - ref.ln_fbar[r - 1]));
  CHECK(worst <= tol);
}

std::vector<double> logspace(double e0, double e1, double step) {
  std::vector<double> v;
  for (double e = e0; e <= e1 + 1e-9; e += step) v.push_back(std::pow(10.0, e));
  return v;
}

}  // namespace

TEST_CASE("log_add and log_sum_exp") {
  CHECK(log_add(kNegInf, 3.0) == 3.0);
  CHECK(log_add(kNegInf, kNegInf) == kNegInf);
  CHECK(log_add(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(log_sum_exp({}) == kNegInf);
  CHECK(log_sum_exp({-1e300, 0.0}) == doctest::Approx(0.0));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-800.0, 800.0);
  std::vector<double> xs(50000);
  for (auto& x : xs) x = u(rng);
  mp ref = 0;
  for (double x : xs) ref += boost::multiprecision::exp(mp(x));
  const double serial = log_sum_exp(xs, Exec::Serial), parallel = log_sum_exp(xs, Exec::Parallel);
  CHECK(std::fabs(serial - mp_log(ref)) < 1e-12 * std::fabs(serial));
  CHECK(parallel == serial);
}

TEST_CASE("geometric and quadratic block sums") {
  for (double s : {-3.0, -1e-9, 0.0, 1e-12, 0.4}) {
    for (double m : {1.0, 2.0, 17.0, 1000.0}) {
      mp ref = 0;
      for (int j = 0; j < static_cast<int>(m); ++j) ref += boost::multiprecision::exp(mp(s) * j);
      CHECK(log_geometric(s, m) == doctest::Approx(mp_log(ref)).epsilon(1e-12));
    }
  }
  // First-order curvature correction: the error is second order in kappa.
  const double m = 200, s = -0.02;
  for (double kappa : {1e-7, -1e-7, 1e-6}) {
    mp ref = 0;
    for (int j = 0; j < m; ++j) ref += boost::multiprecision::exp(mp(s * j + kappa * j * (j - m + 1)));
    const double c = std::fabs(kappa) * (m - 1) * (m - 1);
    CHECK(std::fabs(log_quadratic_block(0.0, s, kappa, m) - mp_log(ref)) < c * c / 2);
  }
}

TEST_CASE("tilted mean of u(1-u) agrees with quadrature") {
  using boost::math::quadrature::gauss_kronrod;
  for (double sigma : {0.0, 1e-7, -1e-7, 0.5, -3.0, 12.0, -60.0, 400.0}) {
    auto w = [&](double u) { return std::exp(sigma * (u - (sigma > 0 ? 1.0 : 0.0))); };
    double num = gauss_kronrod<double, 61>::integrate([&](double u) { return u * (1 - u) * w(u); }, 0.0, 1.0, 15, 1e-14);
    double den = gauss_kronrod<double, 61>::integrate(w, 0.0, 1.0, 15, 1e-14);
    CHECK(tilted_u_one_minus_u(sigma) == doctest::Approx(num / den).epsilon(1e-9));
  }
}

TEST_CASE("tail sums match 50-digit references on tabulated growth") {
  SUBCASE("cycle growth 2r+1") {
    std::vector<double> g(10001);
    for (std::size_t r = 0; r < g.size(); ++r) g[r] = 2.0 * r + 1.0;
    check_against_reference(g, 10000, 700, std::log(20001.0));
  }
  SUBCASE("square lattice 2r^2+2r+1") {
    std::vector<double> g(10001);
    for (std::size_t r = 0; r < g.size(); ++r) g[r] = 2.0 * r * r + 2.0 * r + 1.0;
    check_against_reference(g, 10000, 5000, 20.0);
  }
  SUBCASE("stretched-exponential table") {
    std::vector<double> g(10001);
    for (std::size_t r = 0; r < g.size(); ++r) g[r] = std::floor(std::exp(0.3 * std::pow(r, 0.6)));
    check_against_reference(g, 10000, 3000, 200.0);
  }
  SUBCASE("short table, flat beyond its end") {
    check_against_reference({1, 5, 13, 25, 41}, 300, 40, 8.0);
  }
}

TEST_CASE("v1 closed form for constant growth") {
  ModelPoint pt;
  pt.ln_N = 1;
  pt.D = std::numeric_limits<double>::infinity();
  pt.rho_star = 3;
  pt.gamma = tabulated_growth({1.0});
  TailSums ts(pt, {0.01, 2.0}, Constants{});
  const double e = std::exp(1.0);
  CHECK(ts.v1() == doctest::Approx(4 * (e * e + 1) / (e - 1)).epsilon(1e-10));
  CHECK(ts.v1_finite());
  CHECK(ts.v1_series().truncated());
}

TEST_CASE("open-ended and divergent series") {
  LogSeries geo([](double r) { return -0.5 * r; }, 1, std::numeric_limits<double>::infinity());
  CHECK(geo.log_total() == doctest::Approx(-0.5 - std::log1p(-std::exp(-0.5))).epsilon(1e-10));
  CHECK_FALSE(geo.diverged());
  CHECK(geo.decayed());

  LogSeries up([](double r) { return 0.01 * r; }, 1, std::numeric_limits<double>::infinity());
  CHECK(up.diverged());
  CHECK_FALSE(up.decayed());

  // Finite range whose summand still grows at the end.
  LogSeries rising([](double r) { return std::sqrt(r); }, 1, 1e12);
  CHECK_FALSE(rising.decayed());
  CHECK(std::isfinite(rising.log_total()));
}

TEST_CASE("blocked summation agrees with term-by-term summation") {
  SeriesOptions exact, blocked;
  exact.need_suffix = blocked.need_suffix = true;
  blocked.exact_limit = 0;
  auto phi = [](double r) { return 7 * std::sqrt(r) - r / 900.0 + 5 * std::log(r); };
  const double hi = 3e6;
  LogSeries a(phi, 1, hi, {}, exact), b(phi, 1, hi, {}, blocked);
  REQUIRE(a.exact());
  REQUIRE_FALSE(b.exact());
  CHECK(b.blocks() < 10000);
  CHECK(std::fabs(a.log_total() - b.log_total()) < 1e-8);
  for (double r : {1.0, 2.0, 1000.0, 123457.0, 2e6, hi - 3, hi})
    CHECK(std::fabs(a.log_suffix(r) - b.log_suffix(r)) < 1e-8 * std::max(1.0, std::fabs(a.log_suffix(r))));
  CHECK(b.log_suffix(hi + 1) == kNegInf);
}

TEST_CASE("mass concentrated at one end of a huge range is resolved") {
  auto phi = [](double r) { return 2 * std::sqrt(r) - 2.5 * r; };
  LogSeries small(phi, 1, 1e6);
  for (double hi : {1e20, 6e31, 2e33}) {
    LogSeries big(phi, 1, hi, {});
    CHECK(big.log_total() == doctest::Approx(small.log_total()).epsilon(1e-12));
  }
}

TEST_CASE("cancelling components at large r do not force endless refinement") {
  const double v1 = 177.15627;
  auto phi = [&](double r) { return 5 * std::log(r) + 7 * std::sqrt(r) + ln_eta(1.0 / 28, r / (256 * v1)); };
  SeriesOptions o;
  o.need_suffix = true;
  LogSeries s1(phi, 1, 1e20, {}, o), s2(phi, 1, 1e30, {}, o);
  CHECK(s2.blocks() < 500000);
  CHECK(s1.log_total() == doctest::Approx(s2.log_total()).epsilon(1e-12));
}

TEST_CASE("serial and parallel series and certify agree") {
  auto phi = [](double r) { return 3 * std::log(r) - r / 5e4; };
  SeriesOptions ser, par;
  ser.exec = Exec::Serial;
  par.exec = Exec::Parallel;
  ser.need_suffix = par.need_suffix = true;
  LogSeries a(phi, 1, 2e6, {}, ser), b(phi, 1, 2e6, {}, par);
  CHECK(a.log_total() == b.log_total());
  CHECK(a.log_suffix(77777) == b.log_suffix(77777));

  SemiHyperbolicSpec s;
  s.a = 0.3;
  s.l_grid = logspace(10, 12, 0.5);
  auto fm = model_semi_hyperbolic(s);
  CertifierOptions o1, o2;
  o1.exec = Exec::Serial;
  o1.series.exec = Exec::Serial;
  o2.exec = Exec::Parallel;
  auto r1 = certify(fm, {0.01, 5}, {}, o1), r2 = certify(fm, {0.01, 5}, {}, o2);
  REQUIRE(r1.points.size() == r2.points.size());
  for (std::size_t i = 0; i < r1.points.size(); ++i) {
    CHECK(r1.points[i].ln_delta == r2.points[i].ln_delta);
    CHECK(r1.points[i].ln_b == r2.points[i].ln_b);
  }
  CHECK(r1.verdict == r2.verdict);
}

TEST_CASE("b is degenerate at rho* = 1 and J0 = 1/(4b) otherwise") {
  std::vector<double> g{1, 3, 5, 7, 9, 11};
  auto pt = tabulated_point(g, 5, 1, std::log(12.0));
  TailSums ts(pt, {0.01, 5}, Constants{});
  CHECK(ts.degenerate());
  CHECK(ts.ln_b() == kNegInf);

  FamilyModel fm;
  fm.label = "tab";
  for (double n : {10.0, 20.0, 40.0}) fm.points.push_back(tabulated_point(g, 5, 3, std::log(n)));
  auto rep = certify(fm, {0.01, 5});
  for (const auto& r : rep.points) CHECK(std::exp(r.ln_J0) * 4 * std::exp(r.ln_b) == doctest::Approx(1.0));

  fm.points.back().rho_star = 1;
  rep = certify(fm, {0.01, 5});
  CHECK(std::isnan(rep.points.back().ln_J0));
  CHECK(rep.verdict != Verdict::CertifiedTrend);
  CHECK(rep.intervals.empty());
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(tabulated_growth({}), std::invalid_argument);
  CHECK_THROWS_AS(tabulated_growth({2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(tabulated_growth({1, 3, 2}), std::invalid_argument);
  CHECK_THROWS_AS(certify(FamilyModel{}, {0.01, 5}), std::invalid_argument);
  FamilyModel fm;
  fm.points.push_back(tabulated_point({1, 3}, 4, 5, 2.0));
  CHECK_THROWS_AS(certify(fm, {0.01, 5}), std::invalid_argument);  // rho* > D
  CHECK_THROWS_AS(threshold_scan({}, {0.01, 5}), std::invalid_argument);
  SeriesOptions tiny;
  tiny.exact_limit = 0;
  tiny.max_blocks = 3;
  CHECK_THROWS_AS(LogSeries([](double r) { return std::sin(r / 1000.0) * 50; }, 1, 1e8, {}, tiny), std::runtime_error);
}

TEST_CASE("semi-hyperbolic families certify with a-independent J0") {
  std::vector<double> j0;
  for (double a : {0.1, 0.3, 0.5}) {
    SemiHyperbolicSpec s;
    s.a = a;
    s.l_grid = logspace(10, 15, 0.5);
    auto rep = certify(model_semi_hyperbolic(s), {0.01, 5});
    CHECK_MESSAGE(rep.verdict == Verdict::CertifiedTrend, "a=" << a);
    for (std::size_t i = 1; i < rep.points.size(); ++i) CHECK(rep.points[i].ln_delta < rep.points[i - 1].ln_delta);
    CHECK(rep.points.back().rel_err < 1e-6);
    REQUIRE(rep.intervals.size() == 4);
    CHECK(rep.intervals[0].first <= 0);
    CHECK(rep.intervals[1].first < 1);
    CHECK(rep.intervals[1].second > 1);
    j0.push_back(rep.points.back().ln_J0);
  }
  auto [lo, hi] = std::minmax_element(j0.begin(), j0.end());
  CHECK(std::expm1(*hi - *lo) <= 0.2);
}

TEST_CASE("hyperbolic limit does not certify") {
  auto lnN = logspace(2, 6, 1);
  SemiHyperbolicSpec s;
  s.a = 0;
  s.l_grid = lnN;
  CHECK(certify(model_semi_hyperbolic(s), {0.01, 5}).verdict != Verdict::CertifiedTrend);
  CHECK(certify(model_hyperbolic(1.0, 0.5, lnN), {0.01, 5}).verdict == Verdict::Fails);
}

TEST_CASE("stretched growth: polynomial-log rho* certifies, logarithmic rho* does not") {
  auto lnN = logspace(20, 24, 0.5);
  auto good = certify(model_stretched(0.5, 1.5, lnN), {0.01, 5});
  CHECK(good.verdict == Verdict::CertifiedTrend);
  auto bad = certify(model_stretched(0.5, 1.0, lnN), {0.01, 5});
  CHECK(bad.verdict != Verdict::CertifiedTrend);
}

TEST_CASE("stacked lattices: J0 decreases with dimension") {
  auto L = logspace(9, 12, 1);
  std::vector<ScanInput> in;
  for (int d : {3, 4, 5}) in.push_back({static_cast<double>(d), std::nan(""), model_stacked(d, L)});
  auto rows = threshold_scan(in, {0.01, 5});
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].ln_J0 < rows[0].ln_J0);
  CHECK(rows[2].ln_J0 < rows[1].ln_J0);
  auto csv = scan_csv(rows);
  CHECK(csv.rfind("label,parameter,epsilon,ln_J0,verdict\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
