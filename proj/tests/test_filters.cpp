#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <random>

#include "gapcert/filters.hpp"

using namespace gapcert;
using boost::multiprecision::cpp_bin_float_50;

namespace {

const Filter& shared_filter() {
  static const Filter f;
  return f;
}

}  // namespace

TEST_CASE("eta basics") {
  CHECK(eta(0.3, 0.0) == 1.0);
  // 50-digit reference at x = 112.
  const cpp_bin_float_50 a = cpp_bin_float_50(1) / 28, x = 112;
  const cpp_bin_float_50 l = log(exp(cpp_bin_float_50(2)) + x);
  const double ref = static_cast<double>(exp(-a * x / (l * l)));
  CHECK(eta(1.0 / 28.0, 112.0) == doctest::Approx(ref).epsilon(1e-14));

  // eta(x) eta(y) <= eta(x + y), since x / ln^2(e^2 + x) is subadditive.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(0.0, 1e4);
  for (int i = 0; i < 1000; ++i) {
    const double x1 = d(rng), y1 = d(rng);
    CHECK(ln_eta(0.5, x1) + ln_eta(0.5, y1) <= ln_eta(0.5, x1 + y1) + 1e-12);
  }
  // x / ln^2(e^2 + x) is increasing, so eta is decreasing.
  double prev = 1.0;
  for (double x1 = 0.0; x1 < 1e6; x1 = x1 * 1.3 + 0.1) {
    const double e = eta(1.0, x1);
    CHECK(e <= prev);
    prev = e;
  }
  CHECK_THROWS_AS(eta(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(eta(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("u at e^2 and e^4") {
  const double e2 = std::exp(2.0), e4 = std::exp(4.0);
  CHECK(u_pow(0.5, e2) == doctest::Approx(std::exp(-0.5 * e2 / 4.0)).epsilon(1e-14));
  CHECK(u_pow(1.0, e4) == doctest::Approx(std::exp(-e4 / 16.0)).epsilon(1e-14));
  CHECK_THROWS_AS(u_pow(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("exp-eta constant is the true supremum") {
  const double mu = 0.2, a = 1.0 / 28.0, v = 3.0;
  const double lc = ln_exp_eta_constant(mu, a, v);
  CHECK(lc >= 0.0);
  double worst = 0.0;
  for (double r = 0.0; r < 5e4; r += 0.05) worst = std::max(worst, -mu * r / 2.0 - ln_eta(a, r / (2.0 * v)));
  CHECK(lc >= worst - 1e-12);
  CHECK(lc <= worst + 1e-6);
}

TEST_CASE("filter normalisation and symmetry") {
  const Filter& f = shared_filter();
  CHECK(f.a1() * std::pow(std::log(2.0), -2) / 2.0 == doctest::Approx(f.a(2)).epsilon(1e-15));
  CHECK(f.w(0.0) == doctest::Approx(f.c_gamma()).epsilon(1e-15));
  for (double t : {0.3, 5.0, 17.5, 99.0}) CHECK(f.w(t) == f.w(-t));
  CHECK(f.W(0.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(f.W(-3.0) == -f.W(3.0));

  // Unit mass by an adaptive quadrature that does not use the table.
  auto w = [&](double t) { return f.w(t); };
  double mass = 0.0;
  for (double a = 0.0; a < f.t_cut(); a += 10.0)
    mass += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(w, a, a + 10.0, 10, 1e-13);
  CHECK(2.0 * mass == doctest::Approx(1.0).epsilon(1e-8));

  double prev = f.W(0.0);
  for (double t = 1.0; t < 300.0; t += 1.0) {
    const double cur = f.W(t);
    CHECK(cur <= prev);
    prev = cur;
  }
  CHECK(f.truncation_residual() < f.params().trunc_tol);
  CHECK(f.t_cut() <= f.t_bound() + f.params().panel_width);
}

TEST_CASE("W_integral agrees with integrating W") {
  const Filter& f = shared_filter();
  auto W = [&](double t) { return f.W(t); };
  for (double t0 : {0.0, 20.0, 60.0}) {
    double s = 0.0;
    for (double a = t0; a < 400.0; a += 5.0)
      s += boost::math::quadrature::gauss_kronrod<double, 21>::integrate(W, a, a + 5.0, 6, 1e-12);
    CHECK(f.W_integral(t0) == doctest::Approx(s).epsilon(1e-7));
  }
}

TEST_CASE("Fourier transforms") {
  const Filter& f = shared_filter();
  CHECK(std::abs(f.w_hat(0.0) - 1.0) <= 1e-6);
  for (double om : {0.5, 0.7, 1.3, 3.0}) CHECK(std::abs(f.w_hat(om)) <= 1e-4);
  for (double om : {0.75, 1.0, 2.0}) {
    const std::complex<double> target(0.0, -1.0 / om);
    CHECK(std::abs(f.W_hat(om) - target) <= 1e-4);
  }
}

TEST_CASE("table transform of W matches the adaptive one") {
  const Filter& f = shared_filter();
  for (double om : {0.05, 0.2, 0.45, 0.75}) CHECK(std::abs(f.W_hat_table(om) - f.W_hat(om)) <= 1e-8);
  CHECK(f.W_hat_table(-0.2) == -f.W_hat_table(0.2));
  CHECK(std::abs(f.W_hat_table(1e-9)) < 1e-6);
  CHECK(f.W_hat_table(0.6) == std::complex<double>(0.0, -1.0 / 0.6));
}

TEST_CASE("w bound on samples, with a negative control") {
  const Filter& f = shared_filter();
  std::vector<double> ts;
  for (double t = 0.0; t <= 2000.0; t += 7.3) ts.push_back(t);
  ts.push_back(2.0 * 3.0);  // gamma t = 3
  const auto rep = verify_bounds(f, ts);
  CHECK(rep.w_bound_holds);
  CHECK(rep.min_margin > 0.0);
  CHECK(rep.C_W >= 0.5 - 1e-9);
  CHECK(rep.fitted_c_W > 0.0);
  CHECK(rep.fitted_c_W < 1.0);
  for (const auto& s : rep.samples) CHECK(f.params().gamma * s.t >= std::exp(1.0 / std::sqrt(2.0)));

  // The margin widens far from the origin.
  const auto near = verify_bounds(f, {6.0}), far = verify_bounds(f, {1000.0});
  CHECK(far.min_margin > near.min_margin);

  const auto bad = verify_bounds(f, ts, 1e6);
  CHECK_FALSE(bad.w_bound_holds);
}

TEST_CASE("tail lemma") {
  const auto r0 = intua_check(0, 1.0, std::exp(4.0));
  CHECK(r0.precondition_met);
  CHECK(r0.holds);

  // Precondition unmet: still evaluated, reported as such.
  const auto r2 = intua_check(2, 0.5, 200.0);
  CHECK_FALSE(r2.precondition_met);
  CHECK(r2.holds);

  // Against a direct quadrature of the left side.
  const int k = 1;
  const double a = 2.0, t = 120.0;
  auto fk = [&](double x) { return std::pow(x, k) * u_pow(a, x); };
  const double lhs = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      fk, t, std::numeric_limits<double>::infinity(), 15, 1e-13);
  const auto r1 = intua_check(k, a, t);
  CHECK(r1.precondition_met);
  CHECK(r1.ln_lhs == doctest::Approx(std::log(lhs)).epsilon(1e-9));
  CHECK(r1.holds);

  std::mt19937_64 rng(11);
  int admissible = 0;
  while (admissible < 20) {
    const int kk = static_cast<int>(rng() % 5);
    const double aa = std::exp(std::uniform_real_distribution<double>(std::log(0.05), std::log(5.0))(rng));
    const double tt = std::exp(std::uniform_real_distribution<double>(4.0, 9.0)(rng));
    const auto r = intua_check(kk, aa, tt);
    if (!r.precondition_met) continue;
    ++admissible;
    CHECK(r.holds);
  }
  CHECK_THROWS_AS(intua_check(1, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("filter parameter validation") {
  FilterParams p;
  p.n_terms = 10;
  CHECK_THROWS_AS(Filter{p}, std::invalid_argument);
  p = {};
  p.trunc_tol = 1e-300;
  CHECK_THROWS_AS(Filter{p}, FilterError);
  p = {};
  p.gamma = -1.0;
  CHECK_THROWS_AS(Filter{p}, std::invalid_argument);
}

TEST_CASE("filter is reproducible bit for bit") {
  const Filter a, b;
  CHECK(a.c_gamma() == b.c_gamma());
  for (double t : {0.0, 3.3, 77.0, 500.0}) {
    CHECK(a.W(t) == b.W(t));
    CHECK(a.ln_w(t) == b.ln_w(t));
  }
}
