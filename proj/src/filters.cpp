#include "gapcert/filters.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

namespace gapcert {

namespace {

constexpr double kE2 = 7.38905609893065;  // e^2
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

// g(x) = 1 / (x ln^2 x): a_n = a1 g(n).
double g(double x) {
  const double l = std::log(x);
  return 1.0 / (x * l * l);
}
double g_prime(double x) {
  const double l = std::log(x);
  return -(l + 2.0) / (x * x * l * l * l);
}

// sum_{n > m} g(n)^p by Euler-Maclaurin from m, with the integral done numerically
// in u = ln x (for p = 1 it is 1 / ln m).
double em_tail(double p, double m) {
  double integral;
  if (p == 1.0) {
    integral = 1.0 / std::log(m);
  } else {
    auto f = [p](double u) { return std::exp(-(p - 1.0) * u - 2.0 * p * std::log(u)); };
    integral = gauss_kronrod<double, 61>::integrate(f, std::log(m), std::numeric_limits<double>::infinity(), 15, 1e-14);
  }
  const double gm = g(m);
  const double h = std::pow(gm, p), hp = p * std::pow(gm, p - 1.0) * g_prime(m);
  return integral - h / 2.0 - hp / 12.0;
}

// 2 ln sinc x, using the series where the direct form loses digits.
double ln_sinc2(double x) {
  x = std::fabs(x);
  if (x < 0.1) {
    const double y = x * x;
    return -y * (1.0 / 3.0 + y * (1.0 / 90.0 + y * (2.0 / 2835.0 + y * (1.0 / 18900.0 + y * (2.0 / 467775.0)))));
  }
  const double s = std::sin(x);
  if (s == 0.0) return kNegInf;
  return 2.0 * std::log(std::fabs(s) / x);
}

// int_lo^inf e^{ln_f(s) - scale} ds over chunks of width h, stopping once ln_env_tail
// (a bound on ln int_s^inf e^{ln_f}) is far below the running total. Returns the log.
template <class LnF, class Env>
double ln_integrate_until_negligible(LnF&& ln_f, double lo, double h, Env&& ln_env_tail) {
  const double scale = ln_env_tail(lo);
  if (scale == kNegInf) return kNegInf;
  auto f = [&](double s) { return std::exp(ln_f(s) - scale); };
  double total = 0.0;
  for (double a = lo;; a += h) {
    total += gauss<double, 30>::integrate(f, a, a + h);
    const double lt = ln_env_tail(a + h) - scale;
    if (lt == kNegInf || (total > 0 && lt < std::log(total) - 41.0) || lt < -745.0) break;
  }
  return scale + std::log(total);
}

}  // namespace

double ln_eta(double a, double x) {
  const double l = std::log(kE2 + x);
  return -a * x / (l * l);
}

double eta(double a, double x) {
  if (!(a > 0)) throw std::invalid_argument("eta: a must be positive");
  if (!(x >= 0)) throw std::invalid_argument("eta: x must be nonnegative");
  return std::exp(ln_eta(a, x));
}

double ln_u_pow(double a, double t) {
  if (!(t > 1)) throw std::invalid_argument("u_pow: t must exceed 1");
  const double l = std::log(t);
  return -a * t / (l * l);
}

double u_pow(double a, double t) { return std::exp(ln_u_pow(a, t)); }

double ln_exp_eta_constant(double mu, double a, double v) {
  if (!(mu > 0 && a > 0 && v > 0)) throw std::invalid_argument("ln_exp_eta_constant: parameters must be positive");
  auto h = [&](double r) { return -mu * r / 2.0 - ln_eta(a, r / (2.0 * v)); };
  // Past r_end the exponential factor wins for good.
  const double r_end = 2.0 * std::max(1.0, 2.0 * v * (std::exp(std::sqrt(a / (mu * v))) - kE2)) + 10.0;
  double best = 0.0, best_r = 0.0;
  const int n = 4000;
  for (int i = 1; i <= n; ++i) {
    const double r = r_end * std::pow(static_cast<double>(i) / n, 3.0);
    if (double v2 = h(r); v2 > best) best = v2, best_r = r;
  }
  // Golden-section refinement around the best grid point.
  double lo = std::max(0.0, best_r * 0.9 - 1e-9), hi = best_r * 1.1 + 1e-9;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    if (h(x1) > h(x2)) hi = x2;
    else lo = x1;
  }
  return std::max(best, h((lo + hi) / 2.0));
}

Filter::Filter(const FilterParams& p) : p_(p) {
  if (!(p_.gamma > 0)) throw std::invalid_argument("filter: gamma must be positive");
  if (p_.n_terms < 1000) throw std::invalid_argument("filter: n_terms must be at least 1000");
  if (!(p_.panel_width > 0) || !(p_.tail_mass > 0) || !(p_.trunc_tol > 0))
    throw std::invalid_argument("filter: bad quadrature parameters");

  // a1 from sum_{n>=2} a_n = gamma / 2.
  constexpr double kM = 1e6;
  double s = 0.0;
  for (double n = kM; n >= 2.0; n -= 1.0) s += g(n);  // small terms first
  s += em_tail(1.0, kM);
  a1_ = p_.gamma / (2.0 * s);

  const std::size_t last = p_.n_terms + 1;
  an_.resize(p_.n_terms);
  for (std::size_t n = 2; n <= last; ++n) an_[n - 2] = a1_ * g(static_cast<double>(n));

  // Tail moments sum_{n > last} a_n^{2j}: explicit up to m2, Euler-Maclaurin beyond.
  const double m2 = std::max(1e5, 100.0 * static_cast<double>(last));
  for (int j = 1; j <= 5; ++j) {
    const double pw = 2.0 * j;
    double t = 0.0;
    for (double n = m2; n > static_cast<double>(last); n -= 1.0) t += std::pow(g(n), pw);
    t += em_tail(pw, m2);
    tail_moments_[j - 1] = std::pow(a1_, pw) * t;
  }

  // Cutoff from the stated bound: 2 int_T^inf 2 e^2 gamma^2 t u(t) dt <= tail_mass.
  const double gm = p_.gamma;
  auto ln_bound = [gm](double t) {
    const double l = std::log(gm * t);
    return std::log(2.0 * kE2 * gm * gm * t) - (2.0 / 7.0) * gm * t / (l * l);
  };
  auto bound_tail = [&](double t0) {
    auto f = [&](double t) { return std::exp(ln_bound(t)); };
    return 2.0 * gauss_kronrod<double, 61>::integrate(f, t0, std::numeric_limits<double>::infinity(), 15, 1e-10);
  };
  double lo = std::exp(1.0 / std::sqrt(2.0)) / gm * 4.0, hi = lo;
  while (bound_tail(hi) > p_.tail_mass) hi *= 2.0;
  for (int it = 0; it < 60 && hi - lo > 1e-6 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (bound_tail(mid) > p_.tail_mass ? lo : hi) = mid;
  }
  t_bound_ = hi;

  // The envelope gives a much earlier rigorous cutoff: once a_2 t >= 1,
  // int_t^inf envelope <= t * envelope(t).
  const double h = p_.panel_width;
  double t_env = std::ceil(1.0 / an_[0] / h) * h;
  while (t_env < t_bound_ && ln_envelope(t_env) + std::log(t_env) > std::log(1e-18)) t_env += h;
  t_cut_ = std::min(std::ceil(t_bound_ / h) * h, t_env);

  // First neglected term of the tail expansion, using sum a_n^12 <= a_last^2 sum a_n^10.
  const double x_cut = an_.back() * t_cut_;
  residual_ = 1382.0 / 3831077250.0 * std::pow(t_cut_, 10) * tail_moments_[4] * x_cut * x_cut;
  if (x_cut >= 1.0 || residual_ > p_.trunc_tol)
    throw FilterError("filter: product truncation residual " + std::to_string(residual_) + " exceeds tolerance",
                      residual_);

  // Normalisation table: 31-point Gauss-Kronrod panels over [0, t_cut].
  const auto& xs = gauss_kronrod<double, 31>::abscissa();
  const auto& ws = gauss_kronrod<double, 31>::weights();
  const std::size_t panels = static_cast<std::size_t>(std::llround(t_cut_ / h));
  panel_mass_.assign(panels, 0.0);
  panel_moment_.assign(panels, 0.0);
  for (std::size_t k = 0; k < panels; ++k) {
    const double mid = (k + 0.5) * h, half = h / 2.0;
    auto add = [&](double t, double wt) {
      const double v = std::exp(ln_product(t));
      nodes_.push_back(t);
      vals_.push_back(v);
      wts_.push_back(wt * half);
      panel_mass_[k] += wt * half * v;
      panel_moment_[k] += wt * half * v * t;
    };
    add(mid, ws[0]);
    for (std::size_t i = 1; i < xs.size(); ++i) {
      add(mid - half * xs[i], ws[i]);
      add(mid + half * xs[i], ws[i]);
    }
  }
  suffix_mass_.assign(panels + 1, 0.0);
  suffix_moment_.assign(panels + 1, 0.0);
  for (std::size_t k = panels; k-- > 0;) {
    suffix_mass_[k] = suffix_mass_[k + 1] + panel_mass_[k];
    suffix_moment_[k] = suffix_moment_[k + 1] + panel_moment_[k];
  }
  c_ = 1.0 / (2.0 * suffix_mass_[0]);
}

double Filter::a(std::size_t n) const {
  if (n < 2) throw std::invalid_argument("filter: a_n is defined for n >= 2");
  if (n - 2 < an_.size()) return an_[n - 2];
  return a1_ * g(static_cast<double>(n));
}

double Filter::product_tail(double t) const {
  const double y = t * t;
  const double* m = tail_moments_;
  return -(y * m[0] / 3.0 + y * y * m[1] / 90.0 + y * y * y * m[2] * 2.0 / 2835.0 + y * y * y * y * m[3] / 18900.0 +
           y * y * y * y * y * m[4] * 2.0 / 467775.0);
}

double Filter::ln_product(double t) const {
  t = std::fabs(t);
  if (t == 0.0) return 0.0;
  double s = 0.0;
  for (double an : an_) {
    const double v = ln_sinc2(an * t);
    if (v == kNegInf) return kNegInf;
    s += v;
  }
  return s + product_tail(t);
}

double Filter::ln_envelope(double t) const {
  t = std::fabs(t);
  double s = 0.0;
  for (double an : an_) {
    const double x = an * t;
    if (x <= 1.0) break;  // a_n is decreasing
    s -= 2.0 * std::log(x);
  }
  return s;
}

double Filter::w(double t) const { return c_ * std::exp(ln_product(t)); }

double Filter::W(double t) const {
  if (t < 0) return -W(-t);
  if (t >= t_cut_) {
    auto lnp = [this](double s) { return ln_product(s); };
    auto env_tail = [this](double s) { return ln_envelope(s) + std::log(s); };
    return c_ * std::exp(ln_integrate_until_negligible(lnp, t, p_.panel_width, env_tail));
  }
  auto prod = [this](double s) { return std::exp(ln_product(s)); };
  const std::size_t k = panel_of(t);
  const double b = (k + 1) * p_.panel_width;
  return c_ * (gauss<double, 30>::integrate(prod, t, b) + suffix_mass_[k + 1]);
}

double Filter::W_integral(double t) const {
  if (t < 0) throw std::invalid_argument("W_integral: t must be nonnegative");
  // int_t^inf W = int_t^inf (s - t) w(s) ds.
  if (t >= t_cut_) {
    auto lnm = [this, t](double s) { return s > t ? std::log(s - t) + ln_product(s) : kNegInf; };
    auto env_tail = [this](double s) { return ln_envelope(s) + 2.0 * std::log(s); };
    return c_ * std::exp(ln_integrate_until_negligible(lnm, t, p_.panel_width, env_tail));
  }
  auto moment = [this, t](double s) { return (s - t) * std::exp(ln_product(s)); };
  const std::size_t k = panel_of(t);
  const double b = (k + 1) * p_.panel_width;
  return c_ * (gauss<double, 30>::integrate(moment, t, b) + suffix_moment_[k + 1] - t * suffix_mass_[k + 1]);
}

std::complex<double> Filter::w_hat(double omega) const {
  // w is even: the transform is 2 int_0^inf w cos.
  auto f = [&](double t) { return std::exp(ln_product(t)) * std::cos(omega * t); };
  double s = 0.0;
  const double chunk = 8.0;
  for (double a = 0.0; a < t_cut_; a += chunk)
    s += gauss_kronrod<double, 21>::integrate(f, a, std::min(a + chunk, t_cut_), 12, 1e-13);
  return {2.0 * c_ * s, 0.0};
}

std::complex<double> Filter::W_hat(double omega) const {
  // W is odd: the transform is -2i int_0^inf W sin.
  if (omega == 0.0) return {0.0, 0.0};
  auto f = [&](double t) { return W(t) * std::sin(omega * t); };
  double s = 0.0;
  const double chunk = 4.0;
  for (double a = 0.0; a < t_cut_; a += chunk)
    s += gauss_kronrod<double, 21>::integrate(f, a, std::min(a + chunk, t_cut_), 8, 1e-12);
  return {0.0, -2.0 * s};
}

std::complex<double> Filter::W_hat_table(double omega) const {
  if (omega == 0.0) return {0.0, 0.0};
  // Past gamma the transform of w vanishes identically.
  if (std::fabs(omega) >= p_.gamma) return {0.0, -1.0 / omega};
  double s = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double h = std::sin(0.5 * omega * nodes_[i]);
    s += wts_[i] * vals_[i] * h * h;
  }
  // 1 - w~ = 2 c int_0^inf w (1 - cos) = 4 c int_0^inf w sin^2(omega t / 2).
  return {0.0, -4.0 * c_ * s / omega};
}

TransferCache::TransferCache(const Filter& f, std::size_t points) : gamma_(f.params().gamma) {
  if (points < 8) throw std::invalid_argument("TransferCache: need at least 8 points");
  const double h = gamma_ / static_cast<double>(points - 1);
  std::vector<double> y(points);
  for (std::size_t i = 0; i < points; ++i) y[i] = f.W_hat_table(static_cast<double>(i) * h).imag();
  // Endpoint slopes: Im W~ is odd (slope from the first panel is fine), and meets 1/omega^2
  // smoothly at gamma because w~ vanishes to all orders there.
  const double left = (y[1] - y[0]) / h, right = 1.0 / (gamma_ * gamma_);
  spline_ = std::make_shared<const boost::math::interpolators::cardinal_cubic_b_spline<double>>(
      y.begin(), y.end(), 0.0, h, left, right);
  for (std::size_t i = 0; i + 1 < points; ++i) {
    const double om = (static_cast<double>(i) + 0.5) * h;
    grid_error_ = std::max(grid_error_, std::fabs((*spline_)(om) - f.W_hat_table(om).imag()));
  }
}

std::complex<double> TransferCache::operator()(double omega) const {
  if (omega == 0.0) return {0.0, 0.0};
  if (std::fabs(omega) >= gamma_) return {0.0, -1.0 / omega};
  const double v = (*spline_)(std::fabs(omega));
  return {0.0, omega < 0 ? -v : v};
}

BoundsReport verify_bounds(const Filter& f, const std::vector<double>& t_samples, double scale) {
  if (!(scale > 0)) throw std::invalid_argument("verify_bounds: scale must be positive");
  const double gm = f.params().gamma, t_min = std::exp(1.0 / std::sqrt(2.0));
  BoundsReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  double ln_cW = kNegInf, ln_Cw = kNegInf, ln_CW = kNegInf, ln_CI = kNegInf;
  for (double t : t_samples) {
    t = std::fabs(t);
    const double lw = std::log(scale) + f.ln_w(t);
    const double simple = (1.0 / 14.0) * t / std::pow(std::log(kE2 + t), 2);
    ln_Cw = std::max(ln_Cw, lw + simple);
    // W is fitted where the table resolves it; beyond t_cut it is below 1e-18.
    const bool in_table = t < f.t_cut();
    const double Wt = in_table ? scale * f.W(t) : 0.0;
    if (in_table) {
      ln_CW = std::max(ln_CW, std::log(Wt) + simple);
      ln_CI = std::max(ln_CI, std::log(scale * f.W_integral(t)) + simple);
    }
    if (gm * t < t_min) continue;
    const double l = std::log(gm * t);
    const double u = (2.0 / 7.0) * gm * t / (l * l);
    WBoundSample smp{t, lw, std::log(2.0 * kE2 * gm * gm * t) - u, false};
    smp.holds = smp.ln_w <= smp.ln_bound;
    rep.w_bound_holds = rep.w_bound_holds && smp.holds;
    rep.min_margin = std::min(rep.min_margin, smp.ln_bound - smp.ln_w);
    rep.samples.push_back(smp);
    if (in_table) ln_cW = std::max(ln_cW, std::log(Wt) - 4.0 * std::log(gm * t) + u);
  }
  rep.fitted_c_W = std::exp(ln_cW);
  rep.C_w = std::exp(ln_Cw);
  rep.C_W = std::exp(ln_CW);
  rep.C_intW = std::exp(ln_CI);
  return rep;
}

IntuaReport intua_check(int k, double a, double t) {
  if (k < 0 || !(a > 0)) throw std::invalid_argument("intua_check: need k >= 0 and a > 0");
  if (!(t > 1)) throw std::invalid_argument("intua_check: t must exceed 1");
  IntuaReport rep;
  rep.precondition_met = t >= std::exp(4.0) && a * t / std::pow(std::log(t), 2) >= 2.0 * k + 2.0;
  // Integrand scaled by its value at t; under the precondition it is decreasing.
  const double s0 = k * std::log(t) + ln_u_pow(a, t);
  auto f = [&](double tau) { return std::exp(k * std::log(tau) + ln_u_pow(a, tau) - s0); };
  const double len = std::max(1.0, std::pow(std::log(t), 2) / a);
  double total = 0.0, lo = t;
  for (int i = 0; i < 200; ++i) {
    const double hi = t + len * (std::ldexp(1.0, i + 1) - 1.0);
    total += gauss_kronrod<double, 31>::integrate(f, lo, hi, 15, 1e-13);
    lo = hi;
    if (f(hi) < 1e-30 && f(hi) * (hi - t) < 1e-18 * total) break;
  }
  rep.ln_lhs = s0 + std::log(total);
  rep.ln_rhs = std::log((2.0 * k + 3.0) / a) + (2.0 * k + 2.0) * std::log(t) + ln_u_pow(a, t);
  rep.holds = rep.ln_lhs <= rep.ln_rhs;
  return rep;
}

}  // namespace gapcert
