#pragma once

#include <complex>
#include <memory>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gapcert {

// eta_a(x) = exp(-a x / ln^2(e^2 + x)), x >= 0, a > 0.
double eta(double a, double x);
double ln_eta(double a, double x);

// u_a(t) = exp(-a t / ln^2 t), t > 1.
double u_pow(double a, double t);
double ln_u_pow(double a, double t);

// ln of the smallest c with e^{-mu r / 2} <= c eta_a(r / (2 v)) for all r >= 0.
double ln_exp_eta_constant(double mu, double a, double v);

struct FilterParams {
  double gamma = 0.5;
  std::size_t n_terms = 1000;   // sinc factors multiplied explicitly (n = 2 .. n_terms + 1)
  double tail_mass = 1e-8;      // neglected mass of w beyond the cutoff
  double trunc_tol = 1e-10;     // allowed error of the summed product tail in ln w
  double panel_width = 2.0;     // fixed 31-point Gauss-Kronrod panels
};

class FilterError : public std::runtime_error {
 public:
  FilterError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// The filter w(t) = c prod_{n>=2} sinc^2(a_n t) with a_n = a1/(n ln^2 n), sum_n a_n = gamma/2
// and unit integral, and its tail integral W. Construction fixes the quadrature schedule,
// so every evaluation is reproducible bit for bit.
class Filter {
 public:
  explicit Filter(const FilterParams& p = {});

  const FilterParams& params() const { return p_; }
  double a1() const { return a1_; }
  double a(std::size_t n) const;  // n >= 2
  double c_gamma() const { return c_; }
  // t beyond which the bound leaves at most tail_mass, and the cutoff actually used.
  double t_bound() const { return t_bound_; }
  double t_cut() const { return t_cut_; }
  // Size of the first neglected term of the tail expansion at t_cut.
  double truncation_residual() const { return residual_; }

  // ln prod sinc^2(a_n t), without c; -inf at zeros.
  double ln_product(double t) const;
  // Rigorous upper bound on ln_product: each factor is at most min(1, (a_n t)^-2).
  double ln_envelope(double t) const;
  double ln_w(double t) const { return std::log(c_) + ln_product(t); }
  double w(double t) const;
  double W(double t) const;          // odd extension for t < 0
  double W_integral(double t) const; // int_t^inf W, t >= 0

  // Fourier transforms int f(t) e^{-i w t} dt by adaptive quadrature, independent of the
  // normalisation table.
  std::complex<double> w_hat(double omega) const;
  std::complex<double> W_hat(double omega) const;
  // Same transform from the table, via W~ = -i (1 - w~) / omega with 1 - w~ summed as
  // 2 sin^2 terms, so it stays accurate as omega -> 0. Cheap enough for per-element use.
  std::complex<double> W_hat_table(double omega) const;

 private:
  double product_tail(double t) const;
  // Index of the table panel containing t (t in [0, t_cut)).
  std::size_t panel_of(double t) const { return static_cast<std::size_t>(t / p_.panel_width); }

  FilterParams p_;
  double a1_ = 0, c_ = 0, t_bound_ = 0, t_cut_ = 0, residual_ = 0;
  std::vector<double> an_;          // a_n for n = 2 .. n_terms + 1
  double tail_moments_[5] = {};     // sum_{n > n_terms + 1} a_n^{2j}, j = 1..5
  std::vector<double> nodes_, vals_, wts_;  // table over [0, t_cut], product values (no c)
  std::vector<double> panel_mass_, panel_moment_;  // per panel: int p, int t p
  std::vector<double> suffix_mass_, suffix_moment_;
};

// W~ inside [-gamma, gamma] from a cubic B-spline through W_hat_table samples; exact -i/omega
// outside. Build once and share: construction costs `points` table sums.
class TransferCache {
 public:
  explicit TransferCache(const Filter& f, std::size_t points = 1025);
  std::complex<double> operator()(double omega) const;
  double gamma() const { return gamma_; }
  // Largest spline error at the grid midpoints, against the direct table sum.
  double max_grid_error() const { return grid_error_; }

 private:
  double gamma_, grid_error_ = 0;
  // Spline of Im W~ on [0, gamma]; the transform is odd and purely imaginary.
  std::shared_ptr<const boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
};

struct WBoundSample {
  double t;
  double ln_w;
  double ln_bound;
  bool holds;
};

struct BoundsReport {
  std::vector<WBoundSample> samples;  // only samples with gamma t >= e^{1/sqrt 2}
  bool w_bound_holds = true;
  double min_margin = 0;              // min over samples of ln_bound - ln_w
  // Smallest c with W(t) <= c (gamma t)^4 exp(-(2/7) gamma t / ln^2(gamma t)) on the samples
  // below t_cut.
  double fitted_c_W = 0;
  // Smallest constants in the e^{-(1/14) t / ln^2(e^2 + t)} forms for w, W, int W on the samples.
  double C_w = 0, C_W = 0, C_intW = 0;
};

// `scale` multiplies w before the comparison (a negative control uses scale > 1).
BoundsReport verify_bounds(const Filter& f, const std::vector<double>& t_samples, double scale = 1.0);

// The inequality is evaluated even when the lemma's precondition fails; `holds` is then
// informational only.
struct IntuaReport {
  bool precondition_met = false;
  double ln_lhs = 0, ln_rhs = 0;  // ln int_t^inf tau^k u_a, ln ((2k+3)/a) t^{2k+2} u_a(t)
  bool holds = false;
};

IntuaReport intua_check(int k, double a, double t);

}  // namespace gapcert
