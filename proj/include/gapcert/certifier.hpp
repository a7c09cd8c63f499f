#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gapcert/filters.hpp"
#include "gapcert/logsum.hpp"

namespace gapcert {

// ln Gamma(r) for integer r >= 0 (Gamma(0) = 1), capped at the system size.
class GrowthModel {
 public:
  virtual ~GrowthModel() = default;
  virtual double ln_gamma(double r) const = 0;
  // Radii where ln_gamma has kinks: the formula changes between floor(b) and floor(b)+1.
  virtual std::vector<double> breakpoints() const { return {}; }
  virtual std::string describe() const = 0;
};

using GrowthPtr = std::shared_ptr<const GrowthModel>;

// gamma[r] for r = 0..R-1, constant beyond the table.
GrowthPtr tabulated_growth(std::vector<double> gamma);
// max(1, alpha r^2) up to r = l, then l^2 e^{beta r / l}; capped at e^{ln_cap}.
GrowthPtr semi_hyperbolic_growth(double l, double alpha, double beta, double ln_cap);
// Ball of the periodic d-dimensional cubic lattice: sum_k 2^k C(d,k) C(r,k) sites, with
// `per_site` qubits per site and `hop` lattice steps per graph step; capped.
GrowthPtr lattice_growth(int d, double per_site, double hop, double ln_cap);
// e^{beta r}, capped.
GrowthPtr exponential_growth(double beta, double ln_cap);
// e^{r^{1-eps}}, capped.
GrowthPtr stretched_growth(double eps, double ln_cap);

struct ModelPoint {
  double index = 0;  // the family parameter for this member (ln n, L, ln N, ...)
  double ln_N = 0;
  double D = 0;      // may be +inf for open-ended toy sums
  double rho_star = 1;
  GrowthPtr gamma;
};

struct FamilyModel {
  std::string label;
  std::string index_name;
  std::vector<ModelPoint> points;
};

struct SemiHyperbolicSpec {
  double a = 0.25, alpha = 1.0, beta = 1.0, gamma_const = 2.0;
  std::vector<double> l_grid;  // l_n values; ln n = ln l / a
};
// l = n^a, D = ceil(gamma_const l ln n), rho* = floor(l ln n), N = n^{1+2a}.
// a = 0 is the hyperbolic limit: l = 1 and the grid holds ln n directly.
FamilyModel model_semi_hyperbolic(const SemiHyperbolicSpec& spec);

// d-dimensional stack of toric layers: N = 2 L^d, D = d floor(L/2), rho* = floor(L/2).
FamilyModel model_stacked(int d, const std::vector<double>& l_grid);

// Gamma = e^{beta r}, rho* = c ln N, D = 2 ln N / beta, over a grid of ln N.
FamilyModel model_hyperbolic(double beta, double rho_factor, const std::vector<double>& ln_n_grid);

// Gamma = e^{r^{1-eps1}}, rho* = (ln N)^{rho_power}, D = 2 rho*, over a grid of ln N.
FamilyModel model_stretched(double eps1, double rho_power, const std::vector<double>& ln_n_grid);

struct Perturbation {
  double J = 0.01;
  double mu = 5.0;
};

// Absolute constants the proof leaves unspecified; all default to 1.
struct Constants {
  double c_W = 1.0;
  double c_Wt = 1.0;
  double c_D = 1.0;
};

struct CertifierOptions {
  SeriesOptions series;
  double slope_threshold = -0.1;  // required d ln(delta) / d ln(ln N) at the last step
  double bounded_variation = 0.01;
  int interval_count = 4;         // I_0 .. I_{count-1}
  Exec exec = Exec::Parallel;     // map over family members
};

// All tail sums for one family member.
class TailSums {
 public:
  TailSums(const ModelPoint& pt, const Perturbation& p, const Constants& c, const SeriesOptions& opt = {});

  double v1() const { return v1_; }
  double ln_v1() const { return ln_v1_; }
  bool v1_finite() const { return v1_finite_; }
  double ln_v2() const;  // -inf when J = 0

  double ln_f(double r) const;
  double ln_fbar(double r) const;
  double ln_fW(double r) const { return std::log(c_.c_Wt) + ln_fbar(r - 1.0); }

  double ln_b0() const { return b0_->log_total(); }
  double ln_b() const { return b_ ? b_->log_total() : kNegInf; }
  bool degenerate() const { return pt_.rho_star <= 1.0; }
  double ln_delta() const { return pt_.ln_N + std::log(pt_.D) + ln_fbar(pt_.rho_star); }

  const LogSeries& v1_series() const { return *v1s_; }
  const LogSeries& f_series() const { return *fs_; }
  const LogSeries& b0_series() const { return *b0_; }
  double rel_err() const;

 private:
  ModelPoint pt_;
  Perturbation p_;
  Constants c_;
  SeriesOptions opt_;
  std::vector<double> bps_;
  std::unique_ptr<LogSeries> v1s_, fs_, b0_, b_;
  double ln_v1_ = 0, v1_ = 0;
  bool v1_finite_ = false;
};

enum class Verdict { CertifiedTrend, Inconclusive, Fails };
const char* verdict_name(Verdict v);

struct PointRecord {
  double index, ln_N, D, rho_star;
  double v1;
  bool v1_finite;
  double ln_v2, ln_b0, ln_b, ln_delta, ln_J0;
  bool degenerate;
  bool fbar_decayed;   // f(D) is truncation_nats below the peak of f
  double ln_fbar1;     // ln of the whole f sum
  double rel_err;
};

struct StabilityReport {
  std::string label;
  std::string index_name;
  Perturbation perturbation;
  Constants constants;
  std::vector<PointRecord> points;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<std::string> reasons;
  // I_k = [k(1 - bJ) - delta, k(1 + bJ) + delta] at the last member.
  std::vector<std::pair<double, double>> intervals;
};

StabilityReport certify(const FamilyModel& family, const Perturbation& p, const Constants& c = {},
                        const CertifierOptions& opt = {});

struct ScanRow {
  std::string label;
  double parameter;  // a, d, ...
  double epsilon;    // growth exponent 2a/(1+2a) where defined, else NaN
  double ln_J0;
  Verdict verdict;
};

struct ScanInput {
  double parameter;
  double epsilon;  // NaN when the family has no growth exponent
  FamilyModel family;
};

// J0 at the last member of each family. An empty input is an error.
std::vector<ScanRow> threshold_scan(const std::vector<ScanInput>& inputs, const Perturbation& p,
                                    const Constants& c = {}, const CertifierOptions& opt = {});
std::string scan_csv(const std::vector<ScanRow>& rows);

}  // namespace gapcert
