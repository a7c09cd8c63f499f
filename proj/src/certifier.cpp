#include "gapcert/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gapcert {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Tabulated : public GrowthModel {
 public:
  explicit Tabulated(std::vector<double> g) : ln_(g.size()) {
    if (g.empty()) throw std::invalid_argument("tabulated growth: empty table");
    if (g[0] != 1.0) throw std::invalid_argument("tabulated growth: Gamma(0) must be 1");
    for (std::size_t r = 0; r < g.size(); ++r) {
      if (r > 0 && g[r] < g[r - 1]) throw std::invalid_argument("tabulated growth: Gamma must be nondecreasing");
      ln_[r] = std::log(g[r]);
    }
  }
  double ln_gamma(double r) const override {
    if (r <= 0) return 0.0;
    auto i = static_cast<std::size_t>(std::min<double>(r, static_cast<double>(ln_.size() - 1)));
    return ln_[i];
  }
  std::vector<double> breakpoints() const override {
    // Every table entry can be a kink; beyond the table the growth is flat.
    std::vector<double> b;
    for (std::size_t r = 0; r + 1 < ln_.size(); ++r) b.push_back(static_cast<double>(r));
    return b;
  }
  std::string describe() const override { return "tabulated(" + std::to_string(ln_.size()) + ")"; }

 private:
  std::vector<double> ln_;
};

class SemiHyperbolic : public GrowthModel {
 public:
  SemiHyperbolic(double l, double alpha, double beta, double ln_cap)
      : l_(l), alpha_(alpha), beta_(beta), cap_(ln_cap), ln_l_(std::log(l)) {
    if (l < 1 || alpha <= 0 || beta <= 0) throw std::invalid_argument("semi-hyperbolic growth: bad parameters");
  }
  double ln_gamma(double r) const override {
    double v;
    if (r <= l_) v = std::max(0.0, std::log(alpha_) + 2.0 * std::log(std::max(r, 1e-300)));
    else v = 2.0 * ln_l_ + beta_ * r / l_;
    return std::min(v, cap_);
  }
  std::vector<double> breakpoints() const override {
    std::vector<double> b{l_, 1.0 / std::sqrt(alpha_)};
    double r_cap = l_ * (cap_ - 2.0 * ln_l_) / beta_;
    if (r_cap > l_) b.push_back(r_cap);
    double r_cap2 = std::exp(0.5 * (cap_ - std::log(alpha_)));
    if (r_cap2 < l_) b.push_back(r_cap2);
    return b;
  }
  std::string describe() const override { return "semi_hyperbolic"; }

 private:
  double l_, alpha_, beta_, cap_, ln_l_;
};

class Lattice : public GrowthModel {
 public:
  Lattice(int d, double per_site, double hop, double ln_cap) : d_(d), per_site_(per_site), hop_(hop), cap_(ln_cap) {
    if (d < 1 || d > 60 || per_site <= 0 || hop < 1) throw std::invalid_argument("lattice growth: bad parameters");
  }
  double ln_gamma(double r) const override {
    if (r <= 0) return 0.0;
    const double x = hop_ * r;
    // ln of sum_k 2^k C(d,k) C(x,k)
    double terms[64] = {};
    int nt = 0;
    double ln_cd = 0.0, ln_cx = 0.0;
    for (int k = 0; k <= d_ && k <= x; ++k) {
      if (k > 0) {
        ln_cd += std::log(static_cast<double>(d_ - k + 1)) - std::log(static_cast<double>(k));
        ln_cx += std::log(x - k + 1) - std::log(static_cast<double>(k));
      }
      terms[nt++] = k * std::log(2.0) + ln_cd + ln_cx;
    }
    double m = *std::max_element(terms, terms + nt), sum = 0.0;
    for (int k = 0; k < nt; ++k) sum += std::exp(terms[k] - m);
    return std::min(std::log(per_site_) + m + std::log(sum), cap_);
  }
  std::vector<double> breakpoints() const override {
    std::vector<double> b;
    for (int k = 0; k <= d_; ++k) b.push_back(k / hop_);
    // Where the cap takes over.
    double lo = 0.0, hi = 1.0;
    while (ln_gamma(hi) < cap_ && hi < 1e300) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 0.5; ++it) {
      double mid = 0.5 * (lo + hi);
      (ln_gamma(mid) < cap_ ? lo : hi) = mid;
    }
    b.push_back(std::floor(lo));
    return b;
  }
  std::string describe() const override { return "lattice(d=" + std::to_string(d_) + ")"; }

 private:
  int d_;
  double per_site_, hop_, cap_;
};

class Exponential : public GrowthModel {
 public:
  Exponential(double beta, double ln_cap) : beta_(beta), cap_(ln_cap) {}
  double ln_gamma(double r) const override { return std::min(beta_ * std::max(r, 0.0), cap_); }
  std::vector<double> breakpoints() const override { return {cap_ / beta_}; }
  std::string describe() const override { return "exponential"; }

 private:
  double beta_, cap_;
};

class Stretched : public GrowthModel {
 public:
  Stretched(double eps, double ln_cap) : p_(1.0 - eps), cap_(ln_cap) {
    if (eps <= 0 || eps >= 1) throw std::invalid_argument("stretched growth: eps must be in (0,1)");
  }
  double ln_gamma(double r) const override { return r <= 0 ? 0.0 : std::min(std::pow(r, p_), cap_); }
  std::vector<double> breakpoints() const override { return {std::pow(cap_, 1.0 / p_)}; }
  std::string describe() const override { return "stretched"; }

 private:
  double p_, cap_;
};

}  // namespace

GrowthPtr tabulated_growth(std::vector<double> gamma) { return std::make_shared<Tabulated>(std::move(gamma)); }
GrowthPtr semi_hyperbolic_growth(double l, double alpha, double beta, double ln_cap) {
  return std::make_shared<SemiHyperbolic>(l, alpha, beta, ln_cap);
}
GrowthPtr lattice_growth(int d, double per_site, double hop, double ln_cap) {
  return std::make_shared<Lattice>(d, per_site, hop, ln_cap);
}
GrowthPtr exponential_growth(double beta, double ln_cap) { return std::make_shared<Exponential>(beta, ln_cap); }
GrowthPtr stretched_growth(double eps, double ln_cap) { return std::make_shared<Stretched>(eps, ln_cap); }

FamilyModel model_semi_hyperbolic(const SemiHyperbolicSpec& s) {
  if (s.a < 0 || s.alpha <= 0 || s.beta <= 0 || s.gamma_const <= 0)
    throw std::invalid_argument("semi-hyperbolic model: bad parameters");
  if (s.l_grid.empty()) throw std::invalid_argument("semi-hyperbolic model: empty grid");
  FamilyModel fm;
  std::ostringstream label;
  label << "semi_hyperbolic(a=" << s.a << ")";
  fm.label = label.str();
  fm.index_name = "ln_n";
  for (double g : s.l_grid) {
    // For a > 0 the grid holds l_n; for a = 0 it holds ln n and l = 1.
    const double l = s.a > 0 ? g : 1.0;
    const double ln_n = s.a > 0 ? std::log(g) / s.a : g;
    if (l < 1 || ln_n <= 0) throw std::invalid_argument("semi-hyperbolic model: grid values must exceed 1");
    ModelPoint pt;
    pt.index = ln_n;
    pt.ln_N = (1.0 + 2.0 * s.a) * ln_n;
    pt.D = std::ceil(s.gamma_const * l * ln_n);
    pt.rho_star = std::floor(l * ln_n);
    pt.gamma = semi_hyperbolic_growth(l, s.alpha, s.beta, pt.ln_N);
    fm.points.push_back(pt);
  }
  return fm;
}

FamilyModel model_stacked(int d, const std::vector<double>& l_grid) {
  if (d < 2) throw std::invalid_argument("stacked model: d must be >= 2");
  if (l_grid.empty()) throw std::invalid_argument("stacked model: empty grid");
  FamilyModel fm;
  fm.label = "stacked(d=" + std::to_string(d) + ")";
  fm.index_name = "L";
  for (double L : l_grid) {
    if (L < 2) throw std::invalid_argument("stacked model: L must be >= 2");
    ModelPoint pt;
    pt.index = L;
    pt.ln_N = std::log(2.0) + d * std::log(L);
    pt.D = d * std::floor(L / 2);
    pt.rho_star = std::floor(L / 2);
    // One graph step moves at most two lattice steps; two qubits per site.
    pt.gamma = lattice_growth(d, 2.0, 2.0, pt.ln_N);
    fm.points.push_back(pt);
  }
  return fm;
}

FamilyModel model_hyperbolic(double beta, double rho_factor, const std::vector<double>& ln_n_grid) {
  if (beta <= 0 || rho_factor <= 0) throw std::invalid_argument("hyperbolic model: bad parameters");
  if (ln_n_grid.empty()) throw std::invalid_argument("hyperbolic model: empty grid");
  FamilyModel fm;
  fm.label = "hyperbolic";
  fm.index_name = "ln_N";
  for (double ln_n : ln_n_grid) {
    ModelPoint pt;
    pt.index = ln_n;
    pt.ln_N = ln_n;
    pt.D = std::ceil(2.0 * ln_n / beta);
    pt.rho_star = std::max(1.0, std::floor(rho_factor * ln_n));
    pt.gamma = exponential_growth(beta, ln_n);
    fm.points.push_back(pt);
  }
  return fm;
}

FamilyModel model_stretched(double eps1, double rho_power, const std::vector<double>& ln_n_grid) {
  if (ln_n_grid.empty()) throw std::invalid_argument("stretched model: empty grid");
  FamilyModel fm;
  std::ostringstream label;
  label << "stretched(eps1=" << eps1 << ",rho=lnN^" << rho_power << ")";
  fm.label = label.str();
  fm.index_name = "ln_N";
  for (double ln_n : ln_n_grid) {
    ModelPoint pt;
    pt.index = ln_n;
    pt.ln_N = ln_n;
    pt.rho_star = std::floor(std::pow(ln_n, rho_power));
    pt.D = 2.0 * pt.rho_star;
    pt.gamma = stretched_growth(eps1, ln_n);
    fm.points.push_back(pt);
  }
  return fm;
}

TailSums::TailSums(const ModelPoint& pt, const Perturbation& p, const Constants& c, const SeriesOptions& opt)
    : pt_(pt), p_(p), c_(c), opt_(opt) {
  if (!pt_.gamma) throw std::invalid_argument("tail sums: model point has no growth function");
  if (p_.mu <= 0) throw std::invalid_argument("tail sums: mu must be positive");
  if (!(pt_.D >= 1)) throw std::invalid_argument("tail sums: diameter must be >= 1");
  bps_ = pt_.gamma->breakpoints();
  const GrowthModel& g = *pt_.gamma;
  const double mu = p_.mu;

  v1s_ = std::make_unique<LogSeries>([&g, mu](double r) { return 2.0 * g.ln_gamma(r) - mu * r / 2.0; }, 1.0, pt_.D,
                                     bps_, opt_);
  ln_v1_ = std::log(8.0 * (std::exp(mu) + 1.0) / mu) + v1s_->log_total();
  v1_ = std::exp(ln_v1_);
  v1_finite_ = !v1s_->diverged() && v1s_->decayed() && std::isfinite(v1_);

  SeriesOptions fo = opt_;
  fo.need_suffix = true;
  fs_ = std::make_unique<LogSeries>([this](double r) { return ln_f(r); }, 1.0, pt_.D, bps_, fo);

  std::vector<double> shifted = bps_;
  for (double b : bps_) shifted.push_back(b - 1.0);
  b0_ = std::make_unique<LogSeries>(
      [this, &g](double r) { return 0.5 * g.ln_gamma(r + 1.0) + ln_fbar(r); }, 1.0, std::min(pt_.D, fs_->hi()),
      shifted, opt_);
  if (!degenerate()) {
    const double ln_cwt = std::log(c_.c_Wt);
    b_ = std::make_unique<LogSeries>(
        [this, &g, ln_cwt](double r) { return 0.5 * g.ln_gamma(r + 1.0) + ln_cwt + ln_fbar(r - 1.0); }, 1.0,
        pt_.rho_star - 1.0, shifted, opt_);
  }
}

double TailSums::ln_f(double r) const {
  if (r < 1.0) return kNegInf;
  return std::log(c_.c_W) + 5.0 * std::log(r) + 7.0 * pt_.gamma->ln_gamma(r) + ln_eta(1.0 / 28.0, r / (256.0 * v1_));
}

double TailSums::ln_fbar(double r) const { return fs_->log_suffix(std::max(r, 1.0)); }

double TailSums::ln_v2() const {
  if (p_.J == 0.0 || c_.c_D == 0.0) return kNegInf;
  const GrowthModel& g = *pt_.gamma;
  const double v1 = v1_;
  LogSeries s([&g, v1](double r) { return std::log(r) + 3.0 * g.ln_gamma(r) + ln_eta(1.0 / 28.0, r / (4.0 * v1)); },
              1.0, pt_.D, bps_, opt_);
  if (s.diverged()) return std::numeric_limits<double>::infinity();
  return std::log(c_.c_D * p_.J) + s.log_total();
}

double TailSums::rel_err() const {
  return std::max({v1s_->rel_err(), fs_->rel_err(), b0_->rel_err(), b_ ? b_->rel_err() : 0.0});
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::CertifiedTrend: return "certified-trend";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::Fails: return "fails";
  }
  return "?";
}

namespace {

PointRecord evaluate(const ModelPoint& pt, const Perturbation& p, const Constants& c, const SeriesOptions& so) {
  TailSums ts(pt, p, c, so);
  PointRecord rec{};
  rec.index = pt.index;
  rec.ln_N = pt.ln_N;
  rec.D = pt.D;
  rec.rho_star = pt.rho_star;
  rec.v1 = ts.v1();
  rec.v1_finite = ts.v1_finite();
  rec.ln_v2 = ts.ln_v2();
  rec.ln_b0 = ts.ln_b0();
  rec.ln_b = ts.ln_b();
  rec.degenerate = ts.degenerate();
  rec.ln_J0 = rec.degenerate ? kNaN : -std::log(4.0) - rec.ln_b;
  rec.ln_delta = ts.ln_delta();
  rec.fbar_decayed = ts.f_series().decayed() && !ts.f_series().diverged();
  rec.ln_fbar1 = ts.f_series().log_total();
  rec.rel_err = ts.rel_err();
  return rec;
}

// Relative spread of e^{x_i} over the tail window, or true if nonincreasing.
bool bounded_tail(const std::vector<double>& logs, std::size_t start, double tol) {
  bool nonincreasing = true;
  double lo = logs[start], hi = logs[start];
  for (std::size_t i = start; i < logs.size(); ++i) {
    if (!std::isfinite(logs[i])) return false;
    if (i > start && logs[i] > logs[i - 1]) nonincreasing = false;
    lo = std::min(lo, logs[i]);
    hi = std::max(hi, logs[i]);
  }
  return nonincreasing || std::expm1(hi - lo) < tol;
}

bool increasing_tail(const std::vector<double>& logs, std::size_t start) {
  for (std::size_t i = start + 1; i < logs.size(); ++i)
    if (!(logs[i] > logs[i - 1])) return false;
  return true;
}

}  // namespace

StabilityReport certify(const FamilyModel& family, const Perturbation& p, const Constants& c,
                        const CertifierOptions& opt) {
  if (family.points.empty()) throw std::invalid_argument("certify: family has no members");
  if (!(p.J >= 0) || p.mu <= 0) throw std::invalid_argument("certify: need J >= 0 and mu > 0");
  for (std::size_t i = 1; i < family.points.size(); ++i)
    if (!(family.points[i].ln_N > family.points[i - 1].ln_N))
      throw std::invalid_argument("certify: N must increase along the family");
  for (const auto& pt : family.points)
    if (pt.rho_star > pt.D) throw std::invalid_argument("certify: rho* exceeds the diameter");

  StabilityReport rep;
  rep.label = family.label;
  rep.index_name = family.index_name;
  rep.perturbation = p;
  rep.constants = c;
  const std::size_t n = family.points.size();
  rep.points.resize(n);
  if (opt.exec == Exec::Parallel) {
    SeriesOptions so = opt.series;
    so.exec = Exec::Serial;
    GAPCERT_OMP("omp parallel for schedule(dynamic, 1)")
    for (std::size_t i = 0; i < n; ++i) rep.points[i] = evaluate(family.points[i], p, c, so);
  } else {
    for (std::size_t i = 0; i < n; ++i) rep.points[i] = evaluate(family.points[i], p, c, opt.series);
  }

  std::vector<double> ln_v1, ln_b0, ln_delta, ln_f1, lnln_N;
  for (const auto& r : rep.points) {
    ln_v1.push_back(std::log(r.v1));
    ln_b0.push_back(r.ln_b0);
    ln_delta.push_back(r.ln_delta);
    ln_f1.push_back(r.ln_fbar1);
    lnln_N.push_back(std::log(r.ln_N));
  }
  const auto& last = rep.points.back();
  const std::size_t start = n >= 3 ? std::min(n - 2, (2 * n) / 3) : 0;

  bool fails = false;
  if (!last.v1_finite && n >= 2 && increasing_tail(ln_v1, start)) {
    fails = true;
    rep.reasons.push_back("v1 sum does not decay and grows along the family");
  }
  if (!last.fbar_decayed && n >= 2 && increasing_tail(ln_f1, start)) {
    fails = true;
    rep.reasons.push_back("tail sum f does not decay by the diameter and grows along the family");
  }

  bool ok = n >= 3;
  if (n < 3) rep.reasons.push_back("fewer than 3 members: no trend");
  bool all_v1 = std::all_of(rep.points.begin(), rep.points.end(), [](const PointRecord& r) { return r.v1_finite; });
  if (!all_v1 || !bounded_tail(ln_v1, start, opt.bounded_variation)) {
    ok = false;
    rep.reasons.push_back("v1 not finite and stable");
  }
  if (!bounded_tail(ln_b0, start, opt.bounded_variation)) {
    ok = false;
    rep.reasons.push_back("b0 sum not bounded over the last third");
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < n; ++i)
    if (!(ln_delta[i] < ln_delta[i - 1])) decreasing = false;
  if (!decreasing) {
    ok = false;
    rep.reasons.push_back("delta_n not strictly decreasing");
  } else if (n >= 2) {
    double slope = (ln_delta[n - 1] - ln_delta[n - 2]) / (lnln_N[n - 1] - lnln_N[n - 2]);
    if (!(slope < opt.slope_threshold)) {
      ok = false;
      rep.reasons.push_back("final log-slope of delta_n above threshold");
    }
  }
  if (last.degenerate) {
    ok = false;
    rep.reasons.push_back("rho* = 1 at the last member: J0 undefined");
  }
  rep.verdict = fails ? Verdict::Fails : ok ? Verdict::CertifiedTrend : Verdict::Inconclusive;

  if (!last.degenerate) {
    const double bJ = std::exp(last.ln_b) * p.J, delta = std::exp(last.ln_delta);
    for (int k = 0; k < opt.interval_count; ++k)
      rep.intervals.emplace_back(k * (1.0 - bJ) - delta, k * (1.0 + bJ) + delta);
  }
  return rep;
}

std::vector<ScanRow> threshold_scan(const std::vector<ScanInput>& inputs, const Perturbation& p, const Constants& c,
                                    const CertifierOptions& opt) {
  if (inputs.empty()) throw std::invalid_argument("threshold_scan: empty parameter grid");
  std::vector<ScanRow> rows;
  for (const auto& in : inputs) {
    auto rep = certify(in.family, p, c, opt);
    rows.push_back({in.family.label, in.parameter, in.epsilon, rep.points.back().ln_J0, rep.verdict});
  }
  return rows;
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::ostringstream out;
  out.precision(10);
  out << "label,parameter,epsilon,ln_J0,verdict\n";
  for (const auto& r : rows)
    out << '"' << r.label << "\"," << r.parameter << ',' << r.epsilon << ',' << r.ln_J0 << ',' << verdict_name(r.verdict)
        << '\n';
  return out.str();
}

}  // namespace gapcert
