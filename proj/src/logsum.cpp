#include "gapcert/logsum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gapcert {

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

namespace {

struct Partial {
  double max = kNegInf;
  double sum = 0.0;  // sum of e^{x - max}
};

Partial reduce_chunk(const double* x, std::size_t n) {
  Partial p;
  for (std::size_t i = 0; i < n; ++i) p.max = std::max(p.max, x[i]);
  if (p.max == kNegInf) return p;
  if (p.max == std::numeric_limits<double>::infinity()) {
    p.sum = 1.0;
    return p;
  }
  for (std::size_t i = 0; i < n; ++i) p.sum += std::exp(x[i] - p.max);
  return p;
}

double merge(const std::vector<Partial>& parts) {
  double m = kNegInf;
  for (const auto& p : parts) m = std::max(m, p.max);
  if (m == kNegInf || std::isinf(m)) return m;
  double s = 0.0;
  for (const auto& p : parts)
    if (p.max != kNegInf) s += p.sum * std::exp(p.max - m);
  return m + std::log(s);
}

// Runs body(c) for every chunk index; the chunking, not the thread count, fixes the rounding.
template <class Body>
void for_chunks(std::size_t nchunks, Exec exec, Body&& body) {
  if (exec == Exec::Serial) {
    for (std::size_t c = 0; c < nchunks; ++c) body(c);
  } else {
    GAPCERT_OMP("omp parallel for schedule(static)")
    for (std::size_t c = 0; c < nchunks; ++c) body(c);
  }
}

}  // namespace

double log_sum_exp(const std::vector<double>& xs, Exec exec) {
  if (xs.empty()) return kNegInf;
  const std::size_t nchunks = (xs.size() + kLogSumChunk - 1) / kLogSumChunk;
  std::vector<Partial> parts(nchunks);
  for_chunks(nchunks, exec, [&](std::size_t c) {
    std::size_t begin = c * kLogSumChunk;
    parts[c] = reduce_chunk(xs.data() + begin, std::min(kLogSumChunk, xs.size() - begin));
  });
  return merge(parts);
}

double log_sum_exp_range(const std::function<double(double)>& phi, double lo, std::size_t count, Exec exec) {
  if (count == 0) return kNegInf;
  const std::size_t nchunks = (count + kLogSumChunk - 1) / kLogSumChunk;
  std::vector<Partial> parts(nchunks);
  for_chunks(nchunks, exec, [&](std::size_t c) {
    double buf[kLogSumChunk];
    std::size_t begin = c * kLogSumChunk, n = std::min(kLogSumChunk, count - begin);
    for (std::size_t i = 0; i < n; ++i) buf[i] = phi(lo + static_cast<double>(begin + i));
    parts[c] = reduce_chunk(buf, n);
  });
  return merge(parts);
}

double log_geometric(double s, double m) {
  if (m < 1.0) throw std::invalid_argument("log_geometric: count must be >= 1");
  if (m == 1.0) return 0.0;
  if (s > 0.0) return s * (m - 1.0) + log_geometric(-s, m);
  const double x = s * m;
  if (std::fabs(x) < 1e-8) return std::log(m) + s * (m - 1.0) / 2.0;
  return std::log(-std::expm1(x)) - std::log(-std::expm1(s));
}

double tilted_u_one_minus_u(double sigma) {
  const double x = std::fabs(sigma);
  if (x < 1e-2) return 1.0 / 6.0 - x * x / 360.0;
  const double t = std::exp(-x);
  return (x * (1.0 + t) + 2.0 * std::expm1(-x)) / (x * x * -std::expm1(-x));
}

double log_quadratic_block(double phi0, double s, double kappa, double m) {
  double v = phi0 + log_geometric(s, m);
  if (kappa != 0.0 && m > 2.0) v -= kappa * (m - 1.0) * (m - 1.0) * tilted_u_one_minus_u(s * (m - 1.0));
  return v;
}

LogSeries::LogSeries(std::function<double(double)> phi, double lo, double hi, std::vector<double> breakpoints,
                     const SeriesOptions& opt)
    : phi_(std::move(phi)), lo_(std::ceil(lo)), hi_(std::isinf(hi) ? hi : std::floor(hi)),
      truncation_nats_(opt.truncation_nats) {
  if (hi_ < lo_) return;  // empty sum
  std::sort(breakpoints.begin(), breakpoints.end());

  if (std::isinf(hi_)) {
    // Extend until the summand is past every breakpoint, falling, and far below its maximum.
    double last_bp = lo_;
    for (double b : breakpoints)
      if (std::isfinite(b)) last_bp = std::max(last_bp, std::floor(b));
    double r = std::max(lo_ + 63.0, 2.0 * last_bp);
    for (double x = lo_; x <= std::min(r, lo_ + 63.0); x += 1.0) log_max_ = std::max(log_max_, phi_(x));
    double prev = lo_ + 63.0;
    while (true) {
      for (int i = 1; i <= 32; ++i) {
        double x = std::floor(prev * std::pow(r / prev, i / 32.0));
        log_max_ = std::max(log_max_, phi_(x));
      }
      double pr = phi_(r), pr1 = phi_(r + 1.0);
      if (pr < log_max_ - truncation_nats_ && pr1 < pr) {
        hi_ = r;
        truncated_ = true;
        log_tail_ = pr1 - std::log(-std::expm1(pr1 - pr));
        break;
      }
      if (r > 1e30) {
        diverged_ = true;
        hi_ = r;
        total_ = std::numeric_limits<double>::infinity();
        log_last_ = log_max_ = pr;
        return;
      }
      prev = r;
      r *= 2.0;
    }
  }

  const double count = hi_ - lo_ + 1.0;
  if (count <= opt.exact_limit) {
    sum_exact(opt);
  } else {
    exact_ = false;
    sum_blocked(breakpoints, opt, !opt.need_suffix);
  }
}

void LogSeries::sum_exact(const SeriesOptions& opt) {
  const std::size_t n = static_cast<std::size_t>(hi_ - lo_ + 1.0);
  std::vector<double> terms(n);
  if (opt.exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) terms[i] = phi_(lo_ + static_cast<double>(i));
  } else {
    GAPCERT_OMP("omp parallel for schedule(static)")
    for (std::size_t i = 0; i < n; ++i) terms[i] = phi_(lo_ + static_cast<double>(i));
  }
  log_max_ = std::max(log_max_, *std::max_element(terms.begin(), terms.end()));
  log_last_ = terms.back();
  total_ = log_sum_exp(terms, opt.exec);
  rel_err_ = static_cast<double>(n) * 1e-16;
  if (!opt.need_suffix) return;

  // Streaming suffix sums kept as (scale, sum) so no term underflows.
  suffix_.assign(n, kNegInf);
  auto scan = [&](std::size_t begin, std::size_t end, double m, double s) {
    for (std::size_t i = end; i-- > begin;) {
      const double t = terms[i];
      if (t > m) {
        s = s * std::exp(m - t) + 1.0;
        m = t;
      } else if (t != kNegInf) {
        s += std::exp(t - m);
      }
      suffix_[i] = m == kNegInf ? kNegInf : m + std::log(s);
    }
  };
  const std::size_t nchunks = (n + kLogSumChunk - 1) / kLogSumChunk;
  std::vector<Partial> parts(nchunks);
  for_chunks(nchunks, opt.exec, [&](std::size_t c) {
    std::size_t begin = c * kLogSumChunk;
    parts[c] = reduce_chunk(terms.data() + begin, std::min(kLogSumChunk, n - begin));
  });
  // Suffix of chunk totals, then each chunk scans from its right neighbour's value.
  std::vector<Partial> after(nchunks);
  for (std::size_t c = nchunks - 1; c-- > 0;) {
    Partial acc = after[c + 1], nxt = parts[c + 1];
    if (nxt.max > acc.max) {
      acc.sum = acc.sum * (acc.max == kNegInf ? 0.0 : std::exp(acc.max - nxt.max)) + nxt.sum;
      acc.max = nxt.max;
    } else if (nxt.max != kNegInf) {
      acc.sum += nxt.sum * std::exp(nxt.max - acc.max);
    }
    after[c] = acc;
  }
  for_chunks(nchunks, opt.exec, [&](std::size_t c) {
    std::size_t begin = c * kLogSumChunk;
    scan(begin, std::min(begin + kLogSumChunk, n), after[c].max, after[c].sum);
  });
}

void LogSeries::sum_blocked(const std::vector<double>& breakpoints, const SeriesOptions& opt, bool prune_global) {
  constexpr double kExactIndexLimit = 9007199254740992.0;  // 2^53
  constexpr double kEps = std::numeric_limits<double>::epsilon();

  // Segment ends, ascending: [lo, c0], [c0+1, c1], ..., [.., hi].
  std::vector<double> ends;
  for (double b : breakpoints) {
    double c = std::floor(b);
    if (c >= lo_ && c < hi_ && (ends.empty() || c > ends.back())) ends.push_back(c);
  }
  ends.push_back(hi_);

  double global = kNegInf;
  if (prune_global) {
    double a = lo_;
    for (double e : ends) {
      global = std::max({global, phi_(a), phi_(e)});
      for (int i = 1; i < 64 && e > a; ++i) global = std::max(global, phi_(std::floor(a + (e - a) * std::pow(i / 64.0, 3.0))));
      a = e + 1.0;
    }
  }

  std::vector<Block> out;  // descending
  double running = kNegInf, err = kNegInf;
  log_last_ = phi_(hi_);
  for (std::size_t si = ends.size(); si-- > 0;) {
    const double seg_lo = si == 0 ? lo_ : ends[si - 1] + 1.0;
    std::vector<std::pair<double, double>> stack{{seg_lo, ends[si]}};
    while (!stack.empty()) {
      auto [a, b] = stack.back();
      stack.pop_back();
      const double m = b - a + 1.0;
      Block blk{a, b, 0.0, 0.0, 0.0, kNegInf, kNegInf, {}};
      if (m <= 16.0 && b < kExactIndexLimit) {
        for (double r = a; r <= b; r += 1.0) blk.terms.push_back(phi_(r));
        blk.phi_a = blk.terms.front();
        blk.log_sum = log_sum_exp(blk.terms, Exec::Serial);
        log_max_ = std::max(log_max_, *std::max_element(blk.terms.begin(), blk.terms.end()));
      } else {
        const double pa = phi_(a), pb = phi_(b);
        const double mid = std::floor(a + (b - a) / 2.0);
        const double pm = phi_(mid);
        const double w = b - a, jm = mid - a;
        const double s = (pb - pa) / w;
        // Parabola through a, mid, b; the quarter points measure the cubic remainder.
        const double kappa = jm > 0 && jm < w ? (pm - pa - s * jm) / (jm * (jm - w)) : 0.0;
        double dev = 0.0, top = pa, x_top = a;
        auto see = [&](double x, double p) {
          if (p > top) top = p, x_top = x;
        };
        see(b, pb);
        see(mid, pm);
        for (double q : {std::floor(a + w / 4.0), std::floor(a + 3.0 * w / 4.0)}) {
          const double pq = phi_(q), j = q - a;
          see(q, pq);
          dev = std::max(dev, std::fabs(pq - (pa + s * j + kappa * j * (j - w))));
        }
        // First-cumulant error of the curvature correction plus its discretisation error.
        const double corr = std::fabs(kappa) * w * w * tilted_u_one_minus_u(s * w);
        dev += corr * corr / 2.0 + corr * 2.0 / w;
        log_max_ = std::max(log_max_, top);
        // When the mass is concentrated near the top point, the quarter points say nothing
        // about it; probe at multiples of the mass width on both sides of the top.
        {
          const double st = s + kappa * (2.0 * (x_top - a) - w);
          const double h = 1.0 / std::max({std::fabs(st), std::sqrt(std::fabs(kappa)), 1e-300});
          for (double step = h; step < w / 8.0; step *= 4.0) {
            for (double x : {std::ceil(x_top + step), std::floor(x_top - step)}) {
              if (!(x > a && x < b)) continue;
              const double px = phi_(x), j = x - a;
              see(x, px);
              dev = std::max(dev, std::fabs(px - (pa + s * j + kappa * j * (j - w))));
            }
          }
        }
        // Rounding floor where the block's mass sits: |phi| there, plus |phi'| * r for
        // components that cancel at large r.
        const double slope_top = s + kappa * (2.0 * (x_top - a) - w);
        const double scale = std::fabs(top) + std::fabs(slope_top) * x_top;
        const double tol = std::max(opt.block_tol, 64.0 * kEps * scale);
        const double bound = std::log(m) + top + std::fabs(kappa) * w * w / 4.0;
        const bool negligible = bound + 1.0 < std::max(running, global) - opt.prune_nats;
        const bool splittable = mid > a && mid < b;
        if (dev > tol && !negligible && splittable) {
          stack.push_back({a, mid});
          stack.push_back({mid + 1.0, b});
          continue;
        }
        blk.phi_a = pa;
        blk.slope = s;
        blk.curv = kappa;
        blk.log_sum = log_quadratic_block(pa, s, kappa, m);
        err = log_add(err, negligible && dev > tol ? bound : blk.log_sum + std::log(std::max(dev, 1e-16)));
      }
      running = log_add(running, blk.log_sum);
      blk.log_suffix = running;
      out.push_back(std::move(blk));
      if (out.size() > opt.max_blocks) throw std::runtime_error("LogSeries: block budget exceeded");
    }
  }
  std::reverse(out.begin(), out.end());
  blocks_ = std::move(out);
  total_ = running;
  rel_err_ = total_ == kNegInf ? 0.0 : std::exp(err - total_);
}

double LogSeries::block_partial(const Block& blk, double r) const {
  if (!blk.terms.empty()) {
    std::vector<double> tail(blk.terms.begin() + static_cast<std::ptrdiff_t>(r - blk.a), blk.terms.end());
    return log_sum_exp(tail, Exec::Serial);
  }
  // The sub-range [r, b] keeps the curvature; its secant slope changes.
  const double w = blk.b - blk.a;
  auto model = [&](double j) { return blk.phi_a + blk.slope * j + blk.curv * j * (j - w); };
  const double j0 = r - blk.a, m = blk.b - r + 1.0;
  const double p0 = model(j0);
  const double s = m > 1.0 ? (model(w) - p0) / (m - 1.0) : 0.0;
  return log_quadratic_block(p0, s, blk.curv, m);
}

double LogSeries::log_suffix(double r) const {
  r = std::ceil(r);
  if (r <= lo_) return total_;
  if (r > hi_) return kNegInf;
  if (exact_) {
    if (suffix_.empty()) throw std::logic_error("LogSeries: suffix sums were not requested");
    return suffix_[static_cast<std::size_t>(r - lo_)];
  }
  auto it = std::lower_bound(blocks_.begin(), blocks_.end(), r, [](const Block& blk, double x) { return blk.b < x; });
  const double rest = (it + 1 == blocks_.end()) ? kNegInf : (it + 1)->log_suffix;
  return log_add(block_partial(*it, r), rest);
}

}  // namespace gapcert
