#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "gapcert/omp.hpp"

namespace gapcert {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln(e^a + e^b) without overflow.
double log_add(double a, double b);

// ln sum_j e^{x_j}. The parallel variant reduces fixed 4096-term chunks and
// merges them in order, so its result does not depend on the thread count.
double log_sum_exp(const std::vector<double>& xs, Exec exec = Exec::Parallel);
inline constexpr std::size_t kLogSumChunk = 4096;

// ln sum_{r=lo}^{lo+count-1} e^{phi(r)} with the same chunking.
double log_sum_exp_range(const std::function<double(double)>& phi, double lo, std::size_t count,
                         Exec exec = Exec::Parallel);

// ln sum_{j=0}^{m-1} e^{s j} for real m >= 1.
double log_geometric(double s, double m);

// Mean of u(1-u) for u on [0,1] with density proportional to e^{sigma u}.
double tilted_u_one_minus_u(double sigma);

// ln sum_{j=0}^{m-1} exp(phi0 + s j + kappa j (j - m + 1)), to first order in kappa.
double log_quadratic_block(double phi0, double s, double kappa, double m);

struct SeriesOptions {
  double exact_limit = 4.0e6;    // term count up to which every term is summed
  double block_tol = 1e-9;       // max deviation of phi from its secant inside a block
  double prune_nats = 60.0;      // blocks this far below the relevant sum are summed coarsely
  double truncation_nats = 40.0; // open-ended sums stop this far below the running max
  bool need_suffix = false;      // keep enough structure for log_suffix()
  std::size_t max_blocks = 4000000;  // runaway refinement throws instead of exhausting memory
  Exec exec = Exec::Parallel;
};

// ln sum_{r=lo}^{hi} e^{phi(r)} over integers r, hi may be +inf. Small ranges
// are summed term by term; large ranges are split into blocks on which phi is
// linear to within block_tol and each block is a geometric series. Breakpoints
// are forced block boundaries (kinks of phi).
class LogSeries {
 public:
  LogSeries(std::function<double(double)> phi, double lo, double hi, std::vector<double> breakpoints = {},
            const SeriesOptions& opt = {});

  double log_total() const { return total_; }
  // ln sum_{r' >= r}; requires need_suffix.
  double log_suffix(double r) const;

  double lo() const { return lo_; }
  double hi() const { return hi_; }  // effective upper limit after truncation
  bool exact() const { return exact_; }
  bool truncated() const { return truncated_; }
  bool diverged() const { return diverged_; }
  // Last term at least truncation_nats below the largest term seen.
  bool decayed() const { return log_last_ < log_max_ - truncation_nats_; }
  double log_max_term() const { return log_max_; }
  double log_last_term() const { return log_last_; }
  double log_tail_estimate() const { return log_tail_; }
  double rel_err() const { return rel_err_; }
  std::size_t blocks() const { return blocks_.size(); }

 private:
  struct Block {
    double a, b;
    double phi_a, slope, curv;  // phi(a + j) ~ phi_a + slope j + curv j (j - (b - a))
    double log_sum;
    double log_suffix;  // this block and everything to its right
    std::vector<double> terms;  // exact blocks only
  };
  void sum_exact(const SeriesOptions& opt);
  void sum_blocked(const std::vector<double>& breakpoints, const SeriesOptions& opt, bool prune_global);
  double block_partial(const Block& blk, double r) const;

  std::function<double(double)> phi_;
  double lo_, hi_;
  bool exact_ = true, truncated_ = false, diverged_ = false;
  double truncation_nats_;
  double total_ = kNegInf;
  double log_max_ = kNegInf, log_last_ = kNegInf, log_tail_ = kNegInf;
  double rel_err_ = 0.0;
  std::vector<double> suffix_;  // exact mode: suffix_[i] = ln sum_{r >= lo + i}
  std::vector<Block> blocks_;   // blocked mode, ascending
};

}  // namespace gapcert
