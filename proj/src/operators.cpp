#include "gapcert/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>
#include <type_traits>

namespace gapcert {

namespace {

uint64_t low_word(const BitVec& v) { return v.words().empty() ? 0 : v.words()[0]; }

cplx i_pow(int k) {
  switch (k & 3) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

// Phase of p acting on basis state src: p|src> = phase |src ^ x>.
cplx pauli_phase(const PauliString& p, uint64_t src) {
  const uint64_t x = low_word(p.x), z = low_word(p.z);
  const cplx base = static_cast<double>(p.sign) * i_pow(std::popcount(x & z));
  return (std::popcount(src & z) & 1) ? -base : base;
}

// Local index -> full basis bits, and every assignment of the complementary qubits.
struct Split {
  std::vector<uint64_t> scatter, rest;
};

Split split_qubits(const VertexSet& qubits, int n) {
  uint64_t mask = 0;
  for (Vertex q : qubits) {
    if (q < 0 || q >= n) throw std::invalid_argument("qubit index out of range");
    mask |= uint64_t{1} << q;
  }
  Split s;
  s.scatter.resize(std::size_t{1} << qubits.size());
  for (std::size_t i = 0; i < s.scatter.size(); ++i) {
    uint64_t b = 0;
    for (std::size_t j = 0; j < qubits.size(); ++j)
      if ((i >> j) & 1) b |= uint64_t{1} << qubits[j];
    s.scatter[i] = b;
  }
  const uint64_t full = (n == 64) ? ~uint64_t{0} : ((uint64_t{1} << n) - 1);
  const uint64_t comp = full & ~mask;
  // Enumerate submasks of comp.
  uint64_t e = 0;
  do {
    s.rest.push_back(e);
    e = (e - comp) & comp;
  } while (e != 0);
  std::sort(s.rest.begin(), s.rest.end());
  return s;
}

template <class Mat>
Mat random_block(std::size_t rows, std::size_t cols, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if constexpr (std::is_same_v<typename Mat::Scalar, cplx>) {
        const double re = nd(rng);
        m(i, j) = cplx(re, nd(rng));
      } else {
        m(i, j) = nd(rng);
      }
    }
  return m;
}

CMat random_block(std::size_t rows, std::size_t cols, uint64_t seed) { return random_block<CMat>(rows, cols, seed); }

// Columns of s made orthonormal to `basis` and to each other (two passes of SVQB: scale by the
// inverse square root of the Gram matrix, dropping near-dependent directions).
template <class Mat>
Mat orthonormalize(Mat s, const Mat& basis) {
  using Scalar = typename Mat::Scalar;
  for (int pass = 0; pass < 2; ++pass) {
    if (basis.cols() > 0) s -= basis * (basis.adjoint() * s);
    if (s.cols() == 0) return s;
    const Mat gram = s.adjoint() * s;
    Eigen::SelfAdjointEigenSolver<Mat> es(Scalar(0.5) * (gram + gram.adjoint()));
    const Eigen::VectorXd lam = es.eigenvalues();
    const double top = lam.maxCoeff();
    if (!(top > 0)) return Mat(s.rows(), 0);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
      if (lam(i) > 1e-20 * top && lam(i) > 0) keep.push_back(i);
    Mat t(s.cols(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
      t.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]) / std::sqrt(lam(keep[j]));
    s = s * t;
  }
  return s;
}

CMat hermitize(const CMat& m) { return 0.5 * (m + m.adjoint()); }
RMat hermitize(const RMat& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

PauliSum::PauliSum(int n_qubits) : n_(n_qubits) {
  if (n_ < 0 || n_ > kSparseMaxQubits)
    throw std::invalid_argument("PauliSum: qubit count must be in [0, " + std::to_string(kSparseMaxQubits) + "]");
}

void PauliSum::add(double coeff, const PauliString& p) {
  if (static_cast<int>(p.qubits()) != n_) throw std::invalid_argument("PauliSum: term has the wrong qubit count");
  if (!std::isfinite(coeff)) throw std::invalid_argument("PauliSum: coefficient must be finite");
  terms_.push_back({coeff, p});
  const uint64_t x = low_word(p.x), z = low_word(p.z);
  const cplx f = coeff * static_cast<double>(p.sign) * i_pow(std::popcount(x & z));
  auto it = std::find_if(groups_.begin(), groups_.end(), [x](const Group& g) { return g.x == x; });
  if (it == groups_.end()) {
    groups_.push_back({x, {}});
    it = groups_.end() - 1;
  }
  it->terms.push_back({z, f});
}

PauliSum& PauliSum::operator+=(const PauliSum& o) {
  if (o.n_ != n_) throw std::invalid_argument("PauliSum: qubit count mismatch");
  for (const auto& t : o.terms_) add(t.coeff, t.op);
  return *this;
}

PauliSum PauliSum::scaled(double s) const {
  PauliSum out(n_);
  for (const auto& t : terms_) out.add(s * t.coeff, t.op);
  return out;
}

double PauliSum::norm_bound() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::fabs(t.coeff);
  return s;
}

VertexSet PauliSum::support() const {
  uint64_t m = 0;
  for (const auto& t : terms_) m |= low_word(t.op.x) | low_word(t.op.z);
  VertexSet s;
  for (int q = 0; q < n_; ++q)
    if ((m >> q) & 1) s.push_back(q);
  return s;
}

template <class Scalar>
void PauliSum::apply_impl(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& in,
                          Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& out, Exec exec) const {
  using RowMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const auto d = static_cast<Eigen::Index>(dim());
  if (in.rows() != d) throw std::invalid_argument("PauliSum::apply: dimension mismatch");
  const Eigen::Index b = in.cols();
  // Row-major copies keep each basis state's b entries contiguous.
  const RowMat src_rows = in;
  RowMat dst_rows = RowMat::Zero(d, b);
  // Group-outermost so that c ^ x walks memory in long runs; each output entry still
  // accumulates the groups in the same order.
  for (const auto& g : groups_) {
    auto row = [&](Eigen::Index c) {
      const uint64_t src = static_cast<uint64_t>(c) ^ g.x;
      cplx fc = 0.0;
      for (const auto& t : g.terms) fc += (std::popcount(src & t.z) & 1) ? -t.factor : t.factor;
      if (fc == cplx(0.0)) return;
      Scalar f;
      if constexpr (std::is_same_v<Scalar, cplx>) f = fc;
      else f = fc.real();
      Scalar* dst = dst_rows.data() + c * b;
      const Scalar* from = src_rows.data() + static_cast<Eigen::Index>(src) * b;
      for (Eigen::Index j = 0; j < b; ++j) dst[j] += f * from[j];
    };
    if (exec == Exec::Parallel) {
      GAPCERT_OMP("omp parallel for schedule(static)")
      for (Eigen::Index c = 0; c < d; ++c) row(c);
    } else {
      for (Eigen::Index c = 0; c < d; ++c) row(c);
    }
  }
  out = dst_rows;
}

void PauliSum::apply(const CMat& in, CMat& out, Exec exec) const { apply_impl<cplx>(in, out, exec); }

void PauliSum::apply(const RMat& in, RMat& out, Exec exec) const {
  if (!is_real()) throw std::invalid_argument("PauliSum::apply: operator is not real");
  apply_impl<double>(in, out, exec);
}

bool PauliSum::is_real() const {
  for (const auto& g : groups_)
    for (const auto& t : g.terms)
      if (t.factor.imag() != 0.0) return false;
  return true;
}

CVec PauliSum::apply(const CVec& in, Exec exec) const {
  CMat out;
  apply(CMat(in), out, exec);
  return out.col(0);
}

CMat PauliSum::dense() const {
  if (n_ > kDenseMaxQubits) throw std::invalid_argument("PauliSum::dense: too many qubits for a dense matrix");
  const auto d = static_cast<Eigen::Index>(dim());
  CMat m = CMat::Zero(d, d);
  for (Eigen::Index c = 0; c < d; ++c)
    for (const auto& g : groups_) {
      const uint64_t src = static_cast<uint64_t>(c) ^ g.x;
      cplx f = 0.0;
      for (const auto& t : g.terms) f += (std::popcount(src & t.z) & 1) ? -t.factor : t.factor;
      m(c, static_cast<Eigen::Index>(src)) += f;
    }
  return m;
}

void apply_pauli(const PauliString& p, CMat& m) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << p.qubits());
  if (m.rows() != d) throw std::invalid_argument("apply_pauli: dimension mismatch");
  const uint64_t x = low_word(p.x);
  CMat out(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < d; ++c) {
    const uint64_t src = static_cast<uint64_t>(c) ^ x;
    out.row(c) = pauli_phase(p, src) * m.row(static_cast<Eigen::Index>(src));
  }
  m.swap(out);
}

void apply_pauli_projector(const PauliString& p, int sign, CMat& m) {
  CMat pm = m;
  apply_pauli(p, pm);
  m = 0.5 * (m + static_cast<double>(sign) * pm);
}

PauliString restrict_pauli(const PauliString& p, const VertexSet& qubits) {
  PauliString out(qubits.size());
  out.sign = p.sign;
  std::size_t seen = 0;
  for (std::size_t j = 0; j < qubits.size(); ++j) {
    const auto q = static_cast<std::size_t>(qubits[j]);
    if (p.x.get(q)) out.x.set(j);
    if (p.z.get(q)) out.z.set(j);
    if (p.acts_on(q)) ++seen;
  }
  if (seen != p.weight()) throw std::invalid_argument("restrict_pauli: support leaves the qubit set");
  return out;
}

CMat embed(const CMat& local, const VertexSet& qubits, int n) {
  const Split s = split_qubits(qubits, n);
  const auto k = static_cast<Eigen::Index>(s.scatter.size());
  if (local.rows() != k || local.cols() != k) throw std::invalid_argument("embed: local operator has the wrong size");
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
  CMat m = CMat::Zero(d, d);
  for (uint64_t e : s.rest)
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index i = 0; i < k; ++i)
        m(static_cast<Eigen::Index>(s.scatter[i] | e), static_cast<Eigen::Index>(s.scatter[j] | e)) = local(i, j);
  return m;
}

CMat partial_average(const CMat& o, int n, const VertexSet& keep) {
  const Split s = split_qubits(keep, n);
  const auto k = static_cast<Eigen::Index>(s.scatter.size());
  CMat r = CMat::Zero(k, k);
  for (uint64_t e : s.rest)
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index i = 0; i < k; ++i)
        r(i, j) += o(static_cast<Eigen::Index>(s.scatter[i] | e), static_cast<Eigen::Index>(s.scatter[j] | e));
  return r / static_cast<double>(s.rest.size());
}

double hermiticity_error(const CMat& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

double spectral_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<CMat> es;
  if (hermiticity_error(m) <= 1e-13 * scale) {
    es.compute(hermitize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  if ((m + m.adjoint()).cwiseAbs().maxCoeff() <= 1e-13 * scale) {
    es.compute(hermitize(CMat(cplx(0, 1) * m)), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  es.compute(hermitize(CMat(m.adjoint() * m)), Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

EigenResult dense_eigen(const CMat& h, bool with_vectors) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(h), with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense_eigen: solver failed");
  EigenResult r;
  r.values = es.eigenvalues();
  if (with_vectors) r.vectors = es.eigenvectors();
  return r;
}

EigenResult lowest_eigenpairs(const PauliSum& h, const LowestOptions& opt, Exec exec) {
  if (h.qubits() > opt.dense_max_qubits) return lobpcg(h, opt, exec);
  EigenResult all = dense_eigen(h.dense());
  const auto c = static_cast<Eigen::Index>(std::min<std::size_t>(opt.count, h.dim()));
  return {all.values.head(c), all.vectors.leftCols(c)};
}

namespace {

template <class Mat>
EigenResult lobpcg_impl(const PauliSum& h, const LowestOptions& opt, Exec exec) {
  const std::size_t d = h.dim();
  const std::size_t nev = opt.count;
  const std::size_t b = std::min(d, std::max(opt.block == 0 ? nev + 4 : opt.block, nev));
  if (nev == 0 || nev > d) throw std::invalid_argument("lobpcg: bad eigenpair count");
  if (3 * b >= d) {
    EigenResult all = dense_eigen(h.dense());
    const auto c = static_cast<Eigen::Index>(nev);
    return {all.values.head(c), all.vectors.leftCols(c)};
  }

  Mat x = orthonormalize<Mat>(random_block<Mat>(d, b, opt.seed), Mat(d, 0));
  Mat hx;
  h.apply(x, hx, exec);
  auto rayleigh_ritz = [&](const Mat& s, const Mat& hs) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(Mat(s.adjoint() * hs)));
    return es;
  };
  Eigen::VectorXd lambda;
  {
    auto es = rayleigh_ritz(x, hx);
    x = x * es.eigenvectors();
    hx = hx * es.eigenvectors();
    lambda = es.eigenvalues();
  }
  Mat p(d, 0);
  const auto bi = static_cast<Eigen::Index>(b);
  for (int it = 0; it < opt.max_iter; ++it) {
    Mat r = hx - x * lambda.asDiagonal();
    bool done = true;
    for (std::size_t j = 0; j < nev; ++j)
      if (r.col(static_cast<Eigen::Index>(j)).norm() > opt.tol * std::max(1.0, std::fabs(lambda(static_cast<Eigen::Index>(j))))) done = false;
    if (done) {
      const auto c = static_cast<Eigen::Index>(nev);
      return {lambda.head(c), x.leftCols(c).template cast<cplx>()};
    }
    Mat extra(d, r.cols() + p.cols());
    extra << r, p;
    const Mat q = orthonormalize<Mat>(extra, x);
    Mat hq;
    h.apply(q, hq, exec);
    Mat s(d, bi + q.cols()), hs(d, bi + q.cols());
    s << x, q;
    hs << hx, hq;
    auto es = rayleigh_ritz(s, hs);
    const Mat c = es.eigenvectors().leftCols(bi);
    lambda = es.eigenvalues().head(bi);
    x = s * c;
    hx = hs * c;
    p = q * c.bottomRows(q.cols());
  }
  throw std::runtime_error("lobpcg: no convergence within max_iter");
}

}  // namespace

EigenResult lobpcg(const PauliSum& h, const LowestOptions& opt, Exec exec) {
  // Real symmetric operators (no Y content) run in real arithmetic.
  return h.is_real() ? lobpcg_impl<RMat>(h, opt, exec) : lobpcg_impl<CMat>(h, opt, exec);
}

KrylovSpectrum krylov_distinct_spectrum(const PauliSum& h, uint64_t seed, int max_dim, Exec exec) {
  const std::size_t d = h.dim();
  CVec v = random_block(d, 1, seed).col(0);
  v.normalize();
  const double scale = std::max(1.0, h.norm_bound());
  std::vector<CVec> qs{v};
  std::vector<double> alpha, beta;
  KrylovSpectrum out;
  for (int j = 0; j < max_dim; ++j) {
    CVec w = h.apply(qs.back(), exec);
    alpha.push_back(qs.back().dot(w).real());
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : qs) w -= q * q.dot(w);
    const double bnorm = w.norm();
    if (bnorm <= 1e-9 * scale || qs.size() == d) {
      out.invariant = true;
      break;
    }
    beta.push_back(bnorm);
    qs.push_back(w / bnorm);
  }
  const auto m = static_cast<Eigen::Index>(alpha.size());
  Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
  Eigen::VectorXd off = Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.values.push_back(es.eigenvalues()(i));
    out.weights.push_back(es.eigenvectors()(0, i) * es.eigenvectors()(0, i));
  }
  return out;
}

}  // namespace gapcert
