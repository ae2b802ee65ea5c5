#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <utility>
#include <vector>

#include "loewner/errors.hpp"
#include "loewner/interval.hpp"
#include "loewner/scalar_function.hpp"

namespace loewner {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Relative asymmetry accepted (and symmetrized away) by HermitianMatrix.
inline constexpr double kHermitianSlack = 1e-10;
/// Off-diagonal Frobenius norm target of the Jacobi sweeps, relative to |A|_F.
inline constexpr double kEigTol = 1e-12;
inline constexpr int kMaxSweeps = 100;
inline constexpr double kClusterTol = 1e-8;
inline constexpr double kPsdTol = 1e-9;

/**
 * @brief Dense complex matrix with exact conjugate symmetry.
 *
 * Construction accepts M with |M - M*|_F <= 1e-10 |M|_F and stores (M + M*)/2
 * with real diagonal; non-finite entries and larger asymmetry are rejected.
 */
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  explicit HermitianMatrix(const CMatrix& m) : m_(m.rows(), m.cols()) {
    if (m.rows() != m.cols() || m.rows() == 0)
      throw InvalidArgument("Hermitian matrix must be square and non-empty");
    if (!m.allFinite()) throw InvalidArgument("matrix has non-finite entries");
    double asym = (m - m.adjoint()).norm();
    if (asym > kHermitianSlack * m.norm()) {
      std::ostringstream os;
      os << "matrix is not Hermitian: |M - M*|_F = " << asym;
      throw InvalidArgument(os.str());
    }
    m_ = 0.5 * (m + m.adjoint());
    for (Eigen::Index i = 0; i < m_.rows(); ++i) m_(i, i) = m_(i, i).real();
  }

  explicit HermitianMatrix(const Eigen::MatrixXd& m)
      : HermitianMatrix(CMatrix(m.cast<Complex>())) {}

  static HermitianMatrix identity(Eigen::Index n) {
    return HermitianMatrix(CMatrix(CMatrix::Identity(n, n)));
  }
  static HermitianMatrix diagonal(const std::vector<double>& d) {
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(d.size()),
                              static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return HermitianMatrix(m);
  }

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double frobenius_norm() const { return m_.norm(); }

  friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
    check_same(a, b);
    return HermitianMatrix(CMatrix(a.m_ + b.m_));
  }
  friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
    check_same(a, b);
    return HermitianMatrix(CMatrix(a.m_ - b.m_));
  }
  friend HermitianMatrix operator*(double s, const HermitianMatrix& a) {
    return HermitianMatrix(CMatrix(s * a.m_));
  }

  /// X* A X, Hermitian by construction.
  HermitianMatrix congruence(const CMatrix& x) const {
    if (x.rows() != dim()) throw DimensionMismatch("congruence: row count differs from dimension");
    return HermitianMatrix(CMatrix(x.adjoint() * m_ * x));
  }

 private:
  static void check_same(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("Hermitian matrices of different dimension");
  }

  CMatrix m_;
};

struct Eigensystem {
  RVector values;   ///< ascending
  CMatrix vectors;  ///< unitary, column k pairs with values[k]
};

namespace detail {

template <class Derived>
double off_diagonal_norm(const Eigen::MatrixBase<Derived>& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

inline double conj(double x) { return x; }
inline Complex conj(Complex x) { return std::conj(x); }

// One Jacobi rotation zeroing a(p,q). The phase of a(p,q) is factored out so
// the remaining 2x2 problem is real symmetric.
template <class S>
void rotate(Eigen::Matrix<S, -1, -1>& a, Eigen::Matrix<S, -1, -1>& v, Eigen::Index p,
            Eigen::Index q) {
  const S apq = a(p, q);
  const double r = std::abs(apq);
  if (r == 0.0) return;
  const S phase = apq / r;  // e^{i theta}
  const double app = std::real(a(p, p));
  const double aqq = std::real(a(q, q));
  const double theta = (aqq - app) / (2.0 * r);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const S gqp = -s * conj(phase);  // G(q,p)
  const S gqq = c * conj(phase);   // G(q,q)

  // A <- A G (columns p, q)
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    const S akp = a(k, p), akq = a(k, q);
    a(k, p) = c * akp + gqp * akq;
    a(k, q) = s * akp + gqq * akq;
  }
  // A <- G* A (rows p, q)
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    const S apk = a(p, k), aqk = a(q, k);
    a(p, k) = c * apk + conj(gqp) * aqk;
    a(q, k) = s * apk + conj(gqq) * aqk;
  }
  a(p, q) = S(0);
  a(q, p) = S(0);
  a(p, p) = std::real(a(p, p));
  a(q, q) = std::real(a(q, q));
  for (Eigen::Index k = 0; k < v.rows(); ++k) {
    const S vkp = v(k, p), vkq = v(k, q);
    v(k, p) = c * vkp + gqp * vkq;
    v(k, q) = s * vkp + gqq * vkq;
  }
}

/**
 * Cyclic Jacobi on a self-adjoint matrix (real symmetric or complex
 * Hermitian). Sweeps until the off-diagonal Frobenius norm is at most
 * tol * |A|_F, then performs one more sweep to polish. Throws NonConvergence
 * after kMaxSweeps sweeps. Returns eigenvalues ascending.
 */
template <class S>
std::pair<RVector, Eigen::Matrix<S, -1, -1>> jacobi(Eigen::Matrix<S, -1, -1> a, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("eigh: tol must be positive");
  using Mat = Eigen::Matrix<S, -1, -1>;
  const Eigen::Index n = a.rows();
  Mat v = Mat::Identity(n, n);
  const double scale = a.norm();

  int sweeps = 0;
  bool polished = false;
  while (true) {
    double off = off_diagonal_norm(a);
    if (off <= tol * scale) {
      if (polished || off == 0.0) break;
      polished = true;
    }
    if (sweeps == kMaxSweeps) {
      std::ostringstream os;
      os << "Jacobi eigensolver did not converge in " << kMaxSweeps << " sweeps (off-diagonal "
         << off << ")";
      throw NonConvergence(os.str());
    }
    for (Eigen::Index p = 0; p + 1 < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) rotate(a, v, p, q);
    ++sweeps;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return std::real(a(i, i)) < std::real(a(j, j));
  });
  RVector values(n);
  Mat vectors(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    auto o = order[static_cast<std::size_t>(k)];
    values(k) = std::real(a(o, o));
    vectors.col(k) = v.col(o);
  }
  return {values, vectors};
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
inline Eigensystem eigh(const HermitianMatrix& a, double tol = kEigTol) {
  auto [values, vectors] = detail::jacobi<Complex>(a.matrix(), tol);
  return {std::move(values), std::move(vectors)};
}

/// Real symmetric variant used by the least-squares solvers.
inline std::pair<RVector, Eigen::MatrixXd> eigh_real(const Eigen::MatrixXd& a, double tol = kEigTol) {
  if (a.rows() != a.cols()) throw InvalidArgument("eigh_real: matrix must be square");
  if ((a - a.transpose()).norm() > kHermitianSlack * a.norm())
    throw InvalidArgument("eigh_real: matrix is not symmetric");
  return detail::jacobi<double>(0.5 * (a + a.transpose()), tol);
}

struct SpectralPair {
  double lambda;
  HermitianMatrix projector;
};

/// A = sum lambda_i P_i over distinct eigenvalues, strictly increasing.
struct SpectralResolution {
  std::vector<SpectralPair> pairs;

  HermitianMatrix reconstruct() const {
    CMatrix s = CMatrix::Zero(pairs.front().projector.dim(), pairs.front().projector.dim());
    for (const auto& [lambda, p] : pairs) s += lambda * p.matrix();
    return HermitianMatrix(s);
  }
};

namespace detail {

struct Cluster {
  double lambda;
  Eigen::Index begin;
  Eigen::Index end;
};

// Consecutive ascending eigenvalues whose gap is within
// cluster_tol * max(1, |lambda|) form one cluster represented by their mean.
inline std::vector<Cluster> cluster(const RVector& values, double cluster_tol) {
  std::vector<Cluster> out;
  Eigen::Index start = 0;
  for (Eigen::Index k = 1; k <= values.size(); ++k) {
    bool split = k == values.size() ||
                 values(k) - values(k - 1) > cluster_tol * std::max(1.0, std::abs(values(k)));
    if (split) {
      double mean = values.segment(start, k - start).mean();
      out.push_back({mean, start, k});
      start = k;
    }
  }
  return out;
}

}  // namespace detail

inline SpectralResolution spectral_resolution(const HermitianMatrix& a,
                                              double cluster_tol = kClusterTol) {
  Eigensystem es = eigh(a);
  SpectralResolution res;
  for (const auto& c : detail::cluster(es.values, cluster_tol)) {
    auto block = es.vectors.middleCols(c.begin, c.end - c.begin);
    res.pairs.push_back({c.lambda, HermitianMatrix(CMatrix(block * block.adjoint()))});
  }
  return res;
}

namespace detail {

// An eigenvalue within the eigensolver's accuracy of a closed endpoint is the
// endpoint: for f like t^(1/4) the difference between 0 and 1e-16 is 1e-4.
inline double snap_to_endpoint(double x, const Interval& domain, double accuracy) {
  if (domain.lo_closed() && std::abs(x - domain.lo()) <= accuracy) return domain.lo();
  if (domain.hi_closed() && std::abs(x - domain.hi()) <= accuracy) return domain.hi();
  return x;
}

}  // namespace detail

/**
 * @brief f(A) = sum f(lambda_i) P_i.
 *
 * Every eigenvalue must lie in `domain`; a closed endpoint may be overshot by
 * the endpoint margin, in which case f is evaluated at the endpoint.
 * Eigenvalues within kEigTol * max(1, |A|_F) of a closed endpoint are also
 * evaluated at the endpoint.
 */
template <class F>
HermitianMatrix apply_function(F&& f, const Interval& domain, const HermitianMatrix& a,
                               double cluster_tol = kClusterTol) {
  Eigensystem es = eigh(a);
  RVector fvals(es.values.size());
  const double accuracy = kEigTol * std::max(1.0, a.frobenius_norm());
  for (const auto& c : detail::cluster(es.values, cluster_tol)) {
    double x = domain.clamp_with_margin(detail::snap_to_endpoint(c.lambda, domain, accuracy));
    double y = f(x);
    if (!std::isfinite(y)) {
      std::ostringstream os;
      os.precision(17);
      os << "function is not finite at eigenvalue " << x;
      throw DomainViolation(os.str());
    }
    fvals.segment(c.begin, c.end - c.begin).setConstant(y);
  }
  return HermitianMatrix(CMatrix(es.vectors * fvals.asDiagonal() * es.vectors.adjoint()));
}

inline HermitianMatrix functional_calculus(const ScalarFunction& f, const HermitianMatrix& a) {
  try {
    return apply_function([&](double x) { return f(x); }, f.domain(), a);
  } catch (const DomainViolation& e) {
    throw DomainViolation(f.name() + ": " + e.what());
  }
}

/// A^r through the functional calculus; A must be positive definite for r < 0.
inline HermitianMatrix matrix_power(const HermitianMatrix& a, double r) {
  Interval dom = r > 0.0 ? Interval::nonnegative() : Interval::positive();
  if (r == 0.0) dom = Interval::real_line();
  return apply_function([r](double x) { return r == 0.0 ? 1.0 : std::pow(x, r); }, dom, a);
}

inline double lambda_min(const HermitianMatrix& m) { return eigh(m).values(0); }

inline double spectral_norm(const HermitianMatrix& m) {
  RVector v = eigh(m).values;
  return std::max(std::abs(v(0)), std::abs(v(v.size() - 1)));
}

/// true iff lambda_min(M) >= -tol_rel * max(1, |M|_2).
inline bool is_psd(const HermitianMatrix& m, double tol_rel = kPsdTol) {
  RVector v = eigh(m).values;
  double norm = std::max(std::abs(v(0)), std::abs(v(v.size() - 1)));
  return v(0) >= -tol_rel * std::max(1.0, norm);
}

/// A <= B in the Loewner order.
inline bool loewner_leq(const HermitianMatrix& a, const HermitianMatrix& b,
                        double tol_rel = kPsdTol) {
  if (a.dim() != b.dim()) throw DimensionMismatch("loewner_leq: dimensions differ");
  return is_psd(b - a, tol_rel);
}

/// |X|_2 = sqrt(lambda_max(X* X)).
inline double operator_norm(const CMatrix& x) {
  if (!x.allFinite()) throw InvalidArgument("operator_norm: non-finite entries");
  if (x.size() == 0) return 0.0;
  RVector v = eigh(HermitianMatrix(CMatrix(x.adjoint() * x))).values;
  return std::sqrt(std::max(0.0, v(v.size() - 1)));
}

}  // namespace loewner
