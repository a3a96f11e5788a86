#ifndef LAXLAB_LINALG_HPP
#define LAXLAB_LINALG_HPP

// Dense complex linear algebra for small square matrices (n up to ~16):
// products, traces, characteristic polynomials, eigenvalues and the
// matrix exponential. Everything here is a pure function of its inputs.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "laxlab/error.hpp"

namespace laxlab {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

/// Square complex matrix, row-major.
class CMatrix {
 public:
  CMatrix() = default;
  explicit CMatrix(std::size_t n) : n_(n), a_(n * n, cplx{}) {}

  CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) : CMatrix(rows.size()) {
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != n_) throw LaxError("CMatrix: ragged initializer");
      std::size_t j = 0;
      for (const auto& v : row) (*this)(i, j++) = v;
      ++i;
    }
  }

  static CMatrix identity(std::size_t n) {
    CMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static CMatrix diagonal(std::span<const cplx> d) {
    CMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t size() const noexcept { return n_; }

  cplx& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * n_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * n_ + j]; }

  std::span<cplx> entries() noexcept { return a_; }
  std::span<const cplx> entries() const noexcept { return a_; }

  std::vector<cplx> diag() const {
    std::vector<cplx> d(n_);
    for (std::size_t i = 0; i < n_; ++i) d[i] = (*this)(i, i);
    return d;
  }

  bool is_finite() const noexcept {
    return std::all_of(a_.begin(), a_.end(), [](const cplx& v) {
      return std::isfinite(v.real()) && std::isfinite(v.imag());
    });
  }

  CMatrix& operator+=(const CMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  CMatrix& operator-=(const CMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }
  CMatrix& operator*=(cplx s) noexcept {
    for (auto& v : a_) v *= s;
    return *this;
  }

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
  friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
  friend CMatrix operator-(CMatrix a) { return a *= -1.0; }

  friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    a.check_same(b);
    const std::size_t n = a.n_;
    CMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend std::vector<cplx> operator*(const CMatrix& a, std::span<const cplx> x) {
    if (x.size() != a.n_) throw LaxError("CMatrix: vector size mismatch");
    std::vector<cplx> y(a.n_);
    for (std::size_t i = 0; i < a.n_; ++i)
      for (std::size_t j = 0; j < a.n_; ++j) y[i] += a(i, j) * x[j];
    return y;
  }

 private:
  void check_same(const CMatrix& o) const {
    if (o.n_ != n_) throw LaxError("CMatrix: dimension mismatch");
  }

  std::size_t n_ = 0;
  std::vector<cplx> a_;
};

/// Max-abs-entry norm; every tolerance in the library is stated in it.
inline double max_abs(const CMatrix& m) {
  double r = 0.0;
  for (const auto& v : m.entries()) r = std::max(r, std::abs(v));
  return r;
}

inline double max_abs(std::span<const cplx> v) {
  double r = 0.0;
  for (const auto& x : v) r = std::max(r, std::abs(x));
  return r;
}

/// Maximum column sum.
inline double one_norm(const CMatrix& m) {
  double r = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) s += std::abs(m(i, j));
    r = std::max(r, s);
  }
  return r;
}

inline cplx trace(const CMatrix& m) {
  cplx t{};
  for (std::size_t i = 0; i < m.size(); ++i) t += m(i, i);
  return t;
}

/// tr(A B) without forming the product.
inline cplx trace_product(const CMatrix& a, const CMatrix& b) {
  cplx t{};
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < a.size(); ++k) t += a(i, k) * b(k, i);
  return t;
}

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }
inline CMatrix anticommutator(const CMatrix& a, const CMatrix& b) { return a * b + b * a; }

inline CMatrix matrix_power(const CMatrix& m, unsigned k) {
  CMatrix r = CMatrix::identity(m.size());
  for (unsigned i = 0; i < k; ++i) r = r * m;
  return r;
}

/// tr(L^k); tr(L^0) is n exactly.
inline cplx mat_trace_power(const CMatrix& l, unsigned k) {
  if (k == 0) return static_cast<double>(l.size());
  return trace(matrix_power(l, k));
}

/// Powers I, L, ..., L^kmax.
inline std::vector<CMatrix> matrix_powers(const CMatrix& l, unsigned kmax) {
  std::vector<CMatrix> p;
  p.reserve(kmax + 1);
  p.push_back(CMatrix::identity(l.size()));
  for (unsigned k = 1; k <= kmax; ++k) p.push_back(p.back() * l);
  return p;
}

/// Solves A X = B by LU with partial pivoting.
inline CMatrix solve(CMatrix a, CMatrix b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw LaxError("solve: dimension mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
    if (a(p, k) == cplx{}) throw LaxError("solve: singular matrix");
    if (p != k)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(k, j), a(p, j));
        std::swap(b(k, j), b(p, j));
      }
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx f = a(i, k) / a(k, k);
      if (f == cplx{}) continue;
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      for (std::size_t j = 0; j < n; ++j) b(i, j) -= f * b(k, j);
    }
  }
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t ii = n; ii-- > 0;) {
      cplx s = b(ii, c);
      for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * b(j, c);
      b(ii, c) = s / a(ii, ii);
    }
  return b;
}

inline CMatrix inverse(const CMatrix& a) { return solve(a, CMatrix::identity(a.size())); }

// ---------------------------------------------------------------------------
// Characteristic polynomial

/// Coefficients A_0..A_{n-1} with L^n = A_{n-1} L^{n-1} + ... + A_1 L + A_0 I.
///
/// Note the sign: with det(λI - L) = λ^n + c_{n-1} λ^{n-1} + ... + c_0 the
/// stored values are A_i = -c_i.
struct CharPolyCoeffs {
  std::vector<cplx> coeffs;

  std::size_t size() const noexcept { return coeffs.size(); }
  const cplx& operator[](std::size_t i) const { return coeffs[i]; }

  /// Closes a sequence s_0..s_{n-1} obeying the recurrence: returns Σ A_i s_i.
  cplx close(std::span<const cplx> s) const {
    cplx r{};
    for (std::size_t i = 0; i < coeffs.size(); ++i) r += coeffs[i] * s[i];
    return r;
  }
};

/// Faddeev–LeVerrier.
inline CharPolyCoeffs char_poly(const CMatrix& l) {
  const std::size_t n = l.size();
  if (n == 0) throw LaxError("char_poly: empty matrix");
  // det(λI - L) = Σ c_k λ^k, c_n = 1.
  std::vector<cplx> c(n + 1);
  c[n] = 1.0;
  CMatrix m(n);
  const CMatrix id = CMatrix::identity(n);
  for (std::size_t k = 1; k <= n; ++k) {
    m = l * m + c[n - k + 1] * id;
    c[n - k] = -trace_product(l, m) / static_cast<double>(k);
  }
  CharPolyCoeffs out;
  out.coeffs.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.coeffs[i] = -c[i];
  return out;
}

/// Newton's identities: power sums p_1..p_n (p_k = tr L^k) to coefficients.
inline CharPolyCoeffs coeffs_from_power_sums(std::span<const cplx> p) {
  const std::size_t n = p.size();
  if (n == 0) throw LaxError("coeffs_from_power_sums: empty input");
  // elementary symmetric e_0..e_n: k e_k = Σ_{i=1}^k (-1)^{i-1} e_{k-i} p_i
  std::vector<cplx> e(n + 1);
  e[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    cplx s{};
    for (std::size_t i = 1; i <= k; ++i) s += ((i % 2) ? 1.0 : -1.0) * e[k - i] * p[i - 1];
    e[k] = s / static_cast<double>(k);
  }
  // c_{n-k} = (-1)^k e_k and A = -c.
  CharPolyCoeffs out;
  out.coeffs.resize(n);
  for (std::size_t k = 1; k <= n; ++k) out.coeffs[n - k] = ((k % 2) ? 1.0 : -1.0) * e[k];
  return out;
}

/// Inverse of coeffs_from_power_sums: returns p_1..p_n.
inline std::vector<cplx> power_sums_from_coeffs(const CharPolyCoeffs& a) {
  const std::size_t n = a.size();
  std::vector<cplx> e(n + 1);
  e[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) e[k] = ((k % 2) ? 1.0 : -1.0) * a[n - k];
  std::vector<cplx> p(n);
  for (std::size_t k = 1; k <= n; ++k) {
    cplx s = ((k % 2) ? 1.0 : -1.0) * static_cast<double>(k) * e[k];
    for (std::size_t i = 1; i < k; ++i) s += ((i % 2) ? 1.0 : -1.0) * e[i] * p[k - i - 1];
    p[k - 1] = s;
  }
  return p;
}

/// ‖L^n − Σ A_i L^i‖_max.
inline double cayley_hamilton_residual(const CMatrix& l, const CharPolyCoeffs& a) {
  const auto pw = matrix_powers(l, static_cast<unsigned>(l.size()));
  CMatrix r = pw.back();
  for (std::size_t i = 0; i < a.size(); ++i) r -= a[i] * pw[i];
  return max_abs(r);
}

/// Admissible Cayley–Hamilton residual for a given matrix: 1e-10·max(1,‖L‖)^n.
inline double cayley_hamilton_bound(const CMatrix& l) {
  return 1e-10 * std::pow(std::max(1.0, max_abs(l)), static_cast<double>(l.size()));
}

// ---------------------------------------------------------------------------
// Eigenvalues

inline constexpr double kEigenTieTolerance = 1e-9;

/// Lexicographic (re, im) ordering; real parts within 1e-9 count as tied.
inline void canonical_sort(std::vector<cplx>& v) {
  std::sort(v.begin(), v.end(), [](const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  // Re-sort runs of tied real parts by imaginary part.
  std::size_t start = 0;
  while (start < v.size()) {
    std::size_t end = start + 1;
    while (end < v.size() && v[end].real() - v[end - 1].real() <= kEigenTieTolerance) ++end;
    std::sort(v.begin() + static_cast<std::ptrdiff_t>(start), v.begin() + static_cast<std::ptrdiff_t>(end),
              [](const cplx& a, const cplx& b) { return a.imag() < b.imag(); });
    start = end;
  }
}

namespace detail {

inline void to_hessenberg(CMatrix& h) {
  const std::size_t n = h.size();
  if (n < 3) return;
  std::vector<cplx> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) norm += std::norm(h(i, k));
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const cplx x0 = h(k + 1, k);
    const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx{1.0};
    const cplx alpha = -phase * norm;
    std::fill(v.begin(), v.end(), cplx{});
    for (std::size_t i = k + 1; i < n; ++i) v[i] = h(i, k);
    v[k + 1] -= alpha;
    double vn = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vn += std::norm(v[i]);
    if (vn == 0.0) continue;
    vn = std::sqrt(vn);
    for (std::size_t i = k + 1; i < n; ++i) v[i] /= vn;
    // H <- (I - 2 v v^H) H
    for (std::size_t j = 0; j < n; ++j) {
      cplx s{};
      for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, j);
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= 2.0 * v[i] * s;
    }
    // H <- H (I - 2 v v^H)
    for (std::size_t i = 0; i < n; ++i) {
      cplx s{};
      for (std::size_t j = k + 1; j < n; ++j) s += h(i, j) * v[j];
      for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= 2.0 * s * std::conj(v[j]);
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
}

struct Givens {
  double c;
  cplx s;
};

// [c s; -conj(s) c] [a; b] = [r; 0]
inline Givens make_givens(cplx a, cplx b) {
  const double aa = std::abs(a);
  const double bb = std::abs(b);
  if (bb == 0.0) return {1.0, 0.0};
  if (aa == 0.0) return {0.0, std::conj(b) / bb};
  const double norm = std::hypot(aa, bb);
  return {aa / norm, (a / aa) * std::conj(b) / norm};
}

inline cplx wilkinson_shift(cplx a, cplx b, cplx c, cplx d) {
  const cplx half = 0.5 * (a - d);
  const cplx disc = std::sqrt(half * half + b * c);
  const cplx mu1 = 0.5 * (a + d) + disc;
  const cplx mu2 = 0.5 * (a + d) - disc;
  return std::abs(mu1 - d) < std::abs(mu2 - d) ? mu1 : mu2;
}

}  // namespace detail

/// Eigenvalues with multiplicity, canonically ordered (see canonical_sort).
/// Hessenberg reduction followed by single-shift complex QR with deflation.
inline std::vector<cplx> eigenvalues(const CMatrix& m, int max_iter_per_eigenvalue = 60) {
  const std::size_t n = m.size();
  if (n == 0) return {};
  if (!m.is_finite()) throw LaxError("eigenvalues: non-finite input");
  CMatrix h = m;
  detail::to_hessenberg(h);
  const double eps = std::numeric_limits<double>::epsilon();
  const double hnorm = std::max(max_abs(h), std::numeric_limits<double>::min());

  std::vector<detail::Givens> rot(n);
  std::size_t iu = n - 1;
  int iter = 0;
  long total = 0;
  const long budget = static_cast<long>(max_iter_per_eigenvalue) * static_cast<long>(n);
  while (iu > 0) {
    std::size_t il = iu;
    while (il > 0) {
      const double sub = std::abs(h(il, il - 1));
      double scale = std::abs(h(il - 1, il - 1)) + std::abs(h(il, il));
      if (scale == 0.0) scale = hnorm;
      if (sub <= eps * scale) {
        h(il, il - 1) = 0.0;
        break;
      }
      --il;
    }
    if (il == iu) {
      --iu;
      iter = 0;
      continue;
    }
    ++iter;
    if (++total > budget) throw ConvergenceError("eigenvalues: QR iteration did not converge");

    cplx shift;
    if (iter % 11 == 10) {
      // exceptional shift
      shift = h(iu, iu) + 0.75 * std::abs(h(iu, iu - 1)) * cplx{1.0, 0.5};
    } else {
      shift = detail::wilkinson_shift(h(iu - 1, iu - 1), h(iu - 1, iu), h(iu, iu - 1), h(iu, iu));
    }

    for (std::size_t k = il; k <= iu; ++k) h(k, k) -= shift;
    for (std::size_t k = il; k < iu; ++k) {
      const auto g = detail::make_givens(h(k, k), h(k + 1, k));
      rot[k] = g;
      for (std::size_t j = k; j <= iu; ++j) {
        const cplx x = h(k, j);
        const cplx y = h(k + 1, j);
        h(k, j) = g.c * x + g.s * y;
        h(k + 1, j) = -std::conj(g.s) * x + g.c * y;
      }
    }
    for (std::size_t k = il; k < iu; ++k) {
      const auto g = rot[k];
      const std::size_t last = std::min(k + 1, iu);
      for (std::size_t i = il; i <= last; ++i) {
        const cplx x = h(i, k);
        const cplx y = h(i, k + 1);
        h(i, k) = x * g.c + y * std::conj(g.s);
        h(i, k + 1) = -x * g.s + y * g.c;
      }
    }
    for (std::size_t k = il; k <= iu; ++k) h(k, k) += shift;
  }

  std::vector<cplx> ev = h.diag();
  for (const auto& v : ev)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw ConvergenceError("eigenvalues: non-finite result");
  canonical_sort(ev);
  return ev;
}

// ---------------------------------------------------------------------------
// Matrix exponential: scaling and squaring with the degree-13 Padé approximant.

inline CMatrix mat_exp(const CMatrix& m) {
  const std::size_t n = m.size();
  if (!m.is_finite()) throw LaxError("mat_exp: non-finite input");
  static constexpr double b[14] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                   1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                   670442572800.0,      33522128640.0,       1323241920.0,
                                   40840800.0,          960960.0,            16380.0,
                                   182.0,               1.0};
  static constexpr double theta13 = 5.371920351148152;

  const double norm = one_norm(m);
  int s = 0;
  if (norm > theta13) s = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
  const CMatrix a = m * cplx{std::ldexp(1.0, -s)};
  const CMatrix id = CMatrix::identity(n);
  const CMatrix a2 = a * a;
  const CMatrix a4 = a2 * a2;
  const CMatrix a6 = a4 * a2;

  CMatrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  const CMatrix u = a * u_inner;
  const CMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

  CMatrix r = solve(v - u, v + u);
  for (int k = 0; k < s; ++k) r = r * r;
  if (!r.is_finite()) throw LaxError("mat_exp: overflow");
  return r;
}

}  // namespace laxlab

#endif  // LAXLAB_LINALG_HPP
