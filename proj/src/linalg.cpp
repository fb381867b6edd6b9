#include "nhgeo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "nhgeo/errors.hpp"

namespace nhgeo {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double abs1(cplx z) { return std::abs(z.real()) + std::abs(z.imag()); }

struct Givens {
  double c;
  cplx s;
};

// G = [[c, s], [-conj(s), c]] with G (a, b)^T = (r, 0)^T.
Givens make_givens(cplx a, cplx b) {
  const double aa = std::abs(a);
  const double r = std::hypot(aa, std::abs(b));
  if (r == 0.0) return {1.0, 0.0};
  if (aa == 0.0) return {0.0, 1.0};
  return {aa / r, (a / aa) * std::conj(b) / r};
}

void rotate_rows(ComplexMatrix& m, const Givens& g, std::size_t i, std::size_t col_begin) {
  for (std::size_t j = col_begin; j < m.cols(); ++j) {
    const cplx x = m(i, j);
    const cplx y = m(i + 1, j);
    m(i, j) = g.c * x + g.s * y;
    m(i + 1, j) = -std::conj(g.s) * x + g.c * y;
  }
}

// m <- m G^dagger on columns i, i+1 for rows [0, row_end).
void rotate_cols(ComplexMatrix& m, const Givens& g, std::size_t i, std::size_t row_end) {
  for (std::size_t r = 0; r < row_end; ++r) {
    const cplx x = m(r, i);
    const cplx y = m(r, i + 1);
    m(r, i) = x * g.c + y * std::conj(g.s);
    m(r, i + 1) = -x * g.s + y * g.c;
  }
}

// Householder reduction to upper Hessenberg form, h <- Q^dagger h Q.
void hessenberg(ComplexMatrix& h, ComplexMatrix& q) {
  const std::size_t n = h.rows();
  q = ComplexMatrix::identity(n);
  if (n < 3) return;
  CVector v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm += std::norm(h(i, k));
    xnorm = std::sqrt(xnorm);
    if (xnorm == 0.0) continue;
    const cplx x0 = h(k + 1, k);
    const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx{1.0, 0.0};
    const cplx alpha = -phase * xnorm;
    std::fill(v.begin(), v.end(), cplx{});
    v[k + 1] = x0 - alpha;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = h(i, k);
    double vnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm += std::norm(v[i]);
    vnorm = std::sqrt(vnorm);
    if (vnorm == 0.0) continue;
    for (std::size_t i = k + 1; i < n; ++i) v[i] /= vnorm;

    for (std::size_t j = 0; j < n; ++j) {
      cplx s{};
      for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, j);
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= 2.0 * v[i] * s;
    }
    for (ComplexMatrix* m : {&h, &q}) {
      for (std::size_t r = 0; r < n; ++r) {
        cplx s{};
        for (std::size_t i = k + 1; i < n; ++i) s += (*m)(r, i) * v[i];
        for (std::size_t i = k + 1; i < n; ++i) (*m)(r, i) -= 2.0 * s * std::conj(v[i]);
      }
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
}

cplx wilkinson_shift(cplx a, cplx b, cplx c, cplx d) {
  const cplx half = 0.5 * (a - d);
  const cplx disc = std::sqrt(half * half + b * c);
  const cplx mid = 0.5 * (a + d);
  const cplx l1 = mid + disc;
  const cplx l2 = mid - disc;
  return std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
}

// Complex Schur form t = z^dagger h z with z unitary, t upper triangular.
void complex_schur(ComplexMatrix& t, ComplexMatrix& z) {
  const std::size_t n = t.rows();
  hessenberg(t, z);
  if (n < 2) return;
  const double scale = std::max(t.frobenius_norm(), std::numeric_limits<double>::min());
  std::size_t hi = n - 1;
  int iter = 0;
  int total = 0;
  const int max_total = 60 * static_cast<int>(n);
  std::vector<Givens> rots(n);
  while (hi > 0) {
    std::size_t lo = hi;
    while (lo > 0) {
      const double off = abs1(t(lo, lo - 1));
      double diag = abs1(t(lo - 1, lo - 1)) + abs1(t(lo, lo));
      if (diag == 0.0) diag = scale;
      if (off <= kEps * diag) {
        t(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      --hi;
      iter = 0;
      continue;
    }
    ++iter;
    if (++total > max_total) throw NumericalError("QR iteration did not converge");

    cplx mu;
    if (iter % 10 == 0) {
      mu = std::abs(t(hi, hi - 1).real()) + (hi >= 2 ? std::abs(t(hi - 1, hi - 2).real()) : 0.0);
    } else {
      mu = wilkinson_shift(t(hi - 1, hi - 1), t(hi - 1, hi), t(hi, hi - 1), t(hi, hi));
    }

    for (std::size_t i = lo; i <= hi; ++i) t(i, i) -= mu;
    for (std::size_t i = lo; i < hi; ++i) {
      rots[i] = make_givens(t(i, i), t(i + 1, i));
      rotate_rows(t, rots[i], i, i);
      t(i + 1, i) = 0.0;
    }
    for (std::size_t i = lo; i < hi; ++i) {
      rotate_cols(t, rots[i], i, std::min(i + 2, hi + 1));
      rotate_cols(z, rots[i], i, n);
    }
    for (std::size_t i = lo; i <= hi; ++i) t(i, i) += mu;
  }
}

std::vector<std::size_t> spectral_order(const std::vector<cplx>& values, double tol) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const cplx ea = values[a];
    const cplx eb = values[b];
    if (std::abs(ea.real() - eb.real()) > tol) return ea.real() < eb.real();
    return ea.imag() < eb.imag();
  });
  return idx;
}

void closed_form_2x2(const ComplexMatrix& h, std::vector<cplx>& values, ComplexMatrix& vectors) {
  const cplx a = h(0, 0), b = h(0, 1), c = h(1, 0), d = h(1, 1);
  const cplx half = 0.5 * (a - d);
  const cplx disc = std::sqrt(half * half + b * c);
  const cplx mid = 0.5 * (a + d);
  values = {mid - disc, mid + disc};
  vectors = ComplexMatrix(2, 2);
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
  if (std::abs(b) <= kEps * scale && std::abs(c) <= kEps * scale && std::abs(disc) <= kEps * scale) {
    vectors = ComplexMatrix::identity(2);
    return;
  }
  for (std::size_t n = 0; n < 2; ++n) {
    const cplx lam = values[n];
    const cplx u0 = b, u1 = lam - a;
    const cplx w0 = lam - d, w1 = c;
    if (std::norm(u0) + std::norm(u1) >= std::norm(w0) + std::norm(w1)) {
      vectors(0, n) = u0;
      vectors(1, n) = u1;
    } else {
      vectors(0, n) = w0;
      vectors(1, n) = w1;
    }
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::initializer_list<cplx> values)
    : rows_(rows), cols_(cols), data_(values) {
  if (data_.size() != rows * cols) throw std::invalid_argument("ComplexMatrix: wrong number of entries");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CVector ComplexMatrix::column(std::size_t j) const {
  CVector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void ComplexMatrix::set_column(std::size_t j, std::span<const cplx> v) {
  if (v.size() != rows_) throw std::invalid_argument("set_column: dimension mismatch");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cplx& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (o.rows_ != rows_ || o.cols_ != cols_) throw std::invalid_argument("matrix sum: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  if (o.rows_ != rows_ || o.cols_ != cols_) throw std::invalid_argument("matrix difference: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (cplx& z : data_) z *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
  ComplexMatrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

CVector operator*(const ComplexMatrix& a, std::span<const cplx> v) {
  if (a.cols() != v.size()) throw std::invalid_argument("matrix-vector product: dimension mismatch");
  CVector r(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cplx s{};
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw std::invalid_argument("inner: dimension mismatch");
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& z : v) s += std::norm(z);
  return std::sqrt(s);
}

ComplexMatrix inverse(const ComplexMatrix& a) {
  if (!a.square()) throw std::invalid_argument("inverse: matrix not square");
  const std::size_t n = a.rows();
  ComplexMatrix lu = a;
  ComplexMatrix inv = ComplexMatrix::identity(n);
  const double scale = a.frobenius_norm();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(p, k))) p = i;
    if (std::abs(lu(p, k)) <= kEps * scale * 1e-3 || std::abs(lu(p, k)) == 0.0)
      throw DefectiveMatrix("inverse: singular matrix", std::numeric_limits<double>::infinity());
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(lu(k, j), lu(p, j));
        std::swap(inv(k, j), inv(p, j));
      }
    }
    const cplx pivot = lu(k, k);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const cplx factor = lu(i, k) / pivot;
      if (factor == cplx{}) continue;
      for (std::size_t j = k; j < n; ++j) lu(i, j) -= factor * lu(k, j);
      for (std::size_t j = 0; j < n; ++j) inv(i, j) -= factor * inv(k, j);
    }
    for (std::size_t j = k; j < n; ++j) lu(k, j) /= pivot;
    for (std::size_t j = 0; j < n; ++j) inv(k, j) /= pivot;
  }
  return inv;
}

void schur_eigen(const ComplexMatrix& h, std::vector<cplx>& values, ComplexMatrix& vectors) {
  const std::size_t n = h.rows();
  ComplexMatrix t = h;
  ComplexMatrix z;
  complex_schur(t, z);
  values.resize(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = t(i, i);

  // Back substitution on the triangular factor.
  const double smin = std::max(kEps * t.frobenius_norm(), std::numeric_limits<double>::min());
  ComplexMatrix x(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    x(k, k) = 1.0;
    for (std::size_t jj = k; jj-- > 0;) {
      cplx s{};
      for (std::size_t l = jj + 1; l <= k; ++l) s += t(jj, l) * x(l, k);
      cplx d = t(jj, jj) - t(k, k);
      if (std::abs(d) < smin) d = smin;
      x(jj, k) = -s / d;
    }
  }
  vectors = z * x;
}

EigenSystem eig_general(const ComplexMatrix& h, const EigOptions& options) {
  if (!h.square() || h.rows() == 0) throw std::invalid_argument("eig_general: matrix must be square and non-empty");
  if (!h.all_finite()) throw std::invalid_argument("eig_general: non-finite entries");
  const std::size_t n = h.rows();

  std::vector<cplx> values;
  ComplexMatrix vectors;
  if (n == 1) {
    values = {h(0, 0)};
    vectors = ComplexMatrix::identity(1);
  } else if (n == 2 && options.closed_form_2x2) {
    closed_form_2x2(h, values, vectors);
  } else {
    schur_eigen(h, values, vectors);
  }

  const double hnorm = h.frobenius_norm();
  const auto order = spectral_order(values, 1e-12 * std::max(1.0, hnorm));

  EigenSystem es;
  es.energies.resize(n);
  es.right = ComplexMatrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t src = order[c];
    es.energies[c] = values[src];
    CVector col = vectors.column(src);
    const double nr = norm(col);
    if (nr == 0.0 || !std::isfinite(nr)) throw DefectiveMatrix("eig_general: null eigenvector", std::numeric_limits<double>::infinity());
    for (cplx& z : col) z /= nr;
    es.right.set_column(c, col);
  }

  ComplexMatrix rinv;
  try {
    rinv = inverse(es.right);
  } catch (const DefectiveMatrix&) {
    throw DefectiveMatrix("eig_general: eigenvector matrix is singular (exceptional point)",
                          std::numeric_limits<double>::infinity());
  }
  es.condition = es.right.frobenius_norm() * rinv.frobenius_norm();
  if (!(es.condition <= options.defect_threshold)) {
    throw DefectiveMatrix("eig_general: eigenvector condition number " + std::to_string(es.condition) +
                              " exceeds threshold (near an exceptional point)",
                          es.condition);
  }
  es.left = rinv.adjoint();

  for (std::size_t c = 0; c < n; ++c) {
    CVector r = es.right.column(c);
    CVector l = es.left.column(c);
    const double s = std::sqrt(norm(l) / norm(r));
    double big = 0.0;
    for (const cplx& z : r) big = std::max(big, std::abs(z));
    std::size_t pick = 0;
    while (std::abs(r[pick]) < 0.5 * big) ++pick;
    const cplx phase = std::conj(r[pick]) / std::abs(r[pick]);
    for (cplx& z : r) z *= s * phase;
    for (cplx& z : l) z *= phase / s;
    es.right.set_column(c, r);
    es.left.set_column(c, l);
  }
  es.gramian = es.right.adjoint() * es.right;
  return es;
}

ComplexMatrix evolution_operator(const EigenSystem& es, double t) {
  const std::size_t n = es.dim();
  ComplexMatrix rd = es.right;
  for (std::size_t j = 0; j < n; ++j) {
    const cplx ph = std::exp(-kI * es.energies[j] * t);
    for (std::size_t i = 0; i < n; ++i) rd(i, j) *= ph;
  }
  return rd * es.left.adjoint();
}

CVector apply_evolution(const EigenSystem& es, double t, std::span<const cplx> v) {
  const std::size_t n = es.dim();
  if (v.size() != n) throw std::invalid_argument("apply_evolution: dimension mismatch");
  CVector a(n);
  for (std::size_t j = 0; j < n; ++j) {
    cplx s{};
    for (std::size_t i = 0; i < n; ++i) s += std::conj(es.left(i, j)) * v[i];
    a[j] = s * std::exp(-kI * es.energies[j] * t);
  }
  CVector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx s{};
    for (std::size_t j = 0; j < n; ++j) s += es.right(i, j) * a[j];
    out[i] = s;
  }
  return out;
}

CVector apply_adjoint_evolution(const EigenSystem& es, double t, std::span<const cplx> v) {
  const std::size_t n = es.dim();
  if (v.size() != n) throw std::invalid_argument("apply_adjoint_evolution: dimension mismatch");
  CVector b(n);
  for (std::size_t j = 0; j < n; ++j) {
    cplx s{};
    for (std::size_t i = 0; i < n; ++i) s += std::conj(es.right(i, j)) * v[i];
    b[j] = s * std::exp(kI * std::conj(es.energies[j]) * t);
  }
  CVector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx s{};
    for (std::size_t j = 0; j < n; ++j) s += es.left(i, j) * b[j];
    out[i] = s;
  }
  return out;
}

}  // namespace nhgeo
