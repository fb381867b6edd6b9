#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nhgeo {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

inline constexpr cplx kI{0.0, 1.0};

/// Dense row-major complex matrix for the small (dim <= ~64) Bloch blocks.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}
  ComplexMatrix(std::size_t rows, std::size_t cols, std::initializer_list<cplx> values);

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  CVector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const cplx> v);

  ComplexMatrix adjoint() const;
  double frobenius_norm() const;
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);
CVector operator*(const ComplexMatrix& a, std::span<const cplx> v);

/// <a|b>, conjugate-linear in the first argument.
cplx inner(std::span<const cplx> a, std::span<const cplx> b);
double norm(std::span<const cplx> v);

/// LU inverse with partial pivoting; throws DefectiveMatrix on a zero pivot.
ComplexMatrix inverse(const ComplexMatrix& a);

struct EigOptions {
  /// Right-eigenvector condition number above which the matrix counts as defective.
  double defect_threshold = 1e10;
  /// Use the closed form for 2x2 input instead of QR iteration.
  bool closed_form_2x2 = true;
};

/// Energies with biorthonormal right/left eigenvectors of one Bloch matrix.
///
/// Columns n of `right` and `left` satisfy H R_n = E_n R_n, H^dagger L_n = E_n^* L_n
/// and <L_n|R_m> = delta_nm. Vectors are scaled so that |R_n| = |L_n| (hence
/// I_nn >= 1) and the largest component of R_n is real positive. Energies are
/// sorted by real part, ties by imaginary part.
struct EigenSystem {
  std::vector<cplx> energies;
  ComplexMatrix right;
  ComplexMatrix left;
  ComplexMatrix gramian;  ///< I_{nn'} = <R_n|R_n'>
  double condition = 1.0;

  std::size_t dim() const { return energies.size(); }
  CVector right_vector(std::size_t n) const { return right.column(n); }
  CVector left_vector(std::size_t n) const { return left.column(n); }
};

EigenSystem eig_general(const ComplexMatrix& h, const EigOptions& options = {});

/// Eigenvalues and unnormalized right eigenvectors through Hessenberg + shifted QR.
/// Exposed for cross-checking against the 2x2 closed form.
void schur_eigen(const ComplexMatrix& h, std::vector<cplx>& values, ComplexMatrix& vectors);

/// U(t) = R diag(exp(-i E t)) L^dagger.
ComplexMatrix evolution_operator(const EigenSystem& es, double t);
/// U(t) v evaluated in the eigenbasis.
CVector apply_evolution(const EigenSystem& es, double t, std::span<const cplx> v);
/// U(t)^dagger v = L diag(exp(+i E^* t)) R^dagger v.
CVector apply_adjoint_evolution(const EigenSystem& es, double t, std::span<const cplx> v);

}  // namespace nhgeo
