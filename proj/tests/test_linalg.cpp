#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nhgeo/errors.hpp"
#include "nhgeo/linalg.hpp"
#include "nhgeo/model.hpp"

using namespace nhgeo;

namespace {

ComplexMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = {g(rng), g(rng)};
  return m;
}

ComplexMatrix diag(const std::vector<cplx>& e) {
  ComplexMatrix d(e.size(), e.size());
  for (std::size_t i = 0; i < e.size(); ++i) d(i, i) = e[i];
  return d;
}

// exp(-i t H) from a truncated Taylor series.
ComplexMatrix taylor_exp(const ComplexMatrix& h, double t, int terms) {
  ComplexMatrix sum = ComplexMatrix::identity(h.rows());
  ComplexMatrix term = ComplexMatrix::identity(h.rows());
  for (int n = 1; n < terms; ++n) {
    term = cplx{0.0, -t / n} * (term * h);
    sum += term;
  }
  return sum;
}

}  // namespace

TEST_CASE("Pauli x has energies -1 and +1 with orthonormal vectors") {
  const ComplexMatrix h(2, 2, {0.0, 1.0, 1.0, 0.0});
  for (bool closed : {true, false}) {
    EigOptions o;
    o.closed_form_2x2 = closed;
    const EigenSystem es = eig_general(h, o);
    CHECK(es.energies[0].real() == doctest::Approx(-1.0));
    CHECK(es.energies[1].real() == doctest::Approx(1.0));
    CHECK((es.gramian - ComplexMatrix::identity(2)).frobenius_norm() < 1e-14);
    CHECK((es.left - es.right).frobenius_norm() < 1e-14);
  }
}

TEST_CASE("chain Hamiltonian at k = 0, m = 0.5 has energies +-sqrt(0.75)") {
  const EigenSystem es = eig_general(hamiltonian_at(PTChainModel{0.5, 64}, 0.0));
  CHECK(std::abs(es.energies[0] + std::sqrt(0.75)) < 1e-12);
  CHECK(std::abs(es.energies[1] - std::sqrt(0.75)) < 1e-12);
}

TEST_CASE("Jordan block is rejected as defective") {
  const ComplexMatrix j(2, 2, {0.0, 1.0, 0.0, 0.0});
  CHECK_THROWS_AS(eig_general(j), DefectiveMatrix);
  EigOptions o;
  o.closed_form_2x2 = false;
  CHECK_THROWS_AS(eig_general(j, o), DefectiveMatrix);
  const ComplexMatrix j3(3, 3, {2.0, 1.0, 0.0, 0.0, 2.0, 1.0, 0.0, 0.0, 2.0});
  CHECK_THROWS_AS(eig_general(j3), DefectiveMatrix);
}

TEST_CASE("condition threshold is configurable") {
  const ComplexMatrix h(2, 2, {0.0, 1.0, 1e-6, 0.0});
  CHECK_NOTHROW(eig_general(h));
  EigOptions o;
  o.defect_threshold = 100.0;
  CHECK_THROWS_AS(eig_general(h, o), DefectiveMatrix);
}

TEST_CASE("invalid input") {
  CHECK_THROWS_AS(eig_general(ComplexMatrix(2, 3)), std::invalid_argument);
  ComplexMatrix h = ComplexMatrix::identity(2);
  h(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eig_general(h), std::invalid_argument);
}

TEST_CASE("degenerate but diagonalizable spectra are allowed") {
  const ComplexMatrix h(3, 3, {1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0});
  const EigenSystem es = eig_general(h);
  CHECK(std::abs(es.energies[0] - 1.0) < 1e-14);
  CHECK(std::abs(es.energies[1] - 1.0) < 1e-14);
  CHECK(std::abs(es.energies[2] - 2.0) < 1e-14);
  CHECK((es.left.adjoint() * es.right - ComplexMatrix::identity(3)).frobenius_norm() < 1e-12);
}

TEST_CASE("ordering by real part, then imaginary part") {
  const ComplexMatrix h(3, 3, {cplx{1.0, 2.0}, 0.0, 0.0, 0.0, cplx{1.0, -1.0}, 0.0, 0.0, 0.0, cplx{-3.0, 0.0}});
  const EigenSystem es = eig_general(h);
  CHECK(std::abs(es.energies[0] - cplx{-3.0, 0.0}) < 1e-14);
  CHECK(std::abs(es.energies[1] - cplx{1.0, -1.0}) < 1e-14);
  CHECK(std::abs(es.energies[2] - cplx{1.0, 2.0}) < 1e-14);
}

TEST_CASE("random non-Hermitian matrices: invariants of the eigensystem") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 9;
    const ComplexMatrix h = random_matrix(n, rng);
    const EigenSystem es = eig_general(h);
    const double hn = h.frobenius_norm();
    CHECK((es.left.adjoint() * es.right - ComplexMatrix::identity(n)).frobenius_norm() < 1e-12);
    CHECK((h - es.right * diag(es.energies) * es.left.adjoint()).frobenius_norm() <= 1e-10 * hn);
    for (std::size_t c = 0; c < n; ++c) {
      const CVector r = es.right_vector(c);
      const CVector l = es.left_vector(c);
      CVector hr = h * std::span<const cplx>(r);
      CVector hl = h.adjoint() * std::span<const cplx>(l);
      for (std::size_t a = 0; a < n; ++a) {
        hr[a] -= es.energies[c] * r[a];
        hl[a] -= std::conj(es.energies[c]) * l[a];
      }
      CHECK(norm(hr) <= 1e-10 * hn);
      CHECK(norm(hl) <= 1e-10 * hn);
      CHECK(es.gramian(c, c).real() >= 1.0 - 1e-12);
      CHECK(std::abs(norm(r) - norm(l)) < 1e-10 * norm(r));
    }
    // Gramian is Hermitian.
    CHECK((es.gramian - es.gramian.adjoint()).frobenius_norm() < 1e-12 * es.gramian.frobenius_norm());
    for (std::size_t c = 0; c + 1 < n; ++c) CHECK(es.energies[c].real() <= es.energies[c + 1].real() + 1e-10);
    // Spectrum of the adjoint is the conjugate set.
    const EigenSystem ea = eig_general(h.adjoint());
    for (const cplx& e : es.energies) {
      double best = 1e300;
      for (const cplx& f : ea.energies) best = std::min(best, std::abs(std::conj(e) - f));
      CHECK(best < 1e-10 * hn);
    }
  }
}

TEST_CASE("QR path agrees with the 2x2 closed form") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const ComplexMatrix h = random_matrix(2, rng);
    EigOptions qr;
    qr.closed_form_2x2 = false;
    const EigenSystem a = eig_general(h);
    const EigenSystem b = eig_general(h, qr);
    for (std::size_t n = 0; n < 2; ++n) {
      CHECK(std::abs(a.energies[n] - b.energies[n]) < 1e-12);
      // Same phase convention, so the vectors agree outright.
      CHECK(norm(CVector{a.right(0, n) - b.right(0, n), a.right(1, n) - b.right(1, n)}) < 1e-10);
    }
  }
}

TEST_CASE("inverse") {
  std::mt19937_64 rng(5);
  const ComplexMatrix a = random_matrix(5, rng);
  CHECK((a * inverse(a) - ComplexMatrix::identity(5)).frobenius_norm() < 1e-12);
  CHECK_THROWS_AS(inverse(ComplexMatrix(3, 3)), DefectiveMatrix);
}

TEST_CASE("evolution operator") {
  const EigenSystem es = eig_general(hamiltonian_at(PTChainModel{0.9, 64}, std::numbers::pi / 2));
  CHECK((evolution_operator(es, 0.0) - ComplexMatrix::identity(2)).frobenius_norm() < 1e-14);
  const ComplexMatrix h = hamiltonian_at(PTChainModel{0.9, 64}, std::numbers::pi / 2);
  CHECK((evolution_operator(es, 1.0) - taylor_exp(h, 1.0, 20)).frobenius_norm() < 1e-8);

  std::mt19937_64 rng(11);
  const ComplexMatrix g = random_matrix(4, rng);
  const EigenSystem eg = eig_general(g);
  CHECK((evolution_operator(eg, 0.3) * evolution_operator(eg, 0.4) - evolution_operator(eg, 0.7)).frobenius_norm() <
        1e-10);
  CHECK((evolution_operator(eg, 0.5) - taylor_exp(g, 0.5, 40)).frobenius_norm() < 1e-9);

  const ComplexMatrix herm = g + g.adjoint();
  const EigenSystem eh = eig_general(herm);
  const ComplexMatrix u = evolution_operator(eh, 2.3);
  CHECK((u.adjoint() * u - ComplexMatrix::identity(4)).frobenius_norm() < 1e-10);
}

TEST_CASE("adjoint evolution") {
  std::mt19937_64 rng(9);
  const ComplexMatrix h = random_matrix(3, rng);
  const EigenSystem es = eig_general(h);
  const CVector v{cplx{0.3, -1.0}, cplx{2.0, 0.5}, cplx{-0.7, 0.1}};
  const CVector same = apply_adjoint_evolution(es, 0.0, v);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(same[i] - v[i]) < 1e-12);

  const CVector w = apply_adjoint_evolution(es, 0.7, v);
  const CVector dense = evolution_operator(es, 0.7).adjoint() * std::span<const cplx>(v);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(w[i] - dense[i]) < 1e-12 * norm(dense));

  const CVector fwd = apply_evolution(es, 0.7, v);
  const CVector fdense = evolution_operator(es, 0.7) * std::span<const cplx>(v);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(fwd[i] - fdense[i]) < 1e-12 * norm(fdense));

  const EigenSystem eh = eig_general(h + h.adjoint());
  const CVector a = apply_adjoint_evolution(eh, 1.1, v);
  const CVector b = apply_evolution(eh, -1.1, v);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-10);

  CHECK_THROWS_AS(apply_adjoint_evolution(es, 0.1, CVector(2)), std::invalid_argument);
}

TEST_CASE("chain spectrum is real for |m| <= 1") {
  for (double m : {0.0, 0.3, 0.7, 0.99}) {
    for (int i = 0; i < 64; ++i) {
      const EigenSystem es = eig_general(hamiltonian_at(PTChainModel{m, 64}, 2.0 * std::numbers::pi * i / 64 + 0.01));
      for (const cplx& e : es.energies) CHECK(std::abs(e.imag()) < 1e-10);
    }
  }
}
