#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nhgeo/linalg.hpp"

namespace nhgeo {

/// A family H(k) of Bloch matrices together with its analytic momentum derivative.
struct BlochModel {
  std::size_t dim = 0;
  std::function<ComplexMatrix(double)> hamiltonian;
  std::function<ComplexMatrix(double)> velocity;
  std::string name;
};

/// Two-band chain with balanced gain and loss of strength m on L sites.
struct PTChainModel {
  double m = 0.0;
  std::size_t sites = 256;

  void validate() const;  // throws std::invalid_argument
  bool pt_unbroken() const { return std::abs(m) <= 1.0; }
  BlochModel bloch() const;
};

ComplexMatrix hamiltonian_at(const PTChainModel& model, double k);
ComplexMatrix velocity_at(const PTChainModel& model, double k);
/// +/- sqrt(1 - m^2 cos^2 k); band_sign selects the branch.
cplx dispersion(const PTChainModel& model, double k, int band_sign);

struct ScanOptions {
  EigOptions eig;
  /// A spectrum counts as real when max |Im E| stays below this (times the energy scale).
  double real_tolerance = 1e-8;
  /// Bracketed eigenvalue gap (times the energy scale) below which an exceptional point is reported.
  double ep_gap_tolerance = 1e-6;
};

/// Eigensystems on the periodic grid k_j = 2 pi j / L with bands ordered by continuity.
///
/// `systems[j]` has its columns permuted so that column n is tracked band n;
/// `band_map[j][n]` is the index of that band in the sorted output of eig_general.
struct BandScan {
  BlochModel model;
  std::vector<double> k;
  std::vector<EigenSystem> systems;
  std::vector<std::vector<std::size_t>> band_map;
  bool closure_ok = true;

  std::size_t sites() const { return k.size(); }
  std::size_t bands() const { return model.dim; }
  double dk() const;
  std::size_t wrap(long j) const;

  cplx energy(std::size_t j, std::size_t band) const { return systems[j].energies[band]; }
  CVector right(std::size_t j, std::size_t band) const { return systems[j].right_vector(band); }
  CVector left(std::size_t j, std::size_t band) const { return systems[j].left_vector(band); }
};

BandScan scan_bands(const BlochModel& model, std::size_t sites, const ScanOptions& options = {});
BandScan scan_bands(const PTChainModel& model, const ScanOptions& options = {});

/// Re-phases every eigenvector pair by a random unit factor (R -> cR, L -> cL, |c| = 1).
void apply_gauge_twist(BandScan& scan, std::uint64_t seed);

/// Columns of `es` reordered to follow the bands of `reference` by maximal overlap.
EigenSystem follow_bands(const EigenSystem& reference, const EigenSystem& es);

/// Biorthogonal column with the largest |<L_ref|R_n>|, used to follow a band off the grid.
std::size_t match_band(const EigenSystem& es, std::span<const cplx> left_ref);

}  // namespace nhgeo
