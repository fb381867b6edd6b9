#include "nhgeo/model.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "nhgeo/errors.hpp"

namespace nhgeo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double energy_scale(const EigenSystem& es) {
  double s = 1.0;
  for (const cplx& e : es.energies) s = std::max(s, std::abs(e));
  return s;
}

bool spectrum_real(const EigenSystem& es, double tol) {
  const double scale = energy_scale(es);
  return std::all_of(es.energies.begin(), es.energies.end(),
                     [&](cplx e) { return std::abs(e.imag()) <= tol * scale; });
}

double min_gap(const std::vector<cplx>& e) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < e.size(); ++a)
    for (std::size_t b = a + 1; b < e.size(); ++b) g = std::min(g, std::abs(e[a] - e[b]));
  return g;
}

// Greedy assignment by largest normalized left-right overlap.
std::vector<std::size_t> assign(const EigenSystem& prev, const EigenSystem& cur) {
  const std::size_t n = prev.dim();
  std::vector<double> ov(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    const CVector l = prev.left_vector(a);
    for (std::size_t b = 0; b < n; ++b) {
      const CVector r = cur.right_vector(b);
      ov[a * n + b] = std::abs(inner(l, r)) / (norm(l) * norm(r));
    }
  }
  std::vector<std::size_t> map(n, n);
  std::vector<bool> used(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    double best = -1.0;
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < n; ++a) {
      if (map[a] != n) continue;
      for (std::size_t b = 0; b < n; ++b) {
        if (used[b]) continue;
        if (ov[a * n + b] > best) {
          best = ov[a * n + b];
          ba = a;
          bb = b;
        }
      }
    }
    map[ba] = bb;
    used[bb] = true;
  }
  return map;
}

EigenSystem permuted(const EigenSystem& es, const std::vector<std::size_t>& order) {
  EigenSystem out = es;
  for (std::size_t n = 0; n < order.size(); ++n) {
    out.energies[n] = es.energies[order[n]];
    out.right.set_column(n, es.right.column(order[n]));
    out.left.set_column(n, es.left.column(order[n]));
  }
  out.gramian = out.right.adjoint() * out.right;
  return out;
}

// Golden-section search for the smallest eigenvalue gap on [a, b].
void locate_exceptional_point(const BlochModel& model, double a, double b, const ScanOptions& options,
                              double scale) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  auto gap = [&](double k) {
    try {
      return min_gap(eig_general(model.hamiltonian(k), options.eig).energies);
    } catch (const DefectiveMatrix&) {
      return 0.0;
    }
  };
  double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
  double f1 = gap(x1), f2 = gap(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-15; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = gap(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = gap(x2);
    }
  }
  const double kep = f1 < f2 ? x1 : x2;
  const double g = std::min(f1, f2);
  if (g < options.ep_gap_tolerance * scale) {
    throw DefectiveMatrix("exceptional point between grid momenta at k = " + std::to_string(kep) +
                              " (eigenvalue gap " + std::to_string(g) + ")",
                          std::numeric_limits<double>::infinity(), kep, true);
  }
}

}  // namespace

void PTChainModel::validate() const {
  if (!std::isfinite(m)) throw std::invalid_argument("PT chain: m must be finite");
  if (sites < 8 || sites % 2 != 0) throw std::invalid_argument("PT chain: L must be even and at least 8");
}

BlochModel PTChainModel::bloch() const {
  validate();
  const PTChainModel self = *this;
  return BlochModel{2, [self](double k) { return hamiltonian_at(self, k); },
                    [self](double k) { return velocity_at(self, k); }, "pt_chain"};
}

ComplexMatrix hamiltonian_at(const PTChainModel& model, double k) {
  const cplx gain = kI * model.m * std::cos(k);
  const cplx hop = std::polar(1.0, -k);
  return ComplexMatrix(2, 2, {gain, hop, std::conj(hop), -gain});
}

ComplexMatrix velocity_at(const PTChainModel& model, double k) {
  const cplx dgain = -kI * model.m * std::sin(k);
  const cplx dhop = -kI * std::polar(1.0, -k);
  return ComplexMatrix(2, 2, {dgain, dhop, std::conj(dhop), -dgain});
}

cplx dispersion(const PTChainModel& model, double k, int band_sign) {
  const double c = model.m * std::cos(k);
  const cplx e = std::sqrt(cplx{1.0 - c * c, 0.0});
  return band_sign >= 0 ? e : -e;
}

double BandScan::dk() const { return kTwoPi / static_cast<double>(k.size()); }

std::size_t BandScan::wrap(long j) const {
  const long n = static_cast<long>(k.size());
  return static_cast<std::size_t>(((j % n) + n) % n);
}

BandScan scan_bands(const BlochModel& model, std::size_t sites, const ScanOptions& options) {
  if (sites < 2) throw std::invalid_argument("scan_bands: need at least two momenta");
  if (!model.hamiltonian || model.dim == 0) throw std::invalid_argument("scan_bands: empty model");
  BandScan scan;
  scan.model = model;
  scan.k.resize(sites);
  for (std::size_t j = 0; j < sites; ++j) scan.k[j] = kTwoPi * static_cast<double>(j) / static_cast<double>(sites);

  std::vector<EigenSystem> raw(sites);
  std::vector<std::exception_ptr> errors(sites);
#pragma omp parallel for schedule(static)
  for (long j = 0; j < static_cast<long>(sites); ++j) {
    try {
      raw[j] = eig_general(model.hamiltonian(scan.k[j]), options.eig);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  }
  for (std::size_t j = 0; j < sites; ++j) {
    if (!errors[j]) continue;
    try {
      std::rethrow_exception(errors[j]);
    } catch (const DefectiveMatrix& e) {
      throw DefectiveMatrix(std::string(e.what()) + " at k = " + std::to_string(scan.k[j]), e.condition(),
                            scan.k[j], true);
    }
  }

  for (std::size_t j = 0; j < sites; ++j) {
    const std::size_t jn = (j + 1) % sites;
    const bool r0 = spectrum_real(raw[j], options.real_tolerance);
    const bool r1 = spectrum_real(raw[jn], options.real_tolerance);
    if (r0 != r1) {
      const double b = j + 1 == sites ? kTwoPi : scan.k[jn];
      locate_exceptional_point(model, scan.k[j], b, options,
                               std::max(energy_scale(raw[j]), energy_scale(raw[jn])));
    }
  }

  const std::size_t nb = model.dim;
  scan.band_map.assign(sites, std::vector<std::size_t>(nb));
  for (std::size_t n = 0; n < nb; ++n) scan.band_map[0][n] = n;
  scan.systems.resize(sites);
  scan.systems[0] = raw[0];
  for (std::size_t j = 1; j < sites; ++j) {
    const auto step = assign(scan.systems[j - 1], raw[j]);
    scan.band_map[j] = step;
    scan.systems[j] = permuted(raw[j], step);
  }
  const auto closing = assign(scan.systems[sites - 1], raw[0]);
  scan.closure_ok = closing == scan.band_map[0];
  return scan;
}

BandScan scan_bands(const PTChainModel& model, const ScanOptions& options) {
  return scan_bands(model.bloch(), model.sites, options);
}

void apply_gauge_twist(BandScan& scan, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (EigenSystem& es : scan.systems) {
    for (std::size_t n = 0; n < es.dim(); ++n) {
      const cplx c = std::polar(1.0, angle(rng));
      CVector r = es.right_vector(n);
      CVector l = es.left_vector(n);
      for (cplx& z : r) z *= c;
      for (cplx& z : l) z *= c;
      es.right.set_column(n, r);
      es.left.set_column(n, l);
    }
    es.gramian = es.right.adjoint() * es.right;
  }
}

EigenSystem follow_bands(const EigenSystem& reference, const EigenSystem& es) {
  if (reference.dim() != es.dim()) throw std::invalid_argument("follow_bands: dimension mismatch");
  return permuted(es, assign(reference, es));
}

std::size_t match_band(const EigenSystem& es, std::span<const cplx> left_ref) {
  std::size_t best = 0;
  double best_ov = -1.0;
  for (std::size_t n = 0; n < es.dim(); ++n) {
    const CVector r = es.right_vector(n);
    const double ov = std::abs(inner(left_ref, r)) / norm(r);
    if (ov > best_ov) {
      best_ov = ov;
      best = n;
    }
  }
  return best;
}

}  // namespace nhgeo
