#include "nhgeo/wavepacket.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nhgeo/errors.hpp"
#include "nhgeo/geometry.hpp"

namespace nhgeo {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

}  // namespace

double LatticeState::norm_squared() const {
  double s = 0.0;
  for (const cplx& z : data) s += std::norm(z);
  return s;
}

cplx resta_phase(const LatticeState& s) {
  if (s.sites == 0) throw std::invalid_argument("resta_phase: empty state");
  cplx z{};
  for (std::size_t j = 0; j < s.sites; ++j) z += inner(s.at((j + 1) % s.sites), s.at(j));
  const double n = s.norm_squared();
  if (n == 0.0) throw DelocalizedState("resta_phase: zero state", 0.0);
  return z / n;
}

double resta_position(const LatticeState& s, double min_magnitude) {
  const cplx z = resta_phase(s);
  if (std::abs(z) < min_magnitude)
    throw DelocalizedState("state is delocalized (|<exp(2 pi i x/L)>| = " + std::to_string(std::abs(z)) + ")",
                           std::abs(z));
  const double l = static_cast<double>(s.sites);
  double x = l / (2.0 * kPi) * std::arg(z);
  x = std::fmod(x, l);
  if (x < 0.0) x += l;
  return x;
}

double ring_difference(double a, double b, double period) {
  double d = std::fmod(a - b + 0.5 * period, period);
  if (d < 0.0) d += period;
  return d - 0.5 * period;
}

std::vector<cplx> real_space(const LatticeState& s) {
  const std::size_t l = s.sites;
  std::vector<cplx> table(l);
  for (std::size_t j = 0; j < l; ++j) table[j] = std::polar(1.0 / static_cast<double>(l), 2.0 * kPi * j / l);
  std::vector<cplx> w(l * s.dim);
#pragma omp parallel for schedule(static)
  for (long x = 0; x < static_cast<long>(l); ++x) {
    for (std::size_t j = 0; j < l; ++j) {
      const cplx ph = table[(j * static_cast<std::size_t>(x)) % l];
      const auto c = s.at(j);
      for (std::size_t a = 0; a < s.dim; ++a) w[x * s.dim + a] += ph * c[a];
    }
  }
  return w;
}

std::vector<double> WavePacket::momentum_density() const {
  std::vector<double> rho(sites());
  for (std::size_t j = 0; j < sites(); ++j) rho[j] = std::norm(weights[j]) * norm(right[j]) * norm(right[j]);
  return rho;
}

WavePacket build_gaussian(const BandScan& scan, std::size_t band, double k_c, double sigma, double x_c,
                          double phase_slope) {
  const std::size_t l = scan.sites();
  if (band >= scan.bands()) throw std::out_of_range("build_gaussian: band index out of range");
  if (!(sigma > 0.0)) throw std::invalid_argument("build_gaussian: sigma must be positive");
  if (sigma > static_cast<double>(l) / 8.0)
    throw std::invalid_argument("build_gaussian: sigma exceeds L/8, packet would not be localized");
  if (!std::isfinite(k_c) || !std::isfinite(x_c)) throw std::invalid_argument("build_gaussian: non-finite centre");

  WavePacket p;
  p.scan = &scan;
  p.band = band;
  p.sigma = sigma;
  p.k_center = k_c;
  p.x_center = x_c;
  p.center_index = scan.wrap(std::lround(k_c / scan.dk()));
  p.right.resize(l);
  p.left.resize(l);
  p.energies.resize(l);
  for (std::size_t j = 0; j < l; ++j) {
    p.right[j] = scan.right(j, band);
    p.left[j] = scan.left(j, band);
    p.energies[j] = scan.energy(j, band);
  }

  // Parallel transport outward from the centre in both directions.
  const long jc = static_cast<long>(p.center_index);
  for (long dir : {1L, -1L}) {
    for (long s = 1; s <= static_cast<long>(l / 2); ++s) {
      const std::size_t j = scan.wrap(jc + dir * s);
      const std::size_t jp = scan.wrap(jc + dir * (s - 1));
      const cplx ov = inner(p.right[jp], p.right[j]);
      if (std::abs(ov) == 0.0) throw NumericalError("build_gaussian: vanishing overlap in parallel transport");
      const cplx ph = std::conj(ov) / std::abs(ov);
      for (cplx& z : p.right[j]) z *= ph;
      for (cplx& z : p.left[j]) z *= ph;
    }
  }

  {
    const std::size_t jp = scan.wrap(jc + 1), jm = scan.wrap(jc - 1);
    const CVector& r = p.right[p.center_index];
    CVector d(r.size());
    for (std::size_t a = 0; a < r.size(); ++a) d[a] = (p.right[jp][a] - p.right[jm][a]) / (2.0 * scan.dk());
    p.re_a_rr = (kI * inner(r, d) / inner(r, r)).real();
  }

  p.weights.resize(l);
  p.phase_profile.resize(l);
  p.envelope.resize(l);
  double total = 0.0;
  for (std::size_t j = 0; j < l; ++j) {
    const double dk = wrap_angle(scan.k[j] - k_c);
    const double inn = inner(p.right[j], p.right[j]).real();
    p.envelope[j] = std::exp(-0.5 * sigma * sigma * dk * dk);
    p.phase_profile[j] = -dk * (x_c - p.re_a_rr) + phase_slope * dk;
    p.weights[j] = std::polar(std::sqrt(p.envelope[j] / inn), p.phase_profile[j]);
    total += std::norm(p.weights[j]) * inn;
  }
  const double scale = 1.0 / std::sqrt(total);
  for (cplx& w : p.weights) w *= scale;
  return p;
}

WavePacketState evolve(const WavePacket& packet, double t) {
  const std::size_t l = packet.sites();
  const std::size_t dim = packet.right.front().size();
  WavePacketState st;
  st.time = t;
  st.state = LatticeState(l, dim);
  for (std::size_t j = 0; j < l; ++j) {
    const cplx a = packet.weights[j] * std::exp(-kI * packet.energies[j] * t);
    auto c = st.state.at(j);
    for (std::size_t b = 0; b < dim; ++b) c[b] = a * packet.right[j][b];
  }
  st.norm = st.state.norm_squared();
  return st;
}

double central_position(const WavePacketState& state, const WavePacket&) { return resta_position(state.state); }

double position_spread(const WavePacketState& state, const WavePacket&) {
  const double l = static_cast<double>(state.state.sites);
  const double x0 = resta_position(state.state);
  const std::vector<cplx> w = real_space(state.state);
  const std::size_t dim = state.state.dim;
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t x = 0; x < state.state.sites; ++x) {
    double rho = 0.0;
    for (std::size_t a = 0; a < dim; ++a) rho += std::norm(w[x * dim + a]);
    const double d = ring_difference(static_cast<double>(x), x0, l);
    s0 += rho;
    s1 += rho * d;
    s2 += rho * d * d;
  }
  const double mean = s1 / s0;
  return s2 / s0 - mean * mean;
}

MomentumMoments momentum_moments(const WavePacket& packet) {
  const std::vector<double> rho = packet.momentum_density();
  const BandScan& scan = *packet.scan;
  cplx z{};
  double total = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    z += rho[j] * std::polar(1.0, scan.k[j]);
    total += rho[j];
  }
  MomentumMoments m;
  m.mean = std::arg(z);
  if (m.mean < 0.0) m.mean += 2.0 * kPi;
  double var = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    const double d = wrap_angle(scan.k[j] - m.mean);
    var += rho[j] * d * d;
  }
  m.variance = var / total;
  return m;
}

double metric_packet_average(const WavePacket& packet) {
  const std::vector<double> rho = packet.momentum_density();
  const BandScan& scan = *packet.scan;
  double s = 0.0, total = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    if (rho[j] < 1e-16) continue;
    s += rho[j] * connections_fd(scan, packet.band, j).qgt.real();
    total += rho[j];
  }
  return s / total;
}

}  // namespace nhgeo
