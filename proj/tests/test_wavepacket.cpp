#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nhgeo/errors.hpp"
#include "nhgeo/geometry.hpp"
#include "nhgeo/wavepacket.hpp"

using namespace nhgeo;

namespace {
constexpr double kPi = std::numbers::pi;

// Position from the naive real-space average, valid far from the boundary.
double naive_position(const LatticeState& s) {
  const std::vector<cplx> w = real_space(s);
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t x = 0; x < s.sites; ++x) {
    double rho = 0.0;
    for (std::size_t a = 0; a < s.dim; ++a) rho += std::norm(w[x * s.dim + a]);
    s0 += rho;
    s1 += rho * static_cast<double>(x);
  }
  return s1 / s0;
}
}  // namespace

TEST_CASE("Hermitian packet: position, momentum, normalization") {
  const BandScan s = scan_bands(PTChainModel{0.0, 256});
  const WavePacket p = build_gaussian(s, 0, kPi / 2, 8.0, 100.0);
  const WavePacketState st = evolve(p, 0.0);
  CHECK(std::abs(central_position(st, p) - 100.0) < 0.05);
  const MomentumMoments mm = momentum_moments(p);
  CHECK(std::abs(mm.mean - kPi / 2) < 1e-3);
  double total = 0.0;
  for (double r : p.momentum_density()) total += r;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(naive_position(st.state) - central_position(st, p)) < 0.01);
}

TEST_CASE("envelope weights follow the Gaussian") {
  const BandScan s = scan_bands(PTChainModel{0.8, 256});
  const WavePacket p = build_gaussian(s, 0, 1.1 * kPi, 16.0, 128.0);
  const std::vector<double> rho = p.momentum_density();
  const std::size_t jc = p.center_index;
  const double dc = std::remainder(s.k[jc] - 1.1 * kPi, 2 * kPi);
  for (std::size_t j = 0; j < s.sites(); ++j) {
    const double d = std::remainder(s.k[j] - 1.1 * kPi, 2 * kPi);
    const double want = std::exp(-0.5 * 256.0 * (d * d - dc * dc));
    CHECK(std::abs(rho[j] / rho[jc] - want) < 1e-10);
  }
  CHECK(std::abs(momentum_moments(p).mean - 1.1 * kPi) < 1e-3);
}

TEST_CASE("momentum cumulants approach k_c and 1/sigma^2") {
  const BandScan s = scan_bands(PTChainModel{0.8, 512});
  for (double sg : {8.0, 16.0, 32.0}) {
    const WavePacket p = build_gaussian(s, 0, 0.9, sg, 256.0);
    const MomentumMoments mm = momentum_moments(p);
    CHECK(std::abs(mm.mean - 0.9) < 0.05 / sg);
    CHECK(mm.variance * sg * sg == doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("periodic position: centre, translation, delocalized state") {
  const BandScan s = scan_bands(PTChainModel{0.8, 256});
  const WavePacket p = build_gaussian(s, 0, 0.7, 8.0, 128.0);
  const WavePacketState st = evolve(p, 0.0);
  const double x0 = central_position(st, p);
  CHECK(std::abs(x0 - 128.0) < 0.05);

  LatticeState moved = st.state;
  for (std::size_t j = 0; j < moved.sites; ++j)
    for (cplx& z : moved.at(j)) z *= std::polar(1.0, -s.k[j]);
  CHECK(std::abs(resta_position(moved) - x0 - 1.0) < 1e-10);

  const WavePacket edge = build_gaussian(s, 0, 0.7, 8.0, 255.5);
  const double xe = central_position(evolve(edge, 0.0), edge);
  CHECK(std::abs(ring_difference(xe, 255.5, 256.0)) < 0.05);

  LatticeState uniform(256, 2);
  uniform.at(0)[0] = 1.0;
  CHECK_THROWS_AS(resta_position(uniform), DelocalizedState);
  try {
    resta_position(uniform);
  } catch (const DelocalizedState& e) {
    CHECK(e.magnitude() < 1e-12);
  }
}

TEST_CASE("phase slope shifts the centre") {
  const BandScan s = scan_bands(PTChainModel{0.8, 256});
  const WavePacket a = build_gaussian(s, 0, 1.1 * kPi, 8.0, 128.0);
  const WavePacket b = build_gaussian(s, 0, 1.1 * kPi, 8.0, 128.0, 0.37);
  const double xa = central_position(evolve(a, 0), a);
  const double xb = central_position(evolve(b, 0), b);
  CHECK(std::abs(xb - xa + 0.37) < 0.01);
}

TEST_CASE("Hermitian spread is 1/4 + sigma^2/4") {
  const BandScan s = scan_bands(PTChainModel{0.0, 256});
  const WavePacket p = build_gaussian(s, 0, 1.0, 8.0, 128.0);
  const double spread = position_spread(evolve(p, 0), p);
  CHECK(spread == doctest::Approx(0.25 + 16.0).epsilon(0.05));
  CHECK(spread - 16.0 == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("geometric spread approaches Re q and respects the lower bound") {
  const BandScan s = scan_bands(PTChainModel{0.8, 256});
  for (double kc : {kPi / 4, 0.6 * kPi, 1.1 * kPi}) {
    const double q = geometry_at(s, 0, kc).qgt.real();
    double prev = 1e300;
    double geo8 = 0.0, geo16 = 0.0;
    for (double sg : {4.0, 8.0, 16.0, 32.0}) {
      const WavePacket p = build_gaussian(s, 0, kc, sg, 128.0);
      const double spread = position_spread(evolve(p, 0), p);
      CHECK(spread >= q - 1e-6);
      const double geo = spread - 0.25 * sg * sg;
      CHECK(std::abs(geo - q) <= prev + 1e-12);
      prev = std::abs(geo - q);
      if (sg == 8.0) geo8 = geo;
      if (sg == 16.0) geo16 = geo;
    }
    CHECK(prev < 0.05 * q);
    CHECK(std::abs(geo8 - geo16) < 0.1 * geo16);
  }
}

TEST_CASE("packet-averaged metric is close to the point value") {
  const BandScan s = scan_bands(PTChainModel{0.8, 256});
  const WavePacket p = build_gaussian(s, 0, 1.1 * kPi, 32.0, 128.0);
  CHECK(metric_packet_average(p) == doctest::Approx(geometry_at(s, 0, 1.1 * kPi).qgt.real()).epsilon(0.01));
}

TEST_CASE("evolution") {
  const BandScan s = scan_bands(PTChainModel{0.8, 256});
  const WavePacket p = build_gaussian(s, 0, 0.8, 16.0, 128.0);
  const WavePacketState s0 = evolve(p, 0.0);
  for (std::size_t j = 0; j < s.sites(); ++j)
    for (std::size_t a = 0; a < 2; ++a) CHECK(std::abs(s0.state.at(j)[a] - p.weights[j] * p.right[j][a]) < 1e-15);
  for (double t : {1.0, 10.0, 40.0}) CHECK(std::abs(evolve(p, t).norm - s0.norm) < 1e-10);
}

TEST_CASE("drift with the group velocity") {
  // Flat bands at m = 0: the packet stays put.
  const BandScan s0 = scan_bands(PTChainModel{0.0, 256});
  const WavePacket p0 = build_gaussian(s0, 0, 1.0, 8.0, 128.0);
  for (double t : {5.0, 20.0}) CHECK(std::abs(central_position(evolve(p0, t), p0) - 128.0) < 0.1);

  const PTChainModel m{0.8, 512};
  const BandScan s = scan_bands(m);
  const double kc = 0.25 * kPi;
  const WavePacket p = build_gaussian(s, 0, kc, 16.0, 256.0);
  const double h = 1e-5;
  const double slope = (dispersion(m, kc + h, -1).real() - dispersion(m, kc - h, -1).real()) / (2 * h);
  const double x0 = central_position(evolve(p, 0.0), p);
  for (double t : {10.0, 20.0, 40.0}) {
    const double x = central_position(evolve(p, t), p);
    CHECK(ring_difference(x, x0, 512.0) == doctest::Approx(slope * t).epsilon(0.02));
  }
}

TEST_CASE("construction errors") {
  const BandScan s = scan_bands(PTChainModel{0.8, 64});
  CHECK_THROWS_AS(build_gaussian(s, 0, 0.0, 9.0, 32.0), std::invalid_argument);
  CHECK_THROWS_AS(build_gaussian(s, 2, 0.0, 4.0, 32.0), std::out_of_range);
  CHECK_THROWS_AS(build_gaussian(s, 0, 0.0, -1.0, 32.0), std::invalid_argument);
}
