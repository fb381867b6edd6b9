#pragma once

#include <vector>

#include "nhgeo/linalg.hpp"
#include "nhgeo/model.hpp"

namespace nhgeo {

/// Orbital amplitudes c_k (dim components per momentum) on the periodic grid.
struct LatticeState {
  std::size_t sites = 0;
  std::size_t dim = 0;
  std::vector<cplx> data;  // momentum-major

  LatticeState() = default;
  LatticeState(std::size_t l, std::size_t d) : sites(l), dim(d), data(l * d) {}

  std::span<cplx> at(std::size_t j) { return {data.data() + j * dim, dim}; }
  std::span<const cplx> at(std::size_t j) const { return {data.data() + j * dim, dim}; }
  double norm_squared() const;
};

/// Resta phase expectation <exp(2 pi i x / L)>.
cplx resta_phase(const LatticeState& s);
/// Periodic position in [0, L); throws DelocalizedState when |phase| < min_magnitude.
double resta_position(const LatticeState& s, double min_magnitude = 0.1);
/// Minimum-image difference a - b on a ring of circumference period.
double ring_difference(double a, double b, double period);
/// W_a(x) = (1/L) sum_k exp(ikx) c_{k,a} at integer cells x = 0..L-1, returned cell-major.
std::vector<cplx> real_space(const LatticeState& s);

struct WavePacket {
  const BandScan* scan = nullptr;  // must outlive the packet
  std::size_t band = 0;
  double sigma = 0.0;
  double k_center = 0.0;
  double x_center = 0.0;
  std::size_t center_index = 0;
  std::vector<cplx> weights;          // w_k
  std::vector<double> phase_profile;  // phi_k
  std::vector<double> envelope;       // Gaussian exp(-sigma^2 dk^2 / 2) at each grid momentum
  std::vector<CVector> right;         // band eigenvectors in the parallel-transport gauge
  std::vector<CVector> left;
  std::vector<cplx> energies;
  double re_a_rr = 0.0;  // Re A^RR at k_c in that gauge

  std::size_t sites() const { return weights.size(); }
  /// Momentum distribution |w_k|^2 I_nn(k), summing to one.
  std::vector<double> momentum_density() const;
};

struct WavePacketState {
  double time = 0.0;
  LatticeState state;
  double norm = 0.0;  // sum_k |c_k|^2
};

/// Gaussian packet in one band. `phase_slope` adds slope * dk to phi_k (moves the centre by -slope).
WavePacket build_gaussian(const BandScan& scan, std::size_t band, double k_c, double sigma, double x_c,
                          double phase_slope = 0.0);

/// c_k(t) = w_k exp(-i eps_k t) u_k.
WavePacketState evolve(const WavePacket& packet, double t);

double central_position(const WavePacketState& state, const WavePacket& packet);
/// Second cumulant of the cell position, taken over the full period centred on the Resta mean.
double position_spread(const WavePacketState& state, const WavePacket& packet);

struct MomentumMoments {
  double mean = 0.0;      // circular mean
  double variance = 0.0;  // about the mean, wrapped to (-pi, pi]
};
MomentumMoments momentum_moments(const WavePacket& packet);

/// sum_k rho_k Re q(k) with the packet's momentum density (scan-grid geometry).
double metric_packet_average(const WavePacket& packet);

}  // namespace nhgeo
