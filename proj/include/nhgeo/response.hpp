#pragma once

#include <vector>

#include "nhgeo/geometry.hpp"
#include "nhgeo/model.hpp"
#include "nhgeo/wavepacket.hpp"

namespace nhgeo {

struct ResponseSeries {
  std::vector<double> times;
  std::vector<double> values;
};

/// Velocity matrices and eigensystems shared by all time samples of one packet.
class ResponseProbe {
 public:
  explicit ResponseProbe(const WavePacket& packet);

  /// C(t, t') from the Resta positions of the auxiliary states; zero for t < t'.
  double operator()(double t, double t_prime) const;

  /// W' = U(t - t') v U(t' - t) W(t), exposed for tests.
  LatticeState auxiliary(const LatticeState& w, double tau) const;

 private:
  const WavePacket* packet_;
  std::vector<ComplexMatrix> velocity_;
};

double response_numeric(const WavePacket& packet, double t, double t_prime);
/// C(t, 0) on 0, dt, ..., t_end (the state is evolved to each t).
ResponseSeries response_series(const WavePacket& packet, double t_end, double dt);

struct FHPair {
  std::size_t partner = 0;
  cplx f;
  cplx h;
  cplx gap;  // eps_n - eps_n'
};

struct FHCoefficients {
  double k = 0.0;
  std::size_t band = 0;
  std::vector<FHPair> pairs;
  cplx curvature;  // second momentum derivative of eps_n
  cplx slope;      // first momentum derivative of eps_n
  cplx qgt;
  cplx q_conn;
  cplx dq;  // momentum derivative of q_conn

  cplx f_sum() const;
  /// Weight of the zero-frequency (Drude) peak, Re eps''.
  double drude_weight() const { return curvature.real(); }
};

FHCoefficients fh_coefficients(const BandScan& scan, std::size_t band, double k_c);
FHCoefficients fh_coefficients(const BlochModel& model, const EigenSystem* reference, std::size_t band, double k_c);

/// Closed-form C(t) of a packet in the limit of infinite real-space width.
double response_analytic(const FHCoefficients& c, double t);
ResponseSeries response_analytic_time(const FHCoefficients& c, const std::vector<double>& times);

/// Regular part of C(omega); each gap is shifted by i*eta.
cplx response_frequency(const FHCoefficients& c, double omega, double eta = 0.0);

/// 2 Im q + d/dk Re(A^RR - A^LR) at k_c.
double dc_anomalous_velocity(const BandScan& scan, std::size_t band, double k_c);
double dc_anomalous_velocity(const FHCoefficients& c);

/// (1/pi) P-integral of Im C_reg(omega)/omega over the real line.
double kramers_kronig_dc(const FHCoefficients& c, double eta);
/// (1/pi) integral of |Im C_reg(omega)/omega|, the natural scale of the previous integral.
double kramers_kronig_scale(const FHCoefficients& c, double eta);

/// integral_0^inf Re C_reg(omega)/omega, by quadrature.
double frequency_integral_numeric(const FHCoefficients& c, double eta);
/// Same integral in closed form: -2 sum [Re f arctan(Re D / Im D) + Im(h / D)], D = gap + i eta.
double frequency_integral_closed(const FHCoefficients& c, double eta);

struct BroadeningParams {
  double eta = 0.02;
  double eta_prime = 0.2;
  double T = 300.0;
  double dt = 0.05;

  /// eta = 6/T and eta' = 10 eta.
  static BroadeningParams from_cutoff(double T, double dt = 0.05);
  void validate() const;
};

/// (1/2eta') integral_0^T exp(-eta t) K(eta' t) dC/dt, with K the Ei kernel.
double integrated_response_numeric(const ResponseSeries& series, const BroadeningParams& bp);

struct IntegratedAnalytic {
  double value = 0.0;     // pi (Re q - (1/2) d/dk Im Q)
  double from_f = 0.0;    // pi sum Re f
};

/// Throws PTBroken when |Re Q| exceeds pt_tolerance; requires the band to be lowest in real energy.
IntegratedAnalytic integrated_response_analytic(const BandScan& scan, std::size_t band, double k_c,
                                                double pt_tolerance = 1e-6);

}  // namespace nhgeo
