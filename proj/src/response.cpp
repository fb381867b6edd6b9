#include "nhgeo/response.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nhgeo/errors.hpp"
#include "nhgeo/special.hpp"

namespace nhgeo {

namespace {

constexpr double kPi = std::numbers::pi;

// Finite breakpoints on [0, inf) that bracket every broadened pole.
std::vector<double> pole_breakpoints(const FHCoefficients& c, double eta) {
  std::vector<double> pts{0.0};
  double top = 0.0;
  for (const FHPair& p : c.pairs) {
    const double a = std::abs(p.gap.real());
    const double w = std::max(std::abs(p.gap.imag()) + eta, 1e-3);
    for (double x : {a - 20.0 * w, a - 3.0 * w, a - w, a, a + w, a + 3.0 * w, a + 20.0 * w})
      if (x > 0.0) pts.push_back(x);
    top = std::max(top, a + 20.0 * w);
  }
  pts.push_back(2.0 * top + 10.0);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

template <class F>
double integrate_half_line(F f, const std::vector<double>& pts) {
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    total += gauss_kronrod<double, 61>::integrate(f, pts[i], pts[i + 1], 20, 1e-13);
  total += gauss_kronrod<double, 61>::integrate(f, pts.back(), std::numeric_limits<double>::infinity(), 20, 1e-13);
  return total;
}

}  // namespace

ResponseProbe::ResponseProbe(const WavePacket& packet) : packet_(&packet) {
  const BandScan& scan = *packet.scan;
  velocity_.reserve(scan.sites());
  for (double k : scan.k) velocity_.push_back(scan.model.velocity(k));
}

LatticeState ResponseProbe::auxiliary(const LatticeState& w, double tau) const {
  const BandScan& scan = *packet_->scan;
  LatticeState out(w.sites, w.dim);
  for (std::size_t j = 0; j < w.sites; ++j) {
    const EigenSystem& es = scan.systems[j];
    const CVector back = apply_evolution(es, -tau, w.at(j));
    const CVector kicked = velocity_[j] * std::span<const cplx>(back);
    const CVector fwd = apply_evolution(es, tau, kicked);
    std::copy(fwd.begin(), fwd.end(), out.at(j).begin());
  }
  return out;
}

double ResponseProbe::operator()(double t, double t_prime) const {
  if (t < t_prime) return 0.0;
  const WavePacketState st = evolve(*packet_, t);
  const LatticeState& w = st.state;
  const LatticeState w1 = auxiliary(w, t - t_prime);
  LatticeState w2 = w;
  for (std::size_t i = 0; i < w2.data.size(); ++i) w2.data[i] -= kI * w1.data[i];

  const double l = static_cast<double>(w.sites);
  const double n0 = w.norm_squared();
  const double n1 = w1.norm_squared();
  const double n2 = w2.norm_squared();
  const double x0 = resta_position(w);
  double sum = n2 * ring_difference(resta_position(w2), x0, l);
  if (n1 > 1e-28 * n0) sum -= n1 * ring_difference(resta_position(w1), x0, l);
  return sum / n0;
}

double response_numeric(const WavePacket& packet, double t, double t_prime) {
  return ResponseProbe(packet)(t, t_prime);
}

ResponseSeries response_series(const WavePacket& packet, double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw std::invalid_argument("response_series: need dt > 0 and t_end >= 0");
  const ResponseProbe probe(packet);
  const std::size_t n = static_cast<std::size_t>(std::llround(t_end / dt)) + 1;
  ResponseSeries s;
  s.times.resize(n);
  s.values.resize(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    s.times[i] = static_cast<double>(i) * dt;
    try {
      s.values[i] = probe(s.times[i], 0.0);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return s;
}

cplx FHCoefficients::f_sum() const {
  cplx s{};
  for (const FHPair& p : pairs) s += p.f;
  return s;
}

FHCoefficients fh_coefficients(const BlochModel& model, const EigenSystem* reference, std::size_t band, double k_c) {
  const LocalFrame fr = frame_fine(model, k_c, reference);
  const EigenSystem& es = fr.center;
  if (band >= es.dim()) throw std::out_of_range("fh_coefficients: band index out of range");
  const CVector rn = es.right_vector(band);
  const CVector drn = fr.d_right.column(band);
  const CVector ddrn = fr.dd_right.column(band);
  const double inn = es.gramian(band, band).real();
  const double re_arr = (kI * inner(rn, drn) / inn).real();

  FHCoefficients c;
  c.k = k_c;
  c.band = band;
  for (std::size_t p = 0; p < es.dim(); ++p) {
    if (p == band) continue;
    const cplx gap = es.energies[band] - es.energies[p];
    if (std::abs(gap) <= 1e-8)
      throw DegenerateSpectrum("fh_coefficients: degenerate bands at k = " + std::to_string(k_c));
    const CVector rp = es.right_vector(p);
    const CVector lp = es.left_vector(p);
    const CVector drp = fr.d_right.column(p);
    const CVector dlp = fr.d_left.column(p);
    const cplx inp = es.gramian(band, p);
    const cplx g = inner(lp, drn);
    const cplx dg = inner(dlp, drn) + inner(lp, ddrn);
    FHPair pair;
    pair.partner = p;
    pair.gap = gap;
    pair.f = (g * ((inner(drn, rp) - inner(rn, drp)) - 2.0 * kI * re_arr * inp) - inp * dg) / (2.0 * inn);
    pair.h = 0.5 * inp / inn * g * (fr.d_energy[band] - fr.d_energy[p]);
    c.pairs.push_back(pair);
  }
  c.curvature = fr.dd_energy[band];
  c.slope = fr.d_energy[band];
  const GeometryPoint gp = geometry_from_frame(fr, band);
  c.qgt = gp.qgt;
  c.q_conn = gp.q_conn;
  c.dq = dq_dk(model, es, band, k_c);
  return c;
}

FHCoefficients fh_coefficients(const BandScan& scan, std::size_t band, double k_c) {
  const std::size_t j = scan.wrap(std::lround(k_c / scan.dk()));
  return fh_coefficients(scan.model, &scan.systems[j], band, k_c);
}

double response_analytic(const FHCoefficients& c, double t) {
  cplx s = 0.5 * kI * c.curvature;
  for (const FHPair& p : c.pairs) {
    const cplx d = p.gap;
    s -= kI * std::exp(kI * t * d) * (p.f * d - p.h * (1.0 + kI * t * d));
  }
  return 2.0 * s.imag();
}

ResponseSeries response_analytic_time(const FHCoefficients& c, const std::vector<double>& times) {
  ResponseSeries s;
  s.times = times;
  s.values.resize(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) s.values[i] = response_analytic(c, times[i]);
  return s;
}

cplx response_frequency(const FHCoefficients& c, double omega, double eta) {
  cplx s{};
  for (const FHPair& p : c.pairs) {
    const cplx d = p.gap + kI * eta;
    const cplx dc = std::conj(d);
    const cplx a = omega + d;
    const cplx b = omega - dc;
    if (std::abs(a) == 0.0 || std::abs(b) == 0.0)
      throw std::domain_error("response_frequency: frequency on a pole, broaden with eta > 0");
    s += -kI * (d * p.f / a + dc * std::conj(p.f) / b);
    s += kI * omega * (p.h / (a * a) + std::conj(p.h) / (b * b));
  }
  return s;
}

double dc_anomalous_velocity(const FHCoefficients& c) { return 2.0 * c.qgt.imag() + c.dq.real(); }

double dc_anomalous_velocity(const BandScan& scan, std::size_t band, double k_c) {
  const std::size_t j = scan.wrap(std::lround(k_c / scan.dk()));
  const LocalFrame fr = frame_fine(scan.model, k_c, &scan.systems[j]);
  const GeometryPoint gp = geometry_from_frame(fr, band);
  return 2.0 * gp.qgt.imag() + dq_dk(scan.model, fr.center, band, k_c).real();
}

double kramers_kronig_dc(const FHCoefficients& c, double eta) {
  // Im C_reg(omega)/omega is even in omega.
  auto f = [&](double w) { return response_frequency(c, w, eta).imag() / w; };
  return 2.0 / kPi * integrate_half_line(f, pole_breakpoints(c, eta));
}

double kramers_kronig_scale(const FHCoefficients& c, double eta) {
  auto f = [&](double w) { return std::abs(response_frequency(c, w, eta).imag() / w); };
  return 2.0 / kPi * integrate_half_line(f, pole_breakpoints(c, eta));
}

double frequency_integral_numeric(const FHCoefficients& c, double eta) {
  auto f = [&](double w) { return response_frequency(c, w, eta).real() / w; };
  return integrate_half_line(f, pole_breakpoints(c, eta));
}

double frequency_integral_closed(const FHCoefficients& c, double eta) {
  double s = 0.0;
  for (const FHPair& p : c.pairs) {
    const cplx d = p.gap + kI * eta;
    s += -2.0 * (p.f.real() * std::atan(d.real() / d.imag()) + (p.h / d).imag());
  }
  return s;
}

BroadeningParams BroadeningParams::from_cutoff(double T, double dt) {
  BroadeningParams bp;
  bp.T = T;
  bp.eta = 6.0 / T;
  bp.eta_prime = 10.0 * bp.eta;
  bp.dt = dt;
  bp.validate();
  return bp;
}

void BroadeningParams::validate() const {
  if (!(eta > 0.0) || !(eta_prime > 0.0) || !(T > 0.0) || !(dt > 0.0) || !std::isfinite(T))
    throw std::invalid_argument("broadening: eta, eta', T and dt must be positive");
  if (dt > T) throw std::invalid_argument("broadening: dt exceeds T");
}

double integrated_response_numeric(const ResponseSeries& series, const BroadeningParams& bp) {
  bp.validate();
  const std::size_t n_all = series.times.size();
  if (n_all < 3 || series.values.size() != n_all)
    throw std::invalid_argument("integrated_response_numeric: need at least three samples");
  const double dt = series.times[1] - series.times[0];
  std::size_t n = 0;
  while (n < n_all && series.times[n] <= bp.T + 1e-9 * dt) ++n;
  if (n < 3) throw std::invalid_argument("integrated_response_numeric: fewer than three samples below T");
  const std::vector<double>& c = series.values;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dc;
    if (i == 0)
      dc = (-3.0 * c[0] + 4.0 * c[1] - c[2]) / (2.0 * dt);
    else if (i + 1 == n)
      dc = (3.0 * c[i] - 4.0 * c[i - 1] + c[i - 2]) / (2.0 * dt);
    else
      dc = (c[i + 1] - c[i - 1]) / (2.0 * dt);
    const double t = series.times[i];
    const double g = std::exp(-bp.eta * t) * ei_kernel(bp.eta_prime * t) * dc;
    total += (i == 0 || i + 1 == n ? 0.5 : 1.0) * g;
  }
  return total * dt / (2.0 * bp.eta_prime);
}

IntegratedAnalytic integrated_response_analytic(const BandScan& scan, std::size_t band, double k_c,
                                                double pt_tolerance) {
  const FHCoefficients c = fh_coefficients(scan, band, k_c);
  if (std::abs(c.q_conn.real()) > pt_tolerance)
    throw PTBroken("integrated response: Re(A^RR - A^LR) = " + std::to_string(c.q_conn.real()) +
                   " is nonzero, the closed form requires unbroken PT symmetry");
  for (const FHPair& p : c.pairs)
    if (p.gap.real() > 1e-12)
      throw std::invalid_argument("integrated response: band is not the lowest in real energy");
  IntegratedAnalytic out;
  out.value = kPi * (c.qgt.real() - 0.5 * c.dq.imag());
  out.from_f = kPi * c.f_sum().real();
  return out;
}

}  // namespace nhgeo
