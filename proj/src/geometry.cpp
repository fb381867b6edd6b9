#include "nhgeo/geometry.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "nhgeo/errors.hpp"

namespace nhgeo {

namespace {

void align_to(const EigenSystem& center, EigenSystem& es) {
  for (std::size_t b = 0; b < es.dim(); ++b) {
    CVector r = es.right_vector(b);
    CVector l = es.left_vector(b);
    const cplx ov = inner(center.right_vector(b), r);
    if (std::abs(ov) == 0.0) throw NumericalError("phase alignment: vanishing neighbour overlap");
    const cplx ph = std::conj(ov) / std::abs(ov);
    for (cplx& z : r) z *= ph;
    for (cplx& z : l) z *= ph;
    es.right.set_column(b, r);
    es.left.set_column(b, l);
  }
}

EigenSystem neighbour(const EigenSystem& center, const EigenSystem& es) {
  EigenSystem out = follow_bands(center, es);
  align_to(center, out);
  return out;
}

// Combines stencil values sum_i w_i * x_i / scale for matrices and energy lists.
ComplexMatrix combine(const std::vector<const EigenSystem*>& pts, const std::vector<double>& w, double scale,
                      bool left) {
  const std::size_t n = pts.front()->dim();
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (w[i] == 0.0) continue;
    const ComplexMatrix& m = left ? pts[i]->left : pts[i]->right;
    out += cplx{w[i] / scale, 0.0} * m;
  }
  return out;
}

std::vector<cplx> combine_energies(const std::vector<const EigenSystem*>& pts, const std::vector<double>& w,
                                   double scale) {
  std::vector<cplx> out(pts.front()->dim());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t b = 0; b < out.size(); ++b) out[b] += w[i] / scale * pts[i]->energies[b];
  return out;
}

LocalFrame assemble(double k, const std::vector<const EigenSystem*>& pts, double h) {
  // pts ordered by offset; three or five points.
  std::vector<double> d1, d2;
  std::size_t mid;
  double s1, s2;
  if (pts.size() == 3) {
    d1 = {-1.0, 0.0, 1.0};
    d2 = {1.0, -2.0, 1.0};
    s1 = 2.0 * h;
    s2 = h * h;
    mid = 1;
  } else {
    d1 = {1.0, -8.0, 0.0, 8.0, -1.0};
    d2 = {-1.0, 16.0, -30.0, 16.0, -1.0};
    s1 = 12.0 * h;
    s2 = 12.0 * h * h;
    mid = 2;
  }
  LocalFrame f;
  f.k = k;
  f.center = *pts[mid];
  f.d_right = combine(pts, d1, s1, false);
  f.d_left = combine(pts, d1, s1, true);
  f.dd_right = combine(pts, d2, s2, false);
  f.d_energy = combine_energies(pts, d1, s1);
  f.dd_energy = combine_energies(pts, d2, s2);
  return f;
}

std::size_t nearest_index(const BandScan& scan, double k) {
  const double x = k / scan.dk();
  return scan.wrap(std::lround(x));
}

}  // namespace

LocalFrame frame_from_scan(const BandScan& scan, std::size_t j) {
  const EigenSystem& c = scan.systems.at(j);
  const EigenSystem minus = neighbour(c, scan.systems[scan.wrap(static_cast<long>(j) - 1)]);
  const EigenSystem plus = neighbour(c, scan.systems[scan.wrap(static_cast<long>(j) + 1)]);
  return assemble(scan.k[j], {&minus, &c, &plus}, scan.dk());
}

LocalFrame frame_fine(const BlochModel& model, double k, const EigenSystem* reference, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("frame_fine: step must be positive");
  EigenSystem c = eig_general(model.hamiltonian(k));
  if (reference) c = follow_bands(*reference, c);
  std::array<EigenSystem, 5> sys;
  for (int s = -2; s <= 2; ++s) {
    if (s == 0) {
      sys[2] = c;
      continue;
    }
    sys[s + 2] = neighbour(c, eig_general(model.hamiltonian(k + s * step)));
  }
  return assemble(k, {&sys[0], &sys[1], &sys[2], &sys[3], &sys[4]}, step);
}

LocalFrame frame_fine(const BandScan& scan, double k, double step) {
  return frame_fine(scan.model, k, &scan.systems[nearest_index(scan, k)], step);
}

GeometryPoint geometry_from_frame(const LocalFrame& frame, std::size_t band) {
  if (band >= frame.center.dim()) throw std::out_of_range("geometry: band index out of range");
  const CVector r = frame.center.right_vector(band);
  const CVector l = frame.center.left_vector(band);
  const CVector dr = frame.d_right.column(band);
  const double inn = inner(r, r).real();
  const cplx rdr = inner(r, dr);
  GeometryPoint p;
  p.k = frame.k;
  p.band = band;
  p.a_rr = kI * rdr / inn;
  p.a_lr = kI * inner(l, dr) / inner(l, r);
  p.q_conn = p.a_rr - p.a_lr;
  p.qgt = inner(dr, dr) / inn - std::conj(rdr) * rdr / (inn * inn);
  return p;
}

GeometryPoint connections_fd(const BandScan& scan, std::size_t band, std::size_t j) {
  return geometry_from_frame(frame_from_scan(scan, j), band);
}

GeometryPoint geometry_at(const BandScan& scan, std::size_t band, double k) {
  return geometry_from_frame(frame_fine(scan, k), band);
}

cplx connection_difference_sos(const EigenSystem& es, const ComplexMatrix& dh, std::size_t band,
                               double degeneracy_threshold) {
  if (band >= es.dim()) throw std::out_of_range("connection_difference_sos: band index out of range");
  const CVector r = es.right_vector(band);
  const CVector vr = dh * r;
  const double inn = es.gramian(band, band).real();
  cplx sum{};
  for (std::size_t p = 0; p < es.dim(); ++p) {
    if (p == band) continue;
    const cplx gap = es.energies[band] - es.energies[p];
    if (std::abs(gap) <= degeneracy_threshold)
      throw DegenerateSpectrum("connection_difference_sos: degenerate bands (gap " + std::to_string(std::abs(gap)) +
                               ")");
    sum += es.gramian(band, p) / inn * inner(es.left_vector(p), vr) / gap;
  }
  return kI * sum;
}

cplx qgt_left_right(const LocalFrame& frame, std::size_t band) {
  const CVector r = frame.center.right_vector(band);
  const CVector l = frame.center.left_vector(band);
  const CVector dr = frame.d_right.column(band);
  const CVector dl = frame.d_left.column(band);
  return inner(dl, dr) - inner(dl, r) * inner(l, dr);
}

cplx qgt_left_right(const BandScan& scan, std::size_t band, std::size_t j) {
  return qgt_left_right(frame_from_scan(scan, j), band);
}

cplx dq_dk(const BlochModel& model, const EigenSystem& reference, std::size_t band, double k, double step) {
  const EigenSystem c = follow_bands(reference, eig_general(model.hamiltonian(k)));
  const std::array<double, 4> off = {-2.0, -1.0, 1.0, 2.0};
  const std::array<double, 4> w = {1.0, -8.0, 8.0, -1.0};
  cplx d{};
  for (std::size_t i = 0; i < off.size(); ++i) {
    const double kk = k + off[i] * step;
    const EigenSystem es = follow_bands(c, eig_general(model.hamiltonian(kk)));
    d += w[i] * connection_difference_sos(es, model.velocity(kk), band);
  }
  return d / (12.0 * step);
}

cplx dq_dk(const BandScan& scan, std::size_t band, double k, double step) {
  return dq_dk(scan.model, scan.systems[nearest_index(scan, k)], band, k, step);
}

cplx dq_dk_grid(const BandScan& scan, std::size_t band, std::size_t j) {
  const std::size_t jp = scan.wrap(static_cast<long>(j) + 1);
  const std::size_t jm = scan.wrap(static_cast<long>(j) - 1);
  const EigenSystem& c = scan.systems.at(j);
  const cplx qp = connection_difference_sos(follow_bands(c, scan.systems[jp]), scan.model.velocity(scan.k[jp]), band);
  const cplx qm = connection_difference_sos(follow_bands(c, scan.systems[jm]), scan.model.velocity(scan.k[jm]), band);
  return (qp - qm) / (2.0 * scan.dk());
}

void FidelityProbe::validate() const {
  if (!(lambda_step >= 0.0) || !std::isfinite(lambda_step))
    throw std::invalid_argument("FidelityProbe: step must be finite and non-negative");
  if (direction != 0) throw std::invalid_argument("FidelityProbe: one-dimensional models have one direction");
}

double fidelity(std::span<const cplx> left, std::span<const cplx> right) {
  const double nl = norm(left);
  const double nr = norm(right);
  if (nl == 0.0 || nr == 0.0) throw std::invalid_argument("fidelity: zero-norm vector");
  const double ov = std::abs(inner(left, right)) / (nl * nr);
  return ov * ov;
}

double fidelity_prefactor(const EigenSystem& es, std::size_t band) {
  const double l = norm(es.left_vector(band));
  return 1.0 / (es.gramian(band, band).real() * l * l);
}

double fidelity_first_order(const GeometryPoint& point, const FidelityProbe& probe, const EigenSystem& es) {
  probe.validate();
  const double d = probe.lambda_step;
  return fidelity_prefactor(es, point.band) * (1.0 - 2.0 * d * point.q_conn.imag());
}

double fidelity_second_order(const GeometryPoint& point, const FidelityProbe& probe, const EigenSystem& es,
                             cplx qgt_lr, cplx dq) {
  probe.validate();
  const double d = probe.lambda_step;
  const double imq = point.q_conn.imag();
  const double c2 = qgt_lr.real() + dq.imag() - 2.0 * imq * imq;
  return fidelity_prefactor(es, point.band) * (1.0 - 2.0 * d * imq - d * d * c2);
}

}  // namespace nhgeo
