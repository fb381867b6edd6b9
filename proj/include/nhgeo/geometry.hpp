#pragma once

#include <vector>

#include "nhgeo/linalg.hpp"
#include "nhgeo/model.hpp"

namespace nhgeo {

/// Eigen data at one momentum with momentum derivatives of every band.
///
/// Neighbouring eigenvectors are phase-aligned to the centre (<R(k)|R(k')> real
/// positive, left vectors rotated with the same phase), so Re A^RR vanishes here.
struct LocalFrame {
  double k = 0.0;
  EigenSystem center;
  ComplexMatrix d_right;
  ComplexMatrix d_left;
  ComplexMatrix dd_right;
  std::vector<cplx> d_energy;
  std::vector<cplx> dd_energy;
};

/// Default step of the off-grid five-point stencil.
inline constexpr double kFineStep = 2e-3;

/// Three-point central differences on the scan grid (step dk).
LocalFrame frame_from_scan(const BandScan& scan, std::size_t j);
/// Five-point stencil on direct model evaluations around k. Bands follow `reference` when given.
LocalFrame frame_fine(const BlochModel& model, double k, const EigenSystem* reference = nullptr,
                      double step = kFineStep);
/// Same, with band labels taken from the nearest scan point.
LocalFrame frame_fine(const BandScan& scan, double k, double step = kFineStep);

struct GeometryPoint {
  double k = 0.0;
  std::size_t band = 0;
  cplx a_rr;
  cplx a_lr;
  cplx q_conn;  // A^RR - A^LR
  cplx qgt;
};

GeometryPoint geometry_from_frame(const LocalFrame& frame, std::size_t band);
GeometryPoint connections_fd(const BandScan& scan, std::size_t band, std::size_t j);
/// Reference geometry from the fine stencil at arbitrary k.
GeometryPoint geometry_at(const BandScan& scan, std::size_t band, double k);

/// Sum-over-states form i sum_{n'!=n} (I_nn'/I_nn) <L_n'|dH|R_n>/(E_n - E_n').
cplx connection_difference_sos(const EigenSystem& es, const ComplexMatrix& dh, std::size_t band,
                               double degeneracy_threshold = 1e-8);

/// q^LR = <dL|dR> - <dL|R><L|dR>.
cplx qgt_left_right(const LocalFrame& frame, std::size_t band);
cplx qgt_left_right(const BandScan& scan, std::size_t band, std::size_t j);

/// Momentum derivative of A^RR - A^LR, five-point differences of the sum-over-states value.
cplx dq_dk(const BlochModel& model, const EigenSystem& reference, std::size_t band, double k,
           double step = kFineStep);
cplx dq_dk(const BandScan& scan, std::size_t band, double k, double step = kFineStep);
/// Same from neighbouring scan points (step dk).
cplx dq_dk_grid(const BandScan& scan, std::size_t band, std::size_t j);

struct FidelityProbe {
  double lambda_step = 1e-3;
  std::size_t direction = 0;  // only momentum (0) for one-dimensional models
  void validate() const;
};

/// |<l|r>|^2 / (<l|l><r|r>).
double fidelity(std::span<const cplx> left, std::span<const cplx> right);
/// 1 / (I_nn (I^-1)_nn): fidelity of the unperturbed pair.
double fidelity_prefactor(const EigenSystem& es, std::size_t band);
double fidelity_first_order(const GeometryPoint& point, const FidelityProbe& probe, const EigenSystem& es);
double fidelity_second_order(const GeometryPoint& point, const FidelityProbe& probe, const EigenSystem& es,
                             cplx qgt_lr, cplx dq);

}  // namespace nhgeo
