#include "nhgeo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <stdexcept>

#include "nhgeo/errors.hpp"
#include "nhgeo/geometry.hpp"
#include "nhgeo/special.hpp"
#include "nhgeo/wavepacket.hpp"

namespace nhgeo {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + ": must be finite");
  return v;
}

std::vector<double> get_numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(get_number(v, where));
  return out;
}

std::size_t get_count(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(where + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

BandScan make_scan(const ExperimentConfig& cfg) {
  BandScan scan = scan_bands(cfg.model);
  if (cfg.gauge_twist_seed) apply_gauge_twist(scan, *cfg.gauge_twist_seed);
  return scan;
}

std::vector<double> sweep_momenta(const ExperimentConfig& cfg) {
  if (!cfg.sweep.values.empty()) return cfg.sweep.values;
  std::vector<double> ks;
  for (int i = 0; i < 16; ++i) ks.push_back(2.0 * kPi * i / 16.0);
  return ks;
}

std::vector<double> sweep_sigmas(const ExperimentConfig& cfg, const std::vector<double>& fallback) {
  if (!cfg.sweep.sigmas.empty()) return cfg.sweep.sigmas;
  std::vector<double> out;
  for (double s : fallback)
    if (s <= static_cast<double>(cfg.model.sites) / 8.0) out.push_back(s);
  return out;
}

CsvTable start_table(const ExperimentConfig& cfg, std::vector<std::string> header) {
  CsvTable t;
  t.header = std::move(header);
  t.config_echo = cfg.source.dump();
  return t;
}

double max_abs(const ComplexMatrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s = std::max(s, std::abs(m(i, j)));
  return s;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  reject_unknown(j, "config", {"model", "packet", "broadening", "sweep", "output", "k_unit", "gauge_twist_seed"});
  ExperimentConfig cfg;
  cfg.source = j;

  double unit = 1.0;
  if (j.contains("k_unit")) {
    if (!j["k_unit"].is_string()) throw ConfigError("k_unit: expected \"rad\" or \"pi\"");
    const std::string u = j["k_unit"];
    if (u == "pi")
      unit = kPi;
    else if (u != "rad")
      throw ConfigError("k_unit: expected \"rad\" or \"pi\", got '" + u + "'");
  }

  if (!j.contains("model")) throw ConfigError("config: missing 'model' section");
  const json& m = j["model"];
  reject_unknown(m, "model", {"m", "L"});
  if (!m.contains("m")) throw ConfigError("model: missing 'm'");
  cfg.model.m = get_number(m["m"], "model.m");
  if (m.contains("L")) cfg.model.sites = get_count(m["L"], "model.L");
  try {
    cfg.model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  cfg.packet.sigma = std::min(cfg.packet.sigma, static_cast<double>(cfg.model.sites) / 8.0);
  if (j.contains("packet")) {
    const json& p = j["packet"];
    reject_unknown(p, "packet", {"band", "k_c", "sigma", "x_c"});
    if (p.contains("band")) cfg.packet.band = get_count(p["band"], "packet.band");
    if (p.contains("k_c")) cfg.packet.k_c = unit * get_number(p["k_c"], "packet.k_c");
    if (p.contains("sigma")) cfg.packet.sigma = get_number(p["sigma"], "packet.sigma");
    if (p.contains("x_c")) cfg.packet.x_c = get_number(p["x_c"], "packet.x_c");
  }
  if (cfg.packet.band >= 2) throw ConfigError("packet.band: the chain has two bands (0 or 1)");
  if (!(cfg.packet.sigma > 0.0) || cfg.packet.sigma > static_cast<double>(cfg.model.sites) / 8.0)
    throw ConfigError("packet.sigma: must satisfy 0 < sigma <= L/8");

  double T = 300.0, dt = 0.05;
  std::optional<double> eta, eta_prime;
  if (j.contains("broadening")) {
    const json& b = j["broadening"];
    reject_unknown(b, "broadening", {"eta", "eta_prime", "T", "dt"});
    if (b.contains("T")) T = get_number(b["T"], "broadening.T");
    if (b.contains("dt")) dt = get_number(b["dt"], "broadening.dt");
    if (b.contains("eta")) eta = get_number(b["eta"], "broadening.eta");
    if (b.contains("eta_prime")) eta_prime = get_number(b["eta_prime"], "broadening.eta_prime");
  }
  try {
    if (!(T > 0.0)) throw std::invalid_argument("broadening.T must be positive");
    cfg.broadening = BroadeningParams::from_cutoff(T, dt);
    if (eta) cfg.broadening.eta = *eta;
    if (eta_prime) cfg.broadening.eta_prime = *eta_prime;
    cfg.broadening.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    reject_unknown(s, "sweep", {"variable", "values", "sigmas"});
    if (s.contains("variable")) {
      if (!s["variable"].is_string() || s["variable"] != "k_c")
        throw ConfigError("sweep.variable: only \"k_c\" is supported");
    }
    if (s.contains("values"))
      for (double v : get_numbers(s["values"], "sweep.values")) cfg.sweep.values.push_back(unit * v);
    if (s.contains("sigmas")) cfg.sweep.sigmas = get_numbers(s["sigmas"], "sweep.sigmas");
    for (double sg : cfg.sweep.sigmas)
      if (!(sg > 0.0) || sg > static_cast<double>(cfg.model.sites) / 8.0)
        throw ConfigError("sweep.sigmas: each sigma must satisfy 0 < sigma <= L/8");
  }

  if (j.contains("output")) {
    if (!j["output"].is_string()) throw ConfigError("output: expected a path prefix string");
    cfg.output = j["output"];
  }
  if (j.contains("gauge_twist_seed")) cfg.gauge_twist_seed = get_count(j["gauge_twist_seed"], "gauge_twist_seed");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

void CsvTable::write(std::ostream& os) const {
  os << "# config " << config_echo << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
}

CsvTable run_spectrum(const ExperimentConfig& cfg) {
  const BandScan scan = scan_bands(cfg.model);
  CsvTable t = start_table(cfg, {"k", "re_eps_0", "im_eps_0", "re_eps_1", "im_eps_1"});
  for (std::size_t j = 0; j < scan.sites(); ++j) {
    const cplx e0 = scan.energy(j, 0), e1 = scan.energy(j, 1);
    t.rows.push_back({scan.k[j], e0.real(), e0.imag(), e1.real(), e1.imag()});
  }
  return t;
}

CsvTable run_geometry_scan(const ExperimentConfig& cfg) {
  const BandScan scan = make_scan(cfg);
  std::vector<std::string> header{"k"};
  for (int b = 0; b < 2; ++b)
    for (const char* c : {"re_q_", "im_q_", "re_Q_", "im_Q_", "re_Qsos_", "im_Qsos_"})
      header.push_back(std::string(c) + std::to_string(b));
  CsvTable t = start_table(cfg, header);
  t.rows.resize(scan.sites());
#pragma omp parallel for schedule(static)
  for (long j = 0; j < static_cast<long>(scan.sites()); ++j) {
    std::vector<double> row{scan.k[j]};
    const ComplexMatrix v = scan.model.velocity(scan.k[j]);
    for (std::size_t b = 0; b < 2; ++b) {
      const GeometryPoint p = connections_fd(scan, b, j);
      const cplx qs = connection_difference_sos(scan.systems[j], v, b);
      row.insert(row.end(), {p.qgt.real(), p.qgt.imag(), p.q_conn.real(), p.q_conn.imag(), qs.real(), qs.imag()});
    }
    t.rows[j] = std::move(row);
  }
  return t;
}

CsvTable run_spread(const ExperimentConfig& cfg) {
  const BandScan scan = make_scan(cfg);
  const std::vector<double> ks = sweep_momenta(cfg);
  const std::vector<double> sigmas = sweep_sigmas(cfg, {4.0, 8.0, 16.0, 32.0});
  CsvTable t = start_table(cfg, {"k_c", "sigma", "spread", "geometric_spread", "re_q_kc", "re_q_packet_avg"});
  const std::size_t n = ks.size() * sigmas.size();
  t.rows.resize(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    try {
      const double kc = ks[i / sigmas.size()];
      const double sg = sigmas[i % sigmas.size()];
      const WavePacket p = build_gaussian(scan, cfg.packet.band, kc, sg, cfg.x_center());
      const double spread = position_spread(evolve(p, 0.0), p);
      const double ref = geometry_at(scan, cfg.packet.band, kc).qgt.real();
      t.rows[i] = {kc, sg, spread, spread - 0.25 * sg * sg, ref, metric_packet_average(p)};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return t;
}

CsvTable run_response_trace(const ExperimentConfig& cfg) {
  const BandScan scan = make_scan(cfg);
  const WavePacket p = build_gaussian(scan, cfg.packet.band, cfg.packet.k_c, cfg.packet.sigma, cfg.x_center());
  const ResponseSeries num = response_series(p, cfg.broadening.T, cfg.broadening.dt);
  const FHCoefficients c = fh_coefficients(scan, cfg.packet.band, cfg.packet.k_c);
  CsvTable t = start_table(cfg, {"t", "c_numeric", "c_analytic"});
  for (std::size_t i = 0; i < num.times.size(); ++i)
    t.rows.push_back({num.times[i], num.values[i], response_analytic(c, num.times[i])});
  return t;
}

CsvTable run_integrated(const ExperimentConfig& cfg) {
  const BandScan scan = make_scan(cfg);
  const std::vector<double> ks = sweep_momenta(cfg);
  const std::vector<double> sigmas = cfg.sweep.sigmas.empty() ? std::vector<double>{cfg.packet.sigma} : cfg.sweep.sigmas;
  CsvTable t = start_table(cfg, {"k_c", "sigma", "i_numeric", "i_analytic", "i_from_f", "rel_deviation"});
  for (double kc : ks) {
    const IntegratedAnalytic an = integrated_response_analytic(scan, cfg.packet.band, kc);
    for (double sg : sigmas) {
      const WavePacket p = build_gaussian(scan, cfg.packet.band, kc, sg, cfg.x_center());
      const ResponseSeries s = response_series(p, cfg.broadening.T, cfg.broadening.dt);
      const double num = integrated_response_numeric(s, cfg.broadening);
      const double dev = an.value != 0.0 ? (num - an.value) / std::abs(an.value) : num;
      t.rows.push_back({kc, sg, num, an.value, an.from_f, dev});
    }
  }
  return t;
}

bool ValidationReport::all_pass() const {
  return std::all_of(items.begin(), items.end(), [](const ValidationItem& i) { return i.pass; });
}

json ValidationReport::to_json() const {
  json out;
  out["all_pass"] = all_pass();
  json arr = json::array();
  for (const auto& i : items) {
    json e{{"invariant", i.name}, {"threshold", i.threshold}, {"pass", i.pass}};
    e["residual"] = std::isfinite(i.residual) ? json(i.residual) : json("inf");
    if (!i.note.empty()) e["note"] = i.note;
    arr.push_back(e);
  }
  out["invariants"] = arr;
  return out;
}

ValidationReport run_validate(const ExperimentConfig& cfg) {
  ValidationReport rep;
  auto add = [&](const std::string& name, double residual, double threshold, const std::string& note = "") {
    rep.items.push_back({name, residual, threshold, std::isfinite(residual) && residual <= threshold, note});
  };
  const PTChainModel& model = cfg.model;
  const double inf = std::numeric_limits<double>::infinity();

  {
    double per = 0.0, herm = 0.0, vel = 0.0;
    const double h = 1e-5;
    for (int i = 0; i < 64; ++i) {
      const double k = 2.0 * kPi * i / 64.0 + 0.1;
      per = std::max(per, max_abs(hamiltonian_at(model, k + 2.0 * kPi) - hamiltonian_at(model, k)));
      const ComplexMatrix fd = cplx{1.0 / (2.0 * h), 0.0} * (hamiltonian_at(model, k + h) - hamiltonian_at(model, k - h));
      vel = std::max(vel, max_abs(fd - velocity_at(model, k)));
      const PTChainModel herm_model{0.0, model.sites};
      herm = std::max(herm, max_abs(hamiltonian_at(herm_model, k) - hamiltonian_at(herm_model, k).adjoint()));
    }
    add("model: H(k + 2 pi) = H(k)", per, 1e-12);
    add("model: m = 0 Hamiltonian is Hermitian", herm, 0.0);
    add("model: velocity matches central difference of H", vel, 1e-9);
  }

  {
    const double xs[] = {1.0, -1.0};
    const double ref[] = {1.8951178163559368, -0.21938393439552028};
    double err = 0.0;
    for (int i = 0; i < 2; ++i) err = std::max(err, std::abs(exp_integral_ei(xs[i]) / ref[i] - 1.0));
    add("special: Ei reference values", err, 1e-10);
    bool threw = false;
    try {
      exp_integral_ei(720.0);
    } catch (const std::overflow_error&) {
      threw = true;
    }
    add("special: Ei signals overflow beyond double range", threw ? 0.0 : 1.0, 0.0);
  }

  BandScan scan;
  try {
    scan = make_scan(cfg);
    add("scan: grid free of exceptional points", 0.0, 0.0);
  } catch (const DefectiveMatrix& e) {
    add("scan: grid free of exceptional points", inf, 0.0, e.what());
    return rep;
  }

  const std::size_t l = scan.sites();
  double biorth = 0.0, resid = 0.0, recon = 0.0, gram = 0.0, disp = 0.0, imag = 0.0, adj = 0.0;
  for (std::size_t j = 0; j < l; ++j) {
    const EigenSystem& es = scan.systems[j];
    const ComplexMatrix h = hamiltonian_at(model, scan.k[j]);
    const double hn = h.frobenius_norm();
    biorth = std::max(biorth, (es.left.adjoint() * es.right - ComplexMatrix::identity(2)).frobenius_norm());
    ComplexMatrix d(2, 2);
    for (std::size_t n = 0; n < 2; ++n) {
      d(n, n) = es.energies[n];
      const CVector r = es.right_vector(n);
      const CVector l_vec = es.left_vector(n);
      CVector hr = h * std::span<const cplx>(r);
      CVector hl = h.adjoint() * std::span<const cplx>(l_vec);
      double rr = 0.0, ll = 0.0;
      for (std::size_t a = 0; a < 2; ++a) {
        rr += std::norm(hr[a] - es.energies[n] * r[a]);
        ll += std::norm(hl[a] - std::conj(es.energies[n]) * l_vec[a]);
      }
      resid = std::max(resid, std::sqrt(std::max(rr, ll)) / hn);
      gram = std::max(gram, 1.0 - es.gramian(n, n).real());
      imag = std::max(imag, std::abs(es.energies[n].imag()));
    }
    recon = std::max(recon, (h - es.right * d * es.left.adjoint()).frobenius_norm() / hn);
    const cplx ep = dispersion(model, scan.k[j], 1), em = dispersion(model, scan.k[j], -1);
    disp = std::max(disp, std::min(std::abs(es.energies[0] - em) + std::abs(es.energies[1] - ep),
                                   std::abs(es.energies[0] - ep) + std::abs(es.energies[1] - em)));
    const EigenSystem ea = eig_general(h.adjoint());
    double best = inf;
    for (int perm = 0; perm < 2; ++perm)
      best = std::min(best, std::abs(ea.energies[0] - std::conj(es.energies[perm])) +
                                std::abs(ea.energies[1] - std::conj(es.energies[1 - perm])));
    adj = std::max(adj, best);
  }
  add("linalg: biorthonormality <L_n|R_m> = delta", biorth, 1e-12);
  add("linalg: eigen-equation residual per column", resid, 1e-10);
  add("linalg: reconstruction R diag(E) L^dagger", recon, 1e-10);
  add("linalg: Gramian diagonal >= 1", std::max(gram, 0.0), 1e-12);
  add("linalg: spectrum of H^dagger is the conjugate", adj, 1e-10);
  add("model: eigenvalues follow the dispersion", disp, 1e-10);
  if (model.pt_unbroken()) add("model: spectrum real for |m| <= 1", imag, 1e-10);
  add("model: band tracking closes around the zone", scan.closure_ok ? 0.0 : 1.0, 0.0);

  {
    const ComplexMatrix u1 = evolution_operator(scan.systems[l / 3], 0.7);
    const ComplexMatrix u2 = evolution_operator(scan.systems[l / 3], 1.3);
    const ComplexMatrix u12 = evolution_operator(scan.systems[l / 3], 2.0);
    add("linalg: U(t1) U(t2) = U(t1 + t2)", (u1 * u2 - u12).frobenius_norm(), 1e-10);
  }

  BandScan twisted = scan;
  apply_gauge_twist(twisted, cfg.gauge_twist_seed.value_or(0) + 12345);
  double gauge = 0.0, metric_neg = 0.0, re_q = 0.0, eq2 = 0.0, eq3 = 0.0, sos = 0.0;
  for (std::size_t j = 0; j < l; ++j) {
    const LocalFrame fr = frame_from_scan(scan, j);
    for (std::size_t b = 0; b < 2; ++b) {
      const GeometryPoint p = geometry_from_frame(fr, b);
      const GeometryPoint pt = connections_fd(twisted, b, j);
      gauge = std::max({gauge, std::abs(p.q_conn - pt.q_conn), std::abs(p.qgt - pt.qgt),
                        std::abs(qgt_left_right(fr, b) - qgt_left_right(twisted, b, j))});
      metric_neg = std::max(metric_neg, -p.qgt.real());
      re_q = std::max(re_q, std::abs(p.q_conn.real()));
      const CVector r = fr.center.right_vector(b);
      const CVector lv = fr.center.left_vector(b);
      const CVector dr = fr.d_right.column(b);
      const double inn = inner(r, r).real();
      const cplx ldr = inner(lv, dr);
      const cplx rdr = inner(r, dr);
      CVector proj_rl(2), proj_rr(2);
      for (std::size_t a = 0; a < 2; ++a) {
        proj_rl[a] = dr[a] - r[a] * ldr;
        proj_rr[a] = dr[a] - r[a] * rdr / inn;
      }
      eq2 = std::max(eq2, std::abs(kI * inner(r, proj_rl) / inn - p.q_conn));
      eq3 = std::max(eq3, std::abs(inner(proj_rr, proj_rr) / inn - p.qgt));
      sos = std::max(sos, std::abs(connection_difference_sos(scan.systems[j], scan.model.velocity(scan.k[j]), b) -
                                   p.q_conn));
    }
  }
  const double dk = scan.dk();
  add("geometry: Q, q and q^LR invariant under random gauge twists", gauge, 1e-8);
  add("geometry: Re q >= 0", std::max(metric_neg, 0.0), 1e-12);
  if (model.pt_unbroken()) add("geometry: Re Q = 0 for unbroken PT symmetry", re_q, 1e-8);
  add("geometry: projected differential (1 - P^RL) reproduces Q", eq2, 1e-8);
  add("geometry: projected differential (1 - P^RR) reproduces q", eq3, 1e-8);
  add("geometry: sum-over-states Q agrees with finite differences to O(dk^2)", sos / (dk * dk), 10.0,
      "residual is max|Q_sos - Q_fd| / dk^2");

  double sum_rule = 0.0, im_fh = 0.0;
  for (int i = 0; i < 16; ++i) {
    const double k = 2.0 * kPi * (i + 0.25) / 16.0;
    for (std::size_t b = 0; b < 2; ++b) {
      try {
        const FHCoefficients c = fh_coefficients(scan, b, k);
        sum_rule = std::max(sum_rule, std::abs(c.f_sum() - (c.qgt + 0.5 * kI * c.dq)));
        for (const FHPair& p : c.pairs) im_fh = std::max({im_fh, std::abs(p.f.imag()), std::abs(p.h.imag())});
      } catch (const NumericalError&) {
        sum_rule = inf;
      }
    }
  }
  add("response: sum rule sum f = q + (i/2) dQ/dk", sum_rule, 1e-6);
  if (model.pt_unbroken()) add("response: Im f = Im h = 0 for unbroken PT symmetry", im_fh, 1e-8);

  try {
    const WavePacket p = build_gaussian(scan, cfg.packet.band, cfg.packet.k_c, cfg.packet.sigma, cfg.x_center());
    const WavePacketState s0 = evolve(p, 0.0);
    double total = 0.0;
    for (double r : p.momentum_density()) total += r;
    add("wavepacket: normalization sum |w|^2 I = 1", std::abs(total - 1.0), 1e-12);
    const double x = central_position(s0, p);
    add("wavepacket: initial position at x_c", std::abs(ring_difference(x, cfg.x_center(), static_cast<double>(l))),
        0.05);
    const MomentumMoments mm = momentum_moments(p);
    add("wavepacket: mean momentum at k_c", std::abs(std::remainder(mm.mean - cfg.packet.k_c, 2.0 * kPi)), 1e-3);
    const WavePacket ps = build_gaussian(scan, cfg.packet.band, cfg.packet.k_c, cfg.packet.sigma, cfg.x_center(), 0.5);
    const double shift = ring_difference(central_position(evolve(ps, 0.0), ps), x, static_cast<double>(l));
    add("wavepacket: phase slope d shifts the centre by -d", std::abs(shift + 0.5), 0.01);
    if (model.pt_unbroken()) add("wavepacket: norm conserved for real spectrum", std::abs(evolve(p, 10.0).norm - s0.norm), 1e-10);
    const ResponseProbe probe(p);
    add("response: causality C(t, t') = 0 for t < t'", std::abs(probe(1.0, 2.0)), 0.0);
  } catch (const NumericalError& e) {
    add("wavepacket: packet construction", inf, 0.0, e.what());
  }
  return rep;
}

}  // namespace nhgeo
