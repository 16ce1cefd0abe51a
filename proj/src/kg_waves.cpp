#include "relstoch/kg_waves.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "relstoch/errors.hpp"

namespace relstoch {

namespace {

using cplx = std::complex<double>;

constexpr double kNodeRelativeThreshold = 1e-8;

// Complex derivatives of phi up to the order the jet needs.
struct PhiDerivatives {
  cplx value;
  std::array<cplx, 3> grad;
  cplx dt;
  cplx lap;
  cplx dtt;
};

std::string describe_point(const Vec3& x, double t) {
  std::ostringstream os;
  os << "(x=" << x[0] << ", " << x[1] << ", " << x[2] << "; t=" << t << ")";
  return os.str();
}

}  // namespace

void PhysicalConstants::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!ok(hbar) || !ok(mass) || !ok(c))
    throw PreconditionError("physical constants must be finite and strictly positive");
}

double PlaneWaveSpec::energy() const {
  const double mc = constants.mass * constants.c;
  return constants.c * std::sqrt(dot(momentum, momentum) + mc * mc);
}

WaveField make_plane_wave(const Vec3& p, const PhysicalConstants& constants) {
  constants.validate();
  WaveField f;
  f.kind_ = FieldKind::plane_wave;
  f.constants_ = constants;
  f.terms_.push_back(WaveTerm{PlaneWaveSpec{p, constants}, cplx{1.0, 0.0}});
  f.energies_.push_back(f.terms_.front().wave.energy());
  f.node_threshold_ = 0.0;
  return f;
}

WaveField superpose(std::span<const PlaneWaveSpec> waves, std::span<const cplx> weights) {
  if (waves.empty()) throw PreconditionError("superpose: empty wave list");
  if (waves.size() != weights.size())
    throw PreconditionError("superpose: waves and weights differ in length");
  const PhysicalConstants& k = waves.front().constants;
  k.validate();
  WaveField f;
  f.kind_ = FieldKind::superposition;
  f.constants_ = k;
  double weight_scale = 0.0;
  for (std::size_t i = 0; i < waves.size(); ++i) {
    if (!(waves[i].constants == k))
      throw PreconditionError("superpose: waves must share physical constants");
    f.terms_.push_back(WaveTerm{waves[i], weights[i]});
    f.energies_.push_back(waves[i].energy());
    weight_scale += std::abs(weights[i]);
  }
  if (weight_scale == 0.0) throw PreconditionError("superpose: all weights are zero");
  f.node_threshold_ = kNodeRelativeThreshold * weight_scale;
  return f;
}

namespace {

PhiDerivatives phi_derivatives(std::span<const WaveTerm> terms, std::span<const double> energies,
                               const Vec3& x, double t, double hbar) {
  PhiDerivatives d{};
  const cplx i_over_hbar{0.0, 1.0 / hbar};
  for (std::size_t n = 0; n < terms.size(); ++n) {
    const Vec3& p = terms[n].wave.momentum;
    const double p0 = energies[n];
    const double phase = (dot(p, x) - p0 * t) / hbar;
    const cplx e = terms[n].weight * cplx{std::cos(phase), std::sin(phase)};
    d.value += e;
    for (std::size_t a = 0; a < 3; ++a) d.grad[a] += i_over_hbar * p[a] * e;
    d.dt += -i_over_hbar * p0 * e;
    d.lap += -(dot(p, p) / (hbar * hbar)) * e;
    d.dtt += -(p0 * p0 / (hbar * hbar)) * e;
  }
  return d;
}

}  // namespace

std::complex<double> WaveField::phi(const Vec3& x, double t) const {
  return phi_derivatives(terms_, energies_, x, t, constants_.hbar).value;
}

std::complex<double> WaveField::klein_gordon_residual(const Vec3& x, double t) const {
  const double hbar = constants_.hbar;
  const double mc = constants_.mass * constants_.c;
  const double c2 = constants_.c * constants_.c;
  const double k2 = mc * mc / (hbar * hbar);
  if (kind_ == FieldKind::plane_wave) {
    const Vec3& p = terms_.front().wave.momentum;
    const double p0 = energies_.front();
    // (p0/c)^2 - (p.p + m^2c^2) as a factored difference of squares, exactly
    // zero when p0 comes from the same square root.
    const double root = std::sqrt(dot(p, p) + mc * mc);
    const double e = p0 / constants_.c;
    const double symbol = (e - root) * (e + root) / (hbar * hbar);
    return symbol * phi(x, t);
  }
  const PhiDerivatives d = phi_derivatives(terms_, energies_, x, t, hbar);
  return d.lap - d.dtt / c2 - k2 * d.value;
}

FieldJet WaveField::evaluate(const Vec3& x, double t) const {
  const double hbar = constants_.hbar;
  FieldJet jet;
  if (kind_ == FieldKind::plane_wave) {
    const Vec3& p = terms_.front().wave.momentum;
    const double p0 = energies_.front();
    jet.S = dot(p, x) - p0 * t;
    jet.R = 0.0;
    jet.phi = std::polar(1.0, jet.S / hbar);
    jet.grad_S = p;
    jet.dt_S = -p0;
    return jet;
  }

  const PhiDerivatives d = phi_derivatives(terms_, energies_, x, t, hbar);
  const double modulus = std::abs(d.value);
  if (!(modulus > node_threshold_))
    throw SingularNode("phase undefined at node of phi " + describe_point(x, t));

  // Log-derivatives of phi: d(log phi) = dR + (i/hbar) dS.
  std::array<cplx, 3> g{};
  cplx lap_log = d.lap / d.value;
  for (std::size_t a = 0; a < 3; ++a) {
    g[a] = d.grad[a] / d.value;
    lap_log -= g[a] * g[a];
  }
  const cplx gt = d.dt / d.value;
  const cplx dtt_log = d.dtt / d.value - gt * gt;

  jet.phi = d.value;
  jet.R = std::log(modulus);
  jet.S = hbar * std::arg(d.value);
  for (std::size_t a = 0; a < 3; ++a) {
    jet.grad_R[a] = g[a].real();
    jet.grad_S[a] = hbar * g[a].imag();
  }
  jet.dt_R = gt.real();
  jet.dt_S = hbar * gt.imag();
  jet.lap_R = lap_log.real();
  jet.lap_S = hbar * lap_log.imag();
  jet.dtt_R = dtt_log.real();
  jet.dtt_S = hbar * dtt_log.imag();
  return jet;
}

DensityCurrent rho_and_current(const FieldJet& jet, const PhysicalConstants& k) {
  const double mod2 = jet.modulus_sq();
  return DensityCurrent{mod2 * (-jet.dt_S) / (k.mass * k.c * k.c), mod2 * jet.grad_S / k.mass};
}

DensityCurrent rho_and_current(const WaveField& field, const Vec3& x, double t) {
  return rho_and_current(field.evaluate(x, t), field.constants());
}

AdmissibilityReport check_admissibility(const WaveField& field, const SpaceTimeGrid& grid,
                                        double tol) {
  if (grid.size() == 0) throw PreconditionError("check_admissibility: empty grid");
  if (!(tol >= 0.0)) throw PreconditionError("check_admissibility: tol must be >= 0");

  const PhysicalConstants& k = field.constants();
  const double mc = k.mass * k.c;
  const double kg_scale = mc * mc / (k.hbar * k.hbar);

  AdmissibilityReport rep;
  rep.rho_min = std::numeric_limits<double>::infinity();
  grid.for_each([&](const Vec3& x, double t) {
    const FieldJet jet = field.evaluate(x, t);
    const double root = std::sqrt(mc * mc + dot(jet.grad_S, jet.grad_S));
    const double z0 = jet.dt_S + k.c * root;
    rep.z0_residual_max = std::max(rep.z0_residual_max, std::abs(z0));

    const double mod = std::abs(jet.phi);
    const double kg = std::abs(field.klein_gordon_residual(x, t)) / (mod * kg_scale);
    rep.kg_residual_max = std::max(rep.kg_residual_max, kg);

    const DensityCurrent rj = rho_and_current(jet, k);
    rep.rho_min = std::min(rep.rho_min, rj.rho);

    // j.j - c^2 rho^2 + c^2|phi|^4 = (|phi|^4/m^2)(A - (dS/dt)^2/c^2) with
    // A = m^2c^2 + |grad S|^2; the difference of squares is factored so that
    // exact closed forms give an exact zero.
    const double abs_dt = std::abs(jet.dt_S) / k.c;
    const double factor = (k.c * root - std::abs(jet.dt_S)) / k.c * (root + abs_dt);
    const double mod2 = mod * mod;
    const double jid = mod2 * mod2 / (k.mass * k.mass) * factor;
    rep.j_identity_residual_max = std::max(rep.j_identity_residual_max, std::abs(jid));
    ++rep.nodes;
  });
  rep.admissible = rep.z0_residual_max <= tol && rep.rho_min >= -tol &&
                   rep.j_identity_residual_max <= tol;
  return rep;
}

}  // namespace relstoch
