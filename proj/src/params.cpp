#include "ringlat/params.hpp"

#include <cmath>
#include <stdexcept>

namespace ringlat {

void PhysicalParams::validate() const {
  if (!(gamma_c > 0.0)) throw std::invalid_argument("gamma_c must be > 0");
  if (!(w0 > 0.0)) throw std::invalid_argument("w0 must be > 0");
  if (!(k > 0.0)) throw std::invalid_argument("k must be > 0");
  if (!(mass > 0.0)) throw std::invalid_argument("mass must be > 0");
  if (!(N >= 0.0)) throw std::invalid_argument("N must be >= 0");
  const double expected = hbar * k * k / (2.0 * mass);
  if (std::abs(omega_R - expected) > 1e-12 * expected)
    throw std::invalid_argument("omega_R inconsistent with hbar k^2 / 2m");
}

PhysicalParams rb85_params(double gamma_c, double delta0, double N, double w0) {
  PhysicalParams p{};
  p.gamma_c = gamma_c;
  p.delta0 = delta0;
  p.N = N;
  p.k = 2.0 * pi / rb85::lambda_d2;
  p.omega_c = 2.0 * pi * speed_of_light / rb85::lambda_d2;
  p.delta_c = 0.0;
  p.w0 = w0;
  p.mass = rb85::mass;
  p.omega_R = hbar * p.k * p.k / (2.0 * p.mass);
  return p;
}

PumpConfig PumpConfig::from_chi_minus(double chi0_minus, double I0) {
  PumpConfig c{1.0 - chi0_minus, chi0_minus, I0};
  c.validate();
  return c;
}

void PumpConfig::validate() const {
  if (!(chi0_minus >= 0.0 && chi0_minus <= 1.0))
    throw std::invalid_argument("chi0_minus must be in [0,1]");
  if (!(chi0_plus >= 0.0 && chi0_plus <= 1.0))
    throw std::invalid_argument("chi0_plus must be in [0,1]");
  if (std::abs(chi0_plus + chi0_minus - 1.0) > 1e-12)
    throw std::invalid_argument("chi0_plus + chi0_minus must equal 1");
  if (!(I0 >= 0.0)) throw std::invalid_argument("I0 must be >= 0");
}

ScaledParams scale_params(const PhysicalParams& phys, const PumpConfig& pump,
                          const SampleThermo& thermo, double a0_mod) {
  phys.validate();
  pump.validate();
  ScaledParams sp{};
  sp.UN = phys.N * phys.delta0 / phys.gamma_c;
  sp.a0_mod = a0_mod;

  // Well depths at t = 0 relative to the symmetric-pumping no-atom depth
  // V_sym = m omega_V^2 / (2 k^2):
  //   axial modulation depth  V0_ax  = 2 sqrt(chi0+) a0 * V_sym
  //   radial (antinode) depth V0_rad = (sqrt(chi0+) + a0)^2 / 2 * V_sym
  if (thermo.omega_V > 0.0 && a0_mod > 0.0) {
    const double v_sym =
        phys.mass * thermo.omega_V * thermo.omega_V / (2.0 * phys.k * phys.k);
    const double sq_cp = std::sqrt(pump.chi0_plus);
    const double v_ax = 2.0 * sq_cp * a0_mod * v_sym;
    const double v_rad = (sq_cp + a0_mod) * (sq_cp + a0_mod) * 0.5 * v_sym;
    sp.eta_ax = k_boltzmann * thermo.T_ax / v_ax;
    sp.eta_rad = k_boltzmann * thermo.T_rad / v_rad;
  } else {
    sp.eta_ax = 0.0;
    sp.eta_rad = 0.0;
  }
  return sp;
}

TrapGeometry trap_geometry(double alpha_plus_mod, double alpha_minus_mod,
                           const PhysicalParams& phys) {
  const double d0 = std::abs(phys.delta0);
  TrapGeometry g{};
  g.well_depth = 4.0 * hbar * d0 * alpha_plus_mod * alpha_minus_mod;
  const double sum = alpha_plus_mod + alpha_minus_mod;
  const double v_antinode = hbar * d0 * sum * sum;
  g.nu_ax = phys.k * std::sqrt(2.0 * g.well_depth / phys.mass) / (2.0 * pi);
  g.nu_rad = (2.0 / phys.w0) * std::sqrt(v_antinode / phys.mass) / (2.0 * pi);
  return g;
}

double pump_intensity_for_axial_freq(double nu_ax_hz,
                                     const PhysicalParams& phys) {
  // symmetric pumping: depth = 2 hbar delta0 I0, omega = k sqrt(2 depth / m)
  const double omega = 2.0 * pi * nu_ax_hz;
  return phys.mass * omega * omega /
         (4.0 * hbar * std::abs(phys.delta0) * phys.k * phys.k);
}

}  // namespace ringlat
