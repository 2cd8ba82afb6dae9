#pragma once

#include "ringlat/constants.hpp"

namespace ringlat {

// Dimensional cavity and atom constants. Travelling-wave field moduli are in
// photon-number normalization throughout (|alpha|^2 = intra-cavity photon
// number), so hbar*delta0*|alpha|^2 is an energy.
struct PhysicalParams {
  double gamma_c;  // field decay rate, 1/s
  double delta0;   // light shift per photon, 1/s
  double N;        // atom number (dimensionless)
  double omega_c;  // cavity resonance frequency, rad/s
  double delta_c;  // pump-cavity detuning, rad/s
  double k;        // optical wavenumber, 1/m
  double w0;       // 1/e^2 intensity mode radius, m
  double mass;     // kg
  double omega_R;  // recoil frequency hbar k^2 / 2m, rad/s (redundant, checked)

  void validate() const;  // throws std::invalid_argument
};

// 85Rb / D2 preset; every field may be overridden afterwards.
PhysicalParams rb85_params(double gamma_c, double delta0, double N,
                           double w0 = 131.5e-6);

// Empty-cavity steady-state pump split. chi0_plus + chi0_minus == 1 by
// construction; the locked mode is "+".
struct PumpConfig {
  double chi0_plus;
  double chi0_minus;
  double I0;  // total empty-cavity intensity scale, photon numbers

  static PumpConfig from_chi_minus(double chi0_minus, double I0);
  void validate() const;
};

// Dimensionless model parameters of the reduced field dynamics.
struct ScaledParams {
  double UN;       // collective interaction strength N * delta0 / gamma_c
  double eta_ax;   // thermal energy / axial well depth at t = 0
  double eta_rad;  // thermal energy / radial well depth at t = 0
  double a0_mod;   // reference |a(0)| the eta values are anchored to
};

// Measured thermodynamic snapshot of the trapped sample.
struct SampleThermo {
  double xi_ax;    // k_B T_ax / (hbar omega_v_ax)
  double xi_rad;   // k_B T_rad / (hbar omega_v_rad)
  double T_ax;     // K
  double T_rad;    // K
  double omega_V;  // axial vibrational frequency for symmetric pumping
                   // without atoms, rad/s
};

// UN from the dimensional constants; eta values from the measured
// temperatures and the t=0 well depths implied by (pump, a0_mod, omega_V).
ScaledParams scale_params(const PhysicalParams& phys, const PumpConfig& pump,
                          const SampleThermo& thermo, double a0_mod);

struct TrapGeometry {
  double well_depth;  // axial modulation depth 4 hbar |delta0| |a+||a-|, J
  double nu_ax;       // Hz
  double nu_rad;      // Hz
};

// Harmonic trap frequencies of the standing-wave + Gaussian-envelope
// potential. Axial: omega = k sqrt(2 depth / m) at a well bottom. Radial:
// omega = (2/w0) sqrt(V_antinode / m) with V_antinode the on-axis depth at
// the interference maximum, hbar |delta0| (|a+|+|a-|)^2.
TrapGeometry trap_geometry(double alpha_plus_mod, double alpha_minus_mod,
                           const PhysicalParams& phys);

// Total pump intensity I0 that yields the requested axial frequency for
// symmetric pumping without atoms (the omega_V convention inverted).
double pump_intensity_for_axial_freq(double nu_ax_hz,
                                     const PhysicalParams& phys);

}  // namespace ringlat
