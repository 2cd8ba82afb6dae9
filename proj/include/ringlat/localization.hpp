#pragma once

#include <complex>
#include <span>

#include "ringlat/params.hpp"

namespace ringlat {

// Atom-field overlap of the ensemble with the cavity standing wave.
// |g| = 1 means perfect Lamb-Dicke localization, 0 a homogeneous sample.
struct LocalizationState {
  std::complex<double> g;  // (1/N) sum exp(-i 2 k z - 2 r^2 / w0^2)
  double g_r;              // (1/N) sum exp(-2 r^2 / w0^2)
};

struct GaussianMoments {
  double sigma_z;  // axial rms spread, m
  double sigma_r;  // radial rms spread per transverse axis, m
  double z_cm;     // axial center of mass, m
};

// Composite coefficients of the phase-parameterized localization factor:
//   ax_knob  = xi_ax  * omega_R / omega_V
//   rad_knob = 8 xi_rad * omega_R / (k w0 omega_V)
struct LocalizationKnobs {
  double ax_knob;
  double rad_knob;
};

LocalizationState discrete_localization(std::span<const double> x,
                                        std::span<const double> y,
                                        std::span<const double> z, double k,
                                        double w0);

LocalizationState gaussian_localization(const GaussianMoments& m, double k,
                                        double w0);

// Adiabatic localization factor L(a): the Gaussian |g| of a thermal sample
// that tracks the instantaneous well depth with fixed eta ratios,
//   L = exp(-eta_ax sqrt(a0/|a|)) / (1 + eta_rad (sqrt(chi0+)+a0)/(sqrt(chi0+)+|a|)).
double adiabatic_L(double a_mod, const ScaledParams& sp, double chi0_plus);

// Same factor parameterized by phase, |a| = sqrt(chi0-) cos(phi).
// Requires |phi| < pi/2.
double ltilde(double phi, const LocalizationKnobs& knobs, double chi0_plus,
              double chi0_minus);

// Bridge between the two parameterizations: matching L(a) and Ltilde(phi)
// under |a| = sqrt(chi0-) cos(phi) gives
//   ax_knob  = eta_ax  sqrt(a0 sqrt(chi0+) / 8)
//   rad_knob = eta_rad (sqrt(chi0+) + a0)
LocalizationKnobs knobs_from_eta(const ScaledParams& sp, double chi0_plus);

// Generalization used by the integrator when the pump power is stepped:
// b_plus is the instantaneous scaled locked-mode modulus, b_plus_ref its
// value at the eta reference time. Reduces to adiabatic_L for
// b_plus == b_plus_ref.
double localization_factor(double a_mod, double b_plus, double b_plus_ref,
                           double eta_ax, double eta_rad, double a0_mod);

// Diagnostics of sec. "mode splitting": frequency shifts of the two cavity
// eigenmodes, N delta0 (1 +- |g|). UN_dimensional = N * delta0, 1/s.
struct ModeShifts {
  double shift_lattice;  // lattice-supporting eigenmode
  double shift_empty;    // uncoupled eigenmode
};
ModeShifts mode_splitting(double UN_dimensional, double g_mod);

// First-scattering-order refractive indices of the travelling waves,
// n(+/-) = 1 + N (delta0/omega_c) (1 + |g| |alpha(-/+)| / |alpha(+/-)|).
struct RefractiveIndices {
  double n_plus;
  double n_minus;
};
RefractiveIndices refractive_indices(double N, double delta0, double omega_c,
                                     double g_mod, double alpha_plus_mod,
                                     double alpha_minus_mod);

}  // namespace ringlat
