#include "ringlat/localization.hpp"

#include <cmath>
#include <stdexcept>

namespace ringlat {

LocalizationState discrete_localization(std::span<const double> x,
                                        std::span<const double> y,
                                        std::span<const double> z, double k,
                                        double w0) {
  const std::size_t n = z.size();
  if (n == 0) throw std::invalid_argument("discrete_localization: empty ensemble");
  if (x.size() != n || y.size() != n)
    throw std::invalid_argument("discrete_localization: mismatched coordinate arrays");
  double re = 0.0, im = 0.0, gr = 0.0;
  const double inv_w2 = 2.0 / (w0 * w0);
  for (std::size_t i = 0; i < n; ++i) {
    const double env = std::exp(-(x[i] * x[i] + y[i] * y[i]) * inv_w2);
    const double ph = 2.0 * k * z[i];
    re += env * std::cos(ph);
    im -= env * std::sin(ph);
    gr += env;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  return {std::complex<double>(re * inv_n, im * inv_n), gr * inv_n};
}

LocalizationState gaussian_localization(const GaussianMoments& m, double k,
                                        double w0) {
  const double gr = 1.0 / (1.0 + 4.0 * m.sigma_r * m.sigma_r / (w0 * w0));
  const double mod = gr * std::exp(-2.0 * k * k * m.sigma_z * m.sigma_z);
  const double ph = -2.0 * k * m.z_cm;
  return {std::polar(mod, ph), gr};
}

double localization_factor(double a_mod, double b_plus, double b_plus_ref,
                           double eta_ax, double eta_rad, double a0_mod) {
  // axial: exp(-eta_ax sqrt(depth_ref/depth)), depth ~ b_plus |a|
  // radial: 1/(1 + eta_rad (b_ref + a0)/(b + |a|)), depth ~ (b_plus + |a|)^2
  const double ax =
      std::exp(-eta_ax * std::sqrt(b_plus_ref * a0_mod / (b_plus * a_mod)));
  const double rad =
      1.0 + eta_rad * (b_plus_ref + a0_mod) / (b_plus + a_mod);
  return ax / rad;
}

double adiabatic_L(double a_mod, const ScaledParams& sp, double chi0_plus) {
  if (!(a_mod > 0.0))
    throw std::invalid_argument("adiabatic_L: singular at a_mod <= 0");
  const double b = std::sqrt(chi0_plus);
  return localization_factor(a_mod, b, b, sp.eta_ax, sp.eta_rad, sp.a0_mod);
}

double ltilde(double phi, const LocalizationKnobs& knobs, double chi0_plus,
              double chi0_minus) {
  const double c = std::cos(phi);
  if (!(std::abs(phi) < pi / 2.0) || !(c > 0.0))
    throw std::domain_error("ltilde: requires |phi| < pi/2");
  const double ax = std::exp(
      -knobs.ax_knob * std::sqrt(8.0 / (std::sqrt(chi0_plus * chi0_minus) * c)));
  const double rad =
      1.0 + knobs.rad_knob / (std::sqrt(chi0_plus) + std::sqrt(chi0_minus) * c);
  return ax / rad;
}

LocalizationKnobs knobs_from_eta(const ScaledParams& sp, double chi0_plus) {
  const double b = std::sqrt(chi0_plus);
  return {sp.eta_ax * std::sqrt(sp.a0_mod * b / 8.0),
          sp.eta_rad * (b + sp.a0_mod)};
}

ModeShifts mode_splitting(double UN_dimensional, double g_mod) {
  return {UN_dimensional * (1.0 + g_mod), UN_dimensional * (1.0 - g_mod)};
}

RefractiveIndices refractive_indices(double N, double delta0, double omega_c,
                                     double g_mod, double alpha_plus_mod,
                                     double alpha_minus_mod) {
  if (!(alpha_plus_mod > 0.0) || !(alpha_minus_mod > 0.0))
    throw std::invalid_argument("refractive_indices: zero field modulus");
  const double scale = N * delta0 / omega_c;
  return {1.0 + scale * (1.0 + g_mod * alpha_minus_mod / alpha_plus_mod),
          1.0 + scale * (1.0 + g_mod * alpha_plus_mod / alpha_minus_mod)};
}

}  // namespace ringlat
