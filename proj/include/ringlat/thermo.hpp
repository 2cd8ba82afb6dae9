#pragma once

#include <optional>
#include <span>
#include <vector>

namespace ringlat {

// One-sided PSD of the fractional intensity, 1/Hz on a uniform grid.
struct NoiseSpectrum {
  std::vector<double> f_hz;
  std::vector<double> S;

  double df() const { return f_hz.size() > 1 ? f_hz[1] - f_hz[0] : 0.0; }
  double at(double f) const;  // linear interpolation; throws out of range
};

// Welch estimate: signal divided by its mean and mean-removed, Hann-windowed
// segments with the given overlap fraction, window power compensated.
NoiseSpectrum psd_one_sided(std::span<const double> samples,
                            double sample_rate_hz, std::size_t segment_length,
                            double overlap = 0.5);

struct HeatingRates {
  double gamma_a;               // 1/s
  double gamma_r;               // 1/s
  std::optional<double> tau_h;  // e-fold heating time; empty when unbounded
};

// Parametric heating from intensity noise at twice the trap frequencies,
//   gamma = pi^2 nu^2 S(2 nu),  tau_h = (gamma_a/3 + 2 gamma_r/3)^-1.
HeatingRates heating_rates(double nu_ax_hz, double nu_rad_hz,
                           const NoiseSpectrum& spectrum);
HeatingRates heating_rates_from_values(double nu_ax_hz, double s_at_2nu_ax,
                                       double nu_rad_hz, double s_at_2nu_rad);

struct DecayFit {
  double gamma_bg;      // 1/s
  double q;             // two-body coefficient, 1/(s * population unit)
  double n0;
  double residual_rms;
};

// Least-squares fit of the two-body + background decay closed form,
// log-space grid search refined derivative-free (Nelder-Mead).
DecayFit fit_trap_decay(std::span<const double> t_seconds,
                        std::span<const double> populations);

// Evaporative cooling temperature curve,
//   T(t) = T0 (1 - eps (beta rho0 / 4 gamma)(1 - e^{-gamma t})).
double temperature_evolution(double T0, double epsilon,
                             double beta_rho0_over_gamma, double gamma_bg,
                             double t_seconds);

// Linear least squares over epsilon; T0 is the first sample, the composite
// beta*rho0/gamma comes from the decay fit as q*n0/gamma_bg.
double fit_temperature(std::span<const double> t_seconds,
                       std::span<const double> temperatures,
                       const DecayFit& decay);
double fit_temperature_epsilon(std::span<const double> t_seconds,
                               std::span<const double> temperatures, double T0,
                               double beta_rho0_over_gamma, double gamma_bg);

}  // namespace ringlat
