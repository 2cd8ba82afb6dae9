#include "ringlat/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include "ringlat/adiabatic.hpp"
#include "ringlat/constants.hpp"
#include "ringlat/fft.hpp"

namespace ringlat {

double NoiseSpectrum::at(double f) const {
  if (f_hz.size() < 2) throw std::out_of_range("NoiseSpectrum::at: empty spectrum");
  if (f < f_hz.front() || f > f_hz.back())
    throw std::out_of_range("NoiseSpectrum::at: frequency outside the grid");
  const double step = df();
  const auto idx = static_cast<std::size_t>((f - f_hz.front()) / step);
  if (idx + 1 >= f_hz.size()) return S.back();
  const double frac = (f - f_hz[idx]) / step;
  return S[idx] * (1.0 - frac) + S[idx + 1] * frac;
}

NoiseSpectrum psd_one_sided(std::span<const double> samples,
                            double sample_rate_hz, std::size_t segment_length,
                            double overlap) {
  const std::size_t n = samples.size();
  if (!is_power_of_two(segment_length) || segment_length < 8)
    throw std::invalid_argument("psd: segment_length must be a power of two >= 8");
  if (!(overlap >= 0.0 && overlap < 1.0))
    throw std::invalid_argument("psd: overlap must be in [0,1)");
  if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("psd: bad sample rate");

  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(n ? n : 1);
  if (mean == 0.0)
    throw std::invalid_argument("psd: zero-mean signal, fractional intensity undefined");

  const auto hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(
             static_cast<double>(segment_length) * (1.0 - overlap))));
  if (n < segment_length + hop)
    throw std::invalid_argument("psd: need at least two segments");
  const std::size_t n_seg = 1 + (n - segment_length) / hop;

  std::vector<double> window(segment_length);
  double w2sum = 0.0;
  for (std::size_t j = 0; j < segment_length; ++j) {
    window[j] = 0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(j) /
                                      static_cast<double>(segment_length - 1)));
    w2sum += window[j] * window[j];
  }

  const std::size_t n_bins = segment_length / 2 + 1;
  std::vector<double> acc(n_bins, 0.0);
  std::vector<std::complex<double>> buf(segment_length);
  for (std::size_t s = 0; s < n_seg; ++s) {
    const std::size_t off = s * hop;
    double seg_mean = 0.0;
    for (std::size_t j = 0; j < segment_length; ++j)
      seg_mean += samples[off + j] / mean - 1.0;
    seg_mean /= static_cast<double>(segment_length);
    for (std::size_t j = 0; j < segment_length; ++j)
      buf[j] = (samples[off + j] / mean - 1.0 - seg_mean) * window[j];
    fft_inplace(buf);
    for (std::size_t k = 0; k < n_bins; ++k) acc[k] += std::norm(buf[k]);
  }

  NoiseSpectrum spec;
  spec.f_hz.resize(n_bins);
  spec.S.resize(n_bins);
  const double norm = 1.0 / (sample_rate_hz * w2sum * static_cast<double>(n_seg));
  for (std::size_t k = 0; k < n_bins; ++k) {
    spec.f_hz[k] = static_cast<double>(k) * sample_rate_hz /
                   static_cast<double>(segment_length);
    const bool interior = k != 0 && k != n_bins - 1;
    spec.S[k] = acc[k] * norm * (interior ? 2.0 : 1.0);
  }
  return spec;
}

HeatingRates heating_rates_from_values(double nu_ax_hz, double s_at_2nu_ax,
                                       double nu_rad_hz, double s_at_2nu_rad) {
  HeatingRates h{};
  h.gamma_a = pi * pi * nu_ax_hz * nu_ax_hz * s_at_2nu_ax;
  h.gamma_r = pi * pi * nu_rad_hz * nu_rad_hz * s_at_2nu_rad;
  const double rate = h.gamma_a / 3.0 + 2.0 * h.gamma_r / 3.0;
  if (rate > 0.0) h.tau_h = 1.0 / rate;
  return h;
}

HeatingRates heating_rates(double nu_ax_hz, double nu_rad_hz,
                           const NoiseSpectrum& spectrum) {
  return heating_rates_from_values(nu_ax_hz, spectrum.at(2.0 * nu_ax_hz),
                                   nu_rad_hz, spectrum.at(2.0 * nu_rad_hz));
}

namespace {

// Nelder-Mead on n parameters; f returns +inf outside the feasible region.
std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> start, double scale,
                                int max_iter) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> simplex(n + 1, start);
  for (std::size_t i = 0; i < n; ++i)
    simplex[i + 1][i] += scale * (std::abs(start[i]) > 1e-300 ? std::abs(start[i]) : 1.0);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

  for (int it = 0; it < max_iter; ++it) {
    std::vector<std::size_t> order(n + 1);
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> f2;
    for (std::size_t i : order) {
      s2.push_back(simplex[i]);
      f2.push_back(fv[i]);
    }
    simplex = std::move(s2);
    fv = std::move(f2);
    if (std::abs(fv[n] - fv[0]) <= 1e-14 * (std::abs(fv[0]) + 1e-300)) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        centroid[j] += simplex[i][j] / static_cast<double>(n);

    const auto blend = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j)
        p[j] = centroid[j] + t * (simplex[n][j] - centroid[j]);
      return p;
    };
    const auto refl = blend(-1.0);
    const double fr = f(refl);
    if (fr < fv[0]) {
      const auto exp_p = blend(-2.0);
      const double fe = f(exp_p);
      if (fe < fr) {
        simplex[n] = exp_p;
        fv[n] = fe;
      } else {
        simplex[n] = refl;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      simplex[n] = refl;
      fv[n] = fr;
    } else {
      const auto con = blend(fr < fv[n] ? -0.5 : 0.5);
      const double fc = f(con);
      if (fc < std::min(fr, fv[n])) {
        simplex[n] = con;
        fv[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j)
            simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
          fv[i] = f(simplex[i]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i <= fv.size() - 1; ++i)
    if (fv[i] < fv[best]) best = i;
  return simplex[best];
}

}  // namespace

DecayFit fit_trap_decay(std::span<const double> t_seconds,
                        std::span<const double> populations) {
  const std::size_t n = t_seconds.size();
  if (n < 4 || populations.size() != n)
    throw std::invalid_argument("fit_trap_decay: need >= 4 (t, N) samples");
  for (double p : populations)
    if (!(p > 0.0)) throw std::invalid_argument("fit_trap_decay: populations must be > 0");

  const double t_span = t_seconds.back() - t_seconds.front();
  if (!(t_span > 0.0)) throw std::invalid_argument("fit_trap_decay: degenerate time axis");

  // shape for (gamma, beta = q*n0) with the amplitude solved linearly
  const auto sse_of = [&](double gamma, double beta, double* n0_out) {
    double num = 0.0, den = 0.0;
    std::vector<double> shape(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = t_seconds[i] - t_seconds.front();
      double s;
      if (beta <= 0.0) {
        s = std::exp(-gamma * t);
      } else if (gamma <= 0.0) {
        s = 1.0 / (1.0 + beta * t);
      } else {
        const double grow = -std::expm1(-gamma * t);
        s = gamma * std::exp(-gamma * t) / (gamma + beta * grow);
      }
      shape[i] = s;
      num += s * populations[i];
      den += s * s;
    }
    const double n0 = den > 0.0 ? num / den : 0.0;
    if (n0_out) *n0_out = n0;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = populations[i] - n0 * shape[i];
      sse += r * r;
    }
    return sse;
  };

  double best_gamma = 1.0 / t_span, best_beta = 0.0;
  double best_sse = sse_of(best_gamma, 0.0, nullptr);
  for (int ig = 0; ig < 25; ++ig) {
    const double gamma =
        std::pow(10.0, -2.0 + 4.0 * static_cast<double>(ig) / 24.0) / t_span;
    for (int ib = -1; ib < 25; ++ib) {
      const double beta =
          ib < 0 ? 0.0
                 : std::pow(10.0, -2.0 + 4.0 * static_cast<double>(ib) / 24.0) / t_span;
      const double sse = sse_of(gamma, beta, nullptr);
      if (sse < best_sse) {
        best_sse = sse;
        best_gamma = gamma;
        best_beta = beta;
      }
    }
  }

  const auto objective = [&](const std::vector<double>& p) {
    if (p[0] < 0.0 || p[1] < 0.0) return 1e300;
    return sse_of(p[0], p[1], nullptr);
  };
  const auto refined =
      nelder_mead(objective, {best_gamma, best_beta}, 0.3, 400);
  if (!std::isfinite(objective(refined)))
    throw std::runtime_error("fit_trap_decay: refinement failed to converge");

  DecayFit fit{};
  fit.gamma_bg = refined[0];
  double n0 = 0.0;
  const double sse = sse_of(refined[0], refined[1], &n0);
  fit.n0 = n0;
  fit.q = n0 > 0.0 ? refined[1] / n0 : 0.0;
  fit.residual_rms = std::sqrt(sse / static_cast<double>(n));
  return fit;
}

double temperature_evolution(double T0, double epsilon,
                             double beta_rho0_over_gamma, double gamma_bg,
                             double t_seconds) {
  if (t_seconds < 0.0) throw std::invalid_argument("temperature_evolution: t < 0");
  const double grow = gamma_bg > 0.0 ? -std::expm1(-gamma_bg * t_seconds)
                                     : 0.0;
  return T0 * (1.0 - epsilon * beta_rho0_over_gamma / 4.0 * grow);
}

double fit_temperature_epsilon(std::span<const double> t_seconds,
                               std::span<const double> temperatures, double T0,
                               double beta_rho0_over_gamma, double gamma_bg) {
  const std::size_t n = t_seconds.size();
  if (n < 3 || temperatures.size() != n)
    throw std::invalid_argument("fit_temperature: need >= 3 (t, T) samples");
  if (!(T0 > 0.0)) throw std::invalid_argument("fit_temperature: T0 must be > 0");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double grow =
        gamma_bg > 0.0 ? -std::expm1(-gamma_bg * t_seconds[i]) : 0.0;
    const double c = beta_rho0_over_gamma / 4.0 * grow;
    num += (T0 - temperatures[i]) * c;
    den += T0 * c * c;
  }
  return den > 0.0 ? num / den : 0.0;
}

double fit_temperature(std::span<const double> t_seconds,
                       std::span<const double> temperatures,
                       const DecayFit& decay) {
  if (temperatures.empty()) throw std::invalid_argument("fit_temperature: empty data");
  const double composite =
      decay.gamma_bg > 0.0 ? decay.q * decay.n0 / decay.gamma_bg : 0.0;
  return fit_temperature_epsilon(t_seconds, temperatures, temperatures[0],
                                 composite, decay.gamma_bg);
}

}  // namespace ringlat
