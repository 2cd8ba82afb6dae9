#include "ringlat/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ringlat/fft.hpp"
#include "ringlat/rng.hpp"

namespace ringlat {

ParticleEnsemble init_ensemble(std::uint64_t seed, std::size_t n_sim,
                               double sigma_z0, double sigma_r0, double T_ax,
                               double T_rad, double mass) {
  if (n_sim == 0) throw std::invalid_argument("init_ensemble: n_sim must be >= 1");
  if (sigma_z0 < 0.0 || sigma_r0 < 0.0 || T_ax < 0.0 || T_rad < 0.0)
    throw std::invalid_argument("init_ensemble: negative spread or temperature");
  Rng rng(seed);
  ParticleEnsemble e;
  for (auto* v : {&e.x, &e.y, &e.z, &e.px, &e.py, &e.pz}) v->resize(n_sim);
  const double sp_ax = std::sqrt(mass * k_boltzmann * T_ax);
  const double sp_rad = std::sqrt(mass * k_boltzmann * T_rad);
  for (std::size_t i = 0; i < n_sim; ++i) {
    e.x[i] = sigma_r0 * rng.normal();
    e.y[i] = sigma_r0 * rng.normal();
    e.z[i] = sigma_z0 * rng.normal();
    e.px[i] = sp_rad * rng.normal();
    e.py[i] = sp_rad * rng.normal();
    e.pz[i] = sp_ax * rng.normal();
  }
  return e;
}

RescalePlan rescale_for_simulation(double n_real, double n_sim,
                                   const PhysicalParams& phys) {
  if (!(n_sim >= 1.0)) throw std::invalid_argument("rescale: n_sim must be >= 1");
  if (!(n_real > 0.0)) throw std::invalid_argument("rescale: n_real must be > 0");
  return {n_real, n_sim, phys.delta0 * n_real / n_sim, n_sim / n_real};
}

void forces(const ParticleEnsemble& e, double alpha_plus_mod,
            std::complex<double> alpha_minus, const PhysicalParams& phys,
            std::span<double> fx, std::span<double> fy, std::span<double> fz) {
  const std::size_t n = e.size();
  if (fx.size() != n || fy.size() != n || fz.size() != n)
    throw std::invalid_argument("forces: output span size mismatch");
  const double hd = hbar * phys.delta0;
  const double ar = alpha_minus.real(), ai = alpha_minus.imag();
  const double base = alpha_plus_mod * alpha_plus_mod + ar * ar + ai * ai;
  const double two_ap = 2.0 * alpha_plus_mod;
  const double inv_w2 = 2.0 / (phys.w0 * phys.w0);
  const double twok = 2.0 * phys.k;
  for (std::size_t i = 0; i < n; ++i) {
    const double env = std::exp(-(e.x[i] * e.x[i] + e.y[i] * e.y[i]) * inv_w2);
    const double c = std::cos(twok * e.z[i]);
    const double s = std::sin(twok * e.z[i]);
    const double intensity = (base + two_ap * (ar * c + ai * s)) * env;
    fz[i] = hd * twok * two_ap * (ai * c - ar * s) * env;
    fx[i] = -hd * 2.0 * inv_w2 * e.x[i] * intensity;
    fy[i] = -hd * 2.0 * inv_w2 * e.y[i] * intensity;
  }
}

std::complex<double> field_rhs(std::complex<double> a,
                               const LocalizationState& loc, double b_plus,
                               double b_minus, double UN) {
  const std::complex<double> i(0.0, 1.0);
  return i * (UN / b_plus) * loc.g * a * a - a -
         i * UN * std::conj(loc.g) * b_plus + b_minus;
}

double ensemble_energy(const ParticleEnsemble& e, double alpha_plus_mod,
                       std::complex<double> alpha_minus,
                       const PhysicalParams& phys) {
  const double ar = alpha_minus.real(), ai = alpha_minus.imag();
  const double base = alpha_plus_mod * alpha_plus_mod + ar * ar + ai * ai;
  const double two_ap = 2.0 * alpha_plus_mod;
  const double inv_w2 = 2.0 / (phys.w0 * phys.w0);
  const double twok = 2.0 * phys.k;
  double total = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double env = std::exp(-(e.x[i] * e.x[i] + e.y[i] * e.y[i]) * inv_w2);
    const double c = std::cos(twok * e.z[i]);
    const double s = std::sin(twok * e.z[i]);
    const double intensity = (base + two_ap * (ar * c + ai * s)) * env;
    const double p2 = e.px[i] * e.px[i] + e.py[i] * e.py[i] + e.pz[i] * e.pz[i];
    total += p2 / (2.0 * phys.mass) - hbar * phys.delta0 * intensity;
  }
  return total;
}

namespace {

// Joint state layout: [x | y | z | px | py | pz | Re a | Im a], length 6N+2.
class FullRhs {
 public:
  FullRhs(std::size_t n, const FullSimParams& p, bool frozen)
      : n_(n), p_(p), frozen_(frozen) {}

  void operator()(double tau, const std::vector<double>& q,
                  std::vector<double>& dq) const {
    const std::size_t n = n_;
    const double* x = q.data();
    const double* y = x + n;
    const double* z = y + n;
    const double* px = z + n;
    const double* py = px + n;
    const double* pz = py + n;
    const std::complex<double> a(q[6 * n], q[6 * n + 1]);

    const double cm = p_.drive.chi0_minus(tau);
    const double i0f = p_.drive.i0_factor(tau);
    const double un = p_.drive.un(tau);
    const double b_plus = std::sqrt((1.0 - cm) * i0f);
    const double b_minus = std::sqrt(cm * i0f);

    const double gamma_c = p_.phys.gamma_c;
    const double inv_mgc = 1.0 / (p_.phys.mass * gamma_c);
    // force scale per unit dimensionless intensity gradient
    const double f0 = hbar * p_.phys.delta0 * p_.I0 / gamma_c;
    const double inv_w2 = 2.0 / (p_.phys.w0 * p_.phys.w0);
    const double twok = 2.0 * p_.phys.k;
    const double ar = a.real(), ai = a.imag();
    const double base = b_plus * b_plus + std::norm(a);
    const double two_bp = 2.0 * b_plus;

    double g_re = 0.0, g_im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dq[i] = px[i] * inv_mgc;
      dq[n + i] = py[i] * inv_mgc;
      dq[2 * n + i] = pz[i] * inv_mgc;
      const double env = std::exp(-(x[i] * x[i] + y[i] * y[i]) * inv_w2);
      const double c = std::cos(twok * z[i]);
      const double s = std::sin(twok * z[i]);
      const double intensity = (base + two_bp * (ar * c + ai * s)) * env;
      dq[3 * n + i] = -f0 * 2.0 * inv_w2 * x[i] * intensity;
      dq[4 * n + i] = -f0 * 2.0 * inv_w2 * y[i] * intensity;
      dq[5 * n + i] = f0 * twok * two_bp * (ai * c - ar * s) * env;
      g_re += env * c;
      g_im -= env * s;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    const std::complex<double> g(g_re * inv_n, g_im * inv_n);
    if (frozen_) {
      dq[6 * n] = 0.0;
      dq[6 * n + 1] = 0.0;
    } else {
      const std::complex<double> da = field_rhs(a, {g, 0.0}, b_plus, b_minus, un);
      dq[6 * n] = da.real();
      dq[6 * n + 1] = da.imag();
    }
  }

  std::complex<double> localization_g(const std::vector<double>& q) const {
    const std::size_t n = n_;
    double g_re = 0.0, g_im = 0.0;
    const double inv_w2 = 2.0 / (p_.phys.w0 * p_.phys.w0);
    const double twok = 2.0 * p_.phys.k;
    for (std::size_t i = 0; i < n; ++i) {
      const double env =
          std::exp(-(q[i] * q[i] + q[n + i] * q[n + i]) * inv_w2);
      g_re += env * std::cos(twok * q[2 * n + i]);
      g_im -= env * std::sin(twok * q[2 * n + i]);
    }
    return {g_re / static_cast<double>(n), g_im / static_cast<double>(n)};
  }

 private:
  std::size_t n_;
  const FullSimParams& p_;
  bool frozen_;
};

}  // namespace

ObservableTrace integrate_full(const ParticleEnsemble& init,
                               std::complex<double> a_init,
                               const FullSimParams& p, double tau0, double tau1,
                               double dt, int output_stride,
                               const FullIntegrateOptions& opt) {
  const std::size_t n = init.size();
  if (n == 0) throw std::invalid_argument("integrate_full: empty ensemble");
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_full: dt must be > 0");
  if (output_stride < 1) throw std::invalid_argument("integrate_full: bad stride");
  p.phys.validate();

  const std::size_t dim = 6 * n + 2;
  std::vector<double> q(dim), k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  std::copy(init.x.begin(), init.x.end(), q.begin());
  std::copy(init.y.begin(), init.y.end(), q.begin() + n);
  std::copy(init.z.begin(), init.z.end(), q.begin() + 2 * n);
  std::copy(init.px.begin(), init.px.end(), q.begin() + 3 * n);
  std::copy(init.py.begin(), init.py.end(), q.begin() + 4 * n);
  std::copy(init.pz.begin(), init.pz.end(), q.begin() + 5 * n);
  q[6 * n] = a_init.real();
  q[6 * n + 1] = a_init.imag();

  const FullRhs rhs(n, p, opt.frozen_field);
  ObservableTrace trace;
  trace.gamma_c = p.phys.gamma_c;
  trace.dt = dt;
  const auto n_steps = static_cast<std::size_t>(std::ceil((tau1 - tau0) / dt - 1e-12));
  trace.rows.reserve(n_steps / static_cast<std::size_t>(output_stride) + 2);

  const auto record = [&](double tau) {
    ObservableRow r{};
    r.tau = tau;
    const std::complex<double> a(q[6 * n], q[6 * n + 1]);
    r.chi_minus = std::norm(a);
    r.phi = std::arg(a);
    double zm = 0.0, z2 = 0.0, r2 = 0.0, pr2 = 0.0, pz2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      zm += q[2 * n + i];
      z2 += q[2 * n + i] * q[2 * n + i];
      r2 += q[i] * q[i] + q[n + i] * q[n + i];
      pr2 += q[3 * n + i] * q[3 * n + i] + q[4 * n + i] * q[4 * n + i];
      pz2 += q[5 * n + i] * q[5 * n + i];
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    zm *= inv_n;
    const double var_z = std::max(0.0, z2 * inv_n - zm * zm);
    r.sigma_z = std::sqrt(var_z);
    r.sigma_r = std::sqrt(0.5 * r2 * inv_n);
    r.g_mod = std::abs(rhs.localization_g(q));
    r.e_kin_ax = 0.5 * pz2 * inv_n / p.phys.mass;
    r.e_kin_rad = 0.5 * pr2 * inv_n / p.phys.mass;
    if (!std::isfinite(r.chi_minus) || !std::isfinite(r.sigma_z) ||
        !std::isfinite(r.e_kin_ax))
      throw std::runtime_error("integrate_full: non-finite state at tau = " +
                               std::to_string(tau));
    trace.rows.push_back(r);
  };

  double tau = tau0;
  record(tau);
  std::size_t step = 0;
  while (tau < tau1 - 1e-12 * std::max(1.0, std::abs(tau1))) {
    const double h = std::min(dt, tau1 - tau);
    rhs(tau, q, k1);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = q[i] + 0.5 * h * k1[i];
    rhs(tau + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = q[i] + 0.5 * h * k2[i];
    rhs(tau + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = q[i] + h * k3[i];
    rhs(tau + h, tmp, k4);
    const double w = h / 6.0;
    for (std::size_t i = 0; i < dim; ++i)
      q[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    tau += h;
    ++step;
    if (step % static_cast<std::size_t>(output_stride) == 0 ||
        tau >= tau1 - 1e-12 * std::max(1.0, std::abs(tau1)))
      record(tau);
  }
  return trace;
}

std::optional<SpectralPeak> breathing_frequency(std::span<const double> values,
                                                double sample_dt_seconds) {
  const std::size_t n = values.size();
  if (n < 32 || !(sample_dt_seconds > 0.0))
    throw std::invalid_argument("breathing_frequency: need >= 32 samples");

  // moving-mean detrend
  const std::size_t w = std::max<std::size_t>(n / 8, 5);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= w / 2 ? i - w / 2 : 0;
    const std::size_t hi = std::min(n, lo + w);
    double m = 0.0;
    for (std::size_t j = lo; j < hi; ++j) m += values[j];
    d[i] = values[i] - m / static_cast<double>(hi - lo);
  }

  // Hann window, zero-pad 4x
  std::size_t n2 = 1;
  while (n2 < n) n2 <<= 1;
  const std::size_t npad = 4 * n2;
  std::vector<std::complex<double>> buf(npad, 0.0);
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double win =
        0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(i) /
                              static_cast<double>(n - 1)));
    buf[i] = d[i] * win;
    wsum += win;
  }
  fft_inplace(buf);

  const double df = 1.0 / (static_cast<double>(npad) * sample_dt_seconds);
  // ignore the detrend-dominated low bins (below ~4 cycles per window)
  const std::size_t k_lo = std::max<std::size_t>(
      1, static_cast<std::size_t>(4.0 * static_cast<double>(npad) /
                                  static_cast<double>(n)));
  const std::size_t k_hi = npad / 2;
  if (k_lo + 2 >= k_hi) return std::nullopt;

  std::vector<double> power(k_hi);
  for (std::size_t k = 0; k < k_hi; ++k) power[k] = std::norm(buf[k]);
  std::size_t peak = k_lo;
  for (std::size_t k = k_lo; k < k_hi; ++k)
    if (power[k] > power[peak]) peak = k;

  std::vector<double> sorted(power.begin() + static_cast<std::ptrdiff_t>(k_lo),
                             power.begin() + static_cast<std::ptrdiff_t>(k_hi));
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                   sorted.end());
  const double median = sorted[sorted.size() / 2];
  if (!(power[peak] > 25.0 * median) || power[peak] <= 0.0) return std::nullopt;

  double shift = 0.0;
  if (peak > 0 && peak + 1 < k_hi && power[peak - 1] > 0.0 && power[peak + 1] > 0.0) {
    const double lm = std::log(power[peak - 1]);
    const double lc = std::log(power[peak]);
    const double lp = std::log(power[peak + 1]);
    const double den = lm - 2.0 * lc + lp;
    if (den < 0.0) shift = 0.5 * (lm - lp) / den;
  }
  SpectralPeak pk{};
  pk.f_peak_hz = (static_cast<double>(peak) + shift) * df;
  pk.amplitude = 2.0 * std::sqrt(power[peak]) / wsum;
  return pk;
}

double cross_phase_at(std::span<const double> a, std::span<const double> b,
                      double sample_dt_seconds, double f_hz) {
  const std::size_t n = std::min(a.size(), b.size());
  if (n < 8) throw std::invalid_argument("cross_phase_at: series too short");
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  std::complex<double> xa(0.0, 0.0), xb(0.0, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double win =
        0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(i) /
                              static_cast<double>(n - 1)));
    const double ph = -2.0 * pi * f_hz * static_cast<double>(i) * sample_dt_seconds;
    const std::complex<double> e(std::cos(ph), std::sin(ph));
    xa += (a[i] - ma) * win * e;
    xb += (b[i] - mb) * win * e;
  }
  return std::arg(xa * std::conj(xb));
}

}  // namespace ringlat
