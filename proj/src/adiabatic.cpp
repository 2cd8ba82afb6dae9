#include "ringlat/adiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ringlat {

double PiecewiseConstant::operator()(double tau) const {
  std::size_t i = 0;
  while (i < knots.size() && tau >= knots[i]) ++i;
  return values[i];
}

std::vector<double> DriveSchedule::events() const {
  std::vector<double> ev(chi0_minus.knots);
  ev.insert(ev.end(), i0_factor.knots.begin(), i0_factor.knots.end());
  std::sort(ev.begin(), ev.end());
  ev.erase(std::unique(ev.begin(), ev.end()), ev.end());
  return ev;
}

void DriveSchedule::validate_at(double tau) const {
  const double cm = chi0_minus(tau);
  if (!(cm >= 0.0 && cm <= 1.0))
    throw std::invalid_argument("DriveSchedule: chi0_minus out of [0,1]");
  if (!(i0_factor(tau) >= 0.0))
    throw std::invalid_argument("DriveSchedule: i0_factor < 0");
  if (!(un(tau) >= 0.0)) throw std::invalid_argument("DriveSchedule: UN < 0");
}

DriveValues sample_drive(const DriveSchedule& s, double tau) {
  const double cm = s.chi0_minus(tau);
  return {1.0 - cm, cm, s.i0_factor(tau), s.un(tau)};
}

namespace {

struct ClampedField {
  double a_mod;
  std::complex<double> ahat;
};

ClampedField clamp_field(std::complex<double> a, double a_min, bool* clamped) {
  double am = std::abs(a);
  if (am < a_min) {
    if (clamped) *clamped = true;
    return {a_min, am > 0.0 ? a / am : std::complex<double>(1.0, 0.0)};
  }
  return {am, a / am};
}

}  // namespace

std::complex<double> rhs_complex(std::complex<double> a, const DriveValues& d,
                                 const ScaledParams& sp, double a_min,
                                 bool* clamped) {
  const ClampedField cf = clamp_field(a, a_min, clamped);
  const double bp = std::sqrt(d.chi0_plus * d.i0_factor);
  const double bm = std::sqrt(d.chi0_minus * d.i0_factor);
  const double bp_ref = std::sqrt(d.chi0_plus);
  const double L = localization_factor(cf.a_mod, bp, bp_ref, sp.eta_ax,
                                       sp.eta_rad, sp.a0_mod);
  const std::complex<double> i(0.0, 1.0);
  return i * (d.UN / bp) * L * cf.a_mod * a - a + bm -
         i * d.UN * bp * L * cf.ahat;
}

PhaseAmpRates rhs_phase_amplitude(double a_mod, double phi,
                                  const DriveValues& d, const ScaledParams& sp,
                                  double a_min, bool* clamped) {
  double am = a_mod;
  if (am < a_min) {
    if (clamped) *clamped = true;
    am = a_min;
  }
  const double bp = std::sqrt(d.chi0_plus * d.i0_factor);
  const double bm = std::sqrt(d.chi0_minus * d.i0_factor);
  const double bp_ref = std::sqrt(d.chi0_plus);
  const double L =
      localization_factor(am, bp, bp_ref, sp.eta_ax, sp.eta_rad, sp.a0_mod);
  PhaseAmpRates r{};
  r.da_mod = bm * std::cos(phi) - a_mod;
  r.dphi = (d.UN * L * (am * am / bp - bp) - bm * std::sin(phi)) / am;
  return r;
}

double rhs_eliminated(double phi, const LocalizationKnobs& knobs,
                      double chi0_plus, double chi0_minus, double UN) {
  const double c = std::cos(phi);
  if (!(std::abs(phi) < pi / 2.0) || !(c > 0.0))
    throw std::domain_error("rhs_eliminated: requires |phi| < pi/2");
  const double lt = ltilde(phi, knobs, chi0_plus, chi0_minus);
  return UN / std::sqrt(chi0_plus * chi0_minus) * lt *
             (chi0_minus * c - chi0_plus / c) -
         std::tan(phi);
}

double rhs_eliminated_dphi(double phi, const LocalizationKnobs& knobs,
                           double chi0_plus, double chi0_minus, double UN) {
  const double c = std::cos(phi);
  if (!(std::abs(phi) < pi / 2.0) || !(c > 0.0))
    throw std::domain_error("rhs_eliminated_dphi: requires |phi| < pi/2");
  const double s = std::sin(phi);
  const double scp = std::sqrt(chi0_plus);
  const double scm = std::sqrt(chi0_minus);
  const double A = UN / (scp * scm);
  const double kappa = knobs.ax_knob * std::sqrt(8.0 / (scp * scm));
  const double E = std::exp(-kappa / std::sqrt(c));
  const double dE = -E * kappa * s / (2.0 * c * std::sqrt(c));
  const double D = scp + scm * c;
  const double R = D / (D + knobs.rad_knob);
  const double dR = -knobs.rad_knob * scm * s / ((D + knobs.rad_knob) * (D + knobs.rad_knob));
  const double P = chi0_minus * c - chi0_plus / c;
  const double dP = -s * (chi0_minus + chi0_plus / (c * c));
  return A * (dE * R * P + E * dR * P + E * R * dP) - 1.0 / (c * c);
}

AtomNumberDecay atom_number_schedule(double n0, double gamma_bg, double q) {
  if (!(n0 > 0.0)) throw std::invalid_argument("atom_number_schedule: N0 <= 0");
  if (gamma_bg < 0.0 || q < 0.0)
    throw std::invalid_argument("atom_number_schedule: negative rate");
  return {n0, gamma_bg, q};
}

double AtomNumberDecay::operator()(double t) const {
  if (q == 0.0) return n0 * std::exp(-gamma_bg * t);
  if (gamma_bg == 0.0) return n0 / (1.0 + q * n0 * t);
  const double grow = -std::expm1(-gamma_bg * t);  // 1 - exp(-gamma t)
  return gamma_bg * n0 * std::exp(-gamma_bg * t) / (gamma_bg + q * n0 * grow);
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640,
                 e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

// Generic vector DP5 driver with optional per-accepted-step callback.
class Dp5 {
 public:
  Dp5(std::size_t n, double rtol, double atol) : n_(n), rtol_(rtol), atol_(atol) {
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &y5_})
      v->resize(n);
  }

  // Integrates y over [t0, t1]. Returns false on step underflow.
  template <typename Rhs>
  bool run(const Rhs& rhs, std::vector<double>& y, double t0, double t1,
           double max_step, bool fixed_step) {
    double t = t0;
    if (!(h_ > 0.0)) h_ = std::min(1e-2, t1 - t0);
    while (t < t1) {
      double h = std::min({h_, t1 - t, max_step});
      if (fixed_step) h = std::min(max_step, t1 - t);
      if (h < 1e-14 * std::max(1.0, std::abs(t))) return false;
      rhs(t, y, k1_);
      stage(y, h, {a21}, {&k1_}, tmp_);
      rhs(t + c2 * h, tmp_, k2_);
      stage(y, h, {a31, a32}, {&k1_, &k2_}, tmp_);
      rhs(t + c3 * h, tmp_, k3_);
      stage(y, h, {a41, a42, a43}, {&k1_, &k2_, &k3_}, tmp_);
      rhs(t + c4 * h, tmp_, k4_);
      stage(y, h, {a51, a52, a53, a54}, {&k1_, &k2_, &k3_, &k4_}, tmp_);
      rhs(t + c5 * h, tmp_, k5_);
      stage(y, h, {a61, a62, a63, a64, a65}, {&k1_, &k2_, &k3_, &k4_, &k5_}, tmp_);
      rhs(t + h, tmp_, k6_);
      for (std::size_t i = 0; i < n_; ++i)
        y5_[i] = y[i] + h * (b1 * k1_[i] + b3 * k3_[i] + b4 * k4_[i] +
                             b5 * k5_[i] + b6 * k6_[i]);
      rhs(t + h, y5_, k7_);
      double err = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        const double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] +
                              e5 * k5_[i] + e6 * k6_[i] + e7 * k7_[i]);
        const double sc = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(y5_[i]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / static_cast<double>(n_));
      if (fixed_step || err <= 1.0) {
        t += h;
        y.swap(y5_);
        if (!fixed_step) {
          const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
          h_ = h * fac;
        }
      } else {
        h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9);
      }
    }
    return true;
  }

 private:
  static void stage(const std::vector<double>& y, double h,
                    std::initializer_list<double> coef,
                    std::initializer_list<const std::vector<double>*> ks,
                    std::vector<double>& out) {
    out = y;
    auto c = coef.begin();
    for (const auto* k : ks) {
      for (std::size_t i = 0; i < y.size(); ++i) out[i] += h * (*c) * (*k)[i];
      ++c;
    }
  }

  std::size_t n_;
  double rtol_, atol_;
  double h_ = 0.0;
  std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y5_;
};

}  // namespace

FieldTrace integrate(FieldState init, const DriveSchedule& drive,
                     const ScaledParams& sp, double tau0, double tau1,
                     double out_stride, const IntegratorOptions& opt) {
  if (!std::isfinite(tau0) || !std::isfinite(tau1) || !(tau1 > tau0))
    throw std::invalid_argument("integrate: tau span must be finite and increasing");
  if (!(out_stride > 0.0)) throw std::invalid_argument("integrate: out_stride must be > 0");
  drive.validate_at(tau0);

  // checkpoints: uniform output grid, schedule events, final time
  std::vector<double> grid;
  const auto n_out = static_cast<std::size_t>((tau1 - tau0) / out_stride + 1e-9);
  grid.reserve(n_out + 1);
  for (std::size_t m = 1; m <= n_out; ++m) grid.push_back(tau0 + static_cast<double>(m) * out_stride);
  if (grid.empty() || grid.back() < tau1 - 1e-12 * std::max(1.0, std::abs(tau1)))
    grid.push_back(tau1);

  std::vector<double> checks = grid;
  for (double ev : drive.events())
    if (ev > tau0 && ev < tau1) checks.push_back(ev);
  std::sort(checks.begin(), checks.end());
  checks.erase(std::unique(checks.begin(), checks.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               checks.end());

  FieldTrace trace;
  trace.rows.reserve(grid.size() + 1);
  bool floor_hit = false;

  const auto emit = [&](double tau, std::complex<double> a, unsigned extra) {
    const DriveValues d = sample_drive(drive, tau);
    const ClampedField cf = clamp_field(a, opt.a_min, nullptr);
    const double bp = std::sqrt(d.chi0_plus * d.i0_factor);
    const double L = localization_factor(cf.a_mod, bp, std::sqrt(d.chi0_plus),
                                         sp.eta_ax, sp.eta_rad, sp.a0_mod);
    unsigned flags = extra;
    if (floor_hit) flags |= kFlagSingularFloor;
    floor_hit = false;
    trace.rows.push_back({tau, std::norm(a), std::arg(a), d.UN, L, flags});
  };

  std::vector<double> y{init.a.real(), init.a.imag()};
  emit(tau0, init.a, 0);

  Dp5 stepper(2, opt.rtol, opt.atol);
  double t = tau0;
  std::size_t next_grid = 0;
  for (double c : checks) {
    // piecewise drive parts are constant inside (t, c); freeze at midpoint
    const double mid = 0.5 * (t + c);
    const double cm = drive.chi0_minus(mid);
    const double i0f = drive.i0_factor(mid);
    const auto rhs = [&](double tt, const std::vector<double>& yy,
                         std::vector<double>& dy) {
      const DriveValues d{1.0 - cm, cm, i0f, drive.un(tt)};
      const std::complex<double> da = rhs_complex(
          std::complex<double>(yy[0], yy[1]), d, sp, opt.a_min, &floor_hit);
      dy[0] = da.real();
      dy[1] = da.imag();
    };
    const bool ok = stepper.run(rhs, y, t, c, opt.max_step, opt.fixed_step);
    t = c;
    const std::complex<double> a(y[0], y[1]);
    if (!ok) {
      emit(t, a, kFlagStepUnderflow);
      return trace;
    }
    while (next_grid < grid.size() && std::abs(grid[next_grid] - c) < 1e-12) {
      emit(c, a, 0);
      ++next_grid;
    }
  }
  return trace;
}

std::vector<double> integrate_ode(const OdeRhs& rhs, std::vector<double> y0,
                                  double t0, double t1, double rtol,
                                  double atol) {
  if (!(t1 > t0)) throw std::invalid_argument("integrate_ode: t1 must exceed t0");
  Dp5 stepper(y0.size(), rtol, atol);
  const auto wrapped = [&](double t, const std::vector<double>& y,
                           std::vector<double>& dy) { rhs(t, y, dy); };
  if (!stepper.run(wrapped, y0, t0, t1, 1e30, false))
    throw std::runtime_error("integrate_ode: step size underflow");
  return y0;
}

void integrate_ode_sampled(const OdeRhs& rhs, std::vector<double> y0, double t0,
                           double t1, double stride, const OdeObserver& observer,
                           double rtol, double atol) {
  if (!(t1 > t0)) throw std::invalid_argument("integrate_ode_sampled: bad span");
  if (!(stride > 0.0)) throw std::invalid_argument("integrate_ode_sampled: bad stride");
  Dp5 stepper(y0.size(), rtol, atol);
  const auto wrapped = [&](double t, const std::vector<double>& y,
                           std::vector<double>& dy) { rhs(t, y, dy); };
  observer(t0, y0);
  double t = t0;
  std::size_t m = 1;
  while (t < t1 - 1e-12 * std::max(1.0, std::abs(t1))) {
    double next = t0 + static_cast<double>(m) * stride;
    if (next > t1) next = t1;
    if (!stepper.run(wrapped, y0, t, next, 1e30, false))
      throw std::runtime_error("integrate_ode_sampled: step size underflow");
    t = next;
    observer(t, y0);
    ++m;
  }
}

}  // namespace ringlat
