#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "ringlat/localization.hpp"
#include "ringlat/params.hpp"

namespace ringlat {

// Complex scaled field of the unlocked mode, a = alpha_- / sqrt(I0).
struct FieldState {
  std::complex<double> a;

  double mod() const { return std::abs(a); }
  double phase() const { return std::arg(a); }
  static FieldState from_polar(double a_mod, double phi) {
    return {std::polar(a_mod, phi)};
  }
};

// Right-continuous piecewise-constant function of scaled time.
struct PiecewiseConstant {
  std::vector<double> knots;   // ascending switch times
  std::vector<double> values;  // size knots.size() + 1

  double operator()(double tau) const;
  static PiecewiseConstant constant(double v) { return {{}, {v}}; }
};

// Drive terms of the field equation as functions of scaled time. The pump
// split is chi0(+/-); i0_factor multiplies the total incoupled power
// (intensity-step scenarios) and UN follows the atom number.
struct DriveSchedule {
  PiecewiseConstant chi0_minus = PiecewiseConstant::constant(0.5);
  PiecewiseConstant i0_factor = PiecewiseConstant::constant(1.0);
  std::function<double(double)> un = [](double) { return 0.0; };

  std::vector<double> events() const;  // merged sorted discontinuities
  void validate_at(double tau) const;
};

struct DriveValues {
  double chi0_plus;
  double chi0_minus;
  double i0_factor;
  double UN;
};

DriveValues sample_drive(const DriveSchedule& s, double tau);

// d a / d tau of the reduced model,
//   i (UN/b+) L |a| a - a + b- - i UN b+ L a/|a|,
// with b(+/-) = sqrt(chi0(+/-) * i0_factor). |a| below a_min is clamped and
// reported through *clamped.
std::complex<double> rhs_complex(std::complex<double> a, const DriveValues& d,
                                 const ScaledParams& sp, double a_min = 1e-9,
                                 bool* clamped = nullptr);

struct PhaseAmpRates {
  double da_mod;  // d|a|/dtau
  double dphi;    // dphi/dtau
};

// Polar split of the same flow:
//   d|a|/dtau = b- cos(phi) - |a|
//   |a| dphi/dtau = UN L (|a|^2/b+ - b+) - b- sin(phi)
PhaseAmpRates rhs_phase_amplitude(double a_mod, double phi,
                                  const DriveValues& d, const ScaledParams& sp,
                                  double a_min = 1e-9,
                                  bool* clamped = nullptr);

// One-dimensional flow after eliminating the fast amplitude,
// |a| = sqrt(chi0-) cos(phi):
//   dphi/dtau = UN/sqrt(chi0- chi0+) Ltilde(phi)
//               (chi0- cos(phi) - chi0+/cos(phi)) - tan(phi).
// Requires |phi| < pi/2.
double rhs_eliminated(double phi, const LocalizationKnobs& knobs,
                      double chi0_plus, double chi0_minus, double UN);

// Analytic d/dphi of rhs_eliminated (stability classification).
double rhs_eliminated_dphi(double phi, const LocalizationKnobs& knobs,
                           double chi0_plus, double chi0_minus, double UN);

struct IntegratorOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double a_min = 1e-9;     // singular floor for |a|
  double max_step = 1e30;  // step cap
  bool fixed_step = false; // accept every step at max_step (order tests)
};

enum : unsigned {
  kFlagSingularFloor = 1u,  // |a| hit the floor since the previous sample
  kFlagStepUnderflow = 2u,  // step size underflow; trace ends early
};

struct TraceRow {
  double tau;
  double chi_minus;  // |a|^2
  double phi;
  double UN;
  double L;
  unsigned flags;
};

struct FieldTrace {
  std::vector<TraceRow> rows;
  double gamma_c = 1.0;  // for the t_seconds column at serialization
  std::uint64_t seed = 0;
};

// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) on the complex form.
// Integration restarts at schedule discontinuities; no step straddles a
// jump. Rows are emitted on the uniform grid tau0, tau0+stride, ...
FieldTrace integrate(FieldState init, const DriveSchedule& drive,
                     const ScaledParams& sp, double tau0, double tau1,
                     double out_stride, const IntegratorOptions& opt = {});

// Trap population under background and two-body loss,
//   dN/dt = -gamma_bg N - q N^2   (t in seconds; q per unit of N0's scale)
// in closed form, with the q = 0 and gamma_bg = 0 limits handled exactly.
struct AtomNumberDecay {
  double n0;
  double gamma_bg;
  double q;
  double operator()(double t_seconds) const;
};

AtomNumberDecay atom_number_schedule(double n0, double gamma_bg, double q);

// Generic adaptive DP5(4) over a small ODE system (used for cross-checks and
// the coupled loading model). rhs(t, y, dy).
using OdeRhs =
    std::function<void(double, const std::vector<double>&, std::vector<double>&)>;
std::vector<double> integrate_ode(const OdeRhs& rhs, std::vector<double> y0,
                                  double t0, double t1, double rtol = 1e-10,
                                  double atol = 1e-12);

// Same, invoking observer(t, y) on the uniform grid t0, t0+stride, ..., t1.
using OdeObserver = std::function<void(double, const std::vector<double>&)>;
void integrate_ode_sampled(const OdeRhs& rhs, std::vector<double> y0, double t0,
                           double t1, double stride, const OdeObserver& observer,
                           double rtol = 1e-8, double atol = 1e-10);

}  // namespace ringlat
