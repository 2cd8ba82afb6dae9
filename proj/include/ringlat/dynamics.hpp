#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ringlat/adiabatic.hpp"
#include "ringlat/localization.hpp"
#include "ringlat/params.hpp"

namespace ringlat {

struct ParticleEnsemble {
  std::vector<double> x, y, z;     // m
  std::vector<double> px, py, pz;  // kg m/s

  std::size_t size() const { return x.size(); }
};

// Gaussian positions about one representative well center (z = 0, on axis)
// and Maxwell-Boltzmann momenta at (T_ax, T_rad). Deterministic per seed.
ParticleEnsemble init_ensemble(std::uint64_t seed, std::size_t n_sim,
                               double sigma_z0, double sigma_r0, double T_ax,
                               double T_rad, double mass);

// Simulating n_sim particles in place of n_real: the light shift per photon
// grows by n_real/n_sim (preserving UN) and the incoupled intensities shrink
// by n_sim/n_real (preserving the single-atom well depth).
struct RescalePlan {
  double n_real;
  double n_sim;
  double delta0_scaled;     // delta0 * n_real / n_sim
  double intensity_factor;  // n_sim / n_real
};

RescalePlan rescale_for_simulation(double n_real, double n_sim,
                                   const PhysicalParams& phys);

// Dipole force of the travelling-wave pair on every atom,
//   F = hbar delta0 grad[ I(x) ],
//   I = (|a+|^2 + |a-|^2 + 2 Re(a+* a- e^{-2ikz})) exp(-2 r^2/w0^2),
// with the locked mode a+ real. Moduli in photon-number units.
void forces(const ParticleEnsemble& e, double alpha_plus_mod,
            std::complex<double> alpha_minus, const PhysicalParams& phys,
            std::span<double> fx, std::span<double> fy, std::span<double> fz);

// d a / d tau of the unlocked mode driven by the instantaneous ensemble,
//   i (UN/b+) g a^2 - a - i UN g* b+ + b-.
std::complex<double> field_rhs(std::complex<double> a,
                               const LocalizationState& loc, double b_plus,
                               double b_minus, double UN);

struct ObservableRow {
  double tau;
  double chi_minus;
  double phi;
  double sigma_z;    // m, rms about the ensemble mean
  double sigma_r;    // m, per transverse axis
  double g_mod;
  double e_kin_ax;   // J per atom
  double e_kin_rad;  // J per atom
};

struct ObservableTrace {
  std::vector<ObservableRow> rows;
  double gamma_c = 1.0;
  std::uint64_t seed = 0;
  double dt = 0.0;  // step, scaled time
};

struct FullSimParams {
  PhysicalParams phys;  // delta0 already rescaled when a plan is in use
  double I0;            // reference photon-number scale (pre i0_factor)
  DriveSchedule drive;  // chi0 split, i0_factor, UN(tau)
};

struct FullIntegrateOptions {
  bool frozen_field = false;  // hold a fixed (conservation tests)
};

// Fixed-step RK4 on the joint 6N+2 system in scaled time. g and the forces
// are recomputed at every stage; all reductions run in a fixed serial order,
// so traces are bitwise reproducible. Aborts on non-finite state.
ObservableTrace integrate_full(const ParticleEnsemble& init,
                               std::complex<double> a_init,
                               const FullSimParams& p, double tau0, double tau1,
                               double dt, int output_stride,
                               const FullIntegrateOptions& opt = {});

// Total mechanical energy (kinetic + dipole potential) of the ensemble in a
// frozen field; conserved quantity for the step-size validation.
double ensemble_energy(const ParticleEnsemble& e, double alpha_plus_mod,
                       std::complex<double> alpha_minus,
                       const PhysicalParams& phys);

struct SpectralPeak {
  double f_peak_hz;
  double amplitude;
};

// Dominant spectral line of a uniformly sampled series: moving-mean detrend,
// Hann window, zero-padded FFT, parabolic peak interpolation. Returns
// nullopt when no peak stands clear of the spectrum floor.
std::optional<SpectralPeak> breathing_frequency(std::span<const double> values,
                                                double sample_dt_seconds);

// Relative phase arg(X_a(f) conj(X_b(f))) of two series at frequency f_hz.
double cross_phase_at(std::span<const double> a, std::span<const double> b,
                      double sample_dt_seconds, double f_hz);

}  // namespace ringlat
