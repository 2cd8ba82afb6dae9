#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ringlat/adiabatic.hpp"

namespace ringlat {

struct SteadyState {
  double phi;
  double a_mod;      // sqrt(chi0-) cos(phi)
  double intensity;  // a_mod^2
  bool stable;
};

struct FoldPoint {
  double un;
  double phi;
};

struct DiagramPoint {
  double un;
  double phi;
  double intensity;
  bool stable;
  int branch_id;
};

struct BranchDiagram {
  std::vector<double> un_samples;
  std::vector<DiagramPoint> points;  // ordered by un sample, then phi
  std::vector<FoldPoint> folds;
};

// All zeros of rhs_eliminated on phi in (-pi/2, pi/2), bracketed on a uniform
// scan grid and refined by bisection; classified by the sign of the analytic
// slope.
std::vector<SteadyState> steady_states(double UN, double chi0_minus,
                                       const LocalizationKnobs& knobs,
                                       int grid_n = 4096);

// Steady states versus UN with branches connected by nearest-phi matching
// (jump threshold 0.2 rad) and folds located by bisection on UN where the
// root count changes (resolution 1e-4).
BranchDiagram continuation_scan(double un_lo, double un_hi, int n_samples,
                                double chi0_minus,
                                const LocalizationKnobs& knobs,
                                int grid_n = 4096);

struct BistabilityRange {
  double un_low;
  std::optional<double> un_high;  // empty: persists beyond the scan ceiling
};

// Fold pair of the diagram, or nullopt when monostable up to un_max.
std::optional<BistabilityRange> bistability_range(double chi0_minus,
                                                  const LocalizationKnobs& knobs,
                                                  double un_max,
                                                  int n_samples = 481);

struct SweepPoint {
  double un;
  double phi;
  double intensity;
  bool jumped;  // branch lost at this step, state moved to another root
};

// Quasi-static branch following along monotone UN samples; at a fold the
// state jumps to the nearest remaining stable root.
std::vector<SweepPoint> hysteresis_sweep(bool increasing,
                                         std::span<const double> un_samples,
                                         double chi0_minus,
                                         const LocalizationKnobs& knobs);

}  // namespace ringlat
