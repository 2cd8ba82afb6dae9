#include "ringlat/bistability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ringlat {

namespace {

constexpr double kPhiMargin = 1e-6;  // scan window edge offset from +-pi/2

double bisect_root(double lo, double hi, double flo,
                   const std::function<double(double)>& f) {
  // flo and f(hi) have opposite signs; refine to machine-level width.
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((flo < 0.0) != (fm < 0.0)) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<SteadyState> steady_states(double UN, double chi0_minus,
                                       const LocalizationKnobs& knobs,
                                       int grid_n) {
  if (!(chi0_minus > 0.0 && chi0_minus < 1.0))
    throw std::invalid_argument("steady_states: chi0_minus must be in (0,1)");
  if (grid_n < 8) throw std::invalid_argument("steady_states: grid too coarse");
  const double chi0_plus = 1.0 - chi0_minus;
  const auto f = [&](double phi) {
    return rhs_eliminated(phi, knobs, chi0_plus, chi0_minus, UN);
  };

  const double lo = -pi / 2.0 + kPhiMargin, hi = pi / 2.0 - kPhiMargin;
  const double dphi = (hi - lo) / static_cast<double>(grid_n);
  std::vector<SteadyState> roots;
  double prev_phi = lo, prev_f = f(lo);
  for (int i = 1; i <= grid_n; ++i) {
    const double phi = lo + static_cast<double>(i) * dphi;
    const double fv = f(phi);
    if (fv == 0.0 || (prev_f < 0.0) != (fv < 0.0)) {
      const double root =
          (fv == 0.0) ? phi : bisect_root(prev_phi, phi, prev_f, f);
      const double am = std::sqrt(chi0_minus) * std::cos(root);
      const bool stable =
          rhs_eliminated_dphi(root, knobs, chi0_plus, chi0_minus, UN) < 0.0;
      roots.push_back({root, am, am * am, stable});
    }
    prev_phi = phi;
    prev_f = fv;
  }
  if (roots.empty())
    throw std::runtime_error("steady_states: no root found (internal error)");
  return roots;
}

BranchDiagram continuation_scan(double un_lo, double un_hi, int n_samples,
                                double chi0_minus,
                                const LocalizationKnobs& knobs, int grid_n) {
  if (n_samples < 2) throw std::invalid_argument("continuation_scan: need >= 2 samples");
  const double chi0_plus = 1.0 - chi0_minus;
  BranchDiagram diag;
  diag.un_samples.resize(static_cast<std::size_t>(n_samples));
  const double dun = (un_hi - un_lo) / static_cast<double>(n_samples - 1);
  for (int i = 0; i < n_samples; ++i)
    diag.un_samples[static_cast<std::size_t>(i)] = un_lo + dun * i;

  std::vector<std::vector<SteadyState>> per_un;
  per_un.reserve(diag.un_samples.size());
  for (double un : diag.un_samples)
    per_un.push_back(steady_states(un, chi0_minus, knobs, grid_n));

  // branch ids by nearest-phi matching between adjacent samples
  constexpr double kJumpThreshold = 0.2;  // rad
  int next_id = 0;
  std::vector<int> prev_ids;
  for (std::size_t s = 0; s < per_un.size(); ++s) {
    const auto& states = per_un[s];
    std::vector<int> ids(states.size(), -1);
    if (s > 0) {
      const auto& prev = per_un[s - 1];
      for (std::size_t j = 0; j < states.size(); ++j) {
        double best = kJumpThreshold;
        int match = -1;
        for (std::size_t p = 0; p < prev.size(); ++p) {
          const double d = std::abs(states[j].phi - prev[p].phi);
          if (d < best && states[j].stable == prev[p].stable) {
            best = d;
            match = prev_ids[p];
          }
        }
        ids[j] = match;
      }
    }
    for (auto& id : ids)
      if (id < 0) id = next_id++;
    for (std::size_t j = 0; j < states.size(); ++j)
      diag.points.push_back({diag.un_samples[s], states[j].phi,
                             states[j].intensity, states[j].stable, ids[j]});
    prev_ids = ids;
  }

  // folds: bisect on UN where the root count changes
  for (std::size_t s = 0; s + 1 < per_un.size(); ++s) {
    if (per_un[s].size() == per_un[s + 1].size()) continue;
    double lo = diag.un_samples[s], hi = diag.un_samples[s + 1];
    std::size_t n_lo = per_un[s].size();
    std::vector<SteadyState> at_lo = per_un[s], at_hi = per_un[s + 1];
    while (hi - lo > 1e-4) {
      const double mid = 0.5 * (lo + hi);
      auto states = steady_states(mid, chi0_minus, knobs, grid_n);
      if (states.size() == n_lo) {
        lo = mid;
        at_lo = std::move(states);
      } else {
        hi = mid;
        at_hi = std::move(states);
      }
    }
    // fold phi: the root of the side with more states that is farthest from
    // any root of the other side (the merging pair collapses there)
    const auto& more = at_lo.size() > at_hi.size() ? at_lo : at_hi;
    const auto& fewer = at_lo.size() > at_hi.size() ? at_hi : at_lo;
    double fold_phi = more.front().phi, best = -1.0;
    for (const auto& m : more) {
      double nearest = 1e30;
      for (const auto& q : fewer) nearest = std::min(nearest, std::abs(m.phi - q.phi));
      if (nearest > best) {
        best = nearest;
        fold_phi = m.phi;
      }
    }
    diag.folds.push_back({0.5 * (lo + hi), fold_phi});
  }
  return diag;
}

std::optional<BistabilityRange> bistability_range(double chi0_minus,
                                                  const LocalizationKnobs& knobs,
                                                  double un_max, int n_samples) {
  const BranchDiagram diag =
      continuation_scan(0.0, un_max, n_samples, chi0_minus, knobs);
  if (diag.folds.empty()) return std::nullopt;
  BistabilityRange r{diag.folds.front().un, std::nullopt};
  for (const auto& f : diag.folds) r.un_low = std::min(r.un_low, f.un);
  // multiple roots persisting at the ceiling: unbounded-above window
  const auto at_max = steady_states(un_max, chi0_minus, knobs);
  if (at_max.size() > 1) return r;
  double hi = r.un_low;
  for (const auto& f : diag.folds) hi = std::max(hi, f.un);
  r.un_high = hi;
  return r;
}

std::vector<SweepPoint> hysteresis_sweep(bool increasing,
                                         std::span<const double> un_samples,
                                         double chi0_minus,
                                         const LocalizationKnobs& knobs) {
  std::vector<double> un(un_samples.begin(), un_samples.end());
  if (un.size() < 2) throw std::invalid_argument("hysteresis_sweep: need >= 2 samples");
  if (!std::is_sorted(un.begin(), un.end()))
    throw std::invalid_argument("hysteresis_sweep: samples must be ascending");
  if (!increasing) std::reverse(un.begin(), un.end());

  std::vector<SweepPoint> out;
  out.reserve(un.size());
  double cur_phi = 0.0;
  bool first = true;
  for (double u : un) {
    auto states = steady_states(u, chi0_minus, knobs);
    const SteadyState* pick = nullptr;
    bool jumped = false;
    if (first) {
      // start on the stable root reached from the empty cavity (phi near 0)
      for (const auto& s : states)
        if (s.stable && (!pick || std::abs(s.phi) < std::abs(pick->phi))) pick = &s;
      first = false;
    } else {
      double best = 1e30;
      for (const auto& s : states) {
        const double d = std::abs(s.phi - cur_phi);
        if (s.stable && d < best) {
          best = d;
          pick = &s;
        }
      }
      constexpr double kJumpThreshold = 0.2;
      jumped = best > kJumpThreshold;
    }
    if (!pick) throw std::runtime_error("hysteresis_sweep: no stable root");
    cur_phi = pick->phi;
    out.push_back({u, pick->phi, pick->intensity, jumped});
  }
  return out;
}

}  // namespace ringlat
