#include "ringlat/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include <json.hpp>

#include "ringlat/adiabatic.hpp"
#include "ringlat/bistability.hpp"
#include "ringlat/dynamics.hpp"
#include "ringlat/io.hpp"
#include "ringlat/thermo.hpp"

namespace ringlat {

namespace {

using nlohmann::json;

double get_or(const Config& cfg, const std::string& key, double fallback) {
  return cfg.is_set(key) ? cfg.get_double(key) : fallback;
}

PhysicalParams phys_from_cfg(const Config& cfg) {
  PhysicalParams p{};
  p.gamma_c = cfg.get_double("physical.gamma_c");
  p.delta0 = cfg.get_double("physical.delta0");
  p.w0 = cfg.get_double("physical.w0");
  p.mass = cfg.get_double("physical.mass");
  p.k = 2.0 * pi / cfg.get_double("physical.lambda");
  p.omega_c = 2.0 * pi * speed_of_light / cfg.get_double("physical.lambda");
  p.delta_c = 0.0;
  p.omega_R = hbar * p.k * p.k / (2.0 * p.mass);
  p.N = 0.0;
  return p;
}

ScaledParams model_from_cfg(const Config& cfg, double un0) {
  ScaledParams sp{};
  sp.UN = un0 * cfg.get_double("decay.n_scale");
  sp.eta_ax = cfg.get_double("model.eta_ax");
  sp.eta_rad = cfg.get_double("model.eta_rad");
  sp.a0_mod = cfg.get_double("model.a0_mod");
  return sp;
}

IntegratorOptions integ_from_cfg(const Config& cfg) {
  IntegratorOptions o{};
  o.rtol = cfg.get_double("integ.rtol");
  o.atol = cfg.get_double("integ.atol");
  o.a_min = cfg.get_double("integ.a_min");
  return o;
}

void write_field_trace(const std::filesystem::path& path, const FieldTrace& tr,
                       const std::vector<std::string>& comments) {
  CsvWriter csv(path, comments,
                {"tau", "t_seconds", "chi_minus", "phi", "UN", "L", "flags"});
  for (const auto& r : tr.rows)
    csv.row({r.tau, r.tau / tr.gamma_c, r.chi_minus, r.phi, r.UN, r.L,
             static_cast<double>(r.flags)});
}

void write_observable_trace(const std::filesystem::path& path,
                            const ObservableTrace& tr,
                            const std::vector<std::string>& comments) {
  CsvWriter csv(path, comments,
                {"tau", "t_seconds", "chi_minus", "phi", "sigma_z", "sigma_r",
                 "g_mod", "e_kin_ax", "e_kin_rad"});
  for (const auto& r : tr.rows)
    csv.row({r.tau, r.tau / tr.gamma_c, r.chi_minus, r.phi, r.sigma_z,
             r.sigma_r, r.g_mod, r.e_kin_ax, r.e_kin_rad});
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

// first trace time where chi_minus >= level; empty if never
std::optional<double> first_crossing_s(const FieldTrace& tr, double level) {
  for (const auto& r : tr.rows)
    if (r.chi_minus >= level) return r.tau / tr.gamma_c;
  return std::nullopt;
}

const SteadyState& pick_low_branch(const std::vector<SteadyState>& states) {
  const SteadyState* pick = nullptr;
  for (const auto& s : states)
    if (s.stable && (!pick || s.intensity < pick->intensity)) pick = &s;
  if (!pick) throw std::runtime_error("no stable steady state");
  return *pick;
}

const SteadyState& pick_high_branch(const std::vector<SteadyState>& states) {
  const SteadyState* pick = nullptr;
  for (const auto& s : states)
    if (s.stable && (!pick || s.intensity > pick->intensity)) pick = &s;
  if (!pick) throw std::runtime_error("no stable steady state");
  return *pick;
}

// ---------------------------------------------------------------------------
// empty-cavity: UN = 0 fill-up against the closed form

void run_empty_cavity(ScenarioContext& ctx) {
  const Config& cfg = ctx.cfg();
  const double chi_m = get_or(cfg, "pump.chi0_minus", 0.5);
  const double gamma_c = cfg.get_double("physical.gamma_c");
  const double tau_end = cfg.get_double("run.t_end_s") > 0.0
                             ? cfg.get_double("run.t_end_s") * gamma_c
                             : 10.0;
  const double stride = get_or(cfg, "run.out_stride_tau", 0.05);

  DriveSchedule drive;
  drive.chi0_minus = PiecewiseConstant::constant(chi_m);
  drive.un = [](double) { return 0.0; };
  ScaledParams sp{0.0, 0.0, 0.0, 1.0};
  FieldTrace tr = integrate({std::complex<double>(0.0, 0.0)}, drive, sp, 0.0,
                            tau_end, stride, integ_from_cfg(cfg));
  tr.gamma_c = gamma_c;
  tr.seed = ctx.seed();
  write_field_trace(ctx.file("trace.csv"), tr, ctx.csv_comments("empty-cavity"));

  double max_err = 0.0;
  for (const auto& r : tr.rows) {
    const double exact = std::sqrt(chi_m) * -std::expm1(-r.tau);
    max_err = std::max(max_err, std::abs(std::sqrt(r.chi_minus) - exact));
  }
  json summary;
  summary["chi0_minus"] = chi_m;
  summary["max_abs_error_vs_closed_form"] = max_err;
  write_json(ctx.file("summary.json"), summary);
}

// ---------------------------------------------------------------------------
// fig2-diagram: steady-state branches versus UN for the canonical pump splits

void run_fig2_diagram(ScenarioContext& ctx) {
  const Config& cfg = ctx.cfg();
  const double un_max = cfg.get_double("diagram.un_max");
  const int n_samples = static_cast<int>(cfg.get_int("diagram.n_samples"));
  const int grid_n = static_cast<int>(cfg.get_int("diagram.grid_n"));
  const ScaledParams sp = model_from_cfg(cfg, 0.0);

  const std::vector<double> chis = {0.51, 0.50, 0.48, 0.43, 0.38};
  std::vector<BranchDiagram> diagrams(chis.size());
  std::vector<std::optional<BistabilityRange>> ranges(chis.size());
  parallel_for(chis.size(), [&](std::size_t i) {
    const LocalizationKnobs knobs = knobs_from_eta(sp, 1.0 - chis[i]);
    diagrams[i] = continuation_scan(0.0, un_max, n_samples, chis[i], knobs, grid_n);
    ranges[i] = bistability_range(chis[i], knobs, un_max, n_samples);
  });

  json folds = json::object();
  for (std::size_t i = 0; i < chis.size(); ++i) {
    const int pct = static_cast<int>(std::lround(chis[i] * 100.0));
    const std::string name = "branches_chi" + std::to_string(pct) + ".csv";
    CsvWriter csv(ctx.file(name), ctx.csv_comments("fig2-diagram"),
                  {"UN", "phi", "intensity", "stable", "branch_id"});
    for (const auto& p : diagrams[i].points)
      csv.row({p.un, p.phi, p.intensity, p.stable ? 1.0 : 0.0,
               static_cast<double>(p.branch_id)});

    json entry;
    entry["chi0_minus"] = chis[i];
    entry["folds"] = json::array();
    for (const auto& f : diagrams[i].folds)
      entry["folds"].push_back({{"UN", f.un}, {"phi", f.phi}});
    if (!ranges[i]) {
      entry["bistable"] = false;
    } else {
      entry["bistable"] = true;
      entry["un_low"] = ranges[i]->un_low;
      if (ranges[i]->un_high)
        entry["un_high"] = *ranges[i]->un_high;
      else
        entry["un_high"] = nullptr;  // persists beyond the scan ceiling
    }
    folds["chi" + std::to_string(pct)] = entry;
  }
  write_json(ctx.file("folds.json"), folds);
}

// ---------------------------------------------------------------------------
// fig7-adiabatic: jump traces under measured atom-number decay

void run_fig7(ScenarioContext& ctx) {
  const Config& cfg = ctx.cfg();
  const double gamma_c = cfg.get_double("physical.gamma_c");
  const double gamma_bg = cfg.get_double("decay.gamma_bg");
  const double q = cfg.get_double("decay.q");
  const double t_end =
      cfg.get_double("run.t_end_s") > 0.0 ? cfg.get_double("run.t_end_s") : 0.25;
  const double stride = get_or(cfg, "run.out_stride_tau", 2.0);

  struct Case {
    double chi_m;
    double un0;
  };
  const std::vector<Case> cases = {
      {0.49, 2.38}, {0.46, 2.23}, {0.43, 2.15}, {0.36, 1.75}};

  std::vector<FieldTrace> traces(cases.size());
  parallel_for(cases.size(), [&](std::size_t i) {
    const ScaledParams sp = model_from_cfg(cfg, cases[i].un0);
    const AtomNumberDecay decay = atom_number_schedule(sp.UN, gamma_bg, q);
    DriveSchedule drive;
    drive.chi0_minus = PiecewiseConstant::constant(cases[i].chi_m);
    drive.un = [decay, gamma_c](double tau) { return decay(tau / gamma_c); };
    FieldTrace tr =
        integrate(FieldState::from_polar(sp.a0_mod, 0.0), drive, sp, 0.0,
                  t_end * gamma_c, stride, integ_from_cfg(cfg));
    tr.gamma_c = gamma_c;
    tr.seed = ctx.seed();
    traces[i] = std::move(tr);
  });

  json jumps = json::array();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const int pct = static_cast<int>(std::lround(cases[i].chi_m * 100.0));
    write_field_trace(ctx.file("trace_chi" + std::to_string(pct) + ".csv"),
                      traces[i], ctx.csv_comments("fig7-adiabatic"));
    json entry;
    entry["chi0_minus"] = cases[i].chi_m;
    entry["un0"] = cases[i].un0;
    const auto t_jump = first_crossing_s(traces[i], 0.9 * cases[i].chi_m);
    if (t_jump)
      entry["t_jump_s"] = *t_jump;
    else
      entry["t_jump_s"] = nullptr;
    jumps.push_back(entry);
  }
  json summary;
  summary["gamma_bg"] = gamma_bg;
  summary["q"] = q;
  summary["jumps"] = jumps;
  write_json(ctx.file("jumps.json"), summary);
}

// ---------------------------------------------------------------------------
// fig8-step: anomalous response to halving the total pump power

void run_fig8(ScenarioContext& ctx) {
  const Config& cfg = ctx.cfg();
  const double gamma_c = cfg.get_double("physical.gamma_c");
  const double chi_m = get_or(cfg, "pump.chi0_minus", 0.45);
  const double un = get_or(cfg, "model.un0", 2.4) * cfg.get_double("decay.n_scale");
  const double factor = cfg.get_double("fig8.step_factor");
  const double t_on = cfg.get_double("fig8.t_on_s");
  const double t_off = cfg.get_double("fig8.t_off_s");
  const double t_end =
      cfg.get_double("run.t_end_s") > 0.0 ? cfg.get_double("run.t_end_s") : t_off + 0.004;
  const double t_start = t_on - 0.001;
  const double stride = get_or(cfg, "run.out_stride_tau", 0.25);

  const ScaledParams sp = model_from_cfg(cfg, un);
  const LocalizationKnobs knobs = knobs_from_eta(sp, 1.0 - chi_m);
  const SteadyState& pre = pick_low_branch(steady_states(sp.UN, chi_m, knobs));

  DriveSchedule drive;
  drive.chi0_minus = PiecewiseConstant::constant(chi_m);
  drive.i0_factor = {{t_on * gamma_c, t_off * gamma_c}, {1.0, factor, 1.0}};
  drive.un = [un](double) { return un; };

  FieldTrace tr = integrate(FieldState::from_polar(pre.a_mod, pre.phi), drive,
                            sp, t_start * gamma_c, t_end * gamma_c, stride,
                            integ_from_cfg(cfg));
  tr.gamma_c = gamma_c;
  tr.seed = ctx.seed();
  write_field_trace(ctx.file("trace.csv"), tr, ctx.csv_comments("fig8-step"));

  // transient minimum, raised plateau, recovery
  double chi_pre = pre.intensity;
  double chi_min = 1e30, chi_plateau = 0.0, chi_final = tr.rows.back().chi_minus;
  for (const auto& r : tr.rows) {
    const double t = r.tau / gamma_c;
    if (t >= t_on && t < t_off) {
      chi_min = std::min(chi_min, r.chi_minus);
      chi_plateau = r.chi_minus;  // last sample inside the window
    }
  }
  json summary;
  summary["chi0_minus"] = chi_m;
  summary["UN"] = un;
  summary["step_factor"] = factor;
  summary["chi_pre_step"] = chi_pre;
  summary["chi_transient_min"] = chi_min;
  summary["chi_plateau_during_step"] = chi_plateau;
  summary["chi_final"] = chi_final;
  summary["anomalous_rise"] = chi_plateau > chi_pre;
  summary["recovery_rel_error"] =
      std::abs(chi_final - chi_pre) / std::max(chi_pre, 1e-300);
  write_json(ctx.file("summary.json"), summary);
}

// ---------------------------------------------------------------------------
// fig10-breathing: full 6N+2 run, breathing peak, depth scan, antiphase

struct BreathingRun {
  ObservableTrace trace;
  double f_peak_hz = 0.0;
  double two_nu_rad_hz = 0.0;
  double antiphase_rad = 0.0;
  bool peak_found = false;
};

BreathingRun breathing_run(const Config& cfg, std::uint64_t seed,
                           double depth_factor, double t_end_s,
                           double t_settle_s) {
  const double gamma_c = cfg.get_double("physical.gamma_c");
  const double chi_m = get_or(cfg, "pump.chi0_minus", 0.43);
  const double un = get_or(cfg, "model.un0", 2.0) * cfg.get_double("decay.n_scale");
  const auto n_sim = static_cast<std::size_t>(cfg.get_int("full.n_sim"));
  const double nu_sym = cfg.get_double("full.nu_ax_sym_hz") * std::sqrt(depth_factor);
  const int steps_per_period = static_cast<int>(cfg.get_int("full.steps_per_period"));
  const double eta_ax = cfg.get_double("model.eta_ax");
  const double eta_rad = cfg.get_double("model.eta_rad");

  PhysicalParams phys = phys_from_cfg(cfg);
  const double n_real = cfg.get_double("full.n_real") > 0.0
                            ? cfg.get_double("full.n_real")
                            : un * phys.gamma_c / phys.delta0;
  const RescalePlan plan =
      rescale_for_simulation(n_real, static_cast<double>(n_sim), phys);
  phys.delta0 = plan.delta0_scaled;
  phys.N = plan.n_sim;
  const double I0 = pump_intensity_for_axial_freq(nu_sym, phys);

  // ensemble matched to the freshly formed lattice at a(0) = sqrt(chi0-)
  const double a0 = std::sqrt(chi_m);
  const double alpha_plus = std::sqrt((1.0 - chi_m) * I0);
  const TrapGeometry geom = trap_geometry(alpha_plus, a0 * std::sqrt(I0), phys);
  const double v_rad =
      hbar * phys.delta0 * I0 * std::pow(std::sqrt(1.0 - chi_m) + a0, 2);
  const double t_ax = eta_ax * geom.well_depth / k_boltzmann;
  const double t_rad = eta_rad * v_rad / k_boltzmann;
  const double sigma_z0 = std::sqrt(eta_ax / 2.0) / phys.k;
  const double sigma_r0 = phys.w0 * std::sqrt(eta_rad) / 2.0;

  const ParticleEnsemble ens =
      init_ensemble(seed, n_sim, sigma_z0, sigma_r0, t_ax, t_rad, phys.mass);

  FullSimParams p{phys, I0, {}};
  p.drive.chi0_minus = PiecewiseConstant::constant(chi_m);
  p.drive.un = [un](double) { return un; };

  const double dt = gamma_c / (nu_sym * steps_per_period);
  const double sample_tau = 2.0;
  const int stride = std::max(1, static_cast<int>(std::lround(sample_tau / dt)));
  BreathingRun run;
  run.trace = integrate_full(ens, std::complex<double>(a0, 0.0), p, 0.0,
                             t_end_s * gamma_c, dt, stride);
  run.trace.seed = seed;

  // analysis window after the settle time
  const double dt_sample = run.trace.rows[1].tau - run.trace.rows[0].tau;
  const auto first = static_cast<std::size_t>(t_settle_s * gamma_c / dt_sample);
  if (first + 64 >= run.trace.rows.size()) return run;
  std::vector<double> chi, sr, ekr;
  double mean_a = 0.0;
  for (std::size_t i = first; i < run.trace.rows.size(); ++i) {
    chi.push_back(run.trace.rows[i].chi_minus);
    sr.push_back(run.trace.rows[i].sigma_r);
    ekr.push_back(run.trace.rows[i].e_kin_rad);
    mean_a += std::sqrt(run.trace.rows[i].chi_minus);
  }
  mean_a /= static_cast<double>(chi.size());

  const double dt_s = dt_sample / gamma_c;
  const auto peak = breathing_frequency(chi, dt_s);
  if (!peak) return run;
  run.peak_found = true;
  run.f_peak_hz = peak->f_peak_hz;
  const TrapGeometry op =
      trap_geometry(alpha_plus, mean_a * std::sqrt(I0), phys);
  run.two_nu_rad_hz = 2.0 * op.nu_rad;
  run.antiphase_rad = cross_phase_at(sr, ekr, dt_s, peak->f_peak_hz);
  return run;
}

void run_fig10(ScenarioContext& ctx) {
  const Config& cfg = ctx.cfg();
  const double t_end =
      cfg.get_double("run.t_end_s") > 0.0 ? cfg.get_double("run.t_end_s") : 0.018;
  const double t_settle = 0.002;

  const std::vector<double> factors = {1.0, std::pow(4.0, 1.0 / 3.0),
                                       std::pow(4.0, 2.0 / 3.0), 4.0};
  std::vector<BreathingRun> runs(factors.size());
  parallel_for(factors.size(), [&](std::size_t i) {
    runs[i] = breathing_run(cfg, ctx.seed(), factors[i], t_end, t_settle);
  });

  write_observable_trace(ctx.file("trace.csv"), runs[0].trace,
                         ctx.csv_comments("fig10-breathing"));

  // frequency-depth exponent from the scan
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n_fit = 0;
  json scan = json::array();
  for (std::size_t i = 0; i < factors.size(); ++i) {
    json e;
    e["depth_factor"] = factors[i];
    if (runs[i].peak_found) {
      e["f_peak_hz"] = runs[i].f_peak_hz;
      const double lx = std::log(factors[i]);
      const double ly = std::log(runs[i].f_peak_hz);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++n_fit;
    } else {
      e["f_peak_hz"] = nullptr;
    }
    scan.push_back(e);
  }
  json summary;
  summary["f_peak_hz"] = runs[0].peak_found ? json(runs[0].f_peak_hz) : json();
  summary["two_nu_rad_hz"] = runs[0].two_nu_rad_hz;
  summary["peak_over_two_nu_rad"] =
      runs[0].peak_found ? json(runs[0].f_peak_hz / runs[0].two_nu_rad_hz) : json();
  summary["antiphase_rad"] = runs[0].antiphase_rad;
  summary["depth_scan"] = scan;
  if (n_fit >= 2) {
    const double denom = n_fit * sxx - sx * sx;
    summary["depth_exponent"] = (n_fit * sxy - sx * sy) / denom;
  } else {
    summary["depth_exponent"] = nullptr;
  }
  write_json(ctx.file("breathing.json"), summary);
}

// ---------------------------------------------------------------------------
// fig11-mot-switching: relaxation oscillations between the bistable branches
// under a phenomenological MOT loading law, dN/dt = R min(depth/ref, 1)
// - gamma_bg N - q N^2 (in UN units).

void run_fig11(ScenarioContext& ctx) {
  const Config& cfg = ctx.cfg();
  const double gamma_c = cfg.get_double("physical.gamma_c");
  const double chi_m = get_or(cfg, "pump.chi0_minus", 0.49);
  const double rate = cfg.get_double("mot.loading_rate");
  const double un0 = cfg.get_double("mot.un0");
  const double gamma_bg = cfg.get_double("decay.gamma_bg");
  const double q = cfg.get_double("mot.q");
  const double t_end =
      cfg.get_double("run.t_end_s") > 0.0 ? cfg.get_double("run.t_end_s") : 60.0;
  const double stride = get_or(cfg, "run.out_stride_tau", 200.0);

  const ScaledParams sp = model_from_cfg(cfg, un0);
  const LocalizationKnobs knobs = knobs_from_eta(sp, 1.0 - chi_m);
  const SteadyState& start = pick_high_branch(steady_states(un0, chi_m, knobs));

  const double sqrt_cm = std::sqrt(chi_m);
  const DriveValues base{1.0 - chi_m, chi_m, 1.0, 0.0};
  const auto rhs = [&](double, const std::vector<double>& y,
                       std::vector<double>& dy) {
    const std::complex<double> a(y[0], y[1]);
    DriveValues d = base;
    d.UN = std::max(y[2], 0.0);
    const std::complex<double> da = rhs_complex(a, d, sp);
    dy[0] = da.real();
    dy[1] = da.imag();
    const double depth_ratio = std::clamp(std::abs(a) / sqrt_cm, 0.0, 1.0);
    dy[2] = (rate * depth_ratio - gamma_bg * y[2] - q * y[2] * y[2]) / gamma_c;
  };

  CsvWriter csv(ctx.file("trace.csv"), ctx.csv_comments("fig11-mot-switching"),
                {"tau", "t_seconds", "chi_minus", "phi", "UN"});
  std::vector<double> t_up;  // rising jumps, state machine with two thresholds
  bool high = start.intensity > 0.5 * chi_m;
  integrate_ode_sampled(
      rhs, {start.a_mod * std::cos(start.phi), start.a_mod * std::sin(start.phi), un0},
      0.0, t_end * gamma_c, stride,
      [&](double tau, const std::vector<double>& y) {
        const std::complex<double> a(y[0], y[1]);
        const double chi = std::norm(a);
        csv.row({tau, tau / gamma_c, chi, std::arg(a), y[2]});
        if (!high && chi > 0.6 * chi_m) {
          high = true;
          t_up.push_back(tau / gamma_c);
        } else if (high && chi < 0.3 * chi_m) {
          high = false;
        }
      },
      cfg.get_double("integ.rtol"), cfg.get_double("integ.atol"));
  csv.close();

  json summary;
  summary["chi0_minus"] = chi_m;
  summary["loading_rate"] = rate;
  summary["gamma_bg"] = gamma_bg;
  summary["q"] = q;
  summary["jump_up_times_s"] = t_up;
  summary["n_cycles"] = t_up.size();
  if (t_up.size() >= 2)
    summary["period_s"] = (t_up.back() - t_up.front()) /
                          static_cast<double>(t_up.size() - 1);
  write_json(ctx.file("summary.json"), summary);
}

// ---------------------------------------------------------------------------
// noise-budget: PSD of a measured intensity series (or paper spot values)
// and the parametric heating budget.

void run_noise_budget(ScenarioContext& ctx) {
  const Config& cfg = ctx.cfg();
  const double nu_ax = cfg.get_double("noise.nu_ax_hz");
  const double nu_rad = cfg.get_double("noise.nu_rad_hz");
  const std::string path = cfg.get_string("noise.series_path");

  HeatingRates rates{};
  json summary;
  summary["nu_ax_hz"] = nu_ax;
  summary["nu_rad_hz"] = nu_rad;
  if (!path.empty()) {
    const TimeSeries ts = read_time_series(path);
    if (ts.t.size() < 3)
      throw std::runtime_error("noise-budget: series too short");
    const double fs =
        static_cast<double>(ts.t.size() - 1) / (ts.t.back() - ts.t.front());
    const NoiseSpectrum spec = psd_one_sided(
        ts.value, fs, static_cast<std::size_t>(cfg.get_int("noise.segment_length")),
        cfg.get_double("noise.overlap"));
    CsvWriter csv(ctx.file("spectrum.csv"), ctx.csv_comments("noise-budget"),
                  {"f_Hz", "S_per_Hz"});
    for (std::size_t i = 0; i < spec.f_hz.size(); ++i)
      csv.row({spec.f_hz[i], spec.S[i]});
    rates = heating_rates(nu_ax, nu_rad, spec);
    summary["mode"] = "series";
    summary["sample_rate_hz"] = fs;
    summary["S_at_2nu_ax"] = spec.at(2.0 * nu_ax);
    summary["S_at_2nu_rad"] = spec.at(2.0 * nu_rad);
  } else {
    const double s_ax = cfg.get_double("noise.s_at_2nu_ax");
    const double s_rad = cfg.get_double("noise.s_at_2nu_rad");
    rates = heating_rates_from_values(nu_ax, s_ax, nu_rad, s_rad);
    summary["mode"] = "spot-values";
    summary["S_at_2nu_ax"] = s_ax;
    summary["S_at_2nu_rad"] = s_rad;
  }
  summary["gamma_a"] = rates.gamma_a;
  summary["gamma_r"] = rates.gamma_r;
  if (rates.tau_h)
    summary["tau_h_s"] = *rates.tau_h;
  else
    summary["tau_h_s"] = nullptr;
  write_json(ctx.file("heating.json"), summary);
}

}  // namespace

std::vector<std::string> ScenarioContext::csv_comments(
    const std::string& scenario) const {
  return {std::string(kToolVersion), "scenario=" + scenario,
          "seed=" + std::to_string(seed_)};
}

const std::vector<ScenarioInfo>& scenarios() {
  static const std::vector<ScenarioInfo> list = {
      {"empty-cavity", "UN = 0 fill-up trace against the closed form",
       run_empty_cavity},
      {"fig2-diagram",
       "steady-state branches and folds versus UN for the canonical pump splits",
       run_fig2_diagram},
      {"fig7-adiabatic",
       "intensity-jump traces under measured atom-number decay", run_fig7},
      {"fig8-step", "anomalous response to a step of the total pump power",
       run_fig8},
      {"fig10-breathing",
       "full-dynamics breathing oscillations, depth scan and antiphase check",
       run_fig10},
      {"fig11-mot-switching",
       "bistable switching during MOT loading (phenomenological loading law)",
       run_fig11},
      {"noise-budget", "intensity-noise PSD and parametric heating budget",
       run_noise_budget},
  };
  return list;
}

const ScenarioInfo* find_scenario(const std::string& name) {
  for (const auto& s : scenarios())
    if (s.name == name) return &s;
  return nullptr;
}

std::filesystem::path run_scenario(const std::string& name, const Config& cfg,
                                   const std::filesystem::path& outdir,
                                   std::uint64_t seed) {
  cfg.validate_keys();
  const ScenarioInfo* info = find_scenario(name);
  if (!info) throw ConfigError("unknown scenario: " + name);
  std::filesystem::create_directories(outdir);

  ScenarioContext ctx(cfg, outdir, seed);
  const auto t0 = std::chrono::steady_clock::now();
  info->run(ctx);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json manifest;
  manifest["tool_version"] = kToolVersion;
  manifest["scenario"] = name;
  manifest["seed"] = seed;
  manifest["duration_seconds"] = elapsed;
  json files = json::array();
  for (const auto& f : ctx.recorded_files()) {
    const auto p = outdir / f;
    char digest[20];
    std::snprintf(digest, sizeof digest, "%016llx",
                  static_cast<unsigned long long>(file_digest(p)));
    files.push_back({{"name", f},
                     {"fnv1a64", digest},
                     {"bytes", std::filesystem::file_size(p)}});
  }
  manifest["files"] = files;
  json config = json::object();
  for (const auto& [k, v] : cfg.resolved()) config[k] = v;
  manifest["config"] = config;

  const auto path = outdir / "manifest.json";
  write_json(path, manifest);
  return path;
}

unsigned max_threads() {
  if (const char* env = std::getenv("RINGLAT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::min<std::size_t>(max_threads(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ringlat
