#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "vpbwave/diagnostics.hpp"
#include "vpbwave/errors.hpp"
#include "vpbwave/kinetic.hpp"

namespace vpb {

using nlohmann::ordered_json;

const char* version_string() { return VPBWAVE_VERSION; }

namespace {

std::string path_in(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

ordered_json config_json(const RunConfig& cfg) {
  ordered_json out = ordered_json::object();
  for (const auto& it : config_items(cfg)) {
    ordered_json& slot = out[it.section][it.key];
    switch (it.type) {
      case ConfigItem::Type::number: slot = std::strtod(it.value.c_str(), nullptr); break;
      case ConfigItem::Type::integer: slot = std::stoull(it.value); break;
      case ConfigItem::Type::boolean: slot = it.value == "true"; break;
      case ConfigItem::Type::text: slot = it.value; break;
      case ConfigItem::Type::list: {
        slot = ordered_json::array();
        std::stringstream ss(it.value);
        std::string item;
        while (std::getline(ss, item, ',')) slot.push_back(std::strtod(item.c_str(), nullptr));
        break;
      }
    }
  }
  return out;
}

std::string finish(const RunConfig& cfg, ordered_json result, const std::string& outdir) {
  ordered_json j;
  j["version"] = version_string();
  j["scenario"] = to_string(cfg.scenario);
  j["seed"] = cfg.seed;
  j["config"] = config_json(cfg);
  j["result"] = std::move(result);
  const std::string text = j.dump(2) + "\n";
  std::ofstream out(path_in(outdir, "summary.json"), std::ios::binary);
  if (!out) throw IoError("cannot write summary.json in " + outdir);
  out << text;
  return text;
}

ordered_json state_json(const ThermoState& s) { return {{"v", s.v}, {"u1", s.u[0]}, {"theta", s.theta}}; }

CompositeWave build_wave(const RunConfig& cfg) {
  return CompositeWave::build(cfg.end_states(), cfg.transport, cfg.contact);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::vector<double> log_times(double t0, double t1, int n) {
  std::vector<double> t(n);
  const double a = std::log1p(t0), b = std::log1p(t1);
  for (int i = 0; i < n; ++i) t[i] = std::expm1(a + (b - a) * i / (n - 1));
  return t;
}

ordered_json fit_json(const std::vector<double>& t, const std::vector<double>& y, double t0, double t1) {
  bool any = false;
  for (std::size_t i = 0; i < t.size(); ++i) any |= t[i] >= t0 && t[i] <= t1 && y[i] > 0.0;
  if (!any) return nullptr;
  try {
    const DecayFit f = decay_fit(t, y, t0, t1);
    return {{"exponent", f.exponent}, {"halfwidth", f.halfwidth}, {"points", f.points}};
  } catch (const Error& e) {
    return {{"error", e.what()}};
  }
}

}  // namespace

// ----------------------------------------------------------------- riemann

std::string cmd_riemann(const RunConfig& cfg, const std::string& outdir) {
  ensure_dir(outdir);
  const EndStates ends = cfg.end_states();
  const CompositeWave w = CompositeWave::build(ends, cfg.transport, cfg.contact);
  const StarStates& s = w.stars;
  const WaveStrengths st = wave_strengths(s, ends);
  ordered_json r;
  r["left"] = state_json(ends.left);
  r["right"] = state_json(ends.right);
  r["stars"] = {{"v_minus_star", s.v_minus_star}, {"v_plus_star", s.v_plus_star},
                {"u_star", s.u_star},             {"theta_minus_star", s.theta_minus_star},
                {"theta_plus_star", s.theta_plus_star}, {"p_star", s.p_star},
                {"iterations", s.iterations},     {"used_bisection", s.used_bisection}};
  r["strengths"] = {{"rarefaction_minus", st.rarefaction_minus},
                    {"contact", st.contact},
                    {"rarefaction_plus", st.rarefaction_plus},
                    {"total", st.total}};
  r["speeds"] = {{"lambda_minus_left", lambda(ends.left.v, s.s_minus, Family::minus)},
                 {"lambda_minus_star", lambda(s.v_minus_star, s.s_minus, Family::minus)},
                 {"contact", 0.0},
                 {"lambda_plus_star", lambda(s.v_plus_star, s.s_plus, Family::plus)},
                 {"lambda_plus_right", lambda(ends.right.v, s.s_plus, Family::plus)}};
  r["c1"] = w.contact.c1_est;
  r["c0"] = c0_constant(s, w.contact.c1_est > 0.0 ? w.contact.c1_est : 1.0);
  return finish(cfg, r, outdir);
}

// ------------------------------------------------------------------ ansatz

std::string cmd_ansatz(const RunConfig& cfg, const std::string& outdir) {
  ensure_dir(outdir);
  const CompositeWave w = build_wave(cfg);
  const EndStates& ends = w.ends;
  ordered_json r;
  ordered_json tables = ordered_json::array();
  ordered_json far = ordered_json::array();
  for (double t : cfg.ansatz.times) {
    const std::string name = "ansatz_t" + fmt("%g", t) + ".csv";
    std::ofstream out(path_in(outdir, name), std::ios::binary);
    if (!out) throw IoError("cannot write " + name);
    out << "x,v,u1,theta,region\n";
    const int n = static_cast<int>(std::lround(2.0 * cfg.ansatz.window / cfg.ansatz.table_h));
    for (int i = 0; i <= n; ++i) {
      const double x = -cfg.ansatz.window + i * cfg.ansatz.table_h;
      const ThermoState s = w.eval(x, t);
      out << fmt("%.10g", x) << ',' << fmt("%.17g", s.v) << ',' << fmt("%.17g", s.u[0]) << ','
          << fmt("%.17g", s.theta) << ',' << to_string(region_classify(w.stars, x, t)) << '\n';
    }
    tables.push_back(name);
    const ThermoState a = w.eval(-cfg.ansatz.window, t), b = w.eval(cfg.ansatz.window, t);
    const double dl = std::max({std::abs(a.v - ends.left.v), std::abs(a.u[0] - ends.left.u[0]),
                                std::abs(a.theta - ends.left.theta)});
    const double dr = std::max({std::abs(b.v - ends.right.v), std::abs(b.u[0] - ends.right.u[0]),
                                std::abs(b.theta - ends.right.theta)});
    far.push_back({{"t", t}, {"left_mismatch", dl}, {"right_mismatch", dr}});
  }
  r["tables"] = tables;
  r["far_field"] = far;

  // residual decay over a log-spaced time series
  const auto ts = log_times(cfg.ansatz.fit_t0, cfg.ansatz.fit_t1, cfg.ansatz.fit_points);
  std::vector<double> r1(ts.size()), mass(ts.size()), mom(ts.size()), en(ts.size()), wx(ts.size());
  std::ofstream out(path_in(outdir, "residuals.csv"), std::ios::binary);
  if (!out) throw IoError("cannot write residuals.csv");
  out << "t,max_r1,max_mass,max_momentum,max_energy,max_burgers_wx\n";
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double t = ts[k];
    const double st = std::sqrt(1.0 + t);
    const double hx = 1e-2 * st;
    const double reach = 10.0 * st + std::max(std::abs(w.rare_minus.burgers.w_l), std::abs(w.rare_plus.burgers.w_r)) * t;
    const int n = 2001;
    for (int i = 0; i < n; ++i) {
      const double x = -reach + 2.0 * reach * i / (n - 1);
      if (std::abs(x) <= 10.0 * st && !w.contact.trivial()) r1[k] = std::max(r1[k], std::abs(contact_r1(w.contact, x, t, hx)));
      const CompositeResiduals c = composite_residuals(w, x, t, hx);
      mass[k] = std::max(mass[k], std::abs(c.mass));
      mom[k] = std::max(mom[k], std::abs(c.momentum));
      en[k] = std::max(en[k], std::abs(c.energy));
      wx[k] = std::max({wx[k], std::abs(burgers_wx(x, t, w.rare_minus.burgers)), std::abs(burgers_wx(x, t, w.rare_plus.burgers))});
    }
    out << fmt("%.10g", t) << ',' << fmt("%.17g", r1[k]) << ',' << fmt("%.17g", mass[k]) << ','
        << fmt("%.17g", mom[k]) << ',' << fmt("%.17g", en[k]) << ',' << fmt("%.17g", wx[k]) << '\n';
  }
  r["residuals"] = "residuals.csv";
  r["fits"] = {{"max_r1", fit_json(ts, r1, cfg.ansatz.fit_t0, cfg.ansatz.fit_t1)},
               {"max_burgers_wx", fit_json(ts, wx, cfg.ansatz.fit_t0, cfg.ansatz.fit_t1)},
               {"max_momentum", fit_json(ts, mom, cfg.ansatz.fit_t0, cfg.ansatz.fit_t1)},
               {"max_energy", fit_json(ts, en, cfg.ansatz.fit_t0, cfg.ansatz.fit_t1)}};
  r["max_mass_residual"] = *std::max_element(mass.begin(), mass.end());
  r["contact_ode_residual"] = w.contact.ode_residual;
  return finish(cfg, r, outdir);
}

// ---------------------------------------------------------------- simulate

std::string cmd_simulate(const RunConfig& cfg, const std::string& outdir) {
  ensure_dir(outdir);
  const CompositeWave w = build_wave(cfg);
  Perturbation pert = cfg.perturbation;
  pert.seed = cfg.seed;
  FluidSolver solver(w, cfg.solver, pert);
  std::vector<DiagnosticsRecord> recs;
  const std::string csv = path_in(outdir, "diagnostics.csv");
  try {
    recs = solver.run();
  } catch (const Error& e) {
    const std::string snap = path_in(outdir, "last_good.csv");
    write_snapshot_csv(solver.field(), solver.charge(), snap);
    std::ostringstream os;
    os << e.what() << " (last good state at t = " << solver.time() << " in " << snap << ")";
    throw Error(e.kind(), os.str());
  }
  write_diagnostics_csv(recs, csv);
  if (cfg.snapshot) write_snapshot_csv(solver.field(), solver.charge(), path_in(outdir, "snapshot_final.csv"));

  const DiagnosticsRecord& first = recs.front();
  const DiagnosticsRecord& last = recs.back();
  bool charge_monotone = true;
  double energy_max = 0.0, vmin = first.min_v, tmin = first.min_theta;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    energy_max = std::max(energy_max, recs[k].energy_fluid);
    vmin = std::min(vmin, recs[k].min_v);
    tmin = std::min(tmin, recs[k].min_theta);
    if (k > 0 && recs[k - 1].t >= 5.0 && recs[k].linf_charge > recs[k - 1].linf_charge) charge_monotone = false;
  }
  std::vector<double> t, linf, chg;
  for (const auto& rec : recs) {
    t.push_back(rec.t);
    linf.push_back(rec.linf_pert);
    chg.push_back(rec.linf_charge);
  }
  ordered_json r;
  r["diagnostics"] = "diagnostics.csv";
  r["steps"] = solver.steps();
  r["front_speed"] = solver.front_speed();
  r["strengths"] = {{"total", wave_strengths(w.stars, w.ends).total}, {"contact", wave_strengths(w.stars, w.ends).contact}};
  r["initial"] = {{"linf_pert", first.linf_pert}, {"linf_charge", first.linf_charge}, {"energy_fluid", first.energy_fluid}};
  r["final"] = {{"t", last.t}, {"linf_pert", last.linf_pert}, {"linf_charge", last.linf_charge}, {"energy_fluid", last.energy_fluid}};
  ordered_json checks;
  checks["perturbation_decay"] = first.linf_pert > 0.0 ? last.linf_pert <= 0.2 * first.linf_pert : last.linf_pert == 0.0;
  checks["charge_decay"] =
      charge_monotone && (first.linf_charge > 0.0 ? last.linf_charge <= 0.1 * first.linf_charge : last.linf_charge == 0.0);
  checks["energy_bounded"] = energy_max <= 3.0 * first.energy_fluid;
  checks["positivity"] = vmin > 0.0 && tmin > 0.0;
  r["checks"] = checks;
  r["min_v"] = vmin;
  r["min_theta"] = tmin;
  r["energy_max_ratio"] = first.energy_fluid > 0.0 ? energy_max / first.energy_fluid : 0.0;
  const double fit_t0 = std::min(10.0, 0.5 * cfg.solver.T);
  r["fits"] = {{"linf_pert", fit_json(t, linf, fit_t0, cfg.solver.T)}};
  return finish(cfg, r, outdir);
}

// ----------------------------------------------------------- kinetic-check

namespace {

using namespace vpb::kinetic;

Distribution poly_times_maxwellian(GridPtr g, const MaxwellParams& p, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  double c[15];
  for (double& x : c) x = N(rng);
  Distribution M = maxwellian(p, g);
  const double s = std::sqrt(kR * p.theta);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const Vec3& x = g->node(i);
    const double a = (x[0] - p.u[0]) / s, b = (x[1] - p.u[1]) / s, d = (x[2] - p.u[2]) / s;
    const double poly = c[0] + c[1] * a + c[2] * b + c[3] * d + c[4] * a * a + c[5] * b * b + c[6] * d * d +
                        c[7] * a * b + c[8] * b * d + c[9] * a * d + c[10] * a * a * a + c[11] * a * b * b +
                        c[12] * a * d * d + c[13] * b * b * b + c[14] * a * b * d;
    M.values[static_cast<Eigen::Index>(i)] *= poly;
  }
  return M;
}

// positive, smooth, non-Maxwellian
Distribution smooth_density(GridPtr g, std::mt19937_64& rng) {
  // positive and smooth: a two-Maxwellian mixture
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Distribution f = Distribution::zeros(g);
  for (int k = 0; k < 2; ++k) {
    MaxwellParams p;
    p.rho = k == 0 ? 0.8 + 0.4 * U(rng) : 0.2 + 0.3 * U(rng);
    p.u = {-0.3 + 0.6 * U(rng), -0.3 + 0.6 * U(rng), -0.3 + 0.6 * U(rng)};
    p.theta = 0.8 + 0.4 * U(rng);
    f = f + maxwellian(p, g);
  }
  return f;
}

}  // namespace

std::string cmd_kinetic_check(const RunConfig& cfg, const std::string& outdir) {
  ensure_dir(outdir);
  const KineticBlock& k = cfg.kinetic;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  ordered_json r;
  ordered_json warnings = ordered_json::array();

  // orthonormal basis on Gauss-Hermite grids
  double gram_dev = 0.0;
  for (int s = 0; s < k.samples; ++s) {
    MaxwellParams p;
    p.rho = 0.5 + 1.5 * U(rng);
    p.u = {2.0 * U(rng) - 1.0, 2.0 * U(rng) - 1.0, 2.0 * U(rng) - 1.0};
    p.theta = 0.5 + 1.5 * U(rng);
    const GridPtr g = VelocityGrid::gauss_hermite(k.gh_points, p);
    const Distribution M = maxwellian(p, g);
    const auto G = gram_matrix(chi_basis(p, g), M);
    gram_dev = std::max(gram_dev, (G - Eigen::Matrix<double, 5, 5>::Identity()).cwiseAbs().maxCoeff());
  }
  r["orthonormality"] = {{"max_deviation", gram_dev}, {"pass", gram_dev <= 1e-10}};

  // conservation of the symmetrized operator on random smooth pairs
  const GridPtr box = VelocityGrid::uniform_box(k.n, k.box_half_width);
  CollisionQuad quad;
  double worst = 0.0;
  ordered_json defects = ordered_json::array();
  for (int s = 0; s < k.pairs; ++s) {
    const Distribution f = smooth_density(box, rng), g = smooth_density(box, rng);
    CollisionReport rep;
    collision_Q_sym(f, g, quad, &rep);
    defects.push_back(rep.conservation_defect);
    worst = std::max(worst, rep.conservation_defect);
    if (rep.grid_too_coarse)
      warnings.push_back("grid too coarse: conservation defect " + fmt("%.3e", rep.conservation_defect) +
                         " exceeds " + fmt("%g", quad.defect_bound) + " for pair " + std::to_string(s));
  }
  r["conservation"] = {{"grid", box->describe()}, {"defects", defects}, {"max_defect", worst},
                       {"pass", worst <= quad.defect_bound}};

  // Q(M, M) = 0 for a shifted, heated Maxwellian
  MaxwellParams pm;
  pm.u = {0.2, -0.1, 0.0};
  pm.theta = 1.1;
  const Distribution M = maxwellian(pm, box);
  const double qmm = max_abs(collision_Q(M, M, quad)) / max_abs(M);
  r["equilibrium"] = {{"max_QMM_over_peak", qmm}, {"pass", qmm <= 1e-3}};

  // dissipativity and inverses on the assembled operators
  MaxwellParams p;
  p.rho = 1.0 / 3.0;
  p.u = {0.1, 0.0, 0.0};
  p.theta = 1.0;
  const GridPtr lg = VelocityGrid::uniform_box(k.linear_n, k.box_half_width);
  const LinearizedOperators ops = assemble_linearized(lg, p, quad);
  const GlobalMaxwellianStar star = choose_global_maxwellian({p});
  const Distribution Ms = maxwellian(star.params(), lg);
  double worst_L = -1e300, worst_N = -1e300;
  for (int s = 0; s < std::max(k.samples, 100); ++s) {
    const Distribution x = project_P1(poly_times_maxwellian(lg, p, rng), p);
    const Distribution Lx{lg, ops.L * x.values};
    worst_L = std::max(worst_L, inner_product(x, Lx, Ms) / inner_product(x, x, Ms));
    const Distribution y = project_Pc(poly_times_maxwellian(lg, p, rng), p);
    const Distribution Ny{lg, ops.N * y.values};
    worst_N = std::max(worst_N, inner_product(y, Ny, Ms) / inner_product(y, y, Ms));
  }
  r["dissipativity"] = {{"grid", lg->describe()},
                        {"theta_star", star.theta_star},
                        {"max_gLg_over_norm", worst_L},
                        {"max_gNg_over_norm", worst_N},
                        {"pass", worst_L <= 1e-8 && worst_N <= 1e-8}};

  const Distribution Mp = maxwellian(p, lg);
  const Eigen::VectorXd nu = nu_on_grid(*lg, p);
  double worst_rt = 0.0, worst_c = 0.0;
  int iters = 0;
  for (int s = 0; s < k.samples; ++s) {
    const Distribution x = project_P1(poly_times_maxwellian(lg, p, rng), p);
    const Distribution h = project_P1(Distribution{lg, ops.L * x.values}, p);
    const InverseResult inv = invert_LM_on_microspace(ops, h, k.tol);
    const Distribution d = inv.g - x;
    worst_rt = std::max(worst_rt, std::sqrt(inner_product(d, d, Mp) / inner_product(x, x, Mp)));
    worst_c = std::max(worst_c, nu_weighted_norm2(inv.g, nu, Ms, false) / nu_weighted_norm2(h, nu, Ms, true));
    iters = std::max(iters, inv.iterations);
  }
  r["inverse"] = {{"max_roundtrip_error", worst_rt},
                  {"bound_constant", worst_c},
                  {"max_iterations", iters},
                  {"pass", worst_rt <= 1e-5 && std::isfinite(worst_c)}};
  r["warnings"] = warnings;
  return finish(cfg, r, outdir);
}

// --------------------------------------------------------------------- fit

std::string cmd_fit(const RunConfig& cfg, const std::string& outdir) {
  ensure_dir(outdir);
  std::ifstream in(cfg.fit.input, std::ios::binary);
  if (!in) throw IoError("cannot read " + cfg.fit.input);
  std::string line;
  if (!std::getline(in, line)) throw IoError(cfg.fit.input + " is empty");
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  auto find = [&](const std::string& name) {
    const auto it = std::find(cols.begin(), cols.end(), name);
    if (it == cols.end()) throw ValidationError("fit.column", "column '" + name + "' not in " + cfg.fit.input);
    return static_cast<std::size_t>(it - cols.begin());
  };
  const std::size_t ct = find("t"), cy = find(cfg.fit.column);
  std::vector<double> t, y;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) f.push_back(c);
    if (f.size() <= std::max(ct, cy)) throw IoError(cfg.fit.input + ": short row " + std::to_string(row));
    t.push_back(std::strtod(f[ct].c_str(), nullptr));
    y.push_back(std::strtod(f[cy].c_str(), nullptr));
  }
  const DecayFit fit = decay_fit(t, y, cfg.fit.t0, cfg.fit.t1);
  ordered_json r;
  r["input"] = cfg.fit.input;
  r["column"] = cfg.fit.column;
  r["window"] = {cfg.fit.t0, cfg.fit.t1};
  r["exponent"] = fit.exponent;
  r["halfwidth"] = fit.halfwidth;
  r["intercept"] = fit.intercept;
  r["points"] = fit.points;
  return finish(cfg, r, outdir);
}

std::string run_scenario(const RunConfig& cfg, const std::string& outdir) {
  cfg.validate();
  switch (cfg.scenario) {
    case Scenario::riemann: return cmd_riemann(cfg, outdir);
    case Scenario::ansatz: return cmd_ansatz(cfg, outdir);
    case Scenario::simulate: return cmd_simulate(cfg, outdir);
    case Scenario::kinetic_check: return cmd_kinetic_check(cfg, outdir);
    case Scenario::fit: return cmd_fit(cfg, outdir);
  }
  throw ValidationError("run.scenario", "unknown scenario");
}

}  // namespace vpb
