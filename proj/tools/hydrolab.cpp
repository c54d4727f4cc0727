#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hydrolab/config.hpp"
#include "hydrolab/environment.hpp"
#include "hydrolab/equilibrium.hpp"
#include "hydrolab/experiment.hpp"
#include "hydrolab/flux.hpp"
#include "hydrolab/interface.hpp"
#include "hydrolab/riemann.hpp"
#include "hydrolab/simulation.hpp"

#ifndef HYDROLAB_VERSION
#define HYDROLAB_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hydrolab;

namespace {

struct Options {
  std::string config;
  bool check = false;
  std::optional<std::uint64_t> seed;
  std::string out = "hydrolab_out";
};

/// A CSV table with a fixed header.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Outcome {
  Table table;
  json meta;
  bool within_tolerance = true;
};

json load_document(const Options& opt) {
  json doc = opt.config.empty() ? json{{"schema_version", kConfigSchemaVersion}} : load_config(opt.config);
  if (opt.seed) doc["seed"] = *opt.seed;
  return doc;
}

json section(const json& doc, const char* key) { return doc.contains(key) ? doc.at(key) : json::object(); }

Window window_of(const json& j, Window fallback) {
  if (!j.contains("window")) return fallback;
  return Window{j.at("window").at(0).get<std::int64_t>(), j.at("window").at(1).get<std::int64_t>()};
}

void write_outputs(const std::string& name, const Options& opt, const json& doc, Outcome& res) {
  fs::create_directories(opt.out);
  std::ofstream csv(fs::path(opt.out) / (name + ".csv"));
  csv.precision(12);
  for (std::size_t i = 0; i < res.table.columns.size(); ++i) csv << (i ? "," : "") << res.table.columns[i];
  csv << '\n';
  for (const auto& row : res.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << row[i];
    csv << '\n';
  }
  res.meta["command"] = name;
  res.meta["seed"] = doc.value("seed", std::uint64_t{1});
  res.meta["config_digest"] = config_digest(doc);
  res.meta["versions"] = {{"hydrolab", HYDROLAB_VERSION}, {"schema", kConfigSchemaVersion}};
  res.meta["within_tolerance"] = res.within_tolerance;
  std::ofstream(fs::path(opt.out) / (name + ".json")) << res.meta.dump(2) << '\n';
  std::cout << res.meta.dump(2) << '\n';
}

Outcome cmd_flux(const json& doc) {
  const auto cfg = experiment_from_json(doc);
  const auto table = cfg.flux_table();
  Outcome res;
  res.table.columns = {"rho", "beta", "rbar", "flux"};
  const auto rho = table->densities();
  for (std::size_t i = 0; i < rho.size(); ++i)
    res.table.rows.push_back({rho[i], table->fugacities()[i], table->averaged()[i], table->values()[i]});
  res.meta["critical_density"] = table->critical_density_finite() ? json(table->critical_density()) : json("inf");
  res.meta["plateau"] = table->plateau();
  res.meta["floor"] = table->floor();
  res.meta["concave"] = table->tabulated_concave();
  try {
    res.meta["critical_speed"] = critical_speed(*table);
  } catch (const std::exception& e) {
    res.meta["critical_speed"] = nullptr;
    res.meta["critical_speed_note"] = e.what();
  }
  res.within_tolerance = table->tabulated_concave();
  return res;
}

Outcome cmd_env(const json& doc) {
  const auto cfg = experiment_from_json(doc);
  const Window w = window_of(section(doc, "simulate"), Window{-1000, 1000});
  const auto env = realise(cfg.environment, w);
  Outcome res;
  res.table.columns = {"x", "alpha"};
  for (std::int64_t x = w.lo; x <= w.hi; ++x) res.table.rows.push_back({static_cast<double>(x), env(x)});
  const auto realised = check_assumptions(env);
  res.meta["realised_window"] = realised.to_json();
  res.meta["floor"] = env.floor();
  res.meta["defects_in_window"] = env.defects().size();
  bool ok = realised.all_pass();
  if (const auto* spec = std::get_if<DeterministicEnvSpec>(&cfg.environment)) {
    const auto seq = check_assumptions(*spec);
    res.meta["sequences"] = seq.to_json();
    ok = seq.all_pass();
  }
  res.within_tolerance = ok;
  return res;
}

Outcome cmd_riemann(const json& doc) {
  const auto cfg = experiment_from_json(doc);
  const auto g = section(doc, "godunov");
  const RiemannProblem prob{cfg.lambda, cfg.rho, cfg.u, cfg.flux_table()};
  const RiemannSolver solver(prob);
  GodunovOptions opts;
  opts.x_min = cfg.window_lo;
  opts.x_max = cfg.window_hi;
  opts.dx = g.value("dx", opts.dx);
  opts.cfl = g.value("cfl", opts.cfl);
  opts.order = g.value("order", opts.order);
  const double t = cfg.horizon;
  const auto fv = godunov_solve(*prob.flux, PiecewiseConstant{{cfg.u}, {cfg.lambda, cfg.rho}}, t, opts);
  Outcome res;
  res.table.columns = {"x", "variational", "godunov"};
  double l1 = 0.0;
  for (std::size_t i = 0; i < fv.centers.size(); ++i) {
    const double x = fv.centers[i];
    const double ref = solver.profile(x, t);
    l1 += std::abs(ref - fv.density[i]) * opts.dx;
    res.table.rows.push_back({x, ref, fv.density[i]});
  }
  const double tol = g.value("l1_tolerance", 0.03);
  res.meta["l1"] = l1;
  res.meta["l1_tolerance"] = tol;
  res.meta["shock_speeds"] = solver.shock_speeds(cfg.window_lo / t, cfg.window_hi / t);
  res.meta["mass_defect"] = fv.mass_final - fv.mass_initial - fv.boundary_inflow;
  res.within_tolerance = l1 <= tol;
  return res;
}

Outcome cmd_simulate(const json& doc) {
  const auto cfg = experiment_from_json(doc);
  const auto s = section(doc, "simulate");
  const Window w = window_of(s, Window{-1000, 1000});
  const double time = s.value("time", 100.0);
  const int checkpoints = s.value("checkpoints", 10);
  const auto trackers = s.value("trackers", std::vector<std::int64_t>{0});
  const auto env = std::make_shared<const Environment>(realise(cfg.environment, w));
  const EquilibriumSampler sampler(env, cfg.flux_table(), cfg.mode, cfg.seed, cfg.delta);
  const auto init = riemann_initial(sampler, cfg.lambda, cfg.rho, cfg.u, 1.0, w);
  Simulation sim(env, {cfg.rate, cfg.p}, init, cfg.seed + 1);
  std::vector<std::size_t> ids;
  for (auto x : trackers) ids.push_back(sim.track_current(PathSpec::fixed(x)));

  Outcome res;
  res.table.columns = {"time", "mass", "events"};
  for (auto x : trackers) res.table.columns.push_back("current_" + std::to_string(x));
  bool exact = true;
  for (int k = 1; k <= checkpoints; ++k) {
    sim.evolve_until(time * k / checkpoints);
    std::vector<double> row{sim.time(), static_cast<double>(sim.state().finite_mass()),
                            static_cast<double>(sim.events())};
    for (std::size_t i = 0; i < ids.size(); ++i) {
      row.push_back(static_cast<double>(sim.current(ids[i])));
      exact = exact && sim.current(ids[i]) == mass_right_of(sim.state(), trackers[i]) - mass_right_of(init, trackers[i]);
    }
    exact = exact && sim.state().finite_mass() == init.finite_mass();
    res.table.rows.push_back(std::move(row));
  }
  res.meta["events"] = sim.events();
  res.meta["event_digest"] = sim.event_digest();
  res.meta["suppressed"] = sim.counters(0).suppressed;
  res.meta["mass_and_current_exact"] = exact;
  res.within_tolerance = exact;
  return res;
}

Outcome cmd_interface(const json& doc) {
  const auto cfg = experiment_from_json(doc);
  const auto s = section(doc, "interface");
  const double t_scale = s.value("t_scale", 500.0);
  const int snapshots = s.value("snapshots", 10);
  InterfaceOptions opts;
  opts.grid_size = s.value("grid_size", opts.grid_size);
  const Window w = padded_window(cfg.window_lo, cfg.window_hi, t_scale, t_scale * cfg.horizon, cfg.margin_speed);
  const auto env = std::make_shared<const Environment>(realise(cfg.environment, w));
  const EquilibriumSampler sampler(env, cfg.flux_table(), cfg.mode, cfg.seed, cfg.delta);
  auto setup = init_family(sampler, env, {cfg.rate, cfg.p}, cfg.lambda, cfg.rho, cfg.u, t_scale, w, cfg.seed + 1, opts);
  auto& ens = *setup.ensemble;
  auto& fam = *setup.family;

  Outcome res;
  res.table.columns = {"time"};
  for (double r : fam.levels()) res.table.columns.push_back("X_" + std::to_string(r));
  bool ok = true;
  std::string breach;
  for (int k = 1; k <= snapshots; ++k) {
    ens.evolve_until(t_scale * cfg.horizon * k / snapshots);
    fam.record(ens.time());
    try {
      fam.verify(ens);
    } catch (const InterfaceInvariantError& e) {
      ok = false;
      breach = e.what();
    }
    ok = ok && interface_ordered(fam);
    std::vector<double> row{ens.time()};
    for (auto p : fam.positions()) row.push_back(static_cast<double>(p));
    res.table.rows.push_back(std::move(row));
  }
  res.meta["events"] = ens.events();
  res.meta["moves"] = fam.moves();
  res.meta["sandwich_checks"] = fam.checks();
  res.meta["invariants_hold"] = ok;
  if (!breach.empty()) res.meta["breach"] = breach;
  res.within_tolerance = ok;
  return res;
}

Outcome cmd_experiment(const json& doc) {
  const auto cfg = experiment_from_json(doc);
  const auto e = section(doc, "experiment");
  const std::string kind = e.value("kind", std::string("profile"));
  Outcome res;
  if (kind == "profile") {
    const auto rep = run_profile_experiment(cfg);
    res.meta = rep.to_json();
    res.table.columns = {"n", "x", "reference", "mean_block", "shock_cell"};
    for (const auto& s : rep.scales)
      for (std::size_t i = 0; i < s.centers.size(); ++i)
        res.table.rows.push_back({static_cast<double>(s.n), s.centers[i], s.reference[i], s.mean_blocks[i],
                                  s.shock_cell[i] ? 1.0 : 0.0});
    const double tol = e.value("l1_tolerance", 0.1);
    res.within_tolerance = rep.scales.back().l1 <= tol && rep.scales.back().boundary_clear;
  } else if (kind == "current") {
    const auto rep = run_current_experiment(cfg);
    res.meta = rep.to_json();
    res.table.columns = {"n", "replica", "current_per_time", "reference"};
    for (const auto& s : rep.scales)
      for (std::size_t r = 0; r < s.per_replica.size(); ++r)
        res.table.rows.push_back({static_cast<double>(s.n), static_cast<double>(r), s.per_replica[r],
                                  rep.reference.value});
    const double tol = e.value("current_tolerance", 0.03);
    res.within_tolerance = std::abs(rep.scales.back().mean - rep.reference.value) <= tol;
  } else if (kind == "front") {
    const auto rep = run_front_experiment(cfg);
    res.meta = rep.to_json();
    res.table.columns = {"n", "replica", "speed", "critical_speed"};
    for (const auto& s : rep.scales)
      for (std::size_t r = 0; r < s.speeds.size(); ++r)
        res.table.rows.push_back({static_cast<double>(s.n), static_cast<double>(r), s.speeds[r], rep.critical_speed});
    const double tol = e.value("speed_tolerance", 0.05);
    res.within_tolerance = std::abs(rep.scales.back().mean_speed - rep.critical_speed) <= tol;
  } else {
    throw std::invalid_argument("unknown experiment kind " + kind);
  }
  return res;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Disordered zero-range process simulator and hydrodynamic lab"};
  app.set_version_flag("--version", HYDROLAB_VERSION);
  app.require_subcommand(1);
  Options opt;

  using Runner = Outcome (*)(const json&);
  const std::vector<std::tuple<std::string, std::string, Runner>> commands = {
      {"flux", "Tabulate the averaged density and the macroscopic flux", cmd_flux},
      {"env", "Realise an environment and run the assumption diagnostics", cmd_env},
      {"riemann", "Variational Riemann solution against the Godunov scheme", cmd_riemann},
      {"simulate", "Run the particle system and record currents", cmd_simulate},
      {"interface", "Track the interface family of a Riemann datum", cmd_interface},
      {"experiment", "Profile, current or front experiment over a list of scales", cmd_experiment},
  };
  for (const auto& [name, help, fn] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_flag("--check", opt.check, "Exit nonzero when tolerances are violated");
    sub->add_option("--seed", opt.seed, "Override the config seed");
    sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
  }
  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [name, help, fn] : commands) {
      if (!app.got_subcommand(name)) continue;
      const json doc = load_document(opt);
      Outcome res = fn(doc);
      write_outputs(name, opt, doc, res);
      if (opt.check && !res.within_tolerance) {
        std::cerr << "hydrolab: " << name << " outside tolerance\n";
        return 3;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "hydrolab: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
