#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "hydrolab/environment.hpp"
#include "hydrolab/equilibrium.hpp"
#include "hydrolab/experiment.hpp"
#include "hydrolab/flux.hpp"
#include "hydrolab/interface.hpp"
#include "hydrolab/lattice.hpp"
#include "hydrolab/riemann.hpp"
#include "hydrolab/simulation.hpp"
#include "oracles.hpp"

using namespace hydrolab;

namespace {

int failures = 0;

void report(const std::string& id, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void guarded(const std::string& id, const std::function<void()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("  [%s took %.1f s]\n", id.c_str(), secs);
}

const DisorderLaw kDilute = DisorderLaw::dirac(1.0, 0.5);

std::shared_ptr<const FluxTable> dilute_table() {
  static const auto t = std::make_shared<const FluxTable>(FluxTable::from_model({JumpRateSpec::mm1(), kDilute, 1.0}));
  return t;
}

std::shared_ptr<const Environment> dilute_env(Window w) {
  DeterministicEnvSpec spec;
  spec.law = kDilute;
  return std::make_shared<const Environment>(build_deterministic(spec, w));
}

ExperimentConfig dilute_config(double lambda, double rho) {
  ExperimentConfig cfg;
  DeterministicEnvSpec env;
  env.law = kDilute;
  cfg.environment = env;
  cfg.rate = JumpRateSpec::mm1();
  cfg.lambda = lambda;
  cfg.rho = rho;
  cfg.seed = 2024;
  return cfg;
}

LatticeState random_state(Window w, std::mt19937_64& rng, int max_occ) {
  std::vector<Occupancy> occ(static_cast<std::size_t>(w.size()));
  for (auto& n : occ) n = static_cast<Occupancy>(rng() % static_cast<unsigned>(max_occ + 1));
  return LatticeState(w, occ);
}

void closed_forms() {
  const double beta = 0.5, c = 0.5;
  const double r = mean_density(JumpRateSpec::mm1(), beta);
  const double rc = critical_density(JumpRateSpec::mm1(), kDilute);
  const double vc = critical_speed(*dilute_table());
  const double e1 = std::abs(r - beta / (1 - beta));
  const double e2 = std::abs(rc - c / (1 - c));
  const double e3 = std::abs(vc - (1 - c) * (1 - c));
  report("C1 closed-form flux", std::max({e1, e2, e3}) <= 1e-8,
         fmt("R(0.5)=%.12f rho_c=%.12f v_c=%.12f max err %.2e (tol 1e-8)", r, rc, vc, std::max({e1, e2, e3})));
}

void equilibrium_current() {
  // The 2000-site observation window sits inside a margin wider than any influence front by t.
  const double t = 1e4;
  const DisorderLaw law = DisorderLaw::dirac(1.0);
  const Window w = padded_window(-1000.0, 999.0, 1.0, t, 1.5);
  const auto env =
      std::make_shared<const Environment>(w, std::vector<double>(static_cast<std::size_t>(w.size()), 1.0), law);
  const auto flux = std::make_shared<const FluxTable>(FluxTable::from_model({JumpRateSpec::mm1(), law, 1.0}));
  const auto init =
      sample_equilibrium(env, flux, mean_density(JumpRateSpec::mm1(), 0.5), EquilibriumMode::stationary, 11);
  Simulation sim(env, {JumpRateSpec::mm1(), 1.0}, init, 12);
  const auto id = sim.track_current(PathSpec::fixed(0));
  sim.evolve(t);
  const double g = static_cast<double>(sim.current(id)) / t;
  report("C2 equilibrium current", g >= 0.48 && g <= 0.52,
         fmt("Gamma_0/t = %.4f (target [0.48, 0.52]); boundary %s", g,
             sim.left_influence() < -1000 && sim.right_influence() > 999 ? "clear" : "reached"));
}

void supercritical_plateau() {
  auto hi = dilute_config(2.0, 2.0);
  hi.scales = {2000};
  hi.replicas = 2;
  const auto rh = run_current_experiment(hi);
  auto lo = dilute_config(0.5, 0.5);
  lo.scales = {2000};
  lo.replicas = 2;
  const auto rl = run_current_experiment(lo);
  const double a = rh.scales[0].mean, b = rl.scales[0].mean;
  const bool ok = a >= 0.45 && a <= 0.55 && std::abs(b - 1.0 / 3.0) <= 0.03;
  report("C3 supercritical plateau", ok,
         fmt("rho=2: %.4f (target [0.45, 0.55]); rho=0.5: %.4f (target 1/3 +- 0.03)", a, b));
}

void riemann_front() {
  auto cfg = dilute_config(2.0, 0.0);
  cfg.scales = {2000};
  cfg.replicas = 20;
  const auto rep = run_front_experiment(cfg);
  const auto& s = rep.scales[0];
  const bool ok = s.mean_speed >= 0.20 && s.mean_speed <= 0.30 && std::abs(s.plateau - 1.0) <= 0.1;
  report("C4 riemann front", ok,
         fmt("front speed %.4f (target [0.20, 0.30]); plateau %.4f (target 1 +- 0.1); boundary %s", s.mean_speed,
             s.plateau, s.boundary_clear ? "clear" : "reached"));
}

void oracle_equivalence() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const RiemannProblem prob{u(rng), u(rng), 0.0, dilute_table()};
    GodunovOptions opts;
    opts.dx = 1.0 / 400.0;
    const auto res = godunov_solve(*prob.flux, PiecewiseConstant{{0.0}, {prob.left, prob.right}}, 1.0, opts);
    const RiemannSolver solver(prob);
    double l1 = 0.0;
    for (std::size_t i = 0; i < res.centers.size(); ++i) {
      const double x = res.centers[i];
      if (x < -2.0 || x > 2.0) continue;
      l1 += std::abs(res.density[i] - solver.profile(x, 1.0)) * opts.dx;
    }
    std::printf("  pair %d: lambda=%.3f rho=%.3f L1=%.5f\n", k, prob.left, prob.right, l1);
    worst = std::max(worst, l1);
  }
  report("C5 godunov vs variational", worst <= 0.03, fmt("worst L1 on [-2, 2] = %.5f (tol 0.03)", worst));
}

void convergence_trend() {
  auto cfg = dilute_config(2.0, 0.0);
  cfg.scales = {500, 1000, 2000, 4000};
  const auto rep = run_profile_experiment(cfg);
  std::vector<double> l1;
  std::string detail = "L1 by N:";
  for (const auto& s : rep.scales) {
    l1.push_back(s.l1);
    detail += fmt(" %lld=%.4f (mean profile %.4f, shock cells %.4f)", static_cast<long long>(s.n), s.l1,
                  s.l1_of_mean, s.l1_shock);
  }
  int inversions = 0;
  for (std::size_t i = 1; i < l1.size(); ++i) inversions += l1[i] > l1[i - 1];
  const bool ok = inversions <= 1 && l1.back() <= 0.1;
  report("C6 profile convergence", ok, detail + fmt("; inversions %d (max 1); L1(4000) tol 0.1", inversions));
}

void property_suites() {
  // Attractiveness ordering and sign changes.
  {
    const Window w{-60, 60};
    const auto env = dilute_env(w);
    std::mt19937_64 rng(71);
    std::uint64_t order_bad = 0, sign_bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto lo = random_state(w, rng, 2);
      auto hi_occ = std::vector<Occupancy>(lo.occupancies().begin(), lo.occupancies().end());
      for (auto& n : hi_occ) n += static_cast<Occupancy>(rng() % 3);
      const auto other = random_state(w, rng, 4);
      auto ens = couple({lo, LatticeState(w, hi_occ), other}, env, {JumpRateSpec::mm1(), 0.8}, 500 + trial);
      std::size_t changes = sign_changes(ens.state(0), ens.state(2));
      for (int k = 0; k < 1000; ++k) {
        ens.evolve(0.5);
        order_bad += !dominated(ens.state(0), ens.state(1));
        const std::size_t now = sign_changes(ens.state(0), ens.state(2));
        sign_bad += now > changes;
        changes = now;
      }
    }
    report("C7a attractiveness ordering", order_bad == 0, fmt("%llu violations over 1e3 x 100", (unsigned long long)order_bad));
    report("C7e sign changes nonincreasing", sign_bad == 0, fmt("%llu increases over 1e3 x 100", (unsigned long long)sign_bad));
  }
  // Mass conservation and the current identity.
  {
    const Window w{-500, 500};
    std::mt19937_64 rng(72);
    const auto init = random_state(w, rng, 3);
    Simulation sim(dilute_env(w), {JumpRateSpec::k_server(2), 0.75}, init, 73);
    const PathSpec paths[] = {PathSpec::fixed(3), PathSpec::scaled(-0.1, 0.6131, 200.0),
                              PathSpec::scaled(0.4, -0.9137, 200.0)};
    std::vector<std::size_t> ids;
    for (const auto& p : paths) ids.push_back(sim.track_current(p));
    std::uint64_t mass_bad = 0, current_bad = 0;
    for (int k = 0; k < 1000; ++k) {
      sim.evolve(0.2);
      mass_bad += sim.state().finite_mass() != init.finite_mass();
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto pos = sim.path_position(ids[i]);
        current_bad += sim.current(ids[i]) != mass_right_of(sim.state(), pos) - mass_right_of(init, paths[i].position(0.0));
      }
    }
    report("C7b closed-window mass conservation", mass_bad == 0, fmt("%llu mismatches at 1000 checkpoints", (unsigned long long)mass_bad));
    report("C7c current identity", current_bad == 0,
           fmt("%llu mismatches over 3 paths x 1000 checkpoints", (unsigned long long)current_bad));
  }
  // Interface invariants.
  {
    const double t_scale = 400.0;
    const Window w = padded_window(-1.0, 1.0, t_scale, t_scale, 1.5);
    const auto env = dilute_env(w);
    const EquilibriumSampler sampler(env, dilute_table(), EquilibriumMode::completed, 74);
    InterfaceOptions opts;
    opts.grid_size = 16;
    auto setup = init_family(sampler, env, {JumpRateSpec::mm1(), 1.0}, 2.0, 0.0, 0.0, t_scale, w, 75, opts);
    auto& ens = *setup.ensemble;
    auto& fam = *setup.family;
    struct Watch : EventObserver {
      const InterfaceFamily& f;
      std::vector<std::int64_t> last;
      std::uint64_t step_bad = 0, order_bad = 0;
      explicit Watch(const InterfaceFamily& fam) : f(fam), last(fam.positions()) {}
      void after_event(const HarrisEvent&, const CoupledEnsemble&) override {
        for (std::size_t k = 0; k < last.size(); ++k) step_bad += std::llabs(f.positions()[k] - last[k]) > 1;
        order_bad += !interface_ordered(f);
        last = f.positions();
      }
    } watch(fam);
    ens.add_observer(&watch);
    std::uint64_t sandwich_bad = 0, poisson_bad = 0;
    while (ens.events() < 1000000) {
      ens.evolve(1.0);
      try {
        fam.verify(ens);
      } catch (const InterfaceInvariantError&) {
        ++sandwich_bad;
      }
      for (auto p : fam.positions()) {
        const auto d = p - fam.origin();
        poisson_bad += d > fam.upper_counter() || -d > fam.lower_counter();
      }
    }
    ens.remove_observer(&watch);
    const bool ok = sandwich_bad + watch.step_bad + watch.order_bad + poisson_bad == 0;
    report("C7d interface invariants", ok,
           fmt("%llu events; sandwich %llu, step %llu, monotone %llu, poisson %llu violations",
               (unsigned long long)ens.events(), (unsigned long long)sandwich_bad, (unsigned long long)watch.step_bad,
               (unsigned long long)watch.order_bad, (unsigned long long)poisson_bad));
  }
  // Concave envelope against the chord oracle.
  {
    std::mt19937_64 rng(76);
    int checked = 0, bad = 0;
    while (checked < 100) {
      const std::size_t n = 3 + rng() % 40;
      std::vector<std::int64_t> xi(n), yi(n);
      std::int64_t pos = 0;
      for (std::size_t i = 0; i < n; ++i) {
        pos += 1 + static_cast<std::int64_t>(rng() % 9);
        xi[i] = pos;
        yi[i] = static_cast<std::int64_t>(rng() % 4001) - 2000;
      }
      if (hydrolab::testing::has_collinear_triple(xi, yi)) continue;
      const std::vector<double> x(xi.begin(), xi.end()), y(yi.begin(), yi.end());
      bad += concave_envelope(x, y) != hydrolab::testing::chord_oracle(xi, yi);
      ++checked;
    }
    report("C7f concave envelope oracle", bad == 0, fmt("%d of 100 inputs differ", bad));
  }
  // Macroscopic stability.
  {
    const std::int64_t n = 2000;
    const Window w = padded_window(-2.0, 2.0, n, n, 1.5);
    const auto env = dilute_env(w);
    const EquilibriumSampler a(env, dilute_table(), EquilibriumMode::completed, 77);
    const EquilibriumSampler b(env, dilute_table(), EquilibriumMode::completed, 78);
    const auto eta = riemann_initial(a, 2.0, 0.0, 0.0, n, w);
    const auto xi = riemann_initial(b, 2.0, 0.0, 0.0, n, w);
    auto ens = couple({eta, xi}, env, {JumpRateSpec::mm1(), 1.0}, 79);
    const double before = static_cast<double>(delta_distance(eta, xi)) / n;
    ens.evolve(static_cast<double>(n));
    const double after = static_cast<double>(delta_distance(ens.state(0), ens.state(1))) / n;
    report("C7g macroscopic stability", after <= before + 0.05,
           fmt("Delta/N: %.4f -> %.4f (allowance 0.05)", before, after));
  }
  // Equilibrium law of large numbers.
  {
    const Window w{-50000, 50000};
    const auto env = dilute_env(w);
    const auto flux = dilute_table();
    std::string detail;
    bool ok = true;
    for (double rho : {0.1, 0.4, 0.8}) {
      const auto s = sample_equilibrium(env, flux, rho, EquilibriumMode::stationary, 80);
      const double size = static_cast<double>(w.size());
      const double mean = static_cast<double>(s.finite_mass()) / size;
      const double beta = flux->fugacity(rho);
      double var = 0.0;
      for (double a : env->values()) var += occupancy_variance(JumpRateSpec::mm1(), beta / a);
      const double sd = std::sqrt(var) / size;
      const double expect = [&] {
        double m = 0.0;
        for (double a : env->values()) m += mean_density(JumpRateSpec::mm1(), beta / a);
        return m / size;
      }();
      ok = ok && std::abs(mean - expect) <= 3.0 * sd;
      detail += fmt(" rho=%.1f mean %.5f expect %.5f 3sd %.5f;", rho, mean, expect, 3.0 * sd);
    }
    report("C7h equilibrium LLN", ok, detail);
  }
}

void assumption_diagnostics() {
  const auto law = DisorderLaw::uniform(0.6, 1.0, 0.5);
  DeterministicEnvSpec dense;
  dense.defects = SequenceSpec::power(2.0);
  dense.uniform = SequenceSpec::power(2.0);
  dense.law = law;
  DeterministicEnvSpec sparse_defects = dense;
  sparse_defects.defects = SequenceSpec::geometric(2.0);
  DeterministicEnvSpec sparse_uniform = dense;
  sparse_uniform.uniform = SequenceSpec::geometric(2.0);

  const auto a = check_assumptions(dense);
  const auto b = check_assumptions(sparse_defects);
  const auto c = check_assumptions(sparse_uniform);
  const bool ok = a.empirical_law_condition && a.dense_defects && b.empirical_law_condition && !b.dense_defects &&
                  !c.empirical_law_condition && c.dense_defects;
  const auto yn = [](bool v) { return v ? "pass" : "fail"; };
  report("C8 assumption diagnostics", ok,
         fmt("power/power law %s defects %s; geometric defects law %s defects %s; geometric uniform law %s defects %s",
             yn(a.empirical_law_condition), yn(a.dense_defects), yn(b.empirical_law_condition), yn(b.dense_defects),
             yn(c.empirical_law_condition), yn(c.dense_defects)));
}

}  // namespace

int main() {
  guarded("C1", closed_forms);
  guarded("C2", equilibrium_current);
  guarded("C3", supercritical_plateau);
  guarded("C4", riemann_front);
  guarded("C5", oracle_equivalence);
  guarded("C6", convergence_trend);
  guarded("C7", property_suites);
  guarded("C8", assumption_diagnostics);
  std::printf("%d criteria lines failed\n", failures);
  return failures == 0 ? 0 : 1;
}
