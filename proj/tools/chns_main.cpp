// chns: batch driver.
//
//   chns run        --config PATH [--override K=V]... [--out DIR] [--seed N]
//   chns stationary --config PATH --seed-snapshot PATH [--out DIR]
//   chns ratefit    --ledger PATH --equilibrium PATH [--config PATH] [--tail F]
//   chns check      --config PATH [--override K=V]...
//
// Exit codes: 0 ok, 1 invariant failure, 2 usage or configuration error,
// 3 solver failure.

#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "chns/check.hpp"
#include "chns/config.hpp"
#include "chns/coupled.hpp"
#include "chns/diagnostics.hpp"
#include "chns/io.hpp"
#include "chns/stationary.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvariant = 1;
constexpr int kUsage = 2;
constexpr int kSolver = 3;

void apply_thread_env() {
  const char* env = std::getenv("CHNS_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 0) {
    std::cerr << "warning: ignoring CHNS_THREADS='" << env << "'\n";
    return;
  }
  if (n > 0) omp_set_num_threads(static_cast<int>(n));
}

std::filesystem::path prepare_out(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw chns::IoError("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

int cmd_run(const std::string& config, const std::vector<std::string>& overrides, const std::string& out_dir,
            std::optional<std::uint64_t> seed) {
  chns::AppConfig cfg = chns::parse_config(config, overrides);
  if (seed) cfg.run.seed = *seed;
  const auto out = prepare_out(out_dir);
  try {
    const chns::RunResult r = chns::run(cfg.run);
    chns::write_ledger_csv(r.ledger, (out / "ledger.csv").string());
    chns::write_snapshot(r.final_state, (out / "final.snap").string());
    const chns::LedgerRow& last = r.ledger.back();
    std::cout << "run: " << last.step << " steps to t = " << last.t << "\n"
              << "  total energy   " << r.ledger.front().total_energy << " -> " << last.total_energy << "\n"
              << "  sum |BEL|      " << r.bel_abs_sum << "\n"
              << "  max |phi|      " << r.max_abs_phi << "\n"
              << "  limiter hits   " << r.clipped_steps << "\n"
              << "  wrote " << (out / "ledger.csv").string() << ", " << (out / "final.snap").string() << "\n";
  } catch (const chns::RunFailure& e) {
    chns::write_snapshot(e.last_good(), (out / "failure.snap").string());
    std::cerr << "error: " << e.what() << "\n  last good state written to " << (out / "failure.snap").string()
              << "\n";
    return e.solver_failure() ? kSolver : kInvariant;
  }
  return kOk;
}

int cmd_stationary(const std::string& config, const std::string& seed_path, const std::string& out_dir) {
  const chns::AppConfig cfg = chns::parse_config(config);
  const chns::SimState seed = chns::read_snapshot(seed_path);
  chns::StationaryConfig sc = cfg.stationary;
  sc.sigma_mean = chns::mean(seed.sigma);
  const chns::Equilibrium eq = chns::solve_stationary(seed.phi, cfg.run.params, sc);
  const auto out = prepare_out(out_dir);

  chns::SimState st(seed.grid());
  st.phi = eq.phi_inf;
  st.sigma = eq.sigma_inf;
  st.mu = chns::chemical_potential(eq.phi_inf, eq.sigma_inf, cfg.run.params, sc.solver);
  st.t = seed.t;
  chns::write_snapshot(st, (out / "equilibrium.snap").string());

  const chns::ScalarField d = seed.phi - eq.phi_inf;
  std::cout << "stationary: converged in " << eq.iterations << " iterations\n"
            << "  residual            " << eq.residual << "\n"
            << "  mean phi, sigma     " << eq.mass_phi << ", " << eq.mass_sigma << "\n"
            << "  F(equilibrium)      " << eq.free_energy_at << "\n"
            << "  F(seed)             " << chns::free_energy(seed.phi, seed.sigma, cfg.run.params, sc.solver) << "\n"
            << "  max|phi_seed - phi| " << chns::max_abs(d) << "\n"
            << "  wrote " << (out / "equilibrium.snap").string() << "\n";
  return kOk;
}

int cmd_ratefit(const std::string& ledger_path, const std::string& eq_path, const std::string& config,
                double tail) {
  const chns::ModelParams p = config.empty() ? chns::ModelParams{} : chns::parse_config(config).run.params;
  const chns::EnergyLedger ledger = chns::read_ledger_csv(ledger_path);
  const chns::SimState eq = chns::read_snapshot(eq_path);
  const double e_inf = chns::free_energy(eq.phi, eq.sigma, p, chns::SolverConfig{1e-13, 0});

  // Energy gap as the deficit proxy: sqrt(E - E_inf) scales like the distance
  // to a nondegenerate equilibrium.
  std::vector<double> t, deficit;
  for (const chns::LedgerRow& r : ledger.rows()) {
    t.push_back(r.t);
    deficit.push_back(std::sqrt(std::max(r.total_energy - e_inf, 0.0)));
  }
  try {
    const chns::RateFit f = chns::rate_fit(t, deficit, tail);
    std::cout << "ratefit: window [" << f.t_begin << ", " << f.t_end << "]\n"
              << "  slope      " << f.slope << "\n"
              << "  kappa_hat  " << f.kappa_hat << (f.flagged ? "  (outside (0, 1/2))" : "") << "\n"
              << "  r^2        " << f.r2 << "\n";
  } catch (const chns::InvalidArgument& e) {
    std::cerr << e.what() << "\n";
    return kInvariant;
  }
  return kOk;
}

int cmd_check(const std::string& config, const std::vector<std::string>& overrides) {
  const chns::AppConfig cfg = chns::parse_config(config, overrides);
  const std::vector<chns::CheckResult> results = chns::run_checks(cfg);
  const chns::CheckResult* first_failure = nullptr;
  for (const chns::CheckResult& r : results) {
    std::cout << (r.passed ? "ok     " : "FAILED ") << r.name << ": " << r.value << " (limit " << r.limit << ")\n";
    if (!r.passed && !first_failure) first_failure = &r;
  }
  if (first_failure) {
    std::cerr << "check failed: " << first_failure->name << "\n";
    return kInvariant;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_env();
  CLI::App app{"Navier-Stokes / Cahn-Hilliard / diffusion simulator"};
  app.require_subcommand(1);

  std::string config, out_dir = "out", seed_snapshot, ledger, equilibrium;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  double tail = 0.5;

  auto* run = app.add_subcommand("run", "time-step a scenario and write the ledger and final state");
  run->add_option("--config", config, "configuration file")->required();
  run->add_option("--override", overrides, "section.key=value, applied after the file");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "random seed (overrides scenario.seed)");

  auto* stationary = app.add_subcommand("stationary", "solve for the steady state reached from a snapshot");
  stationary->add_option("--config", config, "configuration file")->required();
  stationary->add_option("--seed-snapshot", seed_snapshot, "snapshot to start from")->required();
  stationary->add_option("--out", out_dir, "output directory");

  auto* ratefit = app.add_subcommand("ratefit", "fit the algebraic decay exponent of a ledger");
  ratefit->add_option("--ledger", ledger, "ledger CSV")->required();
  ratefit->add_option("--equilibrium", equilibrium, "equilibrium snapshot")->required();
  ratefit->add_option("--config", config, "configuration with the model parameters");
  ratefit->add_option("--tail", tail, "fraction of samples used for the fit")->check(CLI::Range(0.0, 1.0));

  auto* check = app.add_subcommand("check", "run the fast invariant suite");
  check->add_option("--config", config, "configuration file")->required();
  check->add_option("--override", overrides, "section.key=value, applied after the file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) return cmd_run(config, overrides, out_dir, seed);
    if (*stationary) return cmd_stationary(config, seed_snapshot, out_dir);
    if (*ratefit) return cmd_ratefit(ledger, equilibrium, config, tail);
    if (*check) return cmd_check(config, overrides);
  } catch (const chns::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const chns::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kUsage;
  } catch (const chns::FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kUsage;
  } catch (const chns::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolver;
  } catch (const chns::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvariant;
  }
  return kUsage;
}
