// lasalt command line driver: expectation / spde / moments / ensemble /
// verify / characteristics. Exit codes: 0 ok, 2 config error, 3 numerical
// failure, 4 verification failure.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "lasalt/accept.hpp"
#include "lasalt/characteristics.hpp"
#include "lasalt/config.hpp"
#include "lasalt/io.hpp"
#include "lasalt/moments.hpp"
#include "lasalt/ops.hpp"

namespace fs = std::filesystem;
using namespace lasalt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerification = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  bool force = false;
  int threads = 1;
};

std::string out_dir_of(const CommonArgs& args, const RunConfig& cfg) {
  return args.out_dir.empty() ? cfg.output_dir : args.out_dir;
}

ExpectationTrajectory load_checked_trajectory(const std::string& dir,
                                              const RunConfig& cfg) {
  ExpectationTrajectory traj = load_trajectory(dir + "/trajectory");
  if (traj.config_hash != config_hash(cfg))
    throw HashMismatch("trajectory in " + dir +
                       " was produced by a different config");
  return traj;
}

int cmd_expectation(const CommonArgs& args) {
  const RunConfig cfg = load_config(args.config_path);
  const GridPtr grid = make_grid_from(cfg);
  const NoiseBasis basis = make_noise_from(cfg, grid);
  ExpectationOptions eopts;
  eopts.dt = cfg.dt;
  eopts.t_end = cfg.t_end;
  eopts.save_every = cfg.save_every;
  eopts.g = cfg.g;
  ExpectationTrajectory traj = run_expectation(
      basis, make_initial_field(cfg.ic_omega, grid),
      make_initial_field(cfg.ic_theta, grid),
      ConstantVector{cfg.ubar0[0], cfg.ubar0[1]}, eopts);
  traj.config_hash = config_hash(cfg);

  const std::string out = out_dir_of(args, cfg);
  save_trajectory(out + "/trajectory", traj, args.force);
  DiagnosticsCsv csv(out + "/expectation.csv");
  for (const ExpectationSnapshot& s : traj.snapshots) {
    csv.row(s.t, "Theta", s.Theta);
    csv.row(s.t, "Omega", s.Omega);
    csv.row(s.t, "ptilde", s.ptilde);
    csv.row(s.t, "ubar_x", s.Ubar.x, s.Ubar.x, s.Ubar.x);
    csv.row(s.t, "ubar_y", s.Ubar.y, s.Ubar.y, s.Ubar.y);
    // the two Lie-derivative readings of the mean ODE, logged separately
    VectorField V = s.U;
    for (double& e : V.c[0]) e -= s.Ubar.x;
    for (double& e : V.c[1]) e -= s.Ubar.y;
    MeanDiagnostics diag;
    evolve_mean(s.Ubar, s.Theta, V, basis, cfg.g, 0.0, &diag);
    csv.row(s.t, "ubar_rhs_buoyancy_y", diag.buoyancy_term[1],
            diag.buoyancy_term[0], diag.buoyancy_term[1]);
    csv.row(s.t, "ubar_rhs_lie_v_y", diag.lie_v_term[1], diag.lie_v_term[0],
            diag.lie_v_term[1]);
    csv.row(s.t, "ubar_rhs_lie_ubar_y", diag.lie_ubar_term[1],
            diag.lie_ubar_term[0], diag.lie_ubar_term[1]);
  }
  std::cout << "expectation: " << traj.snapshots.size() << " snapshots -> "
            << out << "/trajectory\n";
  return kExitOk;
}

int cmd_spde(const CommonArgs& args) {
  const RunConfig cfg = load_config(args.config_path);
  const std::string out = out_dir_of(args, cfg);
  const ExpectationTrajectory traj = load_checked_trajectory(out, cfg);
  const NoiseBasis basis = make_noise_from(cfg, traj.grid);
  SpdeOptions sopts;
  sopts.dt = cfg.dt;
  sopts.g = cfg.g;
  sopts.scheme = cfg.scheme;
  sopts.enable_u = cfg.enable_u;
  const int n_steps = int(std::lround(cfg.t_end / cfg.dt));
  const BrownianPath path =
      sample_path(cfg.seed, 0, n_steps, cfg.dt, basis.count());
  std::optional<OneFormField> u0;
  if (cfg.enable_u) u0 = as_oneform(traj.snapshots.front().U);
  const SpdeState init = make_initial_state(traj.snapshots.front().Theta,
                                            traj.snapshots.front().Omega, u0);
  DiagnosticsCsv csv(out + "/spde.csv");
  const SpdeState fin = run_member(
      traj, basis, sopts, path, init, [&](const SpdeState& s) {
        if (s.step_index % cfg.save_every == 0 || s.step_index == n_steps) {
          csv.row(s.t, "theta", s.theta, double(s.step_index));
          csv.row(s.t, "omega", s.omega, double(s.step_index));
        }
      });
  write_lsf1(out + "/spde_theta.lsf1",
             snapshot_of(fin.theta, std::uint64_t(fin.step_index), fin.t));
  write_lsf1(out + "/spde_omega.lsf1",
             snapshot_of(fin.omega, std::uint64_t(fin.step_index), fin.t));
  if (fin.u)
    write_lsf1(out + "/spde_u.lsf1",
               snapshot_of(*fin.u, std::uint64_t(fin.step_index), fin.t));
  std::cout << "spde: member 0 advanced to t=" << fin.t << "\n";
  return kExitOk;
}

int cmd_moments(const CommonArgs& args) {
  const RunConfig cfg = load_config(args.config_path);
  const std::string out = out_dir_of(args, cfg);
  const ExpectationTrajectory traj = load_checked_trajectory(out, cfg);
  const NoiseBasis basis = make_noise_from(cfg, traj.grid);
  MomentOptions mopts;
  mopts.dt = cfg.dt;
  mopts.t_end = cfg.t_end;
  mopts.save_every = cfg.save_every;
  mopts.g = cfg.g;
  mopts.P = cfg.moments_P;
  mopts.with_tensors = cfg.enable_u;
  DiagnosticsCsv csv(out + "/moments.csv");
  IdentityLog identity;
  const MomentState fin = run_moments(
      traj, basis, mopts, [&](const MomentState& s) {
        identity.accumulate(s.Theta2, traj.theta_at(s.t),
                            mopts.dt * mopts.save_every);
        csv.row(s.t, "Theta2", s.Theta2);
        csv.row(s.t, "identity_lhs", identity.lhs, identity.lhs,
                identity.lhs);
        csv.row(s.t, "identity_rhs", identity.rhs, identity.rhs,
                identity.rhs);
        const PositivityReport pr = even_moment_positivity_check(s.Ap);
        csv.row(s.t, "A2_min", pr.min_A2, pr.min_A2, pr.min_A2);
        if (pr.has_A4) csv.row(s.t, "A4_min", pr.min_A4, pr.min_A4, pr.min_A4);
      });
  write_lsf1(out + "/moments_Theta2.lsf1", snapshot_of(fin.Theta2, 0, fin.t));
  for (std::size_t i = 0; i < fin.Ap.size(); ++i)
    write_lsf1(out + "/moments_A" + std::to_string(i + 2) + ".lsf1",
               snapshot_of(fin.Ap[i], 0, fin.t));
  if (mopts.with_tensors) {
    write_lsf1(out + "/moments_dTheta2.lsf1",
               snapshot_of(fin.dTheta2, 0, fin.t));
    write_lsf1(out + "/moments_Cross.lsf1", snapshot_of(fin.Cross, 0, fin.t));
    write_lsf1(out + "/moments_U2.lsf1", snapshot_of(fin.U2, 0, fin.t));
  }
  std::cout << "moments: advanced to t=" << fin.t << "\n";
  return kExitOk;
}

int cmd_ensemble(const CommonArgs& args) {
  const RunConfig cfg = load_config(args.config_path);
  const std::string out = out_dir_of(args, cfg);
  const ExpectationTrajectory traj = load_checked_trajectory(out, cfg);
  const NoiseBasis basis = make_noise_from(cfg, traj.grid);

  EnsembleOptions eopts;
  eopts.members = cfg.members;
  eopts.seed = cfg.seed;
  eopts.dt = cfg.dt;
  eopts.t_end = cfg.t_end;
  eopts.g = cfg.g;
  eopts.scheme = cfg.scheme;
  eopts.enable_u = cfg.enable_u;
  eopts.moments_P = cfg.moments_P;
  eopts.threads = args.threads;
  const EnsembleStats stats = run_ensemble(traj, basis, eopts);

  MomentOptions mopts;
  mopts.dt = cfg.dt;
  mopts.t_end = cfg.t_end;
  mopts.g = cfg.g;
  mopts.P = cfg.moments_P;
  mopts.with_tensors = cfg.enable_u;
  const MomentState ms = run_moments(traj, basis, mopts);

  ClosureReport report;
  report.t = stats.t;
  report.entries.push_back(
      closure_compare(stats, "theta_mean", traj.theta_at(stats.t), stats.t,
                      0.05));
  report.entries.push_back(
      closure_compare(stats, "theta_c2", ms.Theta2, stats.t, 0.05));
  for (int p = 3; p <= cfg.moments_P; ++p)
    report.entries.push_back(closure_compare(
        stats, "theta_c" + std::to_string(p), ms.Ap[p - 2], stats.t, 0.10));
  if (cfg.enable_u) {
    report.entries.push_back(
        closure_compare_tensor(stats, "dtheta2", ms.dTheta2, stats.t, 0.10));
    report.entries.push_back(
        closure_compare_tensor(stats, "cross", ms.Cross, stats.t, 0.10));
    report.entries.push_back(
        closure_compare_tensor(stats, "u2", ms.U2, stats.t, 0.10));
  }

  write_lsf1(out + "/ensemble_theta_mean.lsf1",
             snapshot_of(stats.acc.at("theta_mean").mean_field(), 0, stats.t));
  write_lsf1(out + "/ensemble_theta_c2.lsf1",
             snapshot_of(stats.acc.at("theta_c2").mean_field(), 0, stats.t));

  std::string json = "{\n  \"t\": " + std::to_string(stats.t) +
                     ",\n  \"members\": " + std::to_string(stats.count) +
                     ",\n  \"quantities\": [\n";
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    const ClosureEntry& e = report.entries[i];
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "    {\"name\": \"%s\", \"rel_error\": %.17g, "
                  "\"three_stderr\": %.17g, \"tol\": %.17g, \"pass\": %s}",
                  e.name.c_str(), e.rel_error, e.three_stderr, e.tol,
                  e.pass ? "true" : "false");
    json += buf;
    json += (i + 1 < report.entries.size()) ? ",\n" : "\n";
  }
  json += "  ],\n  \"all_pass\": ";
  json += report.all_pass() ? "true" : "false";
  json += "\n}\n";
  std::ofstream rf(out + "/closure_report.json", std::ios::trunc);
  rf << json;
  std::cout << json;
  return report.all_pass() ? kExitOk : kExitVerification;
}

int cmd_characteristics(const CommonArgs& args) {
  const RunConfig cfg = load_config(args.config_path);
  const std::string out = out_dir_of(args, cfg);
  const ExpectationTrajectory traj = load_checked_trajectory(out, cfg);
  const NoiseBasis basis = make_noise_from(cfg, traj.grid);
  const int n_steps = int(std::lround(cfg.t_end / cfg.dt));
  const double t_end = n_steps * cfg.dt;
  const BrownianPath path =
      sample_path(cfg.seed, 0, n_steps, cfg.dt, basis.count());

  const FlowMap inv =
      integrate_flow(traj, basis, path, 0.0, t_end, FlowDirection::inverse);
  const ScalarField theta =
      theta_by_pullback(traj.snapshots.front().Theta, inv);

  SpdeOptions sopts;
  sopts.dt = cfg.dt;
  sopts.g = cfg.g;
  sopts.scheme = cfg.scheme;
  const SpdeState init = make_initial_state(traj.snapshots.front().Theta,
                                            traj.snapshots.front().Omega,
                                            std::nullopt);
  const SpdeState fin = run_member(traj, basis, sopts, path, init);
  const double err = rel_l2_error(theta, fin.theta);

  Lsf1Snapshot disp;
  disp.grid_n = std::uint32_t(traj.grid->n());
  disp.step_index = std::uint64_t(n_steps);
  disp.time = t_end;
  disp.components = {inv.pos[0], inv.pos[1]};
  write_lsf1(out + "/flow_inverse.lsf1", disp);
  write_lsf1(out + "/characteristics_theta.lsf1",
             snapshot_of(theta, std::uint64_t(n_steps), t_end));
  DiagnosticsCsv csv(out + "/characteristics.csv");
  csv.row(t_end, "theta_pullback", theta, err);
  std::cout << "characteristics: pullback vs spectral rel error " << err
            << "\n";
  return kExitOk;
}

int cmd_verify(const CommonArgs& args, std::uint64_t seed) {
  AcceptanceOptions aopts;
  aopts.threads = args.threads;
  aopts.seed = seed;
  const std::vector<CriterionResult> results =
      run_acceptance(aopts, &std::cout);
  const std::string json = acceptance_report_json(results);
  const std::string out = args.out_dir.empty() ? "." : args.out_dir;
  fs::create_directories(out);
  std::ofstream rf(out + "/verify_report.json",
                   std::ios::trunc | std::ios::binary);
  rf << json;
  return all_pass(results) ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LA-SALT 2D Euler-Boussinesq solver suite"};
  app.require_subcommand(1);

  CommonArgs args;
  std::uint64_t verify_seed = 1;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", args.config_path, "config JSON");
    if (config_required) opt->required();
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_flag("--force", args.force, "overwrite existing outputs");
    sub->add_option("--threads", args.threads,
                    "worker threads (wall time only)");
  };

  CLI::App* c_exp = app.add_subcommand("expectation", "closed climate solve");
  CLI::App* c_spde = app.add_subcommand("spde", "one stochastic member");
  CLI::App* c_mom = app.add_subcommand("moments", "closed moment equations");
  CLI::App* c_ens =
      app.add_subcommand("ensemble", "Monte Carlo ensemble + closure report");
  CLI::App* c_chr =
      app.add_subcommand("characteristics", "flow-map oracle solve");
  CLI::App* c_ver = app.add_subcommand("verify", "acceptance ladder");
  for (CLI::App* sub : {c_exp, c_spde, c_mom, c_ens, c_chr})
    add_common(sub, true);
  add_common(c_ver, false);
  c_ver->add_option("--seed", verify_seed, "acceptance base seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (c_exp->parsed()) return cmd_expectation(args);
    if (c_spde->parsed()) return cmd_spde(args);
    if (c_mom->parsed()) return cmd_moments(args);
    if (c_ens->parsed()) return cmd_ensemble(args);
    if (c_chr->parsed()) return cmd_characteristics(args);
    if (c_ver->parsed()) return cmd_verify(args, verify_seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConfigMismatch& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const HashMismatch& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
