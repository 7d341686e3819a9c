#include "lasalt/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "lasalt/ops.hpp"

namespace lasalt {

namespace {

// Shard count is fixed so the accumulation order never depends on the thread
// count; results are bit-identical for any --threads.
constexpr int kShards = 8;

}  // namespace

MomentFieldAccumulator::MomentFieldAccumulator(GridPtr g) : grid(std::move(g)) {
  mean.assign(grid->size(), 0.0);
  M2.assign(grid->size(), 0.0);
  M3.assign(grid->size(), 0.0);
  M4.assign(grid->size(), 0.0);
}

void MomentFieldAccumulator::add(const ScalarField& sample) {
  check_same_grid(grid, sample.grid);
  const double nA = double(count);
  const double n = nA + 1.0;
  for (std::size_t m = 0; m < mean.size(); ++m) {
    const double d = sample.v[m] - mean[m];
    const double d_n = d / n;
    const double d2_n = d_n * d_n;
    const double term = d * d_n * nA;
    M4[m] += term * d2_n * (n * n - 3.0 * n + 3.0) + 6.0 * d2_n * M2[m] -
             4.0 * d_n * M3[m];
    M3[m] += term * d_n * (n - 2.0) - 3.0 * d_n * M2[m];
    M2[m] += term;
    mean[m] += d_n;
  }
  ++count;
}

void MomentFieldAccumulator::merge(const MomentFieldAccumulator& other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  check_same_grid(grid, other.grid);
  const double nA = double(count), nB = double(other.count);
  const double n = nA + nB;
  for (std::size_t m = 0; m < mean.size(); ++m) {
    const double d = other.mean[m] - mean[m];
    const double d_n = d / n;
    M4[m] += other.M4[m] +
             d * d_n * d_n * d_n * nA * nB * (nA * nA - nA * nB + nB * nB) +
             6.0 * d_n * d_n * (nA * nA * other.M2[m] + nB * nB * M2[m]) +
             4.0 * d_n * (nA * other.M3[m] - nB * M3[m]);
    M3[m] += other.M3[m] + d * d_n * d_n * nA * nB * (nA - nB) +
             3.0 * d_n * (nA * other.M2[m] - nB * M2[m]);
    M2[m] += other.M2[m] + d * d_n * nA * nB;
    mean[m] += d_n * nB;
  }
  count += other.count;
}

ScalarField MomentFieldAccumulator::mean_field() const {
  ScalarField f(grid);
  f.v = mean;
  return f;
}

ScalarField MomentFieldAccumulator::central_moment(int p) const {
  if (p < 2 || p > 4)
    throw ConfigError("central moments tracked for orders 2..4 only");
  if (count == 0) throw ConfigError("empty accumulator");
  ScalarField f(grid);
  const std::vector<double>& Mp = (p == 2) ? M2 : (p == 3) ? M3 : M4;
  for (std::size_t m = 0; m < f.v.size(); ++m) f.v[m] = Mp[m] / count;
  return f;
}

ScalarField MomentFieldAccumulator::stderr_field() const {
  ScalarField f(grid);
  if (count < 2) {
    f.fill(0.0);
    return f;
  }
  const double denom = double(count) * double(count - 1);
  for (std::size_t m = 0; m < f.v.size(); ++m)
    f.v[m] = std::sqrt(M2[m] / denom);
  return f;
}

EnsembleStats merge(const EnsembleStats& a, const EnsembleStats& b) {
  if (a.count == 0) return b;
  if (b.count == 0) return a;
  if (a.config_hash != b.config_hash)
    throw ConfigMismatch("merging ensembles from different configurations");
  check_same_grid(a.grid, b.grid);
  if (std::abs(a.t - b.t) > 1e-12)
    throw TimeMisaligned("merging ensembles at different times");
  EnsembleStats out = a;
  for (const auto& [key, accB] : b.acc) {
    auto it = out.acc.find(key);
    if (it == out.acc.end())
      throw ConfigMismatch("ensembles track different quantities");
    it->second.merge(accB);
  }
  out.count += b.count;
  out.members.insert(out.members.end(), b.members.begin(), b.members.end());
  return out;
}

namespace {

EnsembleStats make_empty_stats(const ExpectationTrajectory& traj,
                               const EnsembleOptions& opts, double t_final) {
  EnsembleStats s;
  s.grid = traj.grid;
  s.t = t_final;
  s.config_hash = traj.config_hash;
  s.acc.emplace("theta_mean", MomentFieldAccumulator(traj.grid));
  for (int p = 2; p <= opts.moments_P; ++p)
    s.acc.emplace("theta_c" + std::to_string(p),
                  MomentFieldAccumulator(traj.grid));
  if (opts.enable_u) {
    for (const char* prefix : {"dtheta2", "cross", "u2"})
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          s.acc.emplace(std::string(prefix) + "_" + std::to_string(i) +
                            std::to_string(j),
                        MomentFieldAccumulator(traj.grid));
  }
  return s;
}

void accumulate_member(EnsembleStats& s, const SpdeState& final_state,
                       const ExpectationTrajectory& traj,
                       const EnsembleOptions& opts) {
  s.acc.at("theta_mean").add(final_state.theta);
  auto [u_prime, theta_prime] = fluctuations(final_state, traj);
  ScalarField pw(theta_prime.grid);
  pw.v = theta_prime.v;
  for (int p = 2; p <= opts.moments_P; ++p) {
    for (std::size_t m = 0; m < pw.v.size(); ++m) pw.v[m] *= theta_prime.v[m];
    s.acc.at("theta_c" + std::to_string(p)).add(pw);
  }
  if (opts.enable_u) {
    const OneFormField dtp = exterior_d(theta_prime);
    ScalarField prod(theta_prime.grid);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const std::string ij =
            "_" + std::to_string(i) + std::to_string(j);
        for (std::size_t m = 0; m < prod.v.size(); ++m)
          prod.v[m] = dtp.c[i][m] * dtp.c[j][m];
        s.acc.at(std::string("dtheta2") + ij).add(prod);
        for (std::size_t m = 0; m < prod.v.size(); ++m)
          prod.v[m] = u_prime.c[i][m] * u_prime.c[j][m];
        s.acc.at(std::string("u2") + ij).add(prod);
        for (std::size_t m = 0; m < prod.v.size(); ++m)
          prod.v[m] = u_prime.c[i][m] * dtp.c[j][m] +
                      dtp.c[i][m] * u_prime.c[j][m];
        s.acc.at(std::string("cross") + ij).add(prod);
      }
  }
  if (opts.retain_members) s.members.push_back(final_state);
  ++s.count;
}

}  // namespace

EnsembleStats run_ensemble(const ExpectationTrajectory& traj,
                           const NoiseBasis& basis,
                           const EnsembleOptions& opts) {
  if (opts.members < 1) throw ConfigError("ensemble needs at least one member");
  const int n_steps = int(std::lround(opts.t_end / opts.dt));
  const double t_final = n_steps * opts.dt;
  if (t_final > traj.t_end() + 1e-9)
    throw TrajectoryExhausted("ensemble horizon exceeds the trajectory");

  const ExpectationSnapshot& init = traj.snapshots.front();
  std::optional<OneFormField> u0;
  if (opts.enable_u) u0 = as_oneform(init.U);
  const SpdeState initial = make_initial_state(init.Theta, init.Omega, u0);

  SpdeOptions sopts;
  sopts.dt = opts.dt;
  sopts.g = opts.g;
  sopts.scheme = opts.scheme;
  sopts.enable_u = opts.enable_u;

  std::vector<EnsembleStats> shard_stats;
  shard_stats.reserve(kShards);
  for (int s = 0; s < kShards; ++s)
    shard_stats.push_back(make_empty_stats(traj, opts, t_final));

  std::atomic<int> next_shard{0};
  std::vector<std::exception_ptr> errors(kShards);
  auto work = [&]() {
    for (;;) {
      const int s = next_shard.fetch_add(1);
      if (s >= kShards) return;
      try {
        for (int m = s; m < opts.members; m += kShards) {
          try {
            const BrownianPath path =
                sample_path(opts.seed, m, n_steps, opts.dt, basis.count());
            const SpdeState fin =
                run_member(traj, basis, sopts, path, initial);
            accumulate_member(shard_stats[s], fin, traj, opts);
          } catch (const std::exception& e) {
            throw std::runtime_error("member " + std::to_string(m) + ": " +
                                     e.what());
          }
        }
      } catch (...) {
        errors[s] = std::current_exception();
        return;
      }
    }
  };

  const int n_threads = std::max(1, std::min(opts.threads, kShards));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);

  EnsembleStats total = std::move(shard_stats[0]);
  for (int s = 1; s < kShards; ++s) total = merge(total, shard_stats[s]);
  return total;
}

bool ClosureReport::all_pass() const {
  for (const ClosureEntry& e : entries)
    if (!e.pass) return false;
  return true;
}

namespace {

ClosureEntry finish_entry(std::string name, double err_norm, double se_norm,
                          double ref_norm, double tol) {
  ClosureEntry e;
  e.name = std::move(name);
  const double denom = (ref_norm > 0.0) ? ref_norm : 1.0;
  e.rel_error = err_norm / denom;
  e.three_stderr = 3.0 * se_norm / denom;
  e.tol = tol;
  e.pass = e.rel_error <= std::max(e.three_stderr, tol);
  return e;
}

}  // namespace

ClosureEntry closure_compare(const EnsembleStats& stats, const std::string& key,
                             const ScalarField& reference, double reference_t,
                             double tol) {
  if (std::abs(stats.t - reference_t) > 1e-9)
    throw TimeMisaligned("closure comparison at mismatched times");
  auto it = stats.acc.find(key);
  if (it == stats.acc.end())
    throw ConfigError("ensemble does not track quantity " + key);
  ScalarField diff = it->second.mean_field();
  diff.axpy(-1.0, reference);
  return finish_entry(key, l2_norm(diff), l2_norm(it->second.stderr_field()),
                      l2_norm(reference), tol);
}

ClosureEntry closure_compare_tensor(const EnsembleStats& stats,
                                    const std::string& prefix,
                                    const Tensor2Field& reference,
                                    double reference_t, double tol) {
  if (std::abs(stats.t - reference_t) > 1e-9)
    throw TimeMisaligned("closure comparison at mismatched times");
  double err2 = 0.0, se2 = 0.0, ref2 = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const std::string key =
          prefix + "_" + std::to_string(i) + std::to_string(j);
      auto it = stats.acc.find(key);
      if (it == stats.acc.end())
        throw ConfigError("ensemble does not track quantity " + key);
      ScalarField diff = it->second.mean_field();
      ScalarField ref(reference.grid);
      ref.v = reference.comp(i, j);
      diff.axpy(-1.0, ref);
      const double e = l2_norm(diff);
      const double s = l2_norm(it->second.stderr_field());
      const double r = l2_norm(ref);
      err2 += e * e;
      se2 += s * s;
      ref2 += r * r;
    }
  return finish_entry(prefix, std::sqrt(err2), std::sqrt(se2), std::sqrt(ref2),
                      tol);
}

}  // namespace lasalt
