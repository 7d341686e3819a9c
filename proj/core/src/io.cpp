#include "lasalt/io.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "lasalt/ops.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace lasalt {

namespace {

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(char((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(char((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& buf, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  put_u64(buf, v);
}

std::uint32_t get_u32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(p[i])) << (8 * i);
  return v;
}
std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(std::uint8_t(p[i])) << (8 * i);
  return v;
}
double get_f64(const char* p) {
  const std::uint64_t v = get_u64(p);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

}  // namespace

void write_lsf1(const std::string& path, const Lsf1Snapshot& snap) {
  std::string buf;
  const std::size_t n2 = std::size_t(snap.grid_n) * snap.grid_n;
  buf.reserve(24 + 8 * n2 * snap.components.size());
  buf += "LSF1";
  put_u32(buf, snap.grid_n);
  put_u32(buf, std::uint32_t(snap.components.size()));
  put_u64(buf, snap.step_index);
  put_f64(buf, snap.time);
  for (const auto& comp : snap.components) {
    if (comp.size() != n2)
      throw ConfigError("LSF1 component size does not match grid_n^2");
    for (double d : comp) put_f64(buf, d);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out.write(buf.data(), std::streamsize(buf.size()));
  if (!out) throw ConfigError("short write to " + path);
}

Lsf1Snapshot read_lsf1(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < 24 || buf.compare(0, 4, "LSF1") != 0)
    throw ConfigError(path + " is not an LSF1 snapshot");
  Lsf1Snapshot snap;
  snap.grid_n = get_u32(buf.data() + 4);
  const std::uint32_t nc = get_u32(buf.data() + 8);
  snap.step_index = get_u64(buf.data() + 12);
  snap.time = get_f64(buf.data() + 20);
  const std::size_t n2 = std::size_t(snap.grid_n) * snap.grid_n;
  if (buf.size() != 28 + 8 * n2 * nc)
    throw ConfigError(path + " has a truncated or oversized payload");
  const char* p = buf.data() + 28;
  snap.components.resize(nc);
  for (std::uint32_t c = 0; c < nc; ++c) {
    snap.components[c].resize(n2);
    for (std::size_t m = 0; m < n2; ++m, p += 8)
      snap.components[c][m] = get_f64(p);
  }
  return snap;
}

Lsf1Snapshot snapshot_of(const ScalarField& f, std::uint64_t step, double t) {
  Lsf1Snapshot s;
  s.grid_n = std::uint32_t(f.grid->n());
  s.step_index = step;
  s.time = t;
  s.components = {f.v};
  return s;
}

Lsf1Snapshot snapshot_of(const OneFormField& f, std::uint64_t step, double t) {
  Lsf1Snapshot s;
  s.grid_n = std::uint32_t(f.grid->n());
  s.step_index = step;
  s.time = t;
  s.components = {f.c[0], f.c[1]};
  return s;
}

Lsf1Snapshot snapshot_of(const VectorField& f, std::uint64_t step, double t) {
  Lsf1Snapshot s;
  s.grid_n = std::uint32_t(f.grid->n());
  s.step_index = step;
  s.time = t;
  s.components = {f.c[0], f.c[1]};
  return s;
}

Lsf1Snapshot snapshot_of(const Tensor2Field& f, std::uint64_t step, double t) {
  Lsf1Snapshot s;
  s.grid_n = std::uint32_t(f.grid->n());
  s.step_index = step;
  s.time = t;
  s.components = {f.c[0], f.c[1], f.c[2], f.c[3]};
  return s;
}

ScalarField scalar_from(const Lsf1Snapshot& snap, const GridPtr& grid) {
  if (int(snap.grid_n) != grid->n() || snap.components.size() != 1)
    throw GridMismatch("snapshot does not hold a scalar on this grid");
  ScalarField f(grid);
  f.v = snap.components[0];
  return f;
}

VectorField vector_from(const Lsf1Snapshot& snap, const GridPtr& grid) {
  if (int(snap.grid_n) != grid->n() || snap.components.size() != 2)
    throw GridMismatch("snapshot does not hold a 2-vector on this grid");
  VectorField f(grid);
  f.c[0] = snap.components[0];
  f.c[1] = snap.components[1];
  return f;
}

namespace {

std::string snap_name(std::size_t idx, const char* field) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06zu_", idx);
  return std::string(buf) + field + ".lsf1";
}

}  // namespace

void save_trajectory(const std::string& dir, const ExpectationTrajectory& traj,
                     bool force) {
  const fs::path root(dir);
  if (fs::exists(root / "meta.json") && !force)
    throw ConfigError(dir + " already holds a trajectory (use --force)");
  fs::create_directories(root);
  json meta;
  meta["format"] = "lasalt-trajectory-1";
  meta["grid_n"] = traj.grid->n();
  meta["length"] = traj.grid->length();
  meta["dealias_fraction"] = traj.grid->dealias_fraction();
  meta["dt"] = traj.dt;
  meta["save_every"] = traj.save_every;
  meta["g"] = traj.g;
  meta["config_hash"] = traj.config_hash;
  json snaps = json::array();
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const ExpectationSnapshot& s = traj.snapshots[i];
    snaps.push_back({{"t", s.t},
                     {"step_index", s.step_index},
                     {"ubar", {s.Ubar.x, s.Ubar.y}}});
    const std::uint64_t step = std::uint64_t(s.step_index);
    write_lsf1((root / snap_name(i, "Omega")).string(),
               snapshot_of(s.Omega, step, s.t));
    write_lsf1((root / snap_name(i, "Theta")).string(),
               snapshot_of(s.Theta, step, s.t));
    write_lsf1((root / snap_name(i, "ptilde")).string(),
               snapshot_of(s.ptilde, step, s.t));
    write_lsf1((root / snap_name(i, "U")).string(),
               snapshot_of(s.U, step, s.t));
  }
  meta["snapshots"] = std::move(snaps);
  std::ofstream out(root / "meta.json", std::ios::trunc);
  out << meta.dump(2) << "\n";
  if (!out) throw ConfigError("cannot write " + (root / "meta.json").string());
}

ExpectationTrajectory load_trajectory(const std::string& dir) {
  const fs::path root(dir);
  std::ifstream in(root / "meta.json");
  if (!in) throw ConfigError("no trajectory at " + dir);
  json meta = json::parse(in);
  if (meta.value("format", "") != "lasalt-trajectory-1")
    throw ConfigError(dir + " is not a trajectory directory");
  ExpectationTrajectory traj;
  traj.grid = make_grid(meta.at("grid_n").get<int>(),
                        meta.at("length").get<double>(),
                        meta.at("dealias_fraction").get<double>());
  traj.dt = meta.at("dt").get<double>();
  traj.save_every = meta.at("save_every").get<int>();
  traj.g = meta.at("g").get<double>();
  traj.config_hash = meta.at("config_hash").get<std::uint64_t>();
  const json& snaps = meta.at("snapshots");
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    ExpectationSnapshot s;
    s.t = snaps[i].at("t").get<double>();
    s.step_index = snaps[i].at("step_index").get<long>();
    s.Ubar.x = snaps[i].at("ubar")[0].get<double>();
    s.Ubar.y = snaps[i].at("ubar")[1].get<double>();
    s.Omega =
        scalar_from(read_lsf1((root / snap_name(i, "Omega")).string()),
                    traj.grid);
    s.Theta =
        scalar_from(read_lsf1((root / snap_name(i, "Theta")).string()),
                    traj.grid);
    s.ptilde =
        scalar_from(read_lsf1((root / snap_name(i, "ptilde")).string()),
                    traj.grid);
    s.U = vector_from(read_lsf1((root / snap_name(i, "U")).string()),
                      traj.grid);
    traj.snapshots.push_back(std::move(s));
  }
  if (traj.snapshots.empty()) throw ConfigError(dir + " holds no snapshots");
  return traj;
}

struct DiagnosticsCsv::Impl {
  std::ofstream out;
};

DiagnosticsCsv::DiagnosticsCsv(const std::string& path) : impl_(new Impl) {
  impl_->out.open(path, std::ios::trunc);
  if (!impl_->out) {
    delete impl_;
    throw ConfigError("cannot open " + path + " for writing");
  }
  impl_->out << "t,field,l2,min,max,aux\n";
}

DiagnosticsCsv::~DiagnosticsCsv() { delete impl_; }

void DiagnosticsCsv::row(double t, const std::string& field, double l2,
                         double mn, double mx, double aux) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g,%.17g,%.17g\n", t,
                field.c_str(), l2, mn, mx, aux);
  impl_->out << buf;
}

void DiagnosticsCsv::row(double t, const std::string& field,
                         const ScalarField& f, double aux) {
  double mn = f.v.empty() ? 0.0 : f.v[0];
  double mx = mn;
  for (double d : f.v) {
    if (d < mn) mn = d;
    if (d > mx) mx = d;
  }
  row(t, field, l2_norm(f), mn, mx, aux);
}

}  // namespace lasalt
