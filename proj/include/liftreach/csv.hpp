#pragma once

#include "liftreach/core.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace liftreach {

/// Shortest decimal form that parses back to the same double.
inline std::string fmt_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& tok, const char* what) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw std::runtime_error(std::string("csv: bad number in ") + what + ": '" + tok + "'");
  return v;
}

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

namespace detail {
inline bool starts_alpha(const std::string& line) {
  for (char c : line)
    if (c != ' ' && c != '\t') return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  return false;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IOError("cannot open for reading: " + path);
  return f;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IOError("cannot open for writing: " + path);
  return f;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Trajectory CSV: header t,x1,x2,x3,u; one row per state; the final row has
// no input (trailing empty field).

inline void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  traj.validate();
  std::ofstream f = detail::open_out(path);
  f << "t,x1,x2,x3,u\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const StateVec& x = traj.states[k];
    f << fmt_double(traj.time_at(k)) << ',' << fmt_double(x(0)) << ',' << fmt_double(x(1))
      << ',' << fmt_double(x(2)) << ',';
    if (k < traj.inputs.size()) f << fmt_double(traj.inputs[k]);
    f << '\n';
  }
  if (!f) throw IOError("write failed: " + path);
}

inline Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream f = detail::open_in(path);
  Trajectory traj;
  traj.dt = 0.0;
  std::string line;
  double prev_t = 0.0;
  bool first_row = true;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (detail::starts_alpha(line)) continue;
    auto tok = split_line(line);
    if (tok.size() != 5) throw std::runtime_error("trajectory csv: expected 5 fields: " + path);
    double t = parse_double(tok[0], "t");
    StateVec x(parse_double(tok[1], "x1"), parse_double(tok[2], "x2"), parse_double(tok[3], "x3"));
    if (!first_row) {
      if (traj.inputs.size() != traj.states.size())
        throw std::runtime_error("trajectory csv: input missing before final row: " + path);
      traj.dt = t - prev_t;
    }
    traj.states.push_back(x);
    if (!tok[4].empty()) traj.inputs.push_back(parse_double(tok[4], "u"));
    prev_t = t;
    first_row = false;
  }
  if (traj.states.empty()) throw std::runtime_error("trajectory csv: no rows: " + path);
  if (traj.states.size() == 1) traj.dt = 0.1;
  traj.validate();
  return traj;
}

// ---------------------------------------------------------------------------
// Training dataset CSV: header x1,x2,x3,u,x1p,x2p,x3p; one transition per row.

struct Sample {
  StateVec x;
  double u = 0.0;
  StateVec xp;
};

using Dataset = std::vector<Sample>;

inline void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream f = detail::open_out(path);
  f << "x1,x2,x3,u,x1p,x2p,x3p\n";
  for (const Sample& s : data) {
    f << fmt_double(s.x(0)) << ',' << fmt_double(s.x(1)) << ',' << fmt_double(s.x(2)) << ','
      << fmt_double(s.u) << ',' << fmt_double(s.xp(0)) << ',' << fmt_double(s.xp(1)) << ','
      << fmt_double(s.xp(2)) << '\n';
  }
  if (!f) throw IOError("write failed: " + path);
}

inline Dataset read_dataset_csv(const std::string& path) {
  std::ifstream f = detail::open_in(path);
  Dataset data;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (detail::starts_alpha(line)) continue;
    auto tok = split_line(line);
    if (tok.size() != 7) throw std::runtime_error("dataset csv: expected 7 fields: " + path);
    Sample s;
    s.x = StateVec(parse_double(tok[0], "x1"), parse_double(tok[1], "x2"), parse_double(tok[2], "x3"));
    s.u = parse_double(tok[3], "u");
    s.xp = StateVec(parse_double(tok[4], "x1p"), parse_double(tok[5], "x2p"), parse_double(tok[6], "x3p"));
    data.push_back(s);
  }
  return data;
}

// ---------------------------------------------------------------------------
// Per-vehicle log CSV: header t,vehicle_id,pos,speed; one row per vehicle per
// sample time.

struct VehicleLogRow {
  double t = 0.0;
  int vehicle_id = 0;
  double pos = 0.0;
  double speed = 0.0;
};

inline void write_vehicle_log_csv(const std::vector<VehicleLogRow>& rows, const std::string& path) {
  std::ofstream f = detail::open_out(path);
  f << "t,vehicle_id,pos,speed\n";
  for (const VehicleLogRow& r : rows) {
    f << fmt_double(r.t) << ',' << r.vehicle_id << ',' << fmt_double(r.pos) << ','
      << fmt_double(r.speed) << '\n';
  }
  if (!f) throw IOError("write failed: " + path);
}

inline std::vector<VehicleLogRow> read_vehicle_log_csv(const std::string& path) {
  std::ifstream f = detail::open_in(path);
  std::vector<VehicleLogRow> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (detail::starts_alpha(line)) continue;
    auto tok = split_line(line);
    if (tok.size() != 4) throw std::runtime_error("vehicle log csv: expected 4 fields: " + path);
    VehicleLogRow r;
    r.t = parse_double(tok[0], "t");
    r.vehicle_id = static_cast<int>(parse_double(tok[1], "vehicle_id"));
    r.pos = parse_double(tok[2], "pos");
    r.speed = parse_double(tok[3], "speed");
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// FNV-1a 64-bit digest used for reproducibility manifests.

inline std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64_str(const std::string& s) { return fnv1a64(s.data(), s.size()); }

inline std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IOError("cannot open for digest: " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (f) {
    f.read(buf, sizeof(buf));
    std::streamsize got = f.gcount();
    if (got > 0) h = fnv1a64(buf, static_cast<std::size_t>(got), h);
  }
  return h;
}

}  // namespace liftreach
