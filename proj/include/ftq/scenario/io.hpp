#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftq/analysis/stability.hpp"
#include "ftq/scenario/runner.hpp"

namespace ftq {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline const char* kTraceHeader =
    "t,X,Y,Z,Vx,Vy,Vz,p,q,r,h1,h2,h3,eta1,eta2,eta3,y2,"
    "omega_cmd_1,omega_cmd_2,omega_cmd_3,omega_cmd_4,omega_1,omega_2,omega_3,omega_4,wind,crashed";

inline void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << kTraceHeader << '\n';
  for (const auto& r : rows) {
    out << fmt(r.t);
    for (const Vec3* v : {&r.position, &r.velocity, &r.rates, &r.h, &r.eta}) {
      for (int i = 0; i < 3; ++i) out << ',' << fmt((*v)(i));
    }
    out << ',' << fmt(r.y2);
    for (double w : r.omega_cmd) out << ',' << fmt(w);
    for (double w : r.rotor_speed) out << ',' << fmt(w);
    out << ',' << fmt(r.wind) << ',' << (r.crashed ? 1 : 0) << '\n';
  }
}

/// Reads back what write_trace_csv produced.
inline std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw std::runtime_error("trace csv: unexpected header");
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() != 27) throw std::runtime_error("trace csv: expected 27 columns");
    TraceRow r;
    r.t = v[0];
    r.position = Vec3(v[1], v[2], v[3]);
    r.velocity = Vec3(v[4], v[5], v[6]);
    r.rates = Vec3(v[7], v[8], v[9]);
    r.h = Vec3(v[10], v[11], v[12]);
    r.eta = Vec3(v[13], v[14], v[15]);
    r.y2 = v[16];
    for (std::size_t i = 0; i < 4; ++i) {
      r.omega_cmd[i] = v[17 + i];
      r.rotor_speed[i] = v[21 + i];
    }
    r.wind = v[25];
    r.crashed = v[26] != 0.0;
    rows.push_back(r);
  }
  return rows;
}

inline const char* kSummaryHeader =
    "scenario,controller,chi_deg,crashed,cause,crash_time,rms_error,rms_x,rms_y,rms_z,final_error,max_abs_eta1,"
    "max_wind,rows";

inline void write_summary_row(std::ostream& out, const RunSummary& s) {
  out << s.scenario << ',' << s.controller << ',' << fmt(s.chi_deg) << ',' << (s.crashed ? 1 : 0) << ','
      << (s.cause.empty() ? "none" : s.cause) << ',' << fmt(s.crash_time) << ',' << fmt(s.rms_error) << ','
      << fmt(s.rms_axis.x()) << ',' << fmt(s.rms_axis.y()) << ',' << fmt(s.rms_axis.z()) << ','
      << fmt(s.final_error) << ',' << fmt(s.max_abs_eta1) << ',' << fmt(s.max_wind) << ',' << s.rows << '\n';
}

inline void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& s : rows) write_summary_row(out, s);
}

inline void write_sweep_csv(std::ostream& out, const ChiSweepResult& r) {
  out << "chi_deg,re_lambda1,re_lambda2,r_B,verdict\n";
  for (const auto& p : r.points) {
    out << fmt(rad2deg(p.chi_abs)) << ',' << fmt(p.re1) << ',' << fmt(p.re2) << ',' << fmt(p.rb) << ','
        << to_string(p.verdict) << '\n';
  }
}

/// Opens `path` for writing or throws with the path in the message.
inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace ftq
