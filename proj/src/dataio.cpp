#include "edi/dataio.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "edi/errors.hpp"
#include "edi/so3.hpp"

namespace edi {

namespace {

using nlohmann::json;

[[noreturn]] void fail_line(const std::string& path, int line, const std::string& what) {
  throw InputError(path + ":" + std::to_string(line) + ": " + what);
}

bool parse_double(const std::string& tok, double& out) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + tok.size() && tok.size() > 0;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 json_vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw InputError("expected 3-element array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

std::vector<ImuSample> load_imu_csv(const std::string& path, std::int64_t* epoch_ns) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open IMU file: " + path);

  std::vector<ImuSample> samples;
  std::string line;
  int lineno = 0;
  bool have_first = false;
  std::int64_t first_ns = 0;
  std::int64_t prev_ns = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto toks = split_csv(line);
    if (toks.size() != 7) fail_line(path, lineno, "expected 7 comma-separated fields");

    errno = 0;
    char* end = nullptr;
    const std::int64_t ns = std::strtoll(toks[0].c_str(), &end, 10);
    if (end != toks[0].c_str() + toks[0].size() || errno != 0) {
      fail_line(path, lineno, "bad timestamp '" + toks[0] + "'");
    }
    double vals[6];
    for (int i = 0; i < 6; ++i) {
      if (!parse_double(toks[i + 1], vals[i]) || !std::isfinite(vals[i])) {
        fail_line(path, lineno, "bad value '" + toks[i + 1] + "'");
      }
    }
    if (!have_first) {
      first_ns = ns;
      have_first = true;
    } else if (ns <= prev_ns) {
      fail_line(path, lineno, "non-monotonic timestamp");
    }
    prev_ns = ns;

    ImuSample s;
    s.t = static_cast<double>(ns - first_ns) * 1e-9;
    s.omega = Vec3(vals[0], vals[1], vals[2]);
    s.accel = Vec3(vals[3], vals[4], vals[5]);
    samples.push_back(s);
  }
  if (samples.empty()) throw InputError("empty IMU file: " + path);
  if (epoch_ns) *epoch_ns = first_ns;
  return samples;
}

void write_imu_csv(const std::string& path, std::span<const ImuSample> samples,
                   std::int64_t epoch_ns) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write IMU file: " + path);
  out << "#timestamp [ns],w_x [rad/s],w_y,w_z,a_x [m/s^2],a_y,a_z\n";
  for (const auto& s : samples) {
    const std::int64_t ns = epoch_ns + std::llround(s.t * 1e9);
    out << ns << ',' << fmt(s.omega.x()) << ',' << fmt(s.omega.y()) << ','
        << fmt(s.omega.z()) << ',' << fmt(s.accel.x()) << ',' << fmt(s.accel.y())
        << ',' << fmt(s.accel.z()) << '\n';
  }
}

TrajectoryFile load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trajectory file: " + path);

  TrajectoryFile traj;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto toks = split_ws(line);
    if (toks.size() != 8) fail_line(path, lineno, "expected 8 whitespace-separated fields");
    double v[8];
    for (int i = 0; i < 8; ++i) {
      if (!parse_double(toks[i], v[i]) || !std::isfinite(v[i])) {
        fail_line(path, lineno, "bad value '" + toks[i] + "'");
      }
    }
    Eigen::Quaterniond q(v[7], v[4], v[5], v[6]);  // w, x, y, z
    if (std::abs(q.norm() - 1.0) > 1e-3) {
      fail_line(path, lineno, "quaternion norm deviates from 1 beyond 1e-3");
    }
    if (!traj.times.empty() && v[0] <= traj.times.back()) {
      fail_line(path, lineno, "non-monotonic timestamp");
    }
    traj.times.push_back(v[0]);
    traj.positions.emplace_back(v[1], v[2], v[3]);
    traj.rotations.push_back(q.normalized().toRotationMatrix());
  }
  if (traj.times.empty()) throw InputError("empty trajectory file: " + path);
  return traj;
}

void write_trajectory(const std::string& path, const TrajectoryFile& traj) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write trajectory file: " + path);
  out << "#t tx ty tz qx qy qz qw\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    Eigen::Quaterniond q(traj.rotations[i]);
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();
    const Vec3& p = traj.positions[i];
    out << fmt(traj.times[i]) << ' ' << fmt(p.x()) << ' ' << fmt(p.y()) << ' '
        << fmt(p.z()) << ' ' << fmt(q.x()) << ' ' << fmt(q.y()) << ' '
        << fmt(q.z()) << ' ' << fmt(q.w()) << '\n';
  }
}

DatasetBundle make_bundle(std::vector<ImuSample> imu, std::int64_t epoch_ns,
                          const TrajectoryFile& camera_traj,
                          const PipelineConfig& cfg) {
  if (imu.size() < 2) throw InputError("make_bundle: empty IMU stream");
  if (camera_traj.times.size() < 2) throw InputError("make_bundle: empty trajectory");

  // Absolute (raw-epoch) trajectory stamps are moved onto the IMU base.
  std::vector<double> times = camera_traj.times;
  if (times.front() > imu.back().t + 1.0) {
    const double shift = static_cast<double>(epoch_ns) * 1e-9;
    for (double& t : times) t -= shift;
  }

  // Keyframe selection: nearest row to a uniform grid at the keyframe rate,
  // starting at the first usable timestamp.
  const double period = 1.0 / cfg.sim.keyframe_rate;
  std::vector<std::size_t> picks;
  std::size_t i = 0;
  for (int k = 0; static_cast<int>(picks.size()) < cfg.window_size; ++k) {
    const double target = times.front() + k * period;
    if (target > times.back() + 0.5 * period) break;
    while (i + 1 < times.size() &&
           std::abs(times[i + 1] - target) <= std::abs(times[i] - target)) {
      ++i;
    }
    if (!picks.empty() && picks.back() == i) continue;
    picks.push_back(i);
  }
  if (picks.size() < 2) throw InputError("make_bundle: fewer than 2 keyframes selected");

  DatasetBundle bundle;
  bundle.extrinsics = cfg.extrinsics;
  for (std::size_t idx : picks) {
    const double t = times[idx];
    const Mat3 R_wb = camera_traj.rotations[idx] * cfg.extrinsics.R_bc.transpose();
    bundle.track.times.push_back(t);
    bundle.track.R_wb.push_back(R_wb);
    bundle.track.p_wc_bar.push_back(camera_traj.positions[idx]);
    bundle.observations.push_back(OrientationObservation{t, R_wb});
  }
  bundle.imu = std::move(imu);
  return bundle;
}

LoadedTruth load_ground_truth(const std::string& dir) {
  LoadedTruth out;
  const TrajectoryFile poses = load_trajectory(dir + "/groundtruth.txt");
  out.gt.times = poses.times;
  out.gt.p_wb = poses.positions;
  out.gt.R_wb = poses.rotations;

  std::ifstream in(dir + "/sim_truth.json");
  if (in) {
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw InputError(dir + "/sim_truth.json: " + e.what());
    }
    out.gt.s_true = j.at("s_true").get<double>();
    out.gt.g_w = json_vec3(j.at("g_w"));
    out.gt.bg_true = json_vec3(j.at("bg_true"));
    out.gt.ba_true = json_vec3(j.at("ba_true"));
    for (const auto& v : j.at("v_wb")) out.gt.v_wb.push_back(json_vec3(v));
    if (out.gt.v_wb.size() != out.gt.times.size()) {
      throw InputError(dir + "/sim_truth.json: velocity count mismatch");
    }
    out.has_inertial = true;
  }
  return out;
}

void write_ground_truth(const std::string& dir, const GroundTruth& gt) {
  TrajectoryFile poses;
  poses.times = gt.times;
  poses.positions = gt.p_wb;
  poses.rotations = gt.R_wb;
  write_trajectory(dir + "/groundtruth.txt", poses);

  json j;
  j["s_true"] = gt.s_true;
  j["g_w"] = vec3_json(gt.g_w);
  j["bg_true"] = vec3_json(gt.bg_true);
  j["ba_true"] = vec3_json(gt.ba_true);
  j["v_wb"] = json::array();
  for (const auto& v : gt.v_wb) j["v_wb"].push_back(vec3_json(v));

  std::ofstream out(dir + "/sim_truth.json");
  if (!out) throw InputError("cannot write " + dir + "/sim_truth.json");
  out << j.dump(2) << '\n';
}

}  // namespace edi
