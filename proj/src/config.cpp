#include <Eigen/Geometry>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "edi/dataio.hpp"
#include "edi/errors.hpp"

namespace edi {

namespace {

bool warnings_enabled() {
  const char* lvl = std::getenv("EDI_LOG");
  return lvl == nullptr || std::string(lvl) != "quiet";
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Parser {
  const std::string& origin;
  int lineno = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError(origin + ":" + std::to_string(lineno) + ": " + what);
  }

  double as_double(const std::string& v) const {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size() || v.empty() || !std::isfinite(d)) {
      fail("expected a number, got '" + v + "'");
    }
    return d;
  }

  int as_int(const std::string& v) const {
    char* end = nullptr;
    const long l = std::strtol(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || v.empty()) {
      fail("expected an integer, got '" + v + "'");
    }
    return static_cast<int>(l);
  }

  std::uint64_t as_u64(const std::string& v) const {
    char* end = nullptr;
    const unsigned long long u = std::strtoull(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || v.empty()) {
      fail("expected an unsigned integer, got '" + v + "'");
    }
    return u;
  }

  std::vector<double> as_list(const std::string& v) const {
    std::istringstream iss(v);
    std::vector<double> out;
    std::string tok;
    while (iss >> tok) out.push_back(as_double(tok));
    if (out.empty()) fail("expected a list of numbers");
    return out;
  }

  Vec3 as_vec3(const std::string& v) const {
    const auto list = as_list(v);
    if (list.size() != 3) fail("expected 3 numbers");
    return Vec3(list[0], list[1], list[2]);
  }

  Mat3 as_quat(const std::string& v) const {
    const auto list = as_list(v);
    if (list.size() != 4) fail("expected a quaternion 'qx qy qz qw'");
    Eigen::Quaterniond q(list[3], list[0], list[1], list[2]);
    if (std::abs(q.norm() - 1.0) > 1e-3) fail("quaternion is not normalized");
    return q.normalized().toRotationMatrix();
  }
};

}  // namespace

PipelineConfig parse_config(std::istream& in, const std::string& origin) {
  PipelineConfig cfg;
  Parser p{origin};

  std::map<std::string, std::function<void(const std::string&)>> keys = {
      {"gyro_noise_std", [&](const std::string& v) { cfg.gyro_noise_std = p.as_double(v); }},
      {"gyro_walk_std", [&](const std::string& v) { cfg.gyro_walk_std = p.as_double(v); }},
      {"obs_rot_var", [&](const std::string& v) { cfg.obs_rot_var = p.as_double(v); }},
      {"p0_theta_var", [&](const std::string& v) { cfg.p0_theta_var = p.as_double(v); }},
      {"p0_bg_var", [&](const std::string& v) { cfg.p0_bg_var = p.as_double(v); }},
      {"gravity_magnitude", [&](const std::string& v) { cfg.gravity_magnitude = p.as_double(v); }},
      {"pcg_iterations", [&](const std::string& v) { cfg.pcg_iterations = p.as_int(v); }},
      {"irls_passes", [&](const std::string& v) { cfg.irls_passes = p.as_int(v); }},
      {"lambda_ba", [&](const std::string& v) { cfg.lambda_ba = p.as_double(v); }},
      {"window_size", [&](const std::string& v) { cfg.window_size = p.as_int(v); }},
      {"extrinsic_q_bc", [&](const std::string& v) { cfg.extrinsics.R_bc = p.as_quat(v); }},
      {"extrinsic_p_bc", [&](const std::string& v) { cfg.extrinsics.p_bc = p.as_vec3(v); }},
      {"sim_duration", [&](const std::string& v) { cfg.sim.duration = p.as_double(v); }},
      {"sim_imu_rate", [&](const std::string& v) { cfg.sim.imu_rate = p.as_double(v); }},
      {"sim_keyframe_rate", [&](const std::string& v) { cfg.sim.keyframe_rate = p.as_double(v); }},
      {"sim_pos_amp", [&](const std::string& v) { cfg.sim.pos_amp = p.as_vec3(v); }},
      {"sim_pos_freq", [&](const std::string& v) { cfg.sim.pos_freq = p.as_vec3(v); }},
      {"sim_ang_amp", [&](const std::string& v) { cfg.sim.ang_amp = p.as_vec3(v); }},
      {"sim_ang_freq", [&](const std::string& v) { cfg.sim.ang_freq = p.as_vec3(v); }},
      {"sim_seed", [&](const std::string& v) { cfg.sim.seed = p.as_u64(v); }},
      {"sim_scale", [&](const std::string& v) { cfg.sim_scale = p.as_double(v); }},
      {"sim_gyro_noise_std", [&](const std::string& v) { cfg.sim_noise.gyro_noise_std = p.as_double(v); }},
      {"sim_gyro_walk_std", [&](const std::string& v) { cfg.sim_noise.gyro_walk_std = p.as_double(v); }},
      {"sim_accel_noise_std", [&](const std::string& v) { cfg.sim_noise.accel_noise_std = p.as_double(v); }},
      {"sim_accel_walk_std", [&](const std::string& v) { cfg.sim_noise.accel_walk_std = p.as_double(v); }},
      {"sim_bg_true", [&](const std::string& v) { cfg.sim_noise.bg_true = p.as_vec3(v); }},
      {"sim_ba_true", [&](const std::string& v) { cfg.sim_noise.ba_true = p.as_vec3(v); }},
      {"sim_rot_noise_std", [&](const std::string& v) { cfg.sim_noise.rot_obs_noise_std = p.as_double(v); }},
      {"sweep_rot_noise", [&](const std::string& v) { cfg.sweep_rot_noise = p.as_list(v); }},
      {"sweep_window",
       [&](const std::string& v) {
         cfg.sweep_window.clear();
         for (double d : p.as_list(v)) cfg.sweep_window.push_back(static_cast<int>(d));
       }},
      {"sweep_seeds", [&](const std::string& v) { cfg.sweep_seeds = p.as_int(v); }},
  };

  std::string line;
  while (std::getline(in, line)) {
    ++p.lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        p.fail("expected 'key = value'");
      }
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) p.fail("missing key");
    auto it = keys.find(key);
    if (it == keys.end()) {
      if (warnings_enabled()) {
        std::cerr << "warning: " << origin << ":" << p.lineno
                  << ": unknown config key '" << key << "'\n";
      }
      continue;
    }
    if (value.empty()) p.fail("missing value for key '" + key + "'");
    it->second(value);
  }

  // Keep the simulator consistent with the gravity the solvers assume.
  cfg.sim.gravity_mag = cfg.gravity_magnitude;
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  return parse_config(in, path);
}

void write_config(const std::string& path, const PipelineConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write config file: " + path);

  const Eigen::Quaterniond q(cfg.extrinsics.R_bc);
  auto vec = [](const Vec3& v) {
    return fmt(v.x()) + " " + fmt(v.y()) + " " + fmt(v.z());
  };

  out << "# ESKF\n"
      << "gyro_noise_std = " << fmt(cfg.gyro_noise_std) << "\n"
      << "gyro_walk_std = " << fmt(cfg.gyro_walk_std) << "\n"
      << "obs_rot_var = " << fmt(cfg.obs_rot_var) << "\n"
      << "p0_theta_var = " << fmt(cfg.p0_theta_var) << "\n"
      << "p0_bg_var = " << fmt(cfg.p0_bg_var) << "\n"
      << "# solvers\n"
      << "gravity_magnitude = " << fmt(cfg.gravity_magnitude) << "\n"
      << "pcg_iterations = " << cfg.pcg_iterations << "\n"
      << "irls_passes = " << cfg.irls_passes << "\n"
      << "lambda_ba = " << fmt(cfg.lambda_ba) << "\n"
      << "window_size = " << cfg.window_size << "\n"
      << "extrinsic_q_bc = " << fmt(q.x()) << " " << fmt(q.y()) << " "
      << fmt(q.z()) << " " << fmt(q.w()) << "\n"
      << "extrinsic_p_bc = " << vec(cfg.extrinsics.p_bc) << "\n"
      << "# simulator\n"
      << "sim_duration = " << fmt(cfg.sim.duration) << "\n"
      << "sim_imu_rate = " << fmt(cfg.sim.imu_rate) << "\n"
      << "sim_keyframe_rate = " << fmt(cfg.sim.keyframe_rate) << "\n"
      << "sim_pos_amp = " << vec(cfg.sim.pos_amp) << "\n"
      << "sim_pos_freq = " << vec(cfg.sim.pos_freq) << "\n"
      << "sim_ang_amp = " << vec(cfg.sim.ang_amp) << "\n"
      << "sim_ang_freq = " << vec(cfg.sim.ang_freq) << "\n"
      << "sim_seed = " << cfg.sim.seed << "\n"
      << "sim_scale = " << fmt(cfg.sim_scale) << "\n"
      << "sim_gyro_noise_std = " << fmt(cfg.sim_noise.gyro_noise_std) << "\n"
      << "sim_gyro_walk_std = " << fmt(cfg.sim_noise.gyro_walk_std) << "\n"
      << "sim_accel_noise_std = " << fmt(cfg.sim_noise.accel_noise_std) << "\n"
      << "sim_accel_walk_std = " << fmt(cfg.sim_noise.accel_walk_std) << "\n"
      << "sim_bg_true = " << vec(cfg.sim_noise.bg_true) << "\n"
      << "sim_ba_true = " << vec(cfg.sim_noise.ba_true) << "\n"
      << "sim_rot_noise_std = " << fmt(cfg.sim_noise.rot_obs_noise_std) << "\n"
      << "# sweep\n";
  out << "sweep_rot_noise =";
  for (double v : cfg.sweep_rot_noise) out << " " << fmt(v);
  out << "\nsweep_window =";
  for (int v : cfg.sweep_window) out << " " << v;
  out << "\nsweep_seeds = " << cfg.sweep_seeds << "\n";
}

}  // namespace edi
