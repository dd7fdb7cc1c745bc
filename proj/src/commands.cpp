#include "edi/commands.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "edi/errors.hpp"
#include "edi/pipeline.hpp"
#include "edi/so3.hpp"

namespace fs = std::filesystem;

namespace edi {

namespace {

using nlohmann::json;

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 json_vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw InputError("expected 3-element array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json quat_json(const Mat3& R) {
  Eigen::Quaterniond q(R);
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return json::array({q.x(), q.y(), q.z(), q.w()});
}

Mat3 json_quat(const json& j) {
  if (!j.is_array() || j.size() != 4) throw InputError("expected quaternion array");
  const Eigen::Quaterniond q(j[3].get<double>(), j[0].get<double>(),
                             j[1].get<double>(), j[2].get<double>());
  return q.normalized().toRotationMatrix();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create directory " + dir + ": " + ec.message());
}

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::uint64_t h = 1469598103934665603ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

// Median over the finite entries; NaN marks cells whose alignment solve
// degenerated (the rotation metrics still count).
double median_of(std::vector<double> v) {
  std::erase_if(v, [](double x) { return !std::isfinite(x); });
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Everything cmd_eval needs about one run, file-backed in solution.json.
struct Solution {
  std::vector<double> times;
  std::vector<Vec3> p_wc_bar;
  std::vector<Vec3> v;
  std::vector<Mat3> corrected_R;
  std::vector<Mat3> observed_R;
  Vec3 bg = Vec3::Zero();
  Vec3 ba = Vec3::Zero();
  Vec3 g_w = Vec3::Zero();
  Vec3 g_w_linear = Vec3::Zero();
  double s = 1.0;
  double s_linear = 1.0;
  double w1 = 0.0, w2 = 0.0;
  Extrinsics extrinsics;
  std::uint64_t seed = 0;
};

void write_solution(const std::string& path, const Solution& s) {
  json j;
  j["times"] = s.times;
  j["bg"] = vec3_json(s.bg);
  j["ba"] = vec3_json(s.ba);
  j["g_w"] = vec3_json(s.g_w);
  j["g_w_linear"] = vec3_json(s.g_w_linear);
  j["s"] = s.s;
  j["s_linear"] = s.s_linear;
  j["w1"] = s.w1;
  j["w2"] = s.w2;
  j["v"] = json::array();
  for (const auto& vi : s.v) j["v"].push_back(vec3_json(vi));
  j["corrected_R"] = json::array();
  for (const auto& R : s.corrected_R) j["corrected_R"].push_back(quat_json(R));
  j["observed_R"] = json::array();
  for (const auto& R : s.observed_R) j["observed_R"].push_back(quat_json(R));
  j["p_wc_bar"] = json::array();
  for (const auto& p : s.p_wc_bar) j["p_wc_bar"].push_back(vec3_json(p));
  j["extrinsic_q_bc"] = quat_json(s.extrinsics.R_bc);
  j["extrinsic_p_bc"] = vec3_json(s.extrinsics.p_bc);
  j["seed"] = s.seed;

  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
}

Solution read_solution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open solution file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }

  Solution s;
  try {
    s.times = j.at("times").get<std::vector<double>>();
    s.bg = json_vec3(j.at("bg"));
    s.ba = json_vec3(j.at("ba"));
    s.g_w = json_vec3(j.at("g_w"));
    s.g_w_linear = json_vec3(j.at("g_w_linear"));
    s.s = j.at("s").get<double>();
    s.s_linear = j.at("s_linear").get<double>();
    s.w1 = j.at("w1").get<double>();
    s.w2 = j.at("w2").get<double>();
    for (const auto& vi : j.at("v")) s.v.push_back(json_vec3(vi));
    for (const auto& q : j.at("corrected_R")) s.corrected_R.push_back(json_quat(q));
    for (const auto& q : j.at("observed_R")) s.observed_R.push_back(json_quat(q));
    for (const auto& p : j.at("p_wc_bar")) s.p_wc_bar.push_back(json_vec3(p));
    s.extrinsics.R_bc = json_quat(j.at("extrinsic_q_bc"));
    s.extrinsics.p_bc = json_vec3(j.at("extrinsic_p_bc"));
    s.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  if (s.times.size() != s.p_wc_bar.size() ||
      s.times.size() != s.corrected_R.size() || s.times.size() != s.v.size()) {
    throw InputError(path + ": inconsistent array lengths");
  }
  return s;
}

InitTimings read_timing(const std::string& path) {
  InitTimings t;
  std::ifstream in(path);
  if (!in) return t;
  json j;
  try {
    in >> j;
    t.eskf_us = j.value("eskf_us", 0LL);
    t.preint_us = j.value("preintegration_us", 0LL);
    t.linear_us = j.value("linear_us", 0LL);
    t.refine_us = j.value("refine_us", 0LL);
    t.total_us = j.value("total_us", 0LL);
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  return t;
}

void write_timing(const std::string& path, const InitTimings& t) {
  json j;
  j["eskf_us"] = t.eskf_us;
  j["preintegration_us"] = t.preint_us;
  j["linear_us"] = t.linear_us;
  j["refine_us"] = t.refine_us;
  j["total_us"] = t.total_us;
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
}

EvalReport evaluate_solution(const Solution& sol, const LoadedTruth& truth,
                             const InitTimings& timing) {
  const GroundTruth& gt = truth.gt;
  if (gt.times.size() < 3) throw InputError("evaluate: ground truth too short");

  // Nearest-timestamp association, tolerant to a fraction of the truth rate.
  std::vector<double> periods;
  for (std::size_t i = 1; i < gt.times.size(); ++i) {
    periods.push_back(gt.times[i] - gt.times[i - 1]);
  }
  const double tol = std::max(1e-6, 0.3 * median_of(periods));

  std::vector<Vec3> est_p, est_p_linear, gt_p, gt_v;
  std::vector<Mat3> est_R, obs_R, gt_R;
  for (std::size_t i = 0; i < sol.times.size(); ++i) {
    std::size_t best = 0;
    double best_dt = std::abs(gt.times[0] - sol.times[i]);
    for (std::size_t k = 1; k < gt.times.size(); ++k) {
      const double dt = std::abs(gt.times[k] - sol.times[i]);
      if (dt < best_dt) {
        best_dt = dt;
        best = k;
      }
    }
    if (best_dt > tol) {
      throw InputError("evaluate: no ground-truth pose within tolerance of t=" +
                       std::to_string(sol.times[i]));
    }
    est_p.push_back(sol.s * sol.p_wc_bar[i] -
                    sol.corrected_R[i] * sol.extrinsics.p_bc);
    est_p_linear.push_back(sol.s_linear * sol.p_wc_bar[i] -
                           sol.corrected_R[i] * sol.extrinsics.p_bc);
    est_R.push_back(sol.corrected_R[i]);
    if (!sol.observed_R.empty()) obs_R.push_back(sol.observed_R[i]);
    gt_p.push_back(gt.p_wb[best]);
    gt_R.push_back(gt.R_wb[best]);
    if (!gt.v_wb.empty()) gt_v.push_back(gt.v_wb[best]);
  }

  EvalReport r;
  r.seed = sol.seed;
  // The alignment maps the metric reconstruction onto the truth; the scale
  // error scores the reconstruction-over-truth ratio against s* = 1, so a
  // solution mis-scaled by 10 % reads exactly 10 %.
  const Similarity sim = align_umeyama(est_p, gt_p, /*with_scale=*/true);
  r.s_pipeline = sol.s;
  r.s_residual = sim.s;
  r.s_total = sol.s * sim.s;
  r.scale_error_pct = scale_error_pct(1.0 / sim.s);
  r.scale_error_linear_pct =
      scale_error_pct(1.0 / align_umeyama(est_p_linear, gt_p, true).s);
  r.ate_m = ate_rmse(est_p, gt_p);
  r.rot_rmse_rad = rotation_rmse(est_R, gt_R);
  if (!obs_R.empty()) r.obs_rot_rmse_rad = rotation_rmse(obs_R, gt_R);

  if (truth.has_inertial) {
    const double cosang = std::clamp(
        sol.g_w.normalized().dot(gt.g_w.normalized()), -1.0, 1.0);
    r.grav_angle_err_deg = std::acos(cosang) * 180.0 / M_PI;
    r.bg_err = (sol.bg - gt.bg_true).norm();
    r.ba_err = (sol.ba - gt.ba_true).norm();
    if (!gt_v.empty()) {
      double acc = 0.0;
      for (std::size_t i = 0; i < gt_v.size(); ++i) {
        acc += (sol.v[i] - gt_v[i]).squaredNorm();
      }
      r.vel_rmse = std::sqrt(acc / static_cast<double>(gt_v.size()));
    }
  }

  r.eskf_us = timing.eskf_us;
  r.preint_us = timing.preint_us;
  r.linear_us = timing.linear_us;
  r.refine_us = timing.refine_us;
  r.total_us = timing.total_us;
  return r;
}

json report_json(const EvalReport& r) {
  json j;
  j["scale_error_pct"] = r.scale_error_pct;
  j["scale_error_linear_pct"] = r.scale_error_linear_pct;
  j["grav_angle_err_deg"] = r.grav_angle_err_deg;
  j["rot_rmse_rad"] = r.rot_rmse_rad;
  j["obs_rot_rmse_rad"] = r.obs_rot_rmse_rad;
  j["ate_m"] = r.ate_m;
  j["bg_err"] = r.bg_err;
  j["ba_err"] = r.ba_err;
  j["vel_rmse"] = r.vel_rmse;
  j["s_pipeline"] = r.s_pipeline;
  j["s_residual"] = r.s_residual;
  j["s_total"] = r.s_total;
  j["seed"] = r.seed;
  j["eskf_us"] = r.eskf_us;
  j["preint_us"] = r.preint_us;
  j["linear_us"] = r.linear_us;
  j["refine_us"] = r.refine_us;
  j["total_us"] = r.total_us;
  return j;
}

Solution solution_from_result(const DatasetBundle& bundle,
                              const InitResult& res, std::uint64_t seed) {
  Solution s;
  s.times = bundle.track.times;
  s.p_wc_bar = bundle.track.p_wc_bar;
  s.corrected_R = res.corrected_R;
  for (const auto& o : bundle.observations) s.observed_R.push_back(o.r_wb);
  s.v = res.refined.v;
  s.bg = res.bg;
  s.ba = res.refined.ba;
  s.g_w = res.g_refined;
  s.g_w_linear = res.linear.g_w;
  s.s = res.refined.s;
  s.s_linear = res.linear.s;
  s.w1 = res.refined.w1;
  s.w2 = res.refined.w2;
  s.extrinsics = bundle.extrinsics;
  s.seed = seed;
  return s;
}

}  // namespace

void cmd_simulate(const PipelineConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  const Trajectory traj(cfg.sim);
  const auto imu = gen_imu(traj, cfg.sim_noise);
  const auto kf = gen_keyframes(traj, cfg.sim_scale, cfg.sim_noise, cfg.extrinsics);

  write_imu_csv(out_dir + "/imu.csv", imu);

  TrajectoryFile cam;
  cam.times = kf.track.times;
  cam.positions = kf.track.p_wc_bar;
  for (const auto& R_wb : kf.track.R_wb) {
    cam.rotations.push_back(R_wb * cfg.extrinsics.R_bc);
  }
  write_trajectory(out_dir + "/keyframes.txt", cam);

  GroundTruth gt = traj.keyframe_truth();
  gt.s_true = cfg.sim_scale;
  gt.bg_true = cfg.sim_noise.bg_true;
  gt.ba_true = cfg.sim_noise.ba_true;
  write_ground_truth(out_dir, gt);
  write_config(out_dir + "/config.cfg", cfg);
  std::cout << "wrote dataset to " << out_dir << "\n";
}

void cmd_init(const std::string& dataset_dir, const PipelineConfig& cfg,
              const std::string& out_dir) {
  ensure_dir(out_dir);
  const std::string imu_path = dataset_dir + "/imu.csv";
  const std::string kf_path = dataset_dir + "/keyframes.txt";

  std::int64_t epoch_ns = 0;
  auto imu = load_imu_csv(imu_path, &epoch_ns);
  const auto cam = load_trajectory(kf_path);
  const DatasetBundle bundle = make_bundle(std::move(imu), epoch_ns, cam, cfg);

  const InitResult res = run_init(bundle, cfg);

  write_solution(out_dir + "/solution.json",
                 solution_from_result(bundle, res, cfg.sim.seed));
  write_timing(out_dir + "/timing.json", res.timing);
  write_config(out_dir + "/config.cfg", cfg);

  json manifest;
  manifest["inputs"]["imu.csv"] = fnv1a_file(imu_path);
  manifest["inputs"]["keyframes.txt"] = fnv1a_file(kf_path);
  manifest["config"] = "config.cfg";
  manifest["outputs"] = {"solution.json", "timing.json"};
  manifest["timing_file"] = "timing.json";
  manifest["seeds"] = {cfg.sim.seed};
  std::ofstream mout(out_dir + "/manifest.json");
  if (!mout) throw InputError("cannot write " + out_dir + "/manifest.json");
  mout << manifest.dump(2) << '\n';
  std::cout << "wrote " << out_dir << "/solution.json\n";
}

void cmd_eval(const std::string& solution_path, const std::string& truth_dir,
              const std::string& out_dir) {
  ensure_dir(out_dir);
  const Solution sol = read_solution(solution_path);
  const LoadedTruth truth = load_ground_truth(truth_dir);
  const InitTimings timing =
      read_timing(fs::path(solution_path).parent_path() / "timing.json");

  const EvalReport r = evaluate_solution(sol, truth, timing);

  std::ofstream jout(out_dir + "/report.json");
  if (!jout) throw InputError("cannot write " + out_dir + "/report.json");
  jout << report_json(r).dump(2) << '\n';

  std::ofstream cout_(out_dir + "/report.csv");
  if (!cout_) throw InputError("cannot write " + out_dir + "/report.csv");
  cout_ << report_csv_header() << '\n' << report_csv_row(r) << '\n';
  std::cout << "wrote " << out_dir << "/report.json\n";
}

void cmd_eval_batch(const std::string& parent, const std::string& out_csv) {
  std::vector<std::string> run_dirs;
  for (const auto& entry : fs::directory_iterator(parent)) {
    if (entry.is_directory() && fs::exists(entry.path() / "solution.json")) {
      run_dirs.push_back(entry.path().string());
    }
  }
  std::sort(run_dirs.begin(), run_dirs.end());
  if (run_dirs.empty()) {
    throw InputError("eval --batch: no run directories with solution.json under " + parent);
  }

  std::vector<EvalReport> reports;
  for (const auto& dir : run_dirs) {
    const Solution sol = read_solution(dir + "/solution.json");
    const LoadedTruth truth = load_ground_truth(dir);
    reports.push_back(evaluate_solution(sol, truth, read_timing(dir + "/timing.json")));
  }

  std::ofstream out(out_csv);
  if (!out) throw InputError("cannot write " + out_csv);
  out << report_csv_header() << '\n';
  for (const auto& r : reports) out << report_csv_row(r) << '\n';

  auto med = [&](auto getter) {
    std::vector<double> v;
    for (const auto& r : reports) v.push_back(getter(r));
    return median_of(std::move(v));
  };
  EvalReport m;
  m.scale_error_pct = med([](const EvalReport& r) { return r.scale_error_pct; });
  m.scale_error_linear_pct =
      med([](const EvalReport& r) { return r.scale_error_linear_pct; });
  m.grav_angle_err_deg = med([](const EvalReport& r) { return r.grav_angle_err_deg; });
  m.rot_rmse_rad = med([](const EvalReport& r) { return r.rot_rmse_rad; });
  m.obs_rot_rmse_rad = med([](const EvalReport& r) { return r.obs_rot_rmse_rad; });
  m.ate_m = med([](const EvalReport& r) { return r.ate_m; });
  m.bg_err = med([](const EvalReport& r) { return r.bg_err; });
  m.ba_err = med([](const EvalReport& r) { return r.ba_err; });
  m.vel_rmse = med([](const EvalReport& r) { return r.vel_rmse; });
  m.s_pipeline = med([](const EvalReport& r) { return r.s_pipeline; });
  m.s_residual = med([](const EvalReport& r) { return r.s_residual; });
  m.s_total = med([](const EvalReport& r) { return r.s_total; });
  std::string row = report_csv_row(m);
  out << "median" << row.substr(row.find(',')) << '\n';
  std::cout << "wrote " << out_csv << "\n";
}

EvalReport run_cell(const PipelineConfig& cfg) {
  const Trajectory traj(cfg.sim);
  auto imu = gen_imu(traj, cfg.sim_noise);
  auto kf = gen_keyframes(traj, cfg.sim_scale, cfg.sim_noise, cfg.extrinsics);
  GroundTruth gt = traj.keyframe_truth();

  const std::size_t n =
      std::min<std::size_t>(kf.track.times.size(), cfg.window_size);
  kf.track.times.resize(n);
  kf.track.R_wb.resize(n);
  kf.track.p_wc_bar.resize(n);
  kf.observations.resize(n);
  gt.times.resize(n);
  gt.R_wb.resize(n);
  gt.p_wb.resize(n);
  gt.v_wb.resize(n);
  gt.s_true = cfg.sim_scale;
  gt.bg_true = cfg.sim_noise.bg_true;
  gt.ba_true = cfg.sim_noise.ba_true;

  DatasetBundle bundle;
  bundle.imu = std::move(imu);
  bundle.track = kf.track;
  bundle.observations = kf.observations;
  bundle.extrinsics = cfg.extrinsics;

  try {
    const InitResult res = run_init(bundle, cfg);
    return evaluate_solution(solution_from_result(bundle, res, cfg.sim.seed),
                             LoadedTruth{gt, true}, res.timing);
  } catch (const NumericError&) {
    // Degenerate alignment (heavy observation noise can produce it). The
    // filter step still stands: report the rotation metrics, mark the rest.
    EskfParams ep;
    ep.noise.sigma_wn = cfg.gyro_noise_std;
    ep.noise.sigma_ww = cfg.gyro_walk_std;
    ep.noise.V = cfg.obs_rot_var * Mat3::Identity();
    ep.p0_theta_var = cfg.p0_theta_var;
    ep.p0_bg_var = cfg.p0_bg_var;
    const GyroBiasEstimate gyro = estimate_gyro_bias(bundle.track, bundle.imu, ep);

    EvalReport r;
    r.seed = cfg.sim.seed;
    std::vector<Mat3> obs_R;
    for (const auto& o : bundle.observations) obs_R.push_back(o.r_wb);
    r.rot_rmse_rad = rotation_rmse(gyro.corrected_R, gt.R_wb);
    r.obs_rot_rmse_rad = rotation_rmse(obs_R, gt.R_wb);
    r.bg_err = (gyro.bg - gt.bg_true).norm();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.scale_error_pct = r.scale_error_linear_pct = r.grav_angle_err_deg =
        r.ate_m = r.ba_err = r.vel_rmse = r.s_pipeline = r.s_residual =
            r.s_total = nan;
    return r;
  }
}

void cmd_sweep(const PipelineConfig& cfg, const std::string& out_dir, int jobs) {
  ensure_dir(out_dir);
  if (cfg.sweep_seeds < 1) throw InputError("sweep: sweep_seeds must be >= 1");
  for (int w : cfg.sweep_window) {
    if (w < 4) throw InputError("sweep: window sizes must be >= 4");
  }
  for (double r : cfg.sweep_rot_noise) {
    if (r < 0.0) throw InputError("sweep: rotation noise must be >= 0");
  }

  struct Cell {
    double rot_noise;
    int window;
    int seed;
  };
  std::vector<Cell> cells;
  for (double rot : cfg.sweep_rot_noise) {
    for (int w : cfg.sweep_window) {
      for (int seed = 1; seed <= cfg.sweep_seeds; ++seed) {
        cells.push_back(Cell{rot, w, seed});
      }
    }
  }

  std::vector<EvalReport> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) break;
      try {
        PipelineConfig c = cfg;
        c.sim.seed = static_cast<std::uint64_t>(cells[i].seed);
        c.sim_noise.rot_obs_noise_std = cells[i].rot_noise;
        c.window_size = cells[i].window;
        c.sim.duration = std::max(cfg.sim.duration,
                                  cells[i].window / c.sim.keyframe_rate);
        results[i] = run_cell(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  const int n_jobs = std::max(
      1, std::min<int>(jobs > 0 ? jobs : std::thread::hardware_concurrency(),
                       static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < n_jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  auto metric_row = [](const EvalReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g",
                  r.scale_error_pct, r.scale_error_linear_pct,
                  r.grav_angle_err_deg, r.rot_rmse_rad, r.obs_rot_rmse_rad,
                  r.ate_m, r.bg_err, r.ba_err, r.vel_rmse, r.s_pipeline,
                  r.s_total);
    return std::string(buf);
  };

  std::ofstream out(out_dir + "/sweep.csv");
  if (!out) throw InputError("cannot write " + out_dir + "/sweep.csv");
  out << "rot_noise,window,seed,scale_error_pct,scale_error_linear_pct,"
         "grav_angle_err_deg,rot_rmse_rad,obs_rot_rmse_rad,ate_m,bg_err,"
         "ba_err,vel_rmse,s_pipeline,s_total\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    char prefix[96];
    std::snprintf(prefix, sizeof(prefix), "%.12g,%d,%d,", cells[i].rot_noise,
                  cells[i].window, cells[i].seed);
    out << prefix << metric_row(results[i]) << '\n';
  }

  // One median summary row per (rot_noise, window) group.
  for (double rot : cfg.sweep_rot_noise) {
    for (int w : cfg.sweep_window) {
      EvalReport m;
      auto med = [&](auto getter) {
        std::vector<double> v;
        for (std::size_t i = 0; i < cells.size(); ++i) {
          if (cells[i].rot_noise == rot && cells[i].window == w) {
            v.push_back(getter(results[i]));
          }
        }
        return median_of(std::move(v));
      };
      m.scale_error_pct = med([](const EvalReport& r) { return r.scale_error_pct; });
      m.scale_error_linear_pct =
          med([](const EvalReport& r) { return r.scale_error_linear_pct; });
      m.grav_angle_err_deg =
          med([](const EvalReport& r) { return r.grav_angle_err_deg; });
      m.rot_rmse_rad = med([](const EvalReport& r) { return r.rot_rmse_rad; });
      m.obs_rot_rmse_rad =
          med([](const EvalReport& r) { return r.obs_rot_rmse_rad; });
      m.ate_m = med([](const EvalReport& r) { return r.ate_m; });
      m.bg_err = med([](const EvalReport& r) { return r.bg_err; });
      m.ba_err = med([](const EvalReport& r) { return r.ba_err; });
      m.vel_rmse = med([](const EvalReport& r) { return r.vel_rmse; });
      m.s_pipeline = med([](const EvalReport& r) { return r.s_pipeline; });
      m.s_total = med([](const EvalReport& r) { return r.s_total; });
      char prefix[96];
      std::snprintf(prefix, sizeof(prefix), "%.12g,%d,median,", rot, w);
      out << prefix << metric_row(m) << '\n';
    }
  }
  std::cout << "wrote " << out_dir << "/sweep.csv (" << cells.size()
            << " cells)\n";
}

PipelineConfig apply_preset(PipelineConfig cfg, const std::string& preset) {
  if (preset == "exact") {
    cfg.sim_noise = NoiseConfig{};
  } else if (preset == "table3") {
    cfg.sim_noise.gyro_noise_std = 1.7e-4;
    cfg.sim_noise.gyro_walk_std = 2e-5;
    cfg.sim_noise.accel_noise_std = 2e-3;
    cfg.sim_noise.accel_walk_std = 0.0;
    cfg.sim_noise.bg_true = Vec3(0.003, -0.002, 0.004);
    cfg.sim_noise.ba_true = Vec3(0.05, -0.03, 0.02);
    cfg.sim_noise.rot_obs_noise_std = 0.0;
    cfg.sweep_rot_noise = {0.0};
    cfg.sweep_seeds = 20;
  } else if (preset == "table5") {
    cfg.sim_noise.gyro_noise_std = 1.7e-4;
    cfg.sim_noise.gyro_walk_std = 2e-5;
    cfg.sim_noise.accel_noise_std = 2e-3;
    cfg.sim_noise.accel_walk_std = 0.0;
    cfg.sim_noise.bg_true = Vec3(0.02, -0.01, 0.015);
    cfg.sim_noise.ba_true = Vec3(0.05, -0.03, 0.02);
    cfg.sim_noise.rot_obs_noise_std = 0.1;
    cfg.obs_rot_var = 0.01;    // match the injected observation noise
    cfg.p0_theta_var = 0.01;   // the first keyframe is an observation
    cfg.sweep_rot_noise = {0.1};
    cfg.sweep_seeds = 20;
  } else {
    throw InputError("unknown preset '" + preset +
                     "' (available: exact, table3, table5)");
  }
  return cfg;
}

}  // namespace edi
