#include "edi/preintegration.hpp"

#include <algorithm>
#include <cmath>

#include "edi/errors.hpp"
#include "edi/so3.hpp"

namespace edi {

namespace {

// Boundary samples within 1 ns of the target instant count as exact.
constexpr double kBoundaryTol = 1e-9;

ImuSample lerp_sample(const ImuSample& a, const ImuSample& b, double t) {
  const double u = (t - a.t) / (b.t - a.t);
  return ImuSample{t, (1.0 - u) * a.omega + u * b.omega,
                   (1.0 - u) * a.accel + u * b.accel};
}

void check_monotonic(std::span<const ImuSample> samples) {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].t > samples[i - 1].t)) {
      throw InputError("preintegrate: sample timestamps are not strictly increasing");
    }
  }
}

}  // namespace

PreintegratedDelta preintegrate(std::span<const ImuSample> samples,
                                const Vec3& bg, const Vec3& ba) {
  if (samples.size() < 2) {
    throw InputError("preintegrate: at least 2 samples required");
  }
  check_monotonic(samples);

  PreintegratedDelta d;
  d.bg_used = bg;
  d.ba_used = ba;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const double dt = samples[i + 1].t - samples[i].t;
    const Vec3 w = 0.5 * (samples[i].omega + samples[i + 1].omega) - bg;
    const Vec3 a = 0.5 * (samples[i].accel + samples[i + 1].accel) - ba;
    const Mat3 R_mid = d.dR * exp_so3(0.5 * dt * w);

    d.dp += d.dv * dt + 0.5 * dt * dt * (R_mid * a);
    d.J_dp_dba += d.J_dv_dba * dt - 0.5 * dt * dt * R_mid;
    d.dv += dt * (R_mid * a);
    d.J_dv_dba -= dt * R_mid;
    d.dR = d.dR * exp_so3(dt * w);
  }
  d.dt = samples.back().t - samples.front().t;
  d.dR = project_to_so3(d.dR);
  return d;
}

PreintegratedDelta repreintegrate(const PreintegratedDelta& delta,
                                  std::span<const ImuSample> samples,
                                  const Vec3& bg_new) {
  return preintegrate(samples, bg_new, delta.ba_used);
}

PreintegratedDelta compose(const PreintegratedDelta& a,
                           const PreintegratedDelta& b) {
  PreintegratedDelta c;
  c.dt = a.dt + b.dt;
  c.dp = a.dp + a.dv * b.dt + a.dR * b.dp;
  c.dv = a.dv + a.dR * b.dv;
  c.dR = a.dR * b.dR;
  c.J_dp_dba = a.J_dp_dba + a.J_dv_dba * b.dt + a.dR * b.J_dp_dba;
  c.J_dv_dba = a.J_dv_dba + a.dR * b.J_dv_dba;
  c.bg_used = a.bg_used;
  c.ba_used = a.ba_used;
  return c;
}

std::vector<ImuSample> segment_between(std::span<const ImuSample> samples,
                                       double t0, double t1) {
  if (samples.size() < 2) {
    throw InputError("segment_between: at least 2 samples required");
  }
  check_monotonic(samples);
  if (!(t1 - t0 > 10.0 * kBoundaryTol)) {
    throw InputError("segment_between: degenerate interval");
  }
  if (samples.front().t > t0 + kBoundaryTol ||
      samples.back().t < t1 - kBoundaryTol) {
    throw InputError("segment_between: sample stream does not cover interval");
  }

  const ImuSample* s = samples.data();
  const std::size_t n = samples.size();

  std::size_t lo = 0;  // first index strictly after t0
  while (lo < n && s[lo].t <= t0 + kBoundaryTol) ++lo;

  std::vector<ImuSample> out;
  if (std::abs(s[lo - 1].t - t0) <= kBoundaryTol) {
    out.push_back(ImuSample{t0, s[lo - 1].omega, s[lo - 1].accel});
  } else {
    out.push_back(lerp_sample(s[lo - 1], s[lo], t0));
  }

  std::size_t hi = lo;  // first index at or beyond t1
  while (hi < n && s[hi].t < t1 - kBoundaryTol) {
    out.push_back(s[hi]);
    ++hi;
  }

  if (std::abs(s[hi].t - t1) <= kBoundaryTol) {
    out.push_back(ImuSample{t1, s[hi].omega, s[hi].accel});
  } else {
    out.push_back(lerp_sample(s[hi - 1], s[hi], t1));
  }
  return out;
}

}  // namespace edi
