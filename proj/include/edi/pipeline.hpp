#pragma once

#include <cstdint>
#include <vector>

#include "edi/dataio.hpp"
#include "edi/eskf.hpp"
#include "edi/linear_align.hpp"
#include "edi/refine.hpp"
#include "edi/types.hpp"

namespace edi {

struct InitTimings {
  std::int64_t eskf_us = 0;
  std::int64_t preint_us = 0;
  std::int64_t linear_us = 0;
  std::int64_t refine_us = 0;
  std::int64_t total_us = 0;
};

// Output of one initialization run: gyro bias and corrected rotations from
// the filter step, the linear seed, and the refined solution with its
// recovered gravity vector.
struct InitResult {
  Vec3 bg = Vec3::Zero();
  std::vector<Mat3> corrected_R;
  LinearSolution linear;
  RefinedSolution refined;
  Vec3 g_refined = Vec3::Zero();
  InitTimings timing;
};

// Steps 1-3 over an assembled bundle. Timing covers the pure computation of
// each stage, no I/O. Errors from any stage propagate as typed exceptions.
InitResult run_init(const DatasetBundle& bundle, const PipelineConfig& cfg);

}  // namespace edi
