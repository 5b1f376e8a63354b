#pragma once

// Depth, point-cloud and per-field evaluation metrics.

#include <array>
#include <span>
#include <vector>

#include "pixht/exec.hpp"
#include "pixht/fields.hpp"
#include "pixht/grid.hpp"

namespace pixht {

enum class AlignSpace { depth, disparity };

struct ScaleShift {
  double scale = 1.0;
  double shift = 0.0;
  ScalarGrid aligned;  // scale * pred + shift (in depth space for either mode)
};

// Least-squares (s, t) minimizing sum (s * pred + t - gt)^2 over the mask.
// In disparity mode the fit runs on 1/pred and 1/gt and the aligned map is
// converted back to depth. Throws NumericError when the system is rank
// deficient (fewer than two distinct targets).
ScaleShift align_scale_shift(const ScalarGrid& pred, const ScalarGrid& gt, const ScalarGrid& mask,
                             AlignSpace space = AlignSpace::depth);

struct DepthMetrics {
  double absrel = 0.0;
  double delta1 = 0.0;
  size_t count = 0;
  size_t nonpositive = 0;  // predictions <= 0: delta1 failures, excluded from AbsRel
};

// Pixels count when masked, valid in both maps, and gt > 0.
DepthMetrics absrel_delta1(const ScalarGrid& pred, const ScalarGrid& gt, const ScalarGrid& mask);

// 0.5 * (mean_a min_b |a - b| + mean_b min_a |a - b|), Euclidean.
double chamfer_distance(const PointCloud& a, const PointCloud& b, const Exec& exec = {});
// Mean over a of the distance to the nearest point of b.
double mean_nearest_distance(const PointCloud& a, const PointCloud& b, const Exec& exec = {});

// s* = sum <p, g> / sum <p, p> over paired points.
double lsiv_scale(const PointCloud& pred, const PointCloud& gt);
// RMSE(s* pred, gt). Clouds must be index-paired.
double lsiv(const PointCloud& pred, const PointCloud& gt);

// Pairs two clouds by source pixel, keeping pixels present in both.
std::pair<PointCloud, PointCloud> pair_by_pixel(const PointCloud& a, const PointCloud& b);

PointCloud scaled(const PointCloud& cloud, double s);

struct FieldErrors {
  double height_l1_px = 0.0;
  double latitude_l1_deg = 0.0;
  double up_l1_deg = 0.0;
  size_t count = 0;
};

// L1 errors over masked pixels valid in both inputs. Heights are compared in
// raw pixels (denormalized with the image height), up vectors by angle
// wrapped to [0, 180] degrees.
FieldErrors field_errors(const PixelHeightMap& pred_heights, const PerspectiveField& pred_field,
                         const PixelHeightMap& gt_heights, const PerspectiveField& gt_field,
                         const ScalarGrid& mask);

struct EvalReport {
  double absrel = 0.0;
  double delta1 = 0.0;
  double lsiv = 0.0;
  double chamfer = 0.0;
  double pixel_height_l1 = 0.0;
  double latitude_l1 = 0.0;
  double up_l1 = 0.0;
  size_t count = 0;  // samples aggregated into this report
};

// Element-wise mean; count is the number of reports.
EvalReport mean_report(std::span<const EvalReport> reports);

struct PitchSample {
  EvalReport report;
  double gt_pitch_deg = 0.0;
};

enum class Diversity { small, medium, large };

// small: |pitch - mean| < 10, medium: 10..30 inclusive, large: > 30.
Diversity diversity_bucket(double pitch_deg, double mean_pitch_deg);

struct BucketReport {
  EvalReport small, medium, large;
  EvalReport overall;
};

BucketReport pitch_bucket_report(std::span<const PitchSample> samples, double mean_pitch_deg);

}  // namespace pixht
