#include "pixht/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "pixht/error.hpp"
#include "pixht/kdtree.hpp"

namespace pixht {

namespace {

void require_dims(const ScalarGrid& a, const ScalarGrid& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw DomainError("grid dimensions differ");
}

bool usable(const ScalarGrid& pred, const ScalarGrid& gt, const ScalarGrid& mask, int x, int y) {
  if (!mask.empty() && !(mask.at(x, y) > 0.5f)) return false;
  if (!pred.valid(x, y) || !gt.valid(x, y)) return false;
  return std::isfinite(pred.at(x, y)) && std::isfinite(gt.at(x, y));
}

}  // namespace

ScaleShift align_scale_shift(const ScalarGrid& pred, const ScalarGrid& gt, const ScalarGrid& mask,
                             AlignSpace space) {
  require_dims(pred, gt);
  if (!mask.empty()) require_dims(pred, mask);
  const bool disp = space == AlignSpace::disparity;
  auto tf = [disp](double v) { return disp ? 1.0 / v : v; };
  // Normal equations of the 2x2 least-squares problem, accumulated around the
  // means for conditioning.
  std::vector<std::pair<double, double>> pairs;
  for (int y = 0; y < pred.height(); ++y)
    for (int x = 0; x < pred.width(); ++x) {
      if (!usable(pred, gt, mask, x, y)) continue;
      if (disp && (!(pred.at(x, y) > 0.0f) || !(gt.at(x, y) > 0.0f))) continue;
      pairs.emplace_back(tf(pred.at(x, y)), tf(gt.at(x, y)));
    }
  if (pairs.size() < 2) throw NumericError("alignment needs at least two masked pixels");
  double mp = 0.0, mg = 0.0;
  for (const auto& [p, g] : pairs) {
    mp += p;
    mg += g;
  }
  mp /= static_cast<double>(pairs.size());
  mg /= static_cast<double>(pairs.size());
  double spp = 0.0, spg = 0.0, sgg = 0.0;
  for (const auto& [p, g] : pairs) {
    spp += (p - mp) * (p - mp);
    spg += (p - mp) * (g - mg);
    sgg += (g - mg) * (g - mg);
  }
  if (!(sgg > 0.0)) throw NumericError("alignment is rank deficient: ground truth is constant");
  if (!(spp > 1e-300)) throw NumericError("alignment is rank deficient: prediction is constant");
  ScaleShift out;
  out.scale = spg / spp;
  out.shift = mg - out.scale * mp;
  out.aligned = pred;
  for (int y = 0; y < pred.height(); ++y)
    for (int x = 0; x < pred.width(); ++x) {
      const double v = pred.at(x, y);
      if (!std::isfinite(v)) continue;
      double a = out.scale * tf(v) + out.shift;
      if (disp) a = 1.0 / a;
      out.aligned.at(x, y) = static_cast<float>(a);
    }
  return out;
}

DepthMetrics absrel_delta1(const ScalarGrid& pred, const ScalarGrid& gt, const ScalarGrid& mask) {
  require_dims(pred, gt);
  if (!mask.empty()) require_dims(pred, mask);
  DepthMetrics m;
  double rel = 0.0;
  size_t within = 0, rel_count = 0;
  for (int y = 0; y < pred.height(); ++y)
    for (int x = 0; x < pred.width(); ++x) {
      if (!usable(pred, gt, mask, x, y)) continue;
      const double d = pred.at(x, y), g = gt.at(x, y);
      if (!(g > 0.0)) continue;
      ++m.count;
      if (!(d > 0.0)) {
        ++m.nonpositive;
        continue;
      }
      rel += std::abs(d - g) / g;
      ++rel_count;
      if (std::max(d / g, g / d) < 1.25) ++within;
    }
  if (m.count == 0) throw DomainError("depth metrics over an empty mask");
  m.absrel = rel_count ? rel / static_cast<double>(rel_count) : 0.0;
  m.delta1 = static_cast<double>(within) / static_cast<double>(m.count);
  return m;
}

double mean_nearest_distance(const PointCloud& a, const PointCloud& b, const Exec& exec) {
  if (a.empty() || b.empty()) throw DomainError("nearest-neighbour distance needs nonempty clouds");
  const KdTree tree(b.points);
  std::vector<double> dist(a.size());
  parallel_for(exec, 0, static_cast<long>(a.size()), [&](long i) {
    dist[static_cast<size_t>(i)] = std::sqrt(tree.nearest(a.points[static_cast<size_t>(i)]).distance_sq);
  });
  double sum = 0.0;
  for (double d : dist) sum += d;
  return sum / static_cast<double>(a.size());
}

double chamfer_distance(const PointCloud& a, const PointCloud& b, const Exec& exec) {
  if (a.empty() || b.empty()) throw DomainError("chamfer distance needs nonempty clouds");
  return 0.5 * (mean_nearest_distance(a, b, exec) + mean_nearest_distance(b, a, exec));
}

double lsiv_scale(const PointCloud& pred, const PointCloud& gt) {
  if (pred.size() != gt.size()) throw DomainError("LSIV needs index-paired clouds");
  if (pred.empty()) throw DomainError("LSIV needs nonempty clouds");
  double pg = 0.0, pp = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    pg += pred.points[i].dot(gt.points[i]);
    pp += pred.points[i].squaredNorm();
  }
  if (!(pp > 0.0)) throw NumericError("LSIV undefined for a zero-norm prediction");
  return pg / pp;
}

double lsiv(const PointCloud& pred, const PointCloud& gt) {
  const double s = lsiv_scale(pred, gt);
  double sum = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) sum += (s * pred.points[i] - gt.points[i]).squaredNorm();
  return std::sqrt(sum / static_cast<double>(pred.size()));
}

std::pair<PointCloud, PointCloud> pair_by_pixel(const PointCloud& a, const PointCloud& b) {
  if (!a.has_pixels() || !b.has_pixels()) throw DomainError("pairing needs source pixel indices");
  std::unordered_map<std::int64_t, size_t> index_b;
  index_b.reserve(b.size());
  for (size_t i = 0; i < b.size(); ++i) index_b.emplace(b.pixel_index[i], i);
  PointCloud pa, pb;
  for (size_t i = 0; i < a.size(); ++i) {
    const auto it = index_b.find(a.pixel_index[i]);
    if (it == index_b.end()) continue;
    pa.add(a.points[i], a.pixel_index[i]);
    pb.add(b.points[it->second], a.pixel_index[i]);
  }
  return {std::move(pa), std::move(pb)};
}

PointCloud scaled(const PointCloud& cloud, double s) {
  PointCloud out = cloud;
  for (auto& p : out.points) p *= s;
  return out;
}

FieldErrors field_errors(const PixelHeightMap& pred_heights, const PerspectiveField& pred_field,
                         const PixelHeightMap& gt_heights, const PerspectiveField& gt_field,
                         const ScalarGrid& mask) {
  require_dims(pred_heights.front, gt_heights.front);
  require_dims(pred_field.latitude, gt_field.latitude);
  require_dims(pred_heights.front, pred_field.latitude);
  if (!mask.empty()) require_dims(pred_heights.front, mask);
  const double H = pred_heights.height();
  const double sp = pred_heights.normalized ? H : 1.0;
  const double sg = gt_heights.normalized ? H : 1.0;
  FieldErrors e;
  double hsum = 0.0, lsum = 0.0, usum = 0.0;
  for (int y = 0; y < pred_heights.height(); ++y)
    for (int x = 0; x < pred_heights.width(); ++x) {
      if (!mask.empty() && !(mask.at(x, y) > 0.5f)) continue;
      if (!pred_heights.front.valid(x, y) || !gt_heights.front.valid(x, y)) continue;
      if (!pred_field.valid(x, y) || !gt_field.valid(x, y)) continue;
      const double hp = pred_heights.front.at(x, y) * sp, hg = gt_heights.front.at(x, y) * sg;
      if (!std::isfinite(hp) || !std::isfinite(hg)) continue;
      hsum += std::abs(hp - hg);
      lsum += std::abs(rad2deg(pred_field.latitude_rad(x, y) - gt_field.latitude_rad(x, y)));
      const double tp = decode_up_angle({pred_field.up.at(0, x, y), pred_field.up.at(1, x, y)});
      const double tg = decode_up_angle({gt_field.up.at(0, x, y), gt_field.up.at(1, x, y)});
      double d = std::fmod(std::abs(rad2deg(tp - tg)), 360.0);
      if (d > 180.0) d = 360.0 - d;
      usum += d;
      ++e.count;
    }
  if (e.count == 0) throw DomainError("field errors over an empty mask");
  const double n = static_cast<double>(e.count);
  e.height_l1_px = hsum / n;
  e.latitude_l1_deg = lsum / n;
  e.up_l1_deg = usum / n;
  return e;
}

EvalReport mean_report(std::span<const EvalReport> reports) {
  EvalReport m;
  if (reports.empty()) return m;
  for (const auto& r : reports) {
    m.absrel += r.absrel;
    m.delta1 += r.delta1;
    m.lsiv += r.lsiv;
    m.chamfer += r.chamfer;
    m.pixel_height_l1 += r.pixel_height_l1;
    m.latitude_l1 += r.latitude_l1;
    m.up_l1 += r.up_l1;
  }
  const double n = static_cast<double>(reports.size());
  m.absrel /= n;
  m.delta1 /= n;
  m.lsiv /= n;
  m.chamfer /= n;
  m.pixel_height_l1 /= n;
  m.latitude_l1 /= n;
  m.up_l1 /= n;
  m.count = reports.size();
  return m;
}

Diversity diversity_bucket(double pitch_deg, double mean_pitch_deg) {
  const double d = std::abs(pitch_deg - mean_pitch_deg);
  if (d < 10.0) return Diversity::small;
  if (d <= 30.0) return Diversity::medium;
  return Diversity::large;
}

BucketReport pitch_bucket_report(std::span<const PitchSample> samples, double mean_pitch_deg) {
  if (samples.empty()) throw DomainError("pitch bucket report needs samples");
  std::vector<EvalReport> small, medium, large, all;
  for (const auto& s : samples) {
    all.push_back(s.report);
    switch (diversity_bucket(s.gt_pitch_deg, mean_pitch_deg)) {
      case Diversity::small: small.push_back(s.report); break;
      case Diversity::medium: medium.push_back(s.report); break;
      case Diversity::large: large.push_back(s.report); break;
    }
  }
  return {mean_report(small), mean_report(medium), mean_report(large), mean_report(all)};
}

}  // namespace pixht
