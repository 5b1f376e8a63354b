#include "pixht/camera_est.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "pixht/error.hpp"

namespace pixht {

namespace {

struct Sample {
  double px, py;
  double latitude;
  double ox, oy;  // observed unit up vector
};

struct Candidate {
  double fov, pitch, roll;
  double cost;
};

// Strict weak order: lower cost, then smaller fov, |pitch|, |roll|, then the
// signed values so that the order is total.
bool better(const Candidate& a, const Candidate& b) {
  return std::make_tuple(a.cost, a.fov, std::abs(a.pitch), std::abs(a.roll), a.pitch, a.roll) <
         std::make_tuple(b.cost, b.fov, std::abs(b.pitch), std::abs(b.roll), b.pitch, b.roll);
}

bool in_mask(const ScalarGrid& mask, int x, int y) { return mask.empty() || mask.at(x, y) > 0.5f; }

std::vector<Sample> collect_samples(const PerspectiveField& obs, const ScalarGrid& mask) {
  if (!mask.empty() && (mask.width() != obs.width() || mask.height() != obs.height()))
    throw DomainError("mask and perspective field dimensions differ");
  std::vector<Sample> out;
  for (int y = 0; y < obs.height(); ++y)
    for (int x = 0; x < obs.width(); ++x) {
      if (!in_mask(mask, x, y) || !obs.valid(x, y)) continue;
      const double lat = obs.latitude_rad(x, y);
      const double s = obs.up.at(0, x, y), c = obs.up.at(1, x, y);
      const double n2 = s * s + c * c;
      if (!std::isfinite(lat) || !(n2 >= 0.9 && n2 <= 1.1)) continue;
      const Vec2 up = obs.up_vector(x, y);
      out.push_back({x + 0.5, y + 0.5, lat, up.x(), up.y()});
    }
  return out;
}

// Evenly spaced subset (raster order) of at most n*n samples.
std::vector<Sample> subsample(const std::vector<Sample>& all, int n) {
  const size_t limit = n > 0 ? static_cast<size_t>(n) * static_cast<size_t>(n) : all.size();
  if (all.size() <= limit) return all;
  std::vector<Sample> out;
  out.reserve(limit);
  for (size_t k = 0; k < limit; ++k) out.push_back(all[(k * all.size()) / limit]);
  return out;
}

// Per-fov normalized image coordinates of the samples.
struct RayTable {
  std::vector<double> nx, ny, inv_norm;

  RayTable(const std::vector<Sample>& samples, double focal, double cx, double cy) {
    nx.resize(samples.size());
    ny.resize(samples.size());
    inv_norm.resize(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
      nx[i] = (samples[i].px - cx) / focal;
      ny[i] = (samples[i].py - cy) / focal;
      inv_norm[i] = 1.0 / std::sqrt(nx[i] * nx[i] + ny[i] * ny[i] + 1.0);
    }
  }
};

// World up in camera coordinates for a (pitch, roll) pose.
Vec3 up_in_camera(double pitch_deg, double roll_deg) {
  const double p = deg2rad(pitch_deg), r = deg2rad(roll_deg);
  return {std::sin(r) * std::cos(p), -std::cos(r) * std::cos(p), std::sin(p)};
}

double mean_residual(const std::vector<Sample>& samples, const RayTable& rays, const Vec3& u) {
  double sum = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double nx = rays.nx[i], ny = rays.ny[i];
    const double sin_lat = (nx * u.x() + ny * u.y() + u.z()) * rays.inv_norm[i];
    const double lat = std::asin(std::clamp(sin_lat, -1.0, 1.0));
    const double dx = u.x() - nx * u.z();
    const double dy = u.y() - ny * u.z();
    const Sample& s = samples[i];
    double angle;
    if (dx * dx + dy * dy < 1e-24) {
      angle = kPi / 2.0;
    } else {
      angle = std::atan2(std::abs(dx * s.oy - dy * s.ox), dx * s.ox + dy * s.oy);
    }
    sum += std::abs(lat - s.latitude) + angle;
  }
  return sum / static_cast<double>(samples.size());
}

struct Evaluator {
  const std::vector<Sample>& samples;
  int width, height;

  double cost(double fov, double pitch, double roll) const {
    const RayTable rays(samples, focal_from_fov(fov, height), width / 2.0, height / 2.0);
    return mean_residual(samples, rays, up_in_camera(pitch, roll));
  }

  // Best candidate of a product grid; parallel over fov values.
  Candidate sweep(const std::vector<double>& fovs, const std::vector<double>& pitches,
                  const std::vector<double>& rolls, const Exec& exec) const {
    std::vector<Vec3> ups;
    ups.reserve(pitches.size() * rolls.size());
    for (double p : pitches)
      for (double r : rolls) ups.push_back(up_in_camera(p, r));
    std::vector<Candidate> per_fov(fovs.size());
    parallel_for(exec, 0, static_cast<long>(fovs.size()), [&](long fi) {
      const double fov = fovs[static_cast<size_t>(fi)];
      const RayTable rays(samples, focal_from_fov(fov, height), width / 2.0, height / 2.0);
      Candidate best{fov, 0.0, 0.0, std::numeric_limits<double>::infinity()};
      bool first = true;
      size_t k = 0;
      for (double p : pitches)
        for (double r : rolls) {
          const Candidate c{fov, p, r, mean_residual(samples, rays, ups[k++])};
          if (first || better(c, best)) {
            best = c;
            first = false;
          }
        }
      per_fov[static_cast<size_t>(fi)] = best;
    });
    Candidate best = per_fov.front();
    for (const auto& c : per_fov)
      if (better(c, best)) best = c;
    return best;
  }
};

std::vector<double> window(double center, double half_width, double step, double lo, double hi) {
  const long k = std::lround(half_width / step);
  std::vector<double> out;
  for (long i = -k; i <= k; ++i) {
    const double v = center + static_cast<double>(i) * step;
    if (v >= lo && v <= hi) out.push_back(v);
  }
  return out;
}

}  // namespace

std::vector<double> GridAxis::values() const {
  std::vector<double> out;
  const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

void GridSpec::validate() const {
  for (const auto* a : {&fov, &pitch, &roll}) {
    if (!(a->step > 0.0)) throw DomainError("grid steps must be > 0");
    if (!(a->hi >= a->lo)) throw DomainError("grid ranges must be non-empty");
  }
  if (!(fov.lo > 0.0 && fov.hi < 180.0)) throw DomainError("fov range must lie in (0, 180)");
  if (!(pitch.lo >= -90.0 && pitch.hi <= 90.0)) throw DomainError("pitch range must lie in [-90, 90]");
  if (!(roll.lo > -180.0 && roll.hi <= 180.0)) throw DomainError("roll range must lie in (-180, 180]");
  if (refinement_levels < 0) throw DomainError("refinement level count must be >= 0");
  if (!(shrink > 0.0 && shrink < 1.0)) throw DomainError("refinement shrink factor must lie in (0, 1)");
  if (!(refine_radius > 0.0)) throw DomainError("refinement radius must be > 0");
  if (coarse_lattice < 0 || refine_lattice < 0) throw DomainError("lattice sizes must be >= 0");
}

double perspective_field_cost(const PerspectiveField& observed, const Camera& candidate,
                              const ScalarGrid& mask) {
  if (observed.width() != candidate.width() || observed.height() != candidate.height())
    throw DomainError("candidate camera and observed field dimensions differ");
  const auto samples = collect_samples(observed, mask);
  if (samples.empty()) throw DomainError("perspective field cost over an empty mask");
  const auto& pp = candidate.intrinsics().principal_point;
  const RayTable rays(samples, candidate.focal(), pp.x(), pp.y());
  return mean_residual(samples, rays, candidate.up_in_camera());
}

CameraEstimate estimate_camera(const PerspectiveField& observed, const ScalarGrid& mask,
                               const GridSpec& grid, const Exec& exec) {
  grid.validate();
  const auto all = collect_samples(observed, mask);
  if (all.empty()) throw NumericError("degenerate perspective field: no usable pixels");
  const int W = observed.width(), H = observed.height();

  CameraEstimate est;
  const auto coarse_samples = subsample(all, grid.coarse_lattice);
  const Evaluator coarse{coarse_samples, W, H};
  const auto fovs = grid.fov.values(), pitches = grid.pitch.values(), rolls = grid.roll.values();
  Candidate best = coarse.sweep(fovs, pitches, rolls, exec);
  est.candidates_evaluated += fovs.size() * pitches.size() * rolls.size();

  double sf = grid.fov.step, sp = grid.pitch.step, sr = grid.roll.step;
  const auto refine_samples = subsample(all, grid.refine_lattice);
  const Evaluator refine{refine_samples, W, H};
  auto run_level = [&](const Evaluator& ev, double half_f, double half_p, double half_r,
                       double nf, double np, double nr) {
    RefinementTrace t{nf, np, nr, ev.cost(best.fov, best.pitch, best.roll), 0.0};
    const auto fv = window(best.fov, half_f, nf, 0.5, 179.5);
    const auto pv = window(best.pitch, half_p, np, -90.0, 90.0);
    const auto rv = window(best.roll, half_r, nr, -179.999999, 180.0);
    best = ev.sweep(fv, pv, rv, exec);
    est.candidates_evaluated += fv.size() * pv.size() * rv.size();
    t.cost = best.cost;
    est.levels.push_back(t);
  };

  for (int level = 0; level < grid.refinement_levels; ++level) {
    const double nf = sf * grid.shrink, np = sp * grid.shrink, nr = sr * grid.shrink;
    run_level(refine, grid.refine_radius * sf, grid.refine_radius * sp, grid.refine_radius * sr,
              nf, np, nr);
    sf = nf;
    sp = np;
    sr = nr;
  }
  if (grid.final_full_resolution) {
    const Evaluator full{all, W, H};
    run_level(full, sf, sp, sr, sf, sp, sr);
  }

  est.fov_deg = best.fov;
  est.pitch_deg = best.pitch;
  est.roll_deg = best.roll;
  est.cost = best.cost;
  return est;
}

}  // namespace pixht
