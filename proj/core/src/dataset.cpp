#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "pixht/error.hpp"
#include "pixht/io.hpp"

namespace pixht {

void DatasetSpec::validate() const {
  if (scenes.empty()) throw DomainError("dataset spec needs at least one scene");
  if (samples_per_scene < 1) throw DomainError("samples_per_scene must be >= 1");
  if (width < 1 || height < 1) throw DomainError("dataset resolution must be positive");
  auto ordered = [](Range r, const char* what) {
    if (!(r.lo <= r.hi)) throw DomainError(std::string(what) + " range must satisfy lo <= hi");
  };
  ordered(fov_deg, "fov");
  ordered(distance, "distance");
  ordered(elevation_deg, "elevation");
  ordered(roll_deg, "roll");
  ordered(light_intensity, "light intensity");
  if (!(fov_deg.lo > 0.0 && fov_deg.hi < 180.0)) throw DomainError("fov range must lie in (0, 180)");
  if (!(distance.lo > 0.0)) throw DomainError("camera distance must be > 0");
  if (!(elevation_deg.lo > 0.0 && elevation_deg.hi < 90.0))
    throw DomainError("camera elevation range must lie in (0, 90)");
  if (!(roll_deg.lo > -180.0 && roll_deg.hi <= 180.0)) throw DomainError("roll range must lie in (-180, 180]");
  if (min_lights < 1 || max_lights < min_lights) throw DomainError("light count range invalid");
  if (!(light_intensity.lo >= 0.0)) throw DomainError("light intensity must be >= 0");
  if (!(min_mask_coverage > 0.0 && min_mask_coverage < 1.0))
    throw DomainError("min_mask_coverage must lie in (0, 1)");
  if (max_retries < 1) throw DomainError("max_retries must be >= 1");
  for (size_t i = 0; i < scenes.size(); ++i) {
    if (scenes[i].name.empty()) throw DomainError("dataset scenes need names");
    for (size_t j = 0; j < i; ++j)
      if (scenes[j].name == scenes[i].name) throw DomainError("duplicate scene name " + scenes[i].name);
  }
}

bool filter_sample(const ScalarGrid& mask, double min_coverage) {
  if (mask.empty()) return false;
  double sum = 0.0;
  for (float v : mask.plane(0)) sum += v;
  return sum / static_cast<double>(mask.pixel_count()) >= min_coverage;
}

size_t Manifest::kept() const {
  size_t n = 0;
  for (const auto& e : entries) n += e.kept ? 1 : 0;
  return n;
}

size_t Manifest::rejected() const { return entries.size() - kept(); }

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Uniform doubles from the raw engine output; std distributions are not
// specified bit-for-bit across standard libraries.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double in(Range r) { return r.lo + (r.hi - r.lo) * unit(); }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(std::min<double>(hi - lo, std::floor(unit() * (hi - lo + 1))));
  }

 private:
  std::mt19937_64 rng_;
};

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

std::string digest_files(const fs::path& root, const std::vector<std::string>& files) {
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& f : files) {
    h = fnv1a64(reinterpret_cast<const std::uint8_t*>(f.data()), f.size(), h);
    const auto b = read_bytes(root / f);
    h = fnv1a64(b.data(), b.size(), h);
  }
  return hex64(h);
}

Scene randomize(const Scene& base, const DatasetSpec& spec, Sampler& s) {
  Scene scene = base;
  const auto [lo, hi] = base.bounds();
  const Vec3 target = 0.5 * (lo + hi);
  const double fov = s.in(spec.fov_deg);
  const double dist = s.in(spec.distance);
  const double elev = deg2rad(s.in(spec.elevation_deg));
  const double az = 2.0 * kPi * s.unit();
  const double roll = s.in(spec.roll_deg);
  scene.camera.target = target;
  scene.camera.position =
      target + dist * Vec3(std::cos(elev) * std::cos(az), std::cos(elev) * std::sin(az), std::sin(elev));
  scene.camera.roll_deg = roll;
  scene.camera.intrinsics = CameraIntrinsics::centered(fov, spec.width, spec.height);

  scene.lights.clear();
  const int n = s.integer(spec.min_lights, spec.max_lights);
  for (int i = 0; i < n; ++i) {
    const double intensity = s.in(spec.light_intensity);
    const double a = 2.0 * kPi * s.unit();
    if (i == 0) {
      const double el = deg2rad(s.in({30.0, 75.0}));
      scene.lights.push_back(DirectionalLight{
          -Vec3(std::cos(el) * std::cos(a), std::cos(el) * std::sin(a), std::sin(el)), intensity});
    } else {
      const double r = s.in({2.0, 5.0}), h = s.in({3.0, 6.0});
      const Vec3 pos = target + Vec3(r * std::cos(a), r * std::sin(a), h);
      // Scaled so the irradiance at the target matches a directional light of
      // the same intensity.
      scene.lights.push_back(PointLight{pos, intensity * (pos - target).squaredNorm()});
    }
  }
  return scene;
}

bool heights_finite(const GroundTruth& gt) {
  const auto& h = gt.pixel_height;
  for (int y = 0; y < h.height(); ++y)
    for (int x = 0; x < h.width(); ++x) {
      if (!(gt.mask.at(x, y) > 0.5f)) continue;
      if (!h.front.valid(x, y) || !h.back.valid(x, y)) return false;
      if (!std::isfinite(h.front.at(x, y)) || !std::isfinite(h.back.at(x, y))) return false;
    }
  return true;
}

}  // namespace

Manifest generate_dataset(const DatasetSpec& spec, const fs::path& out_dir, const Exec& exec) {
  spec.validate();
  fs::create_directories(out_dir);
  const int per = spec.samples_per_scene;
  const long total = static_cast<long>(spec.scenes.size()) * per;
  Manifest manifest;
  manifest.seed = spec.seed;
  manifest.entries.resize(static_cast<size_t>(total));

  parallel_for(exec, 0, total, [&](long k) {
    const size_t si = static_cast<size_t>(k / per);
    const int sample = static_cast<int>(k % per);
    const auto& named = spec.scenes[si];
    ManifestEntry& e = manifest.entries[static_cast<size_t>(k)];
    e.scene = named.name;
    e.sample = sample;
    std::ostringstream id;
    id << named.name << '_' << std::setw(2) << std::setfill('0') << sample;
    e.id = id.str();
    const std::uint64_t key = mix(spec.seed ^ mix(si * 0x100000001b3ull + static_cast<std::uint64_t>(sample)));
    const std::uint64_t bucket = mix(key ^ 0x5851f42d4c957f2dull) % 10;
    e.split = bucket < 8 ? "train" : (bucket == 8 ? "val" : "test");

    Sampler sampler(key);
    std::optional<GroundTruth> gt;
    for (int attempt = 1; attempt <= spec.max_retries && !gt; ++attempt) {
      e.attempts = attempt;
      const Scene scene = randomize(named.scene, spec, sampler);
      e.camera.intrinsics = scene.camera.intrinsics;
      try {
        e.camera.pose = derive_pose_from_lookat(scene.camera.position, scene.camera.target,
                                                scene.camera.roll_deg);
        gt = render_ground_truth(scene, RenderOptions{}, Exec{1});
      } catch (const Error&) {
        gt.reset();
      }
    }
    if (!gt) {
      e.reason = kReasonUnrenderable;
      return;
    }
    double sum = 0.0;
    for (float v : gt->mask.plane(0)) sum += v;
    e.coverage = sum / static_cast<double>(gt->mask.pixel_count());
    if (!filter_sample(gt->mask, spec.min_mask_coverage)) {
      e.reason = kReasonLowCoverage;
      return;
    }
    if (!heights_finite(*gt)) {
      e.reason = kReasonCorrupt;
      return;
    }
    const auto written = write_ground_truth(out_dir / e.id, *gt);
    for (const auto& p : written) e.files.push_back((fs::path(e.id) / p.filename()).generic_string());
    e.digest = digest_files(out_dir, e.files);
    e.kept = true;
  });

  write_text(out_dir / "manifest.json", manifest_to_json(manifest));
  return manifest;
}

}  // namespace pixht
