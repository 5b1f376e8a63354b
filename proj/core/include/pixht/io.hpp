#pragma once

// File formats, scene and camera configuration, and the synthetic dataset
// generator.
//
// ORGF grid layout (all integers and floats little-endian):
//   offset 0   "ORGF"
//   offset 4   u16 version (1)
//   offset 6   u16 channel count C
//   offset 8   u32 width W
//   offset 12  u32 height H
//   offset 16  C x 32-byte zero-padded ASCII channel names
//   then       C*W*H float32, channel-planar, row-major
// A grid's validity mask, when present, travels as a trailing channel named
// "_valid" holding 0 or 1.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pixht/core.hpp"
#include "pixht/exec.hpp"
#include "pixht/fields.hpp"
#include "pixht/grid.hpp"
#include "pixht/metrics.hpp"
#include "pixht/raytracer.hpp"

namespace pixht {

namespace fs = std::filesystem;

inline constexpr std::uint16_t kGridVersion = 1;
inline constexpr size_t kGridHeaderFixed = 16;
inline constexpr size_t kGridNameBytes = 32;
inline constexpr const char* kValidChannel = "_valid";

// Payload size in bytes declared by a W x H x C header.
std::uint64_t grid_payload_bytes(std::uint32_t width, std::uint32_t height, std::uint16_t channels);

std::vector<std::uint8_t> encode_grid(const ScalarGrid& grid);
// Throws FormatError naming the byte offset of the first bad field, or the
// expected and actual payload length.
ScalarGrid decode_grid(const std::vector<std::uint8_t>& bytes);

void write_grid(const fs::path& path, const ScalarGrid& grid);
ScalarGrid read_grid(const fs::path& path);

// ASCII PLY with x, y, z as double and red, green, blue as uchar when colored.
void write_ply(const fs::path& path, const PointCloud& cloud);

// P6 from a 3-channel grid in [0, 1] (clamped, rounded to 8 bits).
void write_ppm(const fs::path& path, const ScalarGrid& rgb);
ScalarGrid read_ppm(const fs::path& path);
// P5 from channel 0, clamped to [0, 1].
void write_pgm(const fs::path& path, const ScalarGrid& gray);

struct CameraFile {
  CameraIntrinsics intrinsics;
  CameraPose pose;

  Camera camera() const { return Camera(intrinsics, pose); }
};

std::string camera_to_json(const CameraFile& cam);
CameraFile camera_from_json(const std::string& text);
void write_camera(const fs::path& path, const CameraFile& cam);
CameraFile read_camera(const fs::path& path);

// Scenes as JSON:
// {"primitives": [{"type": "sphere", "center": [..], "radius": r, "albedo": [..]},
//                 {"type": "box", "center", "half_extents", "yaw_deg"},
//                 {"type": "cylinder", "base_center", "radius", "height"},
//                 {"type": "mesh", "vertices": [[..]], "faces": [[i, j, k]]}],
//  "lights": [{"type": "directional", "direction": [..], "intensity": i},
//             {"type": "point", "position": [..], "intensity": i}],
//  "ground": {"albedo": [..]},
//  "camera": {"position", "target", "roll_deg", "fov_deg", "width", "height"}}
Scene scene_from_json(const std::string& text);
std::string scene_to_json(const Scene& scene);
Scene read_scene(const fs::path& path);

// Ground-truth bundle: one ORGF file per field plus rgb.ppm and camera.json.
struct FieldBundle {
  PixelHeightMap heights;
  PerspectiveField field;
  ScalarGrid depth;
  CameraFile camera;
};

inline const std::vector<std::string>& bundle_grid_names() {
  static const std::vector<std::string> names = {
      kFrontHeightChannel, kBackHeightChannel, kLatitudeChannel, kUpSinChannel,
      kUpCosChannel,       "depth",            kMaskChannel};
  return names;
}

// Writes rgb.ppm, camera.json and the seven grids; returns the written paths
// in a fixed order.
std::vector<fs::path> write_ground_truth(const fs::path& dir, const GroundTruth& gt);
FieldBundle read_bundle(const fs::path& dir);

// Reports as flat JSON objects.
std::string report_to_json(const EvalReport& report);
std::string bucket_report_to_json(const BucketReport& report);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);
std::vector<std::uint8_t> read_bytes(const fs::path& path);

// FNV-1a, 64-bit.
std::uint64_t fnv1a64(const std::uint8_t* data, size_t size, std::uint64_t seed = 14695981039346656037ull);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct NamedScene {
  std::string name;
  Scene scene;
};

struct DatasetSpec {
  std::vector<NamedScene> scenes;
  int samples_per_scene = 6;
  int width = 256;
  int height = 256;
  Range fov_deg{25.0, 75.0};
  Range distance{3.0, 8.0};       // camera to look-at target, scene units
  Range elevation_deg{5.0, 60.0}; // camera elevation above the target
  Range roll_deg{-15.0, 15.0};
  int min_lights = 1;
  int max_lights = 3;
  Range light_intensity{0.6, 1.2};
  std::uint64_t seed = 0;
  double min_mask_coverage = 0.05;
  int max_retries = 8;

  void validate() const;
};

// Reads a dataset spec; scene entries are inline scene objects or paths
// relative to the spec file.
DatasetSpec read_dataset_spec(const fs::path& path);

// Keep iff mean(mask) >= min_coverage.
bool filter_sample(const ScalarGrid& mask, double min_coverage);

inline constexpr const char* kReasonLowCoverage = "mask coverage below threshold";
inline constexpr const char* kReasonUnrenderable = "unrenderable camera";
inline constexpr const char* kReasonCorrupt = "non-finite pixel height";

struct ManifestEntry {
  std::string id;  // <scene>_<sample>
  std::string scene;
  int sample = 0;
  bool kept = false;
  std::string reason;  // empty when kept
  std::string split;   // train / val / test
  double coverage = 0.0;
  int attempts = 0;
  CameraFile camera;
  std::vector<std::string> files;  // relative to the dataset root
  std::string digest;              // FNV-1a over the files, hex
};

struct Manifest {
  std::uint64_t seed = 0;
  std::vector<ManifestEntry> entries;

  size_t kept() const;
  size_t rejected() const;
};

std::string manifest_to_json(const Manifest& manifest);

// Renders every scene samples_per_scene times under randomized cameras and
// lights, writes kept samples under out_dir/<id>/ and out_dir/manifest.json.
Manifest generate_dataset(const DatasetSpec& spec, const fs::path& out_dir, const Exec& exec = {});

}  // namespace pixht
