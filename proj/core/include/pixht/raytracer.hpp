#pragma once

// Ground-truth renderer for primitive scenes resting on the plane z = 0.
//
// Scene coordinates are Z-up with the ground at z = 0 and an arbitrary camera
// position above it. Rendering re-expresses everything in the camera-centered
// frame used by the rest of the library (camera at the origin, forward
// azimuth along +Y) through `SceneFrame`.

#include <array>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "pixht/core.hpp"
#include "pixht/exec.hpp"
#include "pixht/fields.hpp"
#include "pixht/grid.hpp"

namespace pixht {

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length
};

struct Sphere {
  Vec3 center;
  double radius = 1.0;
};

// Axis-aligned box rotated by yaw_deg about the vertical axis through its center.
struct Box {
  Vec3 center;
  Vec3 half_extents{0.5, 0.5, 0.5};
  double yaw_deg = 0.0;
};

// Vertical solid cylinder standing on base_center.
struct Cylinder {
  Vec3 base_center;
  double radius = 0.5;
  double height = 1.0;
};

class MeshBvh;

// Closed triangle mesh. First/last semantics assume it is watertight.
class TriangleMesh {
 public:
  TriangleMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& faces() const { return faces_; }
  const MeshBvh& bvh() const { return *bvh_; }

 private:
  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 3>> faces_;
  std::shared_ptr<const MeshBvh> bvh_;
};

using Shape = std::variant<Sphere, Box, Cylinder, TriangleMesh>;

struct Primitive {
  Shape shape;
  Vec3 albedo{0.8, 0.8, 0.8};
};

struct DirectionalLight {
  Vec3 direction{0.0, 0.0, -1.0};  // direction light travels; unit
  double intensity = 1.0;
};

struct PointLight {
  Vec3 position{0.0, 0.0, 5.0};
  double intensity = 10.0;
};

using Light = std::variant<DirectionalLight, PointLight>;

struct SceneCamera {
  Vec3 position{0.0, -5.0, 3.0};
  Vec3 target{0.0, 0.0, 0.5};
  double roll_deg = 0.0;
  CameraIntrinsics intrinsics = CameraIntrinsics::centered(60.0, 512, 512);
};

struct Scene {
  std::vector<Primitive> primitives;
  std::vector<Light> lights;
  Vec3 ground_albedo{0.6, 0.6, 0.6};
  SceneCamera camera;

  // Axis-aligned bounds of all primitives.
  std::pair<Vec3, Vec3> bounds() const;
  // Throws SceneError when a primitive dips below the ground, the camera is
  // not above ground, or the target lies outside the primitive bounds.
  void validate() const;
};

struct HitPair {
  double t_first = 0.0;
  double t_last = 0.0;
  Vec3 first_point;
  Vec3 last_point;
  Vec3 first_normal;  // outward surface normal at the first entry
  int first_primitive = -1;
  int last_primitive = -1;
};

// Smallest and largest positive intersection parameters over all object
// primitives (the ground is not an object).
std::optional<HitPair> intersect_first_last(const Ray& ray, const Scene& scene);

// Per-primitive positive surface crossings, sorted. Exposed for tests.
struct SurfaceCrossings {
  double t_in = 0.0;
  double t_out = 0.0;
  Vec3 normal_in;
};
std::optional<SurfaceCrossings> intersect_shape(const Ray& ray, const Shape& shape);

// Pitch from the look direction; yaw is folded into SceneFrame. Throws
// SceneError for coincident points or a vertical look direction.
CameraPose derive_pose_from_lookat(const Vec3& position, const Vec3& target, double roll_deg);

// Maps scene coordinates into the camera-centered reconstruction frame:
// P_n = Y^T (P - C) / h, where Y rotates the camera's forward azimuth onto +Y
// and h is the camera height, which puts the ground at z = -1.
struct SceneFrame {
  Vec3 camera_position;
  Mat3 yaw;  // camera-centered world -> scene directions
  double camera_height = 1.0;

  static SceneFrame from_camera(const SceneCamera& camera);

  Vec3 to_camera_centered(const Vec3& scene_point) const {
    return yaw.transpose() * (scene_point - camera_position);
  }
  Vec3 to_reconstruction(const Vec3& scene_point) const {
    return to_camera_centered(scene_point) / camera_height;
  }
  Vec3 direction_to_world(const Vec3& scene_dir) const { return yaw.transpose() * scene_dir; }
  Vec3 direction_to_scene(const Vec3& world_dir) const { return yaw * world_dir; }
};

struct RenderOptions {
  double ambient = 0.15;
  Vec3 sky_color{0.70, 0.78, 0.90};
};

struct GroundTruth {
  ScalarGrid rgb;      // 3 channels in [0, 1]
  ScalarGrid depth;    // camera-frame forward distance of the first entry, scene units
  ScalarGrid mask;     // 1 on object pixels
  ScalarGrid ground_shadow;  // one channel per light: 1 where visible ground is occluded
  PixelHeightMap pixel_height;
  PerspectiveField perspective;
  CameraIntrinsics intrinsics;
  CameraPose pose;
  SceneFrame frame;
  // First-entry and last-exit points (scene coordinates) tagged with their pixel.
  PointCloud front_surface;
  PointCloud back_surface;

  Camera camera() const { return Camera(intrinsics, pose); }
};

GroundTruth render_ground_truth(const Scene& scene, const RenderOptions& options = {},
                                const Exec& exec = {});

}  // namespace pixht
