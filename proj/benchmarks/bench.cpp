#include <benchmark/benchmark.h>

#include "pixht/camera_est.hpp"
#include "pixht/metrics.hpp"
#include "pixht/raytracer.hpp"
#include "pixht/reproject.hpp"

using namespace pixht;

namespace {

Scene bench_scene(int size) {
  Scene s;
  s.primitives.push_back({Sphere{Vec3(0, 0, 1), 1.0}, Vec3(0.8, 0.3, 0.2)});
  s.primitives.push_back({Box{Vec3(1.5, 0.8, 0.5), Vec3(0.5, 0.4, 0.5), 25.0}, Vec3(0.2, 0.6, 0.3)});
  s.lights.push_back(DirectionalLight{Vec3(0.3, 0.4, -1).normalized(), 1.0});
  s.camera.position = Vec3(0.5, -6.0, 3.0);
  s.camera.target = Vec3(0.5, 0.3, 0.8);
  s.camera.intrinsics = CameraIntrinsics::centered(50, size, size);
  return s;
}

void BM_PerspectiveField(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto in = CameraIntrinsics::centered(60, n, n);
  for (auto _ : state) benchmark::DoNotOptimize(render_perspective_field(in, CameraPose{-20, 5}));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_PerspectiveField)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_EstimateCamera(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto field = render_perspective_field(CameraIntrinsics::centered(63.3, n, n), CameraPose{-17.2, 8.9});
  for (auto _ : state) benchmark::DoNotOptimize(estimate_camera(field));
}
BENCHMARK(BM_EstimateCamera)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_RenderGroundTruth(benchmark::State& state) {
  const Scene s = bench_scene(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(render_ground_truth(s));
}
BENCHMARK(BM_RenderGroundTruth)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Reconstruct(benchmark::State& state) {
  const GroundTruth gt = render_ground_truth(bench_scene(static_cast<int>(state.range(0))));
  const Camera cam = gt.camera();
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_cloud(gt.pixel_height, gt.perspective, cam));
}
BENCHMARK(BM_Reconstruct)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Chamfer(benchmark::State& state) {
  const GroundTruth gt = render_ground_truth(bench_scene(static_cast<int>(state.range(0))));
  const auto rec = reconstruct_cloud(gt.pixel_height, gt.perspective, gt.camera());
  for (auto _ : state) benchmark::DoNotOptimize(chamfer_distance(rec.front, rec.back));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(rec.front.size() + rec.back.size()));
}
BENCHMARK(BM_Chamfer)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
