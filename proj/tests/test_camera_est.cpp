#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "pixht/camera_est.hpp"
#include "pixht/error.hpp"

using namespace pixht;

namespace {

PerspectiveField field_for(double fov, double pitch, double roll, int w = 96, int h = 96) {
  return render_perspective_field(CameraIntrinsics::centered(fov, w, h), CameraPose{pitch, roll});
}

Camera cam(double fov, double pitch, double roll, int w = 96, int h = 96) {
  return Camera(CameraIntrinsics::centered(fov, w, h), CameraPose{pitch, roll});
}

void rotate_up(PerspectiveField& f, double delta_rad) {
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x) {
      const double t = decode_up_angle({f.up.at(0, x, y), f.up.at(1, x, y)}) + delta_rad;
      const auto e = encode_up_angle(t);
      f.up.at(0, x, y) = static_cast<float>(e.sin);
      f.up.at(1, x, y) = static_cast<float>(e.cos);
    }
}

}  // namespace

TEST_CASE("grid axis values") {
  const auto v = GridAxis{20.0, 110.0, 2.0}.values();
  CHECK(v.size() == 46);
  CHECK(v.front() == 20.0);
  CHECK(v.back() == doctest::Approx(110.0));
  GridSpec bad;
  bad.shrink = 1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = GridSpec{};
  bad.pitch.step = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = GridSpec{};
  bad.roll = {5.0, -5.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("cost is zero for the generating camera") {
  const auto f = field_for(60, -20, 5);
  CHECK(perspective_field_cost(f, cam(60, -20, 5)) < 1e-6);
  CHECK(perspective_field_cost(f, cam(62, -20, 5)) > 1e-4);
}

TEST_CASE("latitude residual at the principal pixel") {
  // Odd size puts a pixel center on the principal point, where up is straight
  // up the image for zero roll and latitude equals pitch.
  const auto f = field_for(60, -20, 0, 65, 65);
  ScalarGrid mask(65, 65, {"mask"});
  mask.at(32, 32) = 1.0f;
  const double c = perspective_field_cost(f, cam(60, -15, 0, 65, 65), mask);
  CHECK(c == doctest::Approx(deg2rad(5.0)).epsilon(1e-5));
}

TEST_CASE("rotating every up vector adds at least the rotation") {
  auto f = field_for(60, -20, 5);
  rotate_up(f, deg2rad(10.0));
  const double c = perspective_field_cost(f, cam(60, -20, 5));
  CHECK(c >= deg2rad(10.0) - 1e-6);
  CHECK(c == doctest::Approx(deg2rad(10.0)).epsilon(1e-4));
}

TEST_CASE("cost errors") {
  const auto f = field_for(60, -20, 5);
  CHECK_THROWS_AS(perspective_field_cost(f, cam(60, -20, 5, 64, 64)), DomainError);
  ScalarGrid empty(96, 96, {"mask"});
  CHECK_THROWS_AS(perspective_field_cost(f, cam(60, -20, 5), empty), DomainError);
}

TEST_CASE("on-grid camera is recovered exactly") {
  const auto est = estimate_camera(field_for(90, 0, 0));
  CHECK(est.fov_deg == 90.0);
  CHECK(est.pitch_deg == 0.0);
  CHECK(est.roll_deg == 0.0);
  CHECK(est.cost < 1e-6);
}

TEST_CASE("off-grid camera within the final step") {
  const auto est = estimate_camera(field_for(60, -20, 5));
  CHECK(std::abs(est.fov_deg - 60) <= 0.25);
  CHECK(std::abs(est.pitch_deg + 20) <= 0.25);
  CHECK(std::abs(est.roll_deg - 5) <= 0.25);
  const auto est2 = estimate_camera(field_for(47.3, 13.7, -8.9));
  CHECK(std::abs(est2.fov_deg - 47.3) <= 0.25);
  CHECK(std::abs(est2.pitch_deg - 13.7) <= 0.25);
  CHECK(std::abs(est2.roll_deg + 8.9) <= 0.25);
  // Monotone refinement.
  for (const auto& lv : est2.levels) CHECK(lv.cost <= lv.previous_cost + 1e-12);
}

TEST_CASE("masked estimation and determinism") {
  const auto f = field_for(70, -30, -10);
  ScalarGrid mask(96, 96, {"mask"});
  for (int y = 30; y < 70; ++y)
    for (int x = 20; x < 60; ++x) mask.at(x, y) = 1.0f;
  const auto a = estimate_camera(f, mask, {}, Exec{1});
  const auto b = estimate_camera(f, mask, {}, Exec{4});
  CHECK(a.fov_deg == b.fov_deg);
  CHECK(a.pitch_deg == b.pitch_deg);
  CHECK(a.roll_deg == b.roll_deg);
  CHECK(a.cost == b.cost);
  CHECK(std::abs(a.pitch_deg + 30) <= 0.25);
  CHECK(std::abs(a.roll_deg + 10) <= 0.25);
  CHECK(std::abs(a.fov_deg - 70) <= 0.25);
}

TEST_CASE("noisy up vectors") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> F(30, 90), P(-50, 40), R(-20, 20);
  std::normal_distribution<double> N(0.0, deg2rad(2.0));
  std::vector<double> ep, er, ef;
  for (int trial = 0; trial < 9; ++trial) {
    const double fov = F(rng), pitch = P(rng), roll = R(rng);
    auto f = field_for(fov, pitch, roll);
    for (int y = 0; y < 96; ++y)
      for (int x = 0; x < 96; ++x) {
        const double t = decode_up_angle({f.up.at(0, x, y), f.up.at(1, x, y)}) + N(rng);
        const auto e = encode_up_angle(t);
        f.up.at(0, x, y) = static_cast<float>(e.sin);
        f.up.at(1, x, y) = static_cast<float>(e.cos);
      }
    const auto est = estimate_camera(f);
    ep.push_back(std::abs(est.pitch_deg - pitch));
    er.push_back(std::abs(est.roll_deg - roll));
    ef.push_back(std::abs(est.fov_deg - fov));
  }
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
    return v[v.size() / 2];
  };
  CHECK(median(ep) < 2.0);
  CHECK(median(er) < 2.0);
  CHECK(median(ef) < 4.0);
}

TEST_CASE("degenerate field") {
  auto f = field_for(60, 0, 0, 16, 16);
  f.latitude.ensure_mask();
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) f.latitude.set_valid(x, y, false);
  CHECK_THROWS_AS(estimate_camera(f), NumericError);
}
