#include "pixht/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "pixht/error.hpp"

namespace pixht {

using json = nlohmann::json;

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void write_bytes(const fs::path& path, const void* data, size_t size) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!f) throw IoError("write failed for " + path.string());
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw FormatError(std::string(what) + " must be a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <class T>
T field_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

json camera_json(const CameraFile& cam) {
  return json{{"fov_deg", cam.intrinsics.fov_deg},
              {"pitch_deg", cam.pose.pitch_deg},
              {"roll_deg", cam.pose.roll_deg},
              {"width", cam.intrinsics.width},
              {"height", cam.intrinsics.height},
              {"principal_point",
               json::array({cam.intrinsics.principal_point.x(), cam.intrinsics.principal_point.y()})}};
}

}  // namespace

std::uint64_t grid_payload_bytes(std::uint32_t width, std::uint32_t height, std::uint16_t channels) {
  return 4ull * width * height * channels;
}

std::vector<std::uint8_t> encode_grid(const ScalarGrid& grid) {
  if (grid.empty()) throw DomainError("cannot encode an empty grid");
  std::vector<std::string> names = grid.channels();
  if (grid.has_mask()) names.push_back(kValidChannel);
  if (names.size() > 0xffff) throw DomainError("too many channels for the grid format");
  std::vector<std::uint8_t> out;
  const size_t total = kGridHeaderFixed + kGridNameBytes * names.size() +
                       grid_payload_bytes(static_cast<std::uint32_t>(grid.width()),
                                          static_cast<std::uint32_t>(grid.height()),
                                          static_cast<std::uint16_t>(names.size()));
  out.reserve(total);
  for (char ch : {'O', 'R', 'G', 'F'}) out.push_back(static_cast<std::uint8_t>(ch));
  put_u16(out, kGridVersion);
  put_u16(out, static_cast<std::uint16_t>(names.size()));
  put_u32(out, static_cast<std::uint32_t>(grid.width()));
  put_u32(out, static_cast<std::uint32_t>(grid.height()));
  for (const auto& n : names) {
    if (n.size() > kGridNameBytes) throw DomainError("channel name longer than 32 bytes: " + n);
    for (unsigned char ch : n)
      if (ch == 0 || ch > 0x7f) throw DomainError("channel names must be printable ASCII: " + n);
    out.insert(out.end(), n.begin(), n.end());
    out.insert(out.end(), kGridNameBytes - n.size(), 0);
  }
  for (float v : grid.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  if (grid.has_mask())
    for (auto m : grid.mask()) put_u32(out, std::bit_cast<std::uint32_t>(m ? 1.0f : 0.0f));
  return out;
}

ScalarGrid decode_grid(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kGridHeaderFixed)
    throw FormatError("truncated header: expected at least 16 bytes, got " +
                      std::to_string(bytes.size()) + " (byte offset " + std::to_string(bytes.size()) + ")");
  if (std::memcmp(bytes.data(), "ORGF", 4) != 0) throw FormatError("bad magic at byte offset 0");
  const std::uint16_t version = get_u16(bytes.data() + 4);
  if (version != kGridVersion)
    throw FormatError("unsupported version " + std::to_string(version) + " at byte offset 4");
  const std::uint16_t channels = get_u16(bytes.data() + 6);
  const std::uint32_t width = get_u32(bytes.data() + 8);
  const std::uint32_t height = get_u32(bytes.data() + 12);
  if (channels == 0) throw FormatError("zero channel count at byte offset 6");
  if (width == 0) throw FormatError("zero width at byte offset 8");
  if (height == 0) throw FormatError("zero height at byte offset 12");
  const size_t names_end = kGridHeaderFixed + kGridNameBytes * channels;
  if (bytes.size() < names_end)
    throw FormatError("truncated channel names: expected header of " + std::to_string(names_end) +
                      " bytes, got " + std::to_string(bytes.size()));
  std::vector<std::string> names;
  for (size_t c = 0; c < channels; ++c) {
    const auto* p = reinterpret_cast<const char*>(bytes.data() + kGridHeaderFixed + kGridNameBytes * c);
    const size_t len = strnlen(p, kGridNameBytes);
    for (size_t k = len; k < kGridNameBytes; ++k)
      if (p[k] != 0)
        throw FormatError("channel name not zero-padded at byte offset " +
                          std::to_string(kGridHeaderFixed + kGridNameBytes * c + k));
    names.emplace_back(p, len);
  }
  const std::uint64_t expected = grid_payload_bytes(width, height, channels);
  const std::uint64_t actual = bytes.size() - names_end;
  if (actual != expected)
    throw FormatError("payload length mismatch at byte offset " + std::to_string(names_end) +
                      ": expected " + std::to_string(expected) + " bytes, got " +
                      std::to_string(actual));
  const bool masked = channels > 1 && names.back() == kValidChannel;
  std::vector<std::string> data_names(names.begin(), names.end() - (masked ? 1 : 0));
  ScalarGrid grid(static_cast<int>(width), static_cast<int>(height), data_names);
  const std::uint8_t* p = bytes.data() + names_end;
  auto values = grid.values();
  for (size_t i = 0; i < values.size(); ++i, p += 4) values[i] = std::bit_cast<float>(get_u32(p));
  if (masked) {
    grid.ensure_mask();
    for (std::uint32_t y = 0; y < height; ++y)
      for (std::uint32_t x = 0; x < width; ++x, p += 4) {
        const float m = std::bit_cast<float>(get_u32(p));
        if (m != 0.0f && m != 1.0f)
          throw FormatError("validity channel holds a value other than 0 or 1 at byte offset " +
                            std::to_string(p - bytes.data()));
        grid.set_valid(static_cast<int>(x), static_cast<int>(y), m == 1.0f);
      }
  }
  return grid;
}

void write_grid(const fs::path& path, const ScalarGrid& grid) {
  grid.validate();
  const auto bytes = encode_grid(grid);
  write_bytes(path, bytes.data(), bytes.size());
}

ScalarGrid read_grid(const fs::path& path) {
  try {
    return decode_grid(read_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_ply(const fs::path& path, const PointCloud& cloud) {
  cloud.validate();
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
    << "\nproperty double x\nproperty double y\nproperty double z\n";
  if (cloud.has_colors()) f << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  f << "end_header\n";
  f << std::setprecision(17);
  for (size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.points[i];
    f << p.x() << ' ' << p.y() << ' ' << p.z();
    if (cloud.has_colors())
      for (auto c : cloud.colors[i]) f << ' ' << static_cast<int>(c);
    f << '\n';
  }
  if (!f) throw IoError("write failed for " + path.string());
}

namespace {

std::uint8_t to_byte(float v) {
  if (!std::isfinite(v)) return 0;
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

// Next whitespace-delimited token of a PNM header, skipping '#' comments.
std::string pnm_token(const std::vector<std::uint8_t>& b, size_t& pos) {
  for (;;) {
    while (pos < b.size() && std::isspace(b[pos])) ++pos;
    if (pos < b.size() && b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  const size_t start = pos;
  while (pos < b.size() && !std::isspace(b[pos])) ++pos;
  if (start == pos) throw FormatError("truncated PNM header at byte offset " + std::to_string(pos));
  return std::string(b.begin() + static_cast<long>(start), b.begin() + static_cast<long>(pos));
}

int pnm_int(const std::vector<std::uint8_t>& b, size_t& pos) {
  const size_t at = pos;
  const auto tok = pnm_token(b, pos);
  try {
    size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used == tok.size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  throw FormatError("bad PNM header field '" + tok + "' near byte offset " + std::to_string(at));
}

}  // namespace

void write_ppm(const fs::path& path, const ScalarGrid& rgb) {
  if (rgb.channel_count() < 3) throw DomainError("PPM output needs 3 channels");
  std::string header = "P6\n" + std::to_string(rgb.width()) + " " + std::to_string(rgb.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + 3 * rgb.pixel_count());
  for (int y = 0; y < rgb.height(); ++y)
    for (int x = 0; x < rgb.width(); ++x)
      for (int c = 0; c < 3; ++c) out.push_back(to_byte(rgb.at(c, x, y)));
  write_bytes(path, out.data(), out.size());
}

ScalarGrid read_ppm(const fs::path& path) {
  const auto b = read_bytes(path);
  size_t pos = 0;
  if (pnm_token(b, pos) != "P6") throw FormatError(path.string() + ": not a P6 file (byte offset 0)");
  const int w = pnm_int(b, pos), h = pnm_int(b, pos), maxval = pnm_int(b, pos);
  if (maxval != 255) throw FormatError(path.string() + ": only maxval 255 is supported");
  ++pos;  // single whitespace after the header
  const size_t expected = 3ull * static_cast<size_t>(w) * static_cast<size_t>(h);
  if (b.size() < pos || b.size() - pos != expected)
    throw FormatError(path.string() + ": payload length mismatch at byte offset " + std::to_string(pos) +
                      ": expected " + std::to_string(expected) + " bytes, got " +
                      std::to_string(b.size() >= pos ? b.size() - pos : 0));
  ScalarGrid rgb(w, h, {"r", "g", "b"});
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) rgb.at(c, x, y) = b[pos++] / 255.0f;
  return rgb;
}

void write_pgm(const fs::path& path, const ScalarGrid& gray) {
  std::string header = "P5\n" + std::to_string(gray.width()) + " " + std::to_string(gray.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (int y = 0; y < gray.height(); ++y)
    for (int x = 0; x < gray.width(); ++x) out.push_back(to_byte(gray.at(0, x, y)));
  write_bytes(path, out.data(), out.size());
}

std::string camera_to_json(const CameraFile& cam) { return camera_json(cam).dump(2) + "\n"; }

CameraFile camera_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    CameraFile cam;
    cam.intrinsics.fov_deg = j.at("fov_deg").get<double>();
    cam.pose.pitch_deg = j.at("pitch_deg").get<double>();
    cam.pose.roll_deg = j.at("roll_deg").get<double>();
    cam.intrinsics.width = j.at("width").get<int>();
    cam.intrinsics.height = j.at("height").get<int>();
    if (j.contains("principal_point")) {
      const auto& pp = j.at("principal_point");
      if (!pp.is_array() || pp.size() != 2) throw FormatError("principal_point must be [cx, cy]");
      cam.intrinsics.principal_point = {pp[0].get<double>(), pp[1].get<double>()};
    } else {
      cam.intrinsics.principal_point = {cam.intrinsics.width / 2.0, cam.intrinsics.height / 2.0};
    }
    cam.intrinsics.validate();
    cam.pose.validate();
    return cam;
  } catch (const json::exception& e) {
    throw FormatError(std::string("camera file: ") + e.what());
  }
}

void write_camera(const fs::path& path, const CameraFile& cam) { write_text(path, camera_to_json(cam)); }

CameraFile read_camera(const fs::path& path) { return camera_from_json(read_text(path)); }

std::vector<fs::path> write_ground_truth(const fs::path& dir, const GroundTruth& gt) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  auto grid_file = [&](const std::string& name, const ScalarGrid& g) {
    ScalarGrid named = g;
    const auto p = dir / (name + ".orgf");
    ScalarGrid out(named.width(), named.height(), {name});
    std::copy(named.values().begin(), named.values().end(), out.values().begin());
    if (named.has_mask())
      for (int y = 0; y < named.height(); ++y)
        for (int x = 0; x < named.width(); ++x) out.set_valid(x, y, named.valid(x, y));
    write_grid(p, out);
    written.push_back(p);
  };
  const auto rgb_path = dir / "rgb.ppm";
  write_ppm(rgb_path, gt.rgb);
  written.push_back(rgb_path);
  const auto cam_path = dir / "camera.json";
  write_camera(cam_path, CameraFile{gt.intrinsics, gt.pose});
  written.push_back(cam_path);
  grid_file(kFrontHeightChannel, gt.pixel_height.front);
  grid_file(kBackHeightChannel, gt.pixel_height.back);
  grid_file(kLatitudeChannel, gt.perspective.latitude);
  grid_file(kUpSinChannel, gt.perspective.up.channel(0));
  grid_file(kUpCosChannel, gt.perspective.up.channel(1));
  grid_file("depth", gt.depth);
  grid_file(kMaskChannel, gt.mask);
  return written;
}

FieldBundle read_bundle(const fs::path& dir) {
  auto grid = [&](const std::string& name) { return read_grid(dir / (name + ".orgf")); };
  FieldBundle b;
  b.heights.front = grid(kFrontHeightChannel);
  b.heights.back = grid(kBackHeightChannel);
  b.heights.mask = grid(kMaskChannel);
  b.field.latitude = grid(kLatitudeChannel);
  const ScalarGrid s = grid(kUpSinChannel), c = grid(kUpCosChannel);
  b.field.up = ScalarGrid(s.width(), s.height(), {kUpSinChannel, kUpCosChannel});
  if (c.width() != s.width() || c.height() != s.height())
    throw FormatError(dir.string() + ": up_sin and up_cos sizes differ");
  std::copy(s.values().begin(), s.values().end(), b.field.up.plane(0).begin());
  std::copy(c.values().begin(), c.values().end(), b.field.up.plane(1).begin());
  if (s.has_mask() || c.has_mask())
    for (int y = 0; y < s.height(); ++y)
      for (int x = 0; x < s.width(); ++x) b.field.up.set_valid(x, y, s.valid(x, y) && c.valid(x, y));
  if (fs::exists(dir / "depth.orgf")) b.depth = grid("depth");
  if (fs::exists(dir / "camera.json")) b.camera = read_camera(dir / "camera.json");
  b.heights.validate();
  b.field.validate();
  return b;
}

std::string report_to_json(const EvalReport& r) {
  const json j{{"absrel", r.absrel},   {"delta1", r.delta1},
               {"lsiv", r.lsiv},       {"chamfer", r.chamfer},
               {"pixel_height_l1", r.pixel_height_l1},
               {"latitude_l1_deg", r.latitude_l1},
               {"up_l1_deg", r.up_l1}, {"count", r.count}};
  return j.dump(2) + "\n";
}

std::string bucket_report_to_json(const BucketReport& r) {
  json j;
  j["small"] = json::parse(report_to_json(r.small));
  j["medium"] = json::parse(report_to_json(r.medium));
  j["large"] = json::parse(report_to_json(r.large));
  j["overall"] = json::parse(report_to_json(r.overall));
  return j.dump(2) + "\n";
}

void write_text(const fs::path& path, const std::string& text) { write_bytes(path, text.data(), text.size()); }

std::string read_text(const fs::path& path) {
  const auto b = read_bytes(path);
  return std::string(b.begin(), b.end());
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

std::uint64_t fnv1a64(const std::uint8_t* data, size_t size, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (size_t i = 0; i < size; ++i) {
    h ^= data[i];
    h *= 1099511628211ull;
  }
  return h;
}

// Scene JSON.

namespace {

json primitive_json(const Primitive& prim) {
  json j = std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return {{"type", "sphere"}, {"center", vec_json(s.center)}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, Box>) {
          return {{"type", "box"},
                  {"center", vec_json(s.center)},
                  {"half_extents", vec_json(s.half_extents)},
                  {"yaw_deg", s.yaw_deg}};
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          return {{"type", "cylinder"},
                  {"base_center", vec_json(s.base_center)},
                  {"radius", s.radius},
                  {"height", s.height}};
        } else {
          json v = json::array(), f = json::array();
          for (const auto& p : s.vertices()) v.push_back(vec_json(p));
          for (const auto& t : s.faces()) f.push_back(json::array({t[0], t[1], t[2]}));
          return {{"type", "mesh"}, {"vertices", v}, {"faces", f}};
        }
      },
      prim.shape);
  j["albedo"] = vec_json(prim.albedo);
  return j;
}

Primitive primitive_from(const json& j) {
  const auto type = j.at("type").get<std::string>();
  Primitive prim{Sphere{}, Vec3(0.8, 0.8, 0.8)};
  if (j.contains("albedo")) prim.albedo = vec_from(j.at("albedo"), "albedo");
  if (type == "sphere") {
    prim.shape = Sphere{vec_from(j.at("center"), "center"), j.at("radius").get<double>()};
  } else if (type == "box") {
    Box b;
    b.center = vec_from(j.at("center"), "center");
    b.half_extents = vec_from(j.at("half_extents"), "half_extents");
    b.yaw_deg = field_or(j, "yaw_deg", 0.0);
    prim.shape = b;
  } else if (type == "cylinder") {
    prim.shape = Cylinder{vec_from(j.at("base_center"), "base_center"), j.at("radius").get<double>(),
                          j.at("height").get<double>()};
  } else if (type == "mesh") {
    std::vector<Vec3> verts;
    for (const auto& v : j.at("vertices")) verts.push_back(vec_from(v, "vertex"));
    std::vector<std::array<int, 3>> faces;
    for (const auto& f : j.at("faces")) {
      if (!f.is_array() || f.size() != 3) throw FormatError("mesh faces must be index triples");
      faces.push_back({f[0].get<int>(), f[1].get<int>(), f[2].get<int>()});
    }
    prim.shape = TriangleMesh(std::move(verts), std::move(faces));
  } else {
    throw FormatError("unknown primitive type '" + type + "'");
  }
  return prim;
}

}  // namespace

Scene scene_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    Scene scene;
    for (const auto& p : j.at("primitives")) scene.primitives.push_back(primitive_from(p));
    if (j.contains("lights"))
      for (const auto& l : j.at("lights")) {
        const auto type = l.at("type").get<std::string>();
        if (type == "directional") {
          Vec3 dir = vec_from(l.at("direction"), "direction");
          if (!(dir.norm() > 0.0)) throw FormatError("directional light needs a nonzero direction");
          // Already-unit directions are kept verbatim so files round-trip exactly.
          if (std::abs(dir.norm() - 1.0) > 1e-12) dir.normalize();
          scene.lights.push_back(DirectionalLight{dir, field_or(l, "intensity", 1.0)});
        } else if (type == "point") {
          scene.lights.push_back(
              PointLight{vec_from(l.at("position"), "position"), field_or(l, "intensity", 10.0)});
        } else {
          throw FormatError("unknown light type '" + type + "'");
        }
      }
    if (j.contains("ground") && j.at("ground").contains("albedo"))
      scene.ground_albedo = vec_from(j.at("ground").at("albedo"), "ground albedo");
    const auto& c = j.at("camera");
    scene.camera.position = vec_from(c.at("position"), "camera position");
    scene.camera.target = vec_from(c.at("target"), "camera target");
    scene.camera.roll_deg = field_or(c, "roll_deg", 0.0);
    scene.camera.intrinsics = CameraIntrinsics::centered(
        field_or(c, "fov_deg", 60.0), field_or(c, "width", 512), field_or(c, "height", 512));
    return scene;
  } catch (const json::exception& e) {
    throw FormatError(std::string("scene file: ") + e.what());
  }
}

std::string scene_to_json(const Scene& scene) {
  json j;
  j["primitives"] = json::array();
  for (const auto& p : scene.primitives) j["primitives"].push_back(primitive_json(p));
  j["lights"] = json::array();
  for (const auto& l : scene.lights)
    std::visit(
        [&](const auto& light) {
          using T = std::decay_t<decltype(light)>;
          if constexpr (std::is_same_v<T, DirectionalLight>)
            j["lights"].push_back({{"type", "directional"},
                                   {"direction", vec_json(light.direction)},
                                   {"intensity", light.intensity}});
          else
            j["lights"].push_back({{"type", "point"},
                                   {"position", vec_json(light.position)},
                                   {"intensity", light.intensity}});
        },
        l);
  j["ground"] = {{"albedo", vec_json(scene.ground_albedo)}};
  const auto& c = scene.camera;
  j["camera"] = {{"position", vec_json(c.position)},   {"target", vec_json(c.target)},
                 {"roll_deg", c.roll_deg},             {"fov_deg", c.intrinsics.fov_deg},
                 {"width", c.intrinsics.width},        {"height", c.intrinsics.height}};
  return j.dump(2) + "\n";
}

Scene read_scene(const fs::path& path) {
  try {
    return scene_from_json(read_text(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// Dataset spec and manifest JSON.

namespace {

Range range_from(const json& j, const char* key, Range fallback) {
  if (!j.contains(key)) return fallback;
  const auto& r = j.at(key);
  if (!r.is_array() || r.size() != 2) throw FormatError(std::string(key) + " must be [lo, hi]");
  return {r[0].get<double>(), r[1].get<double>()};
}


}  // namespace

DatasetSpec read_dataset_spec(const fs::path& path) {
  try {
    const json j = json::parse(read_text(path));
    DatasetSpec spec;
    int index = 0;
    for (const auto& s : j.at("scenes")) {
      NamedScene ns;
      if (s.is_string()) {
        const fs::path p = path.parent_path() / s.get<std::string>();
        ns.name = p.stem().string();
        ns.scene = read_scene(p);
      } else {
        ns.name = s.contains("name") ? s.at("name").get<std::string>() : "scene" + std::to_string(index);
        ns.scene = scene_from_json(s.contains("scene") ? s.at("scene").dump() : s.dump());
      }
      spec.scenes.push_back(std::move(ns));
      ++index;
    }
    spec.samples_per_scene = field_or(j, "samples_per_scene", spec.samples_per_scene);
    spec.width = field_or(j, "width", spec.width);
    spec.height = field_or(j, "height", spec.height);
    spec.fov_deg = range_from(j, "fov_deg", spec.fov_deg);
    spec.distance = range_from(j, "distance", spec.distance);
    spec.elevation_deg = range_from(j, "elevation_deg", spec.elevation_deg);
    spec.roll_deg = range_from(j, "roll_deg", spec.roll_deg);
    spec.min_lights = field_or(j, "min_lights", spec.min_lights);
    spec.max_lights = field_or(j, "max_lights", spec.max_lights);
    spec.light_intensity = range_from(j, "light_intensity", spec.light_intensity);
    spec.seed = field_or(j, "seed", spec.seed);
    spec.min_mask_coverage = field_or(j, "min_mask_coverage", spec.min_mask_coverage);
    spec.max_retries = field_or(j, "max_retries", spec.max_retries);
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string manifest_to_json(const Manifest& m) {
  json entries = json::array();
  for (const auto& e : m.entries) {
    json files = json::array();
    for (const auto& f : e.files) files.push_back(f);
    entries.push_back({{"id", e.id},
                       {"scene", e.scene},
                       {"sample", e.sample},
                       {"status", e.kept ? "kept" : "rejected"},
                       {"reason", e.reason},
                       {"split", e.split},
                       {"coverage", e.coverage},
                       {"attempts", e.attempts},
                       {"camera", camera_json(e.camera)},
                       {"files", files},
                       {"digest", e.digest}});
  }
  const json j{{"seed", m.seed}, {"kept", m.kept()}, {"rejected", m.rejected()}, {"entries", entries}};
  return j.dump(2) + "\n";
}

}  // namespace pixht
