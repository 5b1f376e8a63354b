#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <optional>
#include <ostream>

#include "pixht/camera_est.hpp"
#include "pixht/error.hpp"
#include "pixht/fields.hpp"
#include "pixht/io.hpp"
#include "pixht/metrics.hpp"
#include "pixht/raytracer.hpp"
#include "pixht/relight.hpp"
#include "pixht/reproject.hpp"

namespace pixht::cli {

namespace {

struct Globals {
  unsigned threads = 0;
  bool verbose = false;
  bool deterministic = false;
  std::optional<std::uint64_t> seed;

  Exec exec() const { return threads > 0 ? Exec{threads} : Exec::from_env(); }
};

struct FieldInputs {
  std::string bundle;
  std::string heights;
  std::string pfield;
  std::string camera;
  std::string mask;
};

struct GridOverrides {
  int levels = -1;
  int coarse_lattice = -1;
  int refine_lattice = -1;

  GridSpec spec() const {
    GridSpec g;
    if (levels >= 0) g.refinement_levels = levels;
    if (coarse_lattice >= 0) g.coarse_lattice = coarse_lattice;
    if (refine_lattice >= 0) g.refine_lattice = refine_lattice;
    g.validate();
    return g;
  }
};

struct Loaded {
  PixelHeightMap heights;
  PerspectiveField field;
  std::optional<CameraFile> camera;
};

void add_field_inputs(CLI::App* sub, FieldInputs& in, bool with_heights) {
  auto* bundle = sub->add_option("--bundle", in.bundle, "Ground-truth bundle directory")
                     ->check(CLI::ExistingDirectory);
  auto* pfield = sub->add_option("--pfield", in.pfield, "Perspective field grid (latitude, up_sin, up_cos)")
                     ->check(CLI::ExistingFile);
  bundle->excludes(pfield);
  if (with_heights) {
    auto* heights = sub->add_option("--heights", in.heights,
                                    "Pixel height grid (height_front, height_back[, mask])")
                        ->check(CLI::ExistingFile);
    bundle->excludes(heights);
  } else {
    sub->add_option("--mask", in.mask, "Object mask grid")->check(CLI::ExistingFile);
  }
  sub->add_option("--camera", in.camera, "Camera file; estimated from the field when absent")
      ->check(CLI::ExistingFile);
}

void add_grid_overrides(CLI::App* sub, GridOverrides& g) {
  sub->add_option("--levels", g.levels, "Refinement levels of the camera grid search");
  sub->add_option("--coarse-lattice", g.coarse_lattice, "Coarse sweep lattice size (0 = all pixels)");
  sub->add_option("--refine-lattice", g.refine_lattice, "Refinement lattice size (0 = all pixels)");
}

ScalarGrid copy_channel_with_mask(const ScalarGrid& src, int c) {
  ScalarGrid out = src.channel(c);
  return out;
}

PerspectiveField field_from_grid(const ScalarGrid& g) {
  PerspectiveField f;
  f.latitude = copy_channel_with_mask(g, g.channel_index(kLatitudeChannel));
  const int s = g.channel_index(kUpSinChannel), c = g.channel_index(kUpCosChannel);
  f.up = ScalarGrid(g.width(), g.height(), {kUpSinChannel, kUpCosChannel});
  std::copy(g.plane(s).begin(), g.plane(s).end(), f.up.plane(0).begin());
  std::copy(g.plane(c).begin(), g.plane(c).end(), f.up.plane(1).begin());
  if (g.has_mask())
    for (int y = 0; y < g.height(); ++y)
      for (int x = 0; x < g.width(); ++x) f.up.set_valid(x, y, g.valid(x, y));
  f.validate();
  return f;
}

ScalarGrid field_to_grid(const PerspectiveField& f) {
  ScalarGrid g(f.width(), f.height(), {kLatitudeChannel, kUpSinChannel, kUpCosChannel});
  std::copy(f.latitude.plane(0).begin(), f.latitude.plane(0).end(), g.plane(0).begin());
  std::copy(f.up.plane(0).begin(), f.up.plane(0).end(), g.plane(1).begin());
  std::copy(f.up.plane(1).begin(), f.up.plane(1).end(), g.plane(2).begin());
  if (f.latitude.has_mask() || f.up.has_mask())
    for (int y = 0; y < g.height(); ++y)
      for (int x = 0; x < g.width(); ++x) g.set_valid(x, y, f.valid(x, y));
  return g;
}

PixelHeightMap heights_from_grid(const ScalarGrid& g) {
  PixelHeightMap h;
  h.front = g.channel(kFrontHeightChannel);
  h.back = g.channel(kBackHeightChannel);
  if (g.has_channel(kMaskChannel)) {
    h.mask = g.channel(kMaskChannel);
    h.mask.clear_mask();
  } else {
    h.mask = ScalarGrid(g.width(), g.height(), {kMaskChannel});
    for (int y = 0; y < g.height(); ++y)
      for (int x = 0; x < g.width(); ++x)
        if (h.front.valid(x, y) && std::isfinite(h.front.at(x, y))) h.mask.at(x, y) = 1.0f;
  }
  h.validate();
  return h;
}

ScalarGrid mask_from_grid(const ScalarGrid& g) {
  ScalarGrid m = g.has_channel(kMaskChannel) ? g.channel(kMaskChannel) : g.channel(0);
  m.clear_mask();
  return m;
}

Loaded load_inputs(const FieldInputs& in, bool with_heights) {
  Loaded l;
  if (!in.bundle.empty()) {
    const FieldBundle b = read_bundle(in.bundle);
    l.heights = b.heights;
    l.field = b.field;
  } else {
    if (in.pfield.empty()) throw CLI::ValidationError("--pfield or --bundle is required");
    l.field = field_from_grid(read_grid(in.pfield));
    if (with_heights) {
      if (in.heights.empty()) throw CLI::ValidationError("--heights or --bundle is required");
      l.heights = heights_from_grid(read_grid(in.heights));
    } else if (!in.mask.empty()) {
      l.heights.mask = mask_from_grid(read_grid(in.mask));
    }
  }
  if (with_heights && (l.heights.width() != l.field.width() || l.heights.height() != l.field.height()))
    throw DomainError("pixel height and perspective field sizes differ");
  if (!in.camera.empty()) {
    l.camera = read_camera(in.camera);
    if (l.camera->intrinsics.width != l.field.width() || l.camera->intrinsics.height != l.field.height())
      throw DomainError("camera resolution does not match the field");
  }
  return l;
}

CameraFile resolve_camera(const Loaded& l, const GridOverrides& g, const Globals& gl, std::ostream& err) {
  if (l.camera) return *l.camera;
  const auto est = estimate_camera(l.field, l.heights.mask, g.spec(), gl.exec());
  if (gl.verbose)
    err << "estimated camera: fov=" << est.fov_deg << " pitch=" << est.pitch_deg
        << " roll=" << est.roll_deg << " cost=" << est.cost << "\n";
  return CameraFile{est.intrinsics(l.field.width(), l.field.height()), est.pose()};
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

Vec3 vec3_of(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

void attach_colors(PointCloud& cloud, const ScalarGrid& rgb) {
  cloud.colors.clear();
  for (auto idx : cloud.pixel_index) {
    const int x = static_cast<int>(idx % rgb.width()), y = static_cast<int>(idx / rgb.width());
    std::array<std::uint8_t, 3> c{};
    for (int k = 0; k < 3; ++k)
      c[static_cast<size_t>(k)] =
          static_cast<std::uint8_t>(std::lround(std::clamp(rgb.at(k, x, y), 0.0f, 1.0f) * 255.0f));
    cloud.colors.push_back(c);
  }
}

PointCloud concat(const PointCloud& a, const PointCloud& b) {
  PointCloud out = a;
  out.points.insert(out.points.end(), b.points.begin(), b.points.end());
  out.pixel_index.insert(out.pixel_index.end(), b.pixel_index.begin(), b.pixel_index.end());
  out.colors.insert(out.colors.end(), b.colors.begin(), b.colors.end());
  return out;
}

ScalarGrid load_rgb(const std::string& path, int w, int h) {
  const ScalarGrid rgb = read_ppm(path);
  if (rgb.width() != w || rgb.height() != h) throw DomainError("image size does not match the fields");
  return rgb;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pixel height reconstruction, camera recovery and relighting", "pixht"};
  app.require_subcommand(1);
  Globals gl;
  app.add_option("--threads", gl.threads, "Worker threads (default: PIXHT_THREADS or 1)");
  app.add_flag("--verbose,-v", gl.verbose, "Progress on stderr");
  app.add_flag("--deterministic", gl.deterministic, "Require bit-reproducible output");
  app.add_option("--seed", gl.seed, "Seed for randomized commands");

  // render
  auto* render = app.add_subcommand("render", "Ray trace a scene into a ground-truth bundle");
  std::string scene_path, render_out;
  render->add_option("scene", scene_path, "Scene JSON")->required()->check(CLI::ExistingFile);
  render->add_option("--out", render_out, "Output directory")->required();

  // fields
  auto* fields = app.add_subcommand("fields", "Render the perspective field of a camera");
  std::string fields_camera, fields_out;
  double f_fov = 60.0, f_pitch = 0.0, f_roll = 0.0;
  int f_w = 512, f_h = 512;
  auto* fc = fields->add_option("--camera", fields_camera, "Camera file")->check(CLI::ExistingFile);
  for (auto* o : {fields->add_option("--fov", f_fov, "Vertical FoV in degrees"),
                  fields->add_option("--pitch", f_pitch, "Pitch in degrees"),
                  fields->add_option("--roll", f_roll, "Roll in degrees"),
                  fields->add_option("--width", f_w, "Image width"),
                  fields->add_option("--height", f_h, "Image height")})
    fc->excludes(o);
  fields->add_option("--out", fields_out, "Output grid")->required();

  // estimate-camera
  auto* estimate = app.add_subcommand("estimate-camera", "Recover fov, pitch and roll from a field");
  FieldInputs est_in;
  GridOverrides est_grid;
  std::string est_out;
  add_field_inputs(estimate, est_in, false);
  add_grid_overrides(estimate, est_grid);
  estimate->add_option("--out", est_out, "Camera file (stdout when absent)");

  // reconstruct
  auto* recon = app.add_subcommand("reconstruct", "Pixel heights + field -> point cloud");
  FieldInputs rec_in;
  GridOverrides rec_grid;
  std::string rec_out, rec_depth, rec_rgb;
  bool rec_no_feet = false;
  add_field_inputs(recon, rec_in, true);
  add_grid_overrides(recon, rec_grid);
  recon->add_option("--out", rec_out, "Output PLY")->required();
  recon->add_option("--depth", rec_depth, "Also write the reconstructed depth grid");
  recon->add_option("--rgb", rec_rgb, "Color points from this image")->check(CLI::ExistingFile);
  recon->add_flag("--no-feet", rec_no_feet, "Omit the foot points");

  // shadow / reflect
  struct RelightArgs {
    FieldInputs in;
    GridOverrides grid;
    std::string rgb, out, layer;
  };
  RelightArgs sh, rf;
  std::vector<double> light_dir, light_pos;
  double softness = 0.0, strength = 0.6;
  auto* shadow = app.add_subcommand("shadow", "Cast the object's shadow onto the ground");
  add_field_inputs(shadow, sh.in, true);
  add_grid_overrides(shadow, sh.grid);
  shadow->add_option("--rgb", sh.rgb, "Input image")->required()->check(CLI::ExistingFile);
  shadow->add_option("--out", sh.out, "Composited PPM")->required();
  shadow->add_option("--layer", sh.layer, "Shadow mask grid");
  auto* ld = shadow->add_option("--light-dir", light_dir, "Directional light travel direction x,y,z")
                 ->expected(3)
                 ->delimiter(',');
  auto* lp = shadow->add_option("--light-pos", light_pos, "Point light position x,y,z")
                 ->expected(3)
                 ->delimiter(',');
  ld->excludes(lp);
  shadow->add_option("--softness", softness, "Blur sigma in pixels");
  shadow->add_option("--strength", strength, "Darkening strength in [0, 1]");

  ReflectionOptions refl_opts;
  auto* reflect = app.add_subcommand("reflect", "Render a planar reflection on the ground");
  add_field_inputs(reflect, rf.in, true);
  add_grid_overrides(reflect, rf.grid);
  reflect->add_option("--rgb", rf.rgb, "Input image")->required()->check(CLI::ExistingFile);
  reflect->add_option("--out", rf.out, "Composited PPM")->required();
  reflect->add_option("--layer", rf.layer, "Reflection rgba grid");
  reflect->add_option("--base-alpha", refl_opts.base_alpha, "Reflection opacity at the contact line");
  reflect->add_option("--falloff", refl_opts.falloff, "Opacity falloff distance");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Compare a predicted bundle with ground truth");
  std::string pred_dir, gt_dir, eval_out, align = "depth";
  bool no_chamfer_align = false;
  GridOverrides eval_grid;
  evaluate->add_option("--pred", pred_dir, "Predicted bundle")->required()->check(CLI::ExistingDirectory);
  evaluate->add_option("--gt", gt_dir, "Ground-truth bundle")->required()->check(CLI::ExistingDirectory);
  evaluate->add_option("--align", align, "Depth alignment before AbsRel/delta1")
      ->check(CLI::IsMember({"depth", "disparity", "none"}));
  evaluate->add_flag("--no-chamfer-align", no_chamfer_align, "Skip the LSIV scale before CD");
  evaluate->add_option("--out", eval_out, "Report JSON (stdout when absent)");
  add_grid_overrides(evaluate, eval_grid);

  // dataset
  auto* dataset = app.add_subcommand("dataset", "Generate a synthetic ground-truth corpus");
  std::string spec_path, data_out;
  dataset->add_option("--spec", spec_path, "Dataset spec JSON")->required()->check(CLI::ExistingFile);
  dataset->add_option("--out", data_out, "Output directory")->required();

  std::vector<std::string> rev(args.rbegin(), args.empty() ? args.rend() : args.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << "code=usage msg=" << one_line(e.what()) << "\n";
    return kExitUsage;
  }

  try {
    const Exec exec = gl.exec();
    if (gl.verbose) err << "threads=" << exec.threads << (gl.deterministic ? " deterministic" : "") << "\n";

    if (*render) {
      const Scene scene = read_scene(scene_path);
      const GroundTruth gt = render_ground_truth(scene, RenderOptions{}, exec);
      for (const auto& p : write_ground_truth(render_out, gt)) out << p.string() << "\n";
    } else if (*fields) {
      CameraFile cam{CameraIntrinsics::centered(f_fov, f_w, f_h), CameraPose{f_pitch, f_roll}};
      if (!fields_camera.empty()) cam = read_camera(fields_camera);
      write_grid(fields_out, field_to_grid(render_perspective_field(cam.camera(), exec)));
    } else if (*estimate) {
      const Loaded l = load_inputs(est_in, false);
      const auto est = estimate_camera(l.field, l.heights.mask, est_grid.spec(), exec);
      const std::string text =
          camera_to_json(CameraFile{est.intrinsics(l.field.width(), l.field.height()), est.pose()});
      if (est_out.empty())
        out << text;
      else
        write_text(est_out, text);
      if (gl.verbose) err << "cost=" << est.cost << " candidates=" << est.candidates_evaluated << "\n";
    } else if (*recon) {
      const Loaded l = load_inputs(rec_in, true);
      const Camera cam = resolve_camera(l, rec_grid, gl, err).camera();
      Reconstruction r = reconstruct_cloud(l.heights, l.field, cam, {}, exec);
      if (!rec_rgb.empty()) {
        const ScalarGrid rgb = load_rgb(rec_rgb, cam.width(), cam.height());
        attach_colors(r.front, rgb);
        attach_colors(r.back, rgb);
        attach_colors(r.feet, rgb);
      }
      PointCloud cloud = concat(r.front, r.back);
      if (!rec_no_feet) cloud = concat(cloud, r.feet);
      write_ply(rec_out, cloud);
      if (!rec_depth.empty()) write_grid(rec_depth, depth_from_reconstruction(r.front, cam));
      out << "points=" << cloud.size() << " front=" << r.front.size() << " back=" << r.back.size()
          << " feet=" << (rec_no_feet ? 0 : r.feet.size()) << "\n";
    } else if (*shadow || *reflect) {
      RelightArgs& a = *shadow ? sh : rf;
      const Loaded l = load_inputs(a.in, true);
      const Camera cam = resolve_camera(l, a.grid, gl, err).camera();
      const Reconstruction r = reconstruct_cloud(l.heights, l.field, cam, {}, exec);
      const ScalarGrid rgb = load_rgb(a.rgb, cam.width(), cam.height());
      const GroundPlane ground = GroundPlane::reconstruction();
      ScalarGrid composite;
      ScalarGrid layer;
      if (*shadow) {
        if (light_dir.empty() && light_pos.empty())
          throw CLI::ValidationError("--light-dir or --light-pos is required");
        const LightSpec light = light_dir.empty() ? LightSpec::point(vec3_of(light_pos), softness)
                                                  : LightSpec::directional(vec3_of(light_dir), softness);
        layer = cast_shadow(concat(r.front, r.back), ground, light, cam).mask;
        for (int y = 0; y < layer.height(); ++y)
          for (int x = 0; x < layer.width(); ++x)
            if (l.heights.in_mask(x, y)) layer.at(x, y) = 0.0f;
        composite = composite_shadow(rgb, layer, strength);
      } else {
        PointCloud front = r.front, back = r.back;
        attach_colors(front, rgb);
        attach_colors(back, rgb);
        layer = render_reflection(concat(front, back), ground, cam, refl_opts);
        for (int y = 0; y < layer.height(); ++y)
          for (int x = 0; x < layer.width(); ++x)
            if (l.heights.in_mask(x, y)) layer.at(3, x, y) = 0.0f;
        composite = composite_layer(rgb, layer);
      }
      write_ppm(a.out, composite);
      if (!a.layer.empty()) write_grid(a.layer, layer);
    } else if (*evaluate) {
      const FieldBundle gt = read_bundle(gt_dir);
      const FieldBundle pred = read_bundle(pred_dir);
      if (!fs::exists(fs::path(gt_dir) / "camera.json"))
        throw DomainError("ground-truth bundle lacks camera.json");
      const ScalarGrid& mask = gt.heights.mask;
      Loaded pl{pred.heights, pred.field, std::nullopt};
      if (fs::exists(fs::path(pred_dir) / "camera.json")) pl.camera = pred.camera;
      const Camera pred_cam = resolve_camera(pl, eval_grid, gl, err).camera();
      const Camera gt_cam = gt.camera.camera();
      const Reconstruction rp = reconstruct_cloud(pred.heights, pred.field, pred_cam, {}, exec);
      const Reconstruction rg = reconstruct_cloud(gt.heights, gt.field, gt_cam, {}, exec);

      EvalReport rep;
      const ScalarGrid pred_depth =
          pred.depth.empty() ? depth_from_reconstruction(rp.front, pred_cam) : pred.depth;
      if (gt.depth.empty()) throw DomainError("ground-truth bundle lacks depth.orgf");
      ScalarGrid aligned = pred_depth;
      if (align != "none")
        aligned = align_scale_shift(pred_depth, gt.depth, mask,
                                    align == "depth" ? AlignSpace::depth : AlignSpace::disparity)
                      .aligned;
      const DepthMetrics dm = absrel_delta1(aligned, gt.depth, mask);
      rep.absrel = dm.absrel;
      rep.delta1 = dm.delta1;
      const auto [pp, pg] = pair_by_pixel(rp.front, rg.front);
      rep.lsiv = lsiv(pp, pg);
      const PointCloud cd_pred = !no_chamfer_align ? scaled(rp.front, lsiv_scale(pp, pg)) : rp.front;
      rep.chamfer = chamfer_distance(cd_pred, rg.front, exec);
      const FieldErrors fe = field_errors(pred.heights, pred.field, gt.heights, gt.field, mask);
      rep.pixel_height_l1 = fe.height_l1_px;
      rep.latitude_l1 = fe.latitude_l1_deg;
      rep.up_l1 = fe.up_l1_deg;
      rep.count = 1;
      const std::string text = report_to_json(rep);
      if (eval_out.empty())
        out << text;
      else
        write_text(eval_out, text);
    } else if (*dataset) {
      DatasetSpec spec = read_dataset_spec(spec_path);
      if (gl.seed) spec.seed = *gl.seed;
      const Manifest m = generate_dataset(spec, data_out, exec);
      out << "kept=" << m.kept() << " rejected=" << m.rejected() << "\n";
    }
    return kExitOk;
  } catch (const CLI::ValidationError& e) {
    err << app.help();
    err << "code=usage msg=" << one_line(e.what()) << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "code=" << e.code() << " msg=" << one_line(e.what()) << "\n";
    return kExitFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "code=io msg=" << one_line(e.what()) << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "code=internal msg=" << one_line(e.what()) << "\n";
    return kExitFailure;
  }
}

}  // namespace pixht::cli
