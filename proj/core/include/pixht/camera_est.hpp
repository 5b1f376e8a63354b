#pragma once

// Camera recovery from a perspective field by exhaustive grid search over
// (fov, pitch, roll) followed by local refinement.

#include <vector>

#include "pixht/core.hpp"
#include "pixht/exec.hpp"
#include "pixht/fields.hpp"

namespace pixht {

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  // lo, lo + step, ... up to hi (inclusive within 1e-9 of a step).
  std::vector<double> values() const;
};

struct GridSpec {
  GridAxis fov{20.0, 110.0, 2.0};
  GridAxis pitch{-70.0, 70.0, 2.0};
  GridAxis roll{-45.0, 45.0, 2.0};
  int refinement_levels = 3;
  double shrink = 0.25;
  // Refinement windows span +/- this many steps of the previous level.
  double refine_radius = 2.0;
  // Evaluation lattices: at most N x N pixels for the coarse sweep and for
  // the refinement levels; 0 means every pixel.
  int coarse_lattice = 12;
  int refine_lattice = 24;
  // Last refinement level evaluates every masked pixel.
  bool final_full_resolution = true;

  void validate() const;
};

struct RefinementTrace {
  double step_fov, step_pitch, step_roll;
  double previous_cost;  // previous incumbent, re-evaluated on this level's lattice
  double cost;           // incumbent after this level
};

struct CameraEstimate {
  double fov_deg = 0.0;
  double pitch_deg = 0.0;
  double roll_deg = 0.0;
  double cost = 0.0;  // mean residual on the final level's pixels
  size_t candidates_evaluated = 0;
  std::vector<RefinementTrace> levels;

  CameraIntrinsics intrinsics(int width, int height) const {
    return CameraIntrinsics::centered(fov_deg, width, height);
  }
  CameraPose pose() const { return CameraPose{pitch_deg, roll_deg}; }
};

// Mean over masked, valid pixels of |latitude residual| plus the angle between
// observed and candidate up vectors, both in radians. `mask` is a one-channel
// grid (> 0.5 means included) or empty to use every valid pixel. Throws
// DomainError for mismatched sizes or an empty mask.
double perspective_field_cost(const PerspectiveField& observed, const Camera& candidate,
                              const ScalarGrid& mask = {});

// Throws NumericError when no pixel of the field is usable.
CameraEstimate estimate_camera(const PerspectiveField& observed, const ScalarGrid& mask = {},
                               const GridSpec& grid = {}, const Exec& exec = {});

}  // namespace pixht
