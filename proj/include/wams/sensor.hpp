#pragma once

#include "wams/geo.hpp"
#include "wams/geom.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wams {

/// Camera-array constants; defaults follow the 1.8-gigapixel 368-camera rig.
struct ImagerSpec {
    double z = 5334.0;          // operating altitude, m
    double fov_deg = 60.0;      // full-array field of view
    double delta_theta = 25e-6; // angular pixel pitch, rad
    double f_capture = 10.0;    // Hz
    double f_store = 2.0;       // Hz
    int ps_h = 2592;            // subcamera pixels, horizontal
    int ps_v = 1944;            // subcamera pixels, vertical
    int n_cameras = 368;
    int n_h = 18; // array columns
    int n_v = 24; // array rows
    std::vector<std::uint8_t> mask; // n_v x n_h row-major; empty = fully populated

    bool masked_in(int v, int h) const; // 1-based indices
    int active_cameras() const;
};

ImagerSpec argus_default(); // 24 x 18 array, elliptical mask of 368
ImagerSpec clif_preset();   // six 4008 x 2672 cameras in a 2 x 3 array
ImagerSpec argus_desk();    // 3 x 3 array of 324 x 243 px, 1 mrad pitch

struct SubcameraPose {
    int v = 1;
    int h = 1;
    double azimuth_deg = 0.0;   // offset from boresight, + right
    double elevation_deg = 0.0; // offset from boresight, + up (toward row n_v)
    double roll_deg = 0.0;      // always zero
};

/// Pointing offsets of array cell (v, h), 1-based. Throws std::out_of_range
/// for indices outside the array and std::invalid_argument for masked-out cells.
SubcameraPose subcamera_pose(int v, int h, const ImagerSpec& spec);

/// Elliptical array mask: cell kept iff its normalized center radius is within
/// the inscribed ellipse scaled by k.
std::vector<std::uint8_t> ellipse_mask(int n_v, int n_h, double k);

/// Calibrates k so the mask keeps exactly n_target cells (the n-th smallest
/// center radius). Falls back to the nearest achievable count on radius ties
/// and reports it through achieved/k_out.
std::vector<std::uint8_t> calibrated_mask(int n_v, int n_h, int n_target,
                                          double* k_out = nullptr,
                                          int* achieved = nullptr);

struct PlatformPose {
    GeoPoint position;    // boresight origin; altitude above the terrain datum
    double heading = 0.0; // degrees clockwise from north
    double pitch = 0.0;   // degrees off nadir (0 = straight down)
    double bank = 0.0;
};

/// Ground footprint of one subcamera over flat terrain at z = terrain_z.
struct Footprint {
    bool bounded = false;
    std::vector<Vec2> corners; // meters relative to the sub-platform point
    Vec2 center;
    double area = 0.0;       // m^2
    double center_gsd = 0.0; // m/px at the footprint center
};
Footprint footprint(const SubcameraPose& pose, const PlatformPose& rig,
                    const ImagerSpec& spec, double terrain_z = 0.0);

/// Whole-array nadir coverage: disc of radius z * tan(FOV/2).
double array_ground_radius(const ImagerSpec& spec);
double array_ground_area(const ImagerSpec& spec);

/// Bytes of one uncompressed full frame (3-byte RGB), without allocating it.
std::uint64_t frame_bytes(const ImagerSpec& spec);

/// Texture patches: 2048-px ground polygons grouped 10 x 10 with a 5-polygon
/// overlap, so patch origins advance by `stride` polygons.
struct PatchLayout {
    Vec2 origin;              // south-west corner of polygon (0, 0), m
    double polygon_m = 204.8; // ground extent of one 2048-px polygon
    int patch_polys = 10;
    int stride = 5;
    int patches_x = 4;
    int patches_y = 4;

    /// Lowest patch id whose area fully contains the bounding box, if any.
    std::optional<int> patch_containing(const Vec2& lo, const Vec2& hi) const;
};

struct RenderJob {
    int frame = 0;
    int v = 1;
    int h = 1;
    int patch = 0;
};

/// Jobs regrouped so equal patch ids are contiguous across the whole batch;
/// stable within a patch group. Never drops or duplicates a job.
std::vector<RenderJob> build_batch(const std::vector<RenderJob>& jobs);

/// Number of patch-id changes along the order (texture reload count).
int swap_count(const std::vector<RenderJob>& jobs);

/// Footprint-derived jobs for `frames` captures of every active subcamera.
/// Throws std::runtime_error when a footprint fits in no single patch.
std::vector<RenderJob> plan_batch(int frames, const ImagerSpec& spec,
                                  const PlatformPose& rig, const PatchLayout& layout,
                                  const Vec2& ground_pos = {}, double terrain_z = 0.0);

/// Serialization for the render stage (one job per line).
std::string job_list_to_string(const std::vector<RenderJob>& jobs);
std::vector<RenderJob> job_list_from_string(const std::string& text);

} // namespace wams
