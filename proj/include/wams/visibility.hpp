#pragma once

#include "wams/sim.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wams {

struct Ray3 {
    Vec3 origin;
    Vec3 dir; // unit
};

/// Triangle with the intersection constants precomputed at build time:
/// plane normal plus the edge dot products of the parametric in-triangle test.
struct Tri {
    Vec3 a;
    Vec3 u, v; // edges b-a, c-a
    Vec3 n;    // u x v (unnormalized)
    double uu = 0.0, uv = 0.0, vv = 0.0, denom = 0.0;
    bool degenerate = false;
};
Tri make_tri(const Vec3& a, const Vec3& b, const Vec3& c);

/// Sunday's parametric plane-then-barycentric ray/triangle test. Returns the
/// positive hit distance, or nothing for parallel, behind, or outside rays.
std::optional<double> ray_triangle(const Ray3& r, const Tri& t);

struct Aabb3 {
    Vec3 lo, hi;
};

/// Slab test: entry/exit distances of the ray through the box, if any.
/// A ray starting inside reports entry 0.
std::optional<std::pair<double, double>> aabb_interval(const Ray3& r, const Aabb3& box);

struct MeshObject {
    std::int64_t id = 0;
    std::vector<Tri> tris;
    Aabb3 box;
};

/// Closed prism from a CCW footprint ring: side walls, roof and floor fans.
MeshObject mesh_prism(const std::vector<Vec2>& ring, double base_z, double height,
                      std::int64_t id);
/// Flat rectangular terrain patch at z = elevation.
MeshObject mesh_terrain_patch(const Vec2& lo, const Vec2& hi, double elevation,
                              std::int64_t id);

struct RayHit {
    double distance = 0.0;
    std::size_t object = 0;
};

/// Flat list of AABB-guarded meshes; the counters expose the work done so the
/// culling payoff is measurable.
struct RayCaster {
    std::vector<MeshObject> objects;
    bool use_aabb = true;
    mutable std::uint64_t triangle_tests = 0;
    mutable std::uint64_t aabb_tests = 0;

    std::optional<RayHit> first_hit(const Ray3& r, double max_dist = 1e30) const;
    void reset_counters() const { triangle_tests = aabb_tests = 0; }
};

/// Per-type entity bounding boxes, meters (full extents).
struct EntityBounds {
    double car[3] = {4.5, 1.8, 1.5};
    double bus[3] = {12.0, 2.5, 3.0};
    double person[3] = {0.5, 0.5, 1.8};
    const double* for_record(const EntityRecord& rec) const;
};

struct CameraView {
    Vec3 position;
    Vec3 boresight{0.0, 0.0, -1.0}; // unit
    double fov_deg = 60.0;
    double delta_theta = 25e-6;
};

struct VisibilityResult {
    bool in_frustum = false;
    double unoccluded_fraction = 0.0;
    double pixel_extent = 0.0;
    bool visible = false;
};

struct VisibilityConfig {
    double min_pixels = 5.0;
    double visible_fraction = 3.0 / 5.0;
};

/// Cone frustum test, then occlusion rays to the center and the four upper
/// box corners; visible iff in frustum, the unoccluded fraction reaches the
/// threshold and the pixel extent reaches the minimum size.
VisibilityResult entity_visible(const CameraView& cam, const Vec3& center,
                                const double extent[3], const RayCaster& world,
                                const VisibilityConfig& cfg = {});

/// Applies entity_visible across a snapshot; totals keyed by the record class
/// ("person", "car", "bus", ...).
std::map<std::string, int> count_visible(const CameraView& cam, const Snapshot& snap,
                                         const RayCaster& world,
                                         const EntityBounds& bounds = {},
                                         const VisibilityConfig& cfg = {});

/// Truth-log parsing (the simulator's XML schema). Throws std::runtime_error
/// with a line number on malformed input.
Snapshot parse_timestep_xml(const std::string& text);
std::vector<TruthEvent> parse_events_xml(const std::string& text);

struct TruthFilter {
    std::optional<std::int64_t> id;
    std::optional<char> type; // 'p' or 'v'
    std::optional<std::string> kind;
    double t_begin = -1e300;
    double t_end = 1e300;
    std::optional<std::pair<Vec2, Vec2>> region; // lo, hi
};

std::vector<TruthEvent> query_events(const std::vector<TruthEvent>& events,
                                     const TruthFilter& f);

struct TrackPoint {
    double time = 0.0;
    Vec2 pos;
    std::string state;
};
/// Contiguous per-entity track segments over the snapshot sequence; a gap in
/// presence (the entity indoors or despawned) starts a new segment.
std::vector<std::vector<TrackPoint>> query_tracks(const std::vector<Snapshot>& snaps,
                                                  const TruthFilter& f);

} // namespace wams
