#pragma once

#include "wams/sensor.hpp"
#include "wams/sim.hpp"
#include "wams/visibility.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wams {

struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> px; // RGB, row-major from the top-left

    Image() = default;
    Image(int w, int h, std::array<std::uint8_t, 3> fill = {0, 0, 0});
    std::uint8_t* at(int x, int y) { return &px[(static_cast<std::size_t>(y) * width + x) * 3]; }
    const std::uint8_t* at(int x, int y) const {
        return &px[(static_cast<std::size_t>(y) * width + x) * 3];
    }
};
bool images_equal(const Image& a, const Image& b);

/// Minimal uncompressed RGB TIFF writer/reader (single strip, 8 bits/sample).
void write_tiff(const std::string& path, const Image& img);
Image read_tiff(const std::string& path);

std::string frame_filename(int frame, int v, int h);
std::string tile_filename(int frame, int row, int col);

/// Orthographic ground raster: grass base, carriageways and sidewalks drawn
/// from the road network. Origin is the south-west corner; row 0 is north.
struct GroundTexture {
    Vec2 origin;
    double m_per_px = 1.0;
    Image img;

    std::array<std::uint8_t, 3> sample(const Vec2& world) const; // nearest
};
GroundTexture render_ground_texture(const RoadNetwork& roads, const Vec2& lo,
                                    const Vec2& hi, double m_per_px = 0.8);

/// 256-px tile pipeline: cut a raster into tiles and reassemble polygons.
std::vector<Image> cut_square_tiles(const Image& img, int tile = 256);
Image assemble_square_tiles(const std::vector<Image>& tiles, int cols, int tile = 256);

/// Renderable world: AABB-guarded meshes plus a flat shade per object;
/// terrain objects sample the ground texture instead.
struct RenderScene {
    RayCaster caster;
    std::vector<std::array<std::uint8_t, 3>> colors; // aligned with caster.objects
    std::vector<char> kinds;                         // 't' terrain, 'b' building, 'e' entity
    const GroundTexture* texture = nullptr;
    std::array<std::uint8_t, 3> sky = {40, 40, 60};
};

/// Buildings and terrain from the scene plus one box per snapshot entity.
/// Entities carry magenta-family palette colors for the IR stage.
RenderScene build_render_scene(const CityScene& scene, const Snapshot* snap,
                               const GroundTexture* texture, double terrain_z = 0.0);

/// Per-pixel ray-cast pinhole render (angular pitch delta_theta, gnomonic).
Image render_subcamera(const RenderScene& scene, const SubcameraPose& pose,
                       const PlatformPose& rig, const ImagerSpec& spec,
                       const Vec2& ground_pos = {});

/// Per-pixel first-hit distances for the same pixel grid; sky pixels get the
/// sentinel range.
std::vector<double> build_range_map(const RenderScene& scene, const SubcameraPose& pose,
                                    const PlatformPose& rig, const ImagerSpec& spec,
                                    const Vec2& ground_pos = {},
                                    double sky_range = 1e9);

/// Flat mosaic plane perpendicular to the boresight at eyepoint distance R px.
struct MosaicPlane {
    double R = 0.0;
    int extent = 0; // square, pixels
    int tile = 256;
    double fov_deg = 60.0;
};
MosaicPlane make_plane(const ImagerSpec& spec,
                       std::optional<double> r_override = std::nullopt);

/// Gnomonic plane position (continuous pixel coords) of an angular direction,
/// and its inverse. Angles in radians relative to the array boresight.
Vec2 plane_from_angles(double theta_h, double theta_v, const MosaicPlane& plane);
std::pair<double, double> angles_from_plane(const Vec2& p, const MosaicPlane& plane);

/// 3x3 projective map, row-major, mapping source pixel -> mosaic pixel.
struct Homography {
    double m[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    Vec2 apply(const Vec2& p) const;
    Homography inverse() const;
    double det() const;
};

struct WarpedImage {
    SubcameraPose pose;
    Homography to_plane; // source px -> mosaic px
    int x0 = 0, y0 = 0;  // placement of `img` on the plane
    Image img;
    std::vector<std::uint8_t> mask; // nonzero where img holds a source sample
};

/// Corner homography warp of a frame onto the mosaic plane (nearest sample).
/// Throws std::runtime_error when a corner projects at or beyond the horizon.
WarpedImage warp_to_mosaic(const Image& frame, const SubcameraPose& pose,
                           const ImagerSpec& spec, const MosaicPlane& plane);

/// Mean local scale sqrt(|det J|) of the corner homography over the frame.
double mean_warp_scale(const SubcameraPose& pose, const ImagerSpec& spec,
                       const MosaicPlane& plane);

struct TileSet {
    int tile = 256;
    int cols = 0, rows = 0;
    std::map<std::pair<int, int>, Image> tiles; // (row, col)
    std::vector<std::pair<int, int>> holes;     // tiles with no contribution
};

/// Re-cut the warped images into fixed tiles; overlaps resolved per pixel by
/// the camera whose boresight is angularly nearest. Uncovered pixels inside a
/// stored tile take the fill color.
TileSet stitch_tiles(const std::vector<WarpedImage>& warps, const MosaicPlane& plane,
                     std::array<std::uint8_t, 3> fill = {0, 0, 0});

/// Pure placement of the tile set; missing tiles become the fill color.
Image concatenate(const TileSet& tiles, const MosaicPlane& plane,
                  std::array<std::uint8_t, 3> fill = {0, 0, 0});

/// One-buffer full-plane composition with the same priority rule (the
/// oracle path for the tiled route).
Image compose_direct(const std::vector<WarpedImage>& warps, const MosaicPlane& plane,
                     std::array<std::uint8_t, 3> fill = {0, 0, 0});

/// Infrared transformation model.
struct IrModel {
    // temperature stage
    std::vector<double> magenta_lut;  // K per red-channel palette index (256)
    double background_t_lo = 278.0;   // K at visible intensity 0
    double background_t_hi = 288.0;   // K at visible intensity 255
    // radiance: L = (T^4 - lo^4) / (hi^4 - lo^4), clamped to [0, 1]
    double band_t_lo = 270.0;
    double band_t_hi = 370.0;
    // atmosphere
    double kappa_per_km = 0.0;  // extinction
    double path_radiance = 0.0; // normalized, [0, 1]
    // sensor chain
    std::vector<double> psf = {1.0}; // square kernel, psf_w x psf_w
    int psf_w = 1;
    double vignette_strength = 0.0; // gain 1 - s * (r / r_max)^2
    std::vector<double> gain;       // per pixel; empty = 1
    std::vector<double> offset;     // per pixel; empty = 0
    double noise_sigma = 0.0;       // additive, normalized units
    std::uint64_t noise_seed = 0;
    int adc_bits = 8;
};

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> px;
};

IrModel default_ir_model();

/// Visible frame + range map -> quantized IR frame. Throws on size mismatch
/// or a non-monotone LUT.
GrayImage ir_transform(const Image& frame, const std::vector<double>& range_m,
                       const IrModel& m);

/// Pre-quantization temperature of one visible pixel under the model.
double ir_pixel_temperature(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                            const IrModel& m);

} // namespace wams
