#include "wams/imaging.hpp"

#include "wams/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace wams {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDeg = kPi / 180.0;
} // namespace

Image::Image(int w, int h, std::array<std::uint8_t, 3> fill) : width(w), height(h) {
    px.resize(static_cast<std::size_t>(w) * h * 3);
    for (std::size_t i = 0; i < px.size(); i += 3) {
        px[i] = fill[0];
        px[i + 1] = fill[1];
        px[i + 2] = fill[2];
    }
}

bool images_equal(const Image& a, const Image& b) {
    return a.width == b.width && a.height == b.height && a.px == b.px;
}

// ---------------------------------------------------------------- TIFF I/O

namespace {

void put16(std::string& s, std::uint16_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>(v >> 8));
}
void put32(std::string& s, std::uint32_t v) {
    put16(s, static_cast<std::uint16_t>(v & 0xffff));
    put16(s, static_cast<std::uint16_t>(v >> 16));
}
void put_entry(std::string& s, std::uint16_t tag, std::uint16_t type,
               std::uint32_t count, std::uint32_t value) {
    put16(s, tag);
    put16(s, type);
    put32(s, count);
    put32(s, value);
}

std::uint16_t get16(const std::string& s, std::size_t off) {
    if (off + 2 > s.size()) throw std::runtime_error("tiff: truncated file");
    return static_cast<std::uint8_t>(s[off]) |
           (static_cast<std::uint16_t>(static_cast<std::uint8_t>(s[off + 1])) << 8);
}
std::uint32_t get32(const std::string& s, std::size_t off) {
    return get16(s, off) | (static_cast<std::uint32_t>(get16(s, off + 2)) << 16);
}

} // namespace

void write_tiff(const std::string& path, const Image& img) {
    const std::uint32_t data = static_cast<std::uint32_t>(img.px.size());
    const std::uint32_t bps_off = 8 + data;
    const std::uint32_t ifd_off = bps_off + 6;

    std::string out;
    out.reserve(ifd_off + 2 + 9 * 12 + 4);
    out += "II";
    put16(out, 42);
    put32(out, ifd_off);
    out.append(reinterpret_cast<const char*>(img.px.data()), data);
    put16(out, 8); // bits per sample, three channels
    put16(out, 8);
    put16(out, 8);
    put16(out, 9); // entry count
    put_entry(out, 256, 3, 1, static_cast<std::uint32_t>(img.width));
    put_entry(out, 257, 3, 1, static_cast<std::uint32_t>(img.height));
    put_entry(out, 258, 3, 3, bps_off);
    put_entry(out, 259, 3, 1, 1); // no compression
    put_entry(out, 262, 3, 1, 2); // RGB
    put_entry(out, 273, 4, 1, 8); // single strip at the fixed data offset
    put_entry(out, 277, 3, 1, 3);
    put_entry(out, 278, 3, 1, static_cast<std::uint32_t>(img.height));
    put_entry(out, 279, 4, 1, data);
    put32(out, 0); // no next IFD

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("tiff: cannot open for writing: " + path);
    os.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!os) throw std::runtime_error("tiff: write failed: " + path);
}

Image read_tiff(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("tiff: cannot open: " + path);
    std::string s((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());

    if (s.size() < 8 || s[0] != 'I' || s[1] != 'I' || get16(s, 2) != 42)
        throw std::runtime_error("tiff: not a little-endian tiff: " + path);
    std::size_t ifd = get32(s, 4);
    std::uint16_t n = get16(s, ifd);

    std::uint32_t w = 0, h = 0, strip = 0, bytes = 0, comp = 1, spp = 3;
    for (std::uint16_t i = 0; i < n; ++i) {
        std::size_t e = ifd + 2 + static_cast<std::size_t>(i) * 12;
        std::uint16_t tag = get16(s, e);
        std::uint16_t type = get16(s, e + 2);
        std::uint32_t value = type == 3 ? get16(s, e + 8) : get32(s, e + 8);
        switch (tag) {
        case 256: w = value; break;
        case 257: h = value; break;
        case 259: comp = value; break;
        case 273: strip = value; break;
        case 277: spp = value; break;
        case 279: bytes = value; break;
        default: break;
        }
    }
    if (comp != 1 || spp != 3)
        throw std::runtime_error("tiff: unsupported layout: " + path);
    if (bytes != w * h * 3 || strip + bytes > s.size())
        throw std::runtime_error("tiff: inconsistent strip: " + path);

    Image img(static_cast<int>(w), static_cast<int>(h));
    std::memcpy(img.px.data(), s.data() + strip, bytes);
    return img;
}

std::string frame_filename(int frame, int v, int h) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "f%06d_v%02d_h%02d.tif", frame, v, h);
    return buf;
}

std::string tile_filename(int frame, int row, int col) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "m%06d_r%02d_c%02d.tif", frame, row, col);
    return buf;
}

// --------------------------------------------------------- ground texture

namespace {
constexpr std::array<std::uint8_t, 3> kGrass = {76, 112, 52};
constexpr std::array<std::uint8_t, 3> kAsphalt = {70, 70, 70};
constexpr std::array<std::uint8_t, 3> kSidewalk = {152, 150, 144};
constexpr double kSidewalkWidth = 1.8;
} // namespace

std::array<std::uint8_t, 3> GroundTexture::sample(const Vec2& world) const {
    if (img.width == 0 || img.height == 0) return kGrass;
    int c = static_cast<int>(std::floor((world.x - origin.x) / m_per_px));
    int r = img.height - 1 - static_cast<int>(std::floor((world.y - origin.y) / m_per_px));
    c = std::clamp(c, 0, img.width - 1);
    r = std::clamp(r, 0, img.height - 1);
    const std::uint8_t* p = img.at(c, r);
    return {p[0], p[1], p[2]};
}

GroundTexture render_ground_texture(const RoadNetwork& roads, const Vec2& lo,
                                    const Vec2& hi, double m_per_px) {
    GroundTexture tex;
    tex.origin = lo;
    tex.m_per_px = m_per_px;
    int w = std::max(1, static_cast<int>(std::ceil((hi.x - lo.x) / m_per_px)));
    int h = std::max(1, static_cast<int>(std::ceil((hi.y - lo.y) / m_per_px)));
    tex.img = Image(w, h, kGrass);

    auto paint = [&](const std::vector<Vec2>& shape, double width,
                     std::array<std::uint8_t, 3> color, bool keep_asphalt) {
        Vec2 blo = shape[0], bhi = shape[0];
        for (const Vec2& p : shape) {
            blo.x = std::min(blo.x, p.x);
            blo.y = std::min(blo.y, p.y);
            bhi.x = std::max(bhi.x, p.x);
            bhi.y = std::max(bhi.y, p.y);
        }
        int c0 = std::max(0, static_cast<int>((blo.x - width - lo.x) / m_per_px));
        int c1 = std::min(w - 1, static_cast<int>((bhi.x + width - lo.x) / m_per_px) + 1);
        int r0 = std::max(0, h - 1 - static_cast<int>((bhi.y + width - lo.y) / m_per_px) - 1);
        int r1 = std::min(h - 1, h - 1 - static_cast<int>((blo.y - width - lo.y) / m_per_px) + 1);
        for (int r = r0; r <= r1; ++r) {
            double y = lo.y + (h - 1 - r + 0.5) * m_per_px;
            for (int c = c0; c <= c1; ++c) {
                double x = lo.x + (c + 0.5) * m_per_px;
                double d = 1e30;
                for (std::size_t i = 0; i + 1 < shape.size(); ++i)
                    d = std::min(d, point_segment_distance({x, y}, shape[i], shape[i + 1]));
                if (d > width) continue;
                std::uint8_t* p = tex.img.at(c, r);
                if (keep_asphalt && p[0] == kAsphalt[0] && p[1] == kAsphalt[1] &&
                    p[2] == kAsphalt[2])
                    continue;
                p[0] = color[0];
                p[1] = color[1];
                p[2] = color[2];
            }
        }
    };

    // sidewalks first so the carriageway paints over their inner half
    for (const auto& [eid, e] : roads.edges)
        if (e.sidewalk && e.shape.size() >= 2)
            paint(e.shape, e.half_width() + kSidewalkWidth, kSidewalk, false);
    for (const auto& [eid, e] : roads.edges)
        if (e.shape.size() >= 2) paint(e.shape, e.half_width(), kAsphalt, false);
    for (const auto& [nid, j] : roads.junctions) {
        Vec2 c = roads.nodes.at(nid);
        paint({c, c}, j.radius, kAsphalt, false);
    }
    return tex;
}

// ----------------------------------------------------------- tile helpers

std::vector<Image> cut_square_tiles(const Image& img, int tile) {
    int cols = (img.width + tile - 1) / tile;
    int rows = (img.height + tile - 1) / tile;
    std::vector<Image> out;
    out.reserve(static_cast<std::size_t>(cols) * rows);
    for (int tr = 0; tr < rows; ++tr) {
        for (int tc = 0; tc < cols; ++tc) {
            Image t(tile, tile);
            for (int y = 0; y < tile; ++y) {
                int sy = tr * tile + y;
                if (sy >= img.height) break;
                int n = std::min(tile, img.width - tc * tile);
                std::memcpy(t.at(0, y), img.at(tc * tile, sy),
                            static_cast<std::size_t>(n) * 3);
            }
            out.push_back(std::move(t));
        }
    }
    return out;
}

Image assemble_square_tiles(const std::vector<Image>& tiles, int cols, int tile) {
    int rows = static_cast<int>((tiles.size() + cols - 1) / cols);
    Image out(cols * tile, rows * tile);
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        int tr = static_cast<int>(i) / cols;
        int tc = static_cast<int>(i) % cols;
        for (int y = 0; y < tile; ++y)
            std::memcpy(out.at(tc * tile, tr * tile + y), tiles[i].at(0, y),
                        static_cast<std::size_t>(tile) * 3);
    }
    return out;
}

// ----------------------------------------------------------- scene render

RenderScene build_render_scene(const CityScene& scene, const Snapshot* snap,
                               const GroundTexture* texture, double terrain_z) {
    RenderScene rs;
    rs.texture = texture;

    Vec2 lo{1e30, 1e30}, hi{-1e30, -1e30};
    auto grow = [&](const Vec2& p) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    };
    for (const auto& [nid, p] : scene.roads.nodes) grow(p);
    for (const auto& [eid, e] : scene.roads.edges)
        for (const Vec2& p : e.shape) grow(p);
    for (const Building& b : scene.buildings)
        for (const Vec2& p : b.footprint.ring) grow(p);
    if (lo.x > hi.x) {
        lo = {-100.0, -100.0};
        hi = {100.0, 100.0};
    }
    lo = lo - Vec2{60.0, 60.0};
    hi = hi + Vec2{60.0, 60.0};

    std::int64_t next_id = 1;
    auto add = [&](MeshObject obj, char kind, std::array<std::uint8_t, 3> color) {
        rs.caster.objects.push_back(std::move(obj));
        rs.kinds.push_back(kind);
        rs.colors.push_back(color);
    };

    // terrain patches, at most ~200 m a side so the AABB culling has grain
    int nx = std::max(1, static_cast<int>(std::ceil((hi.x - lo.x) / 200.0)));
    int ny = std::max(1, static_cast<int>(std::ceil((hi.y - lo.y) / 200.0)));
    double sx = (hi.x - lo.x) / nx;
    double sy = (hi.y - lo.y) / ny;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            Vec2 plo = lo + Vec2{ix * sx, iy * sy};
            add(mesh_terrain_patch(plo, plo + Vec2{sx, sy}, terrain_z, next_id++), 't',
                kGrass);
        }

    for (const Building& b : scene.buildings) {
        if (b.footprint.ring.size() < 3) continue;
        std::uint8_t g = static_cast<std::uint8_t>(120 + (b.footprint.id * 37) % 60);
        add(mesh_prism(b.footprint.ring, terrain_z, b.height, next_id++), 'b', {g, g, g});
    }

    if (snap) {
        EntityBounds bounds;
        for (const EntityRecord& rec : snap->entities) {
            const double* ext = bounds.for_record(rec);
            std::array<std::uint8_t, 3> color{235, 45, 235}; // person
            if (rec.type == 'v') color = rec.state == "bus"
                                             ? std::array<std::uint8_t, 3>{215, 25, 215}
                                             : std::array<std::uint8_t, 3>{250, 60, 250};
            Vec2 d{std::cos(rec.heading), std::sin(rec.heading)};
            if (rec.type != 'v') d = {1.0, 0.0};
            Vec2 pr = d.perp_right();
            double hl = ext[0] / 2.0, hw = ext[1] / 2.0;
            std::vector<Vec2> ring = {rec.pos + d * hl + pr * hw, rec.pos + d * hl - pr * hw,
                                      rec.pos - d * hl - pr * hw, rec.pos - d * hl + pr * hw};
            if (signed_area(ring) < 0.0) std::reverse(ring.begin(), ring.end());
            add(mesh_prism(ring, terrain_z, ext[2], next_id++), 'e', color);
        }
    }
    return rs;
}

namespace {

/// World ray of pixel center (i, j); matches the footprint tangent-plane model.
Ray3 pixel_ray(int i, int j, const SubcameraPose& pose, const PlatformPose& rig,
               const ImagerSpec& spec, const Vec2& ground_pos) {
    double dh = (i + 0.5 - spec.ps_h / 2.0) * spec.delta_theta;
    double dv = (spec.ps_v / 2.0 - (j + 0.5)) * spec.delta_theta;
    double az = pose.azimuth_deg * kDeg;
    double el = pose.elevation_deg * kDeg;
    double bank = rig.bank * kDeg;
    double pitch = rig.pitch * kDeg;
    double heading = rig.heading * kDeg;

    double u = std::tan(az + dh);
    double w = std::tan(el + dv);
    double ub = u * std::cos(bank) - w * std::sin(bank);
    double wb = u * std::sin(bank) + w * std::cos(bank);
    double y = wb * std::cos(pitch) + std::sin(pitch);
    double zc = wb * std::sin(pitch) - std::cos(pitch);
    Vec3 d{ub * std::cos(heading) + y * std::sin(heading),
           -ub * std::sin(heading) + y * std::cos(heading), zc};
    Ray3 r;
    r.origin = {ground_pos.x, ground_pos.y, rig.position.altitude};
    r.dir = d.normalized();
    return r;
}

} // namespace

Image render_subcamera(const RenderScene& scene, const SubcameraPose& pose,
                       const PlatformPose& rig, const ImagerSpec& spec,
                       const Vec2& ground_pos) {
    Image img(spec.ps_h, spec.ps_v, scene.sky);
    for (int j = 0; j < spec.ps_v; ++j) {
        for (int i = 0; i < spec.ps_h; ++i) {
            Ray3 r = pixel_ray(i, j, pose, rig, spec, ground_pos);
            auto hit = scene.caster.first_hit(r);
            if (!hit) continue;
            std::array<std::uint8_t, 3> c = scene.colors[hit->object];
            if (scene.kinds[hit->object] == 't' && scene.texture) {
                Vec3 p = r.origin + r.dir * hit->distance;
                c = scene.texture->sample({p.x, p.y});
            }
            std::uint8_t* px = img.at(i, j);
            px[0] = c[0];
            px[1] = c[1];
            px[2] = c[2];
        }
    }
    return img;
}

std::vector<double> build_range_map(const RenderScene& scene, const SubcameraPose& pose,
                                    const PlatformPose& rig, const ImagerSpec& spec,
                                    const Vec2& ground_pos, double sky_range) {
    std::vector<double> out(static_cast<std::size_t>(spec.ps_h) * spec.ps_v, sky_range);
    for (int j = 0; j < spec.ps_v; ++j) {
        for (int i = 0; i < spec.ps_h; ++i) {
            Ray3 r = pixel_ray(i, j, pose, rig, spec, ground_pos);
            auto hit = scene.caster.first_hit(r);
            if (hit) out[static_cast<std::size_t>(j) * spec.ps_h + i] = hit->distance;
        }
    }
    return out;
}

// ----------------------------------------------------------- mosaic plane

MosaicPlane make_plane(const ImagerSpec& spec, std::optional<double> r_override) {
    MosaicPlane p;
    p.R = r_override ? *r_override : 1.0 / spec.delta_theta;
    p.fov_deg = spec.fov_deg;
    p.extent = static_cast<int>(std::ceil(2.0 * p.R * std::tan(spec.fov_deg * kDeg / 2.0)));
    return p;
}

Vec2 plane_from_angles(double theta_h, double theta_v, const MosaicPlane& plane) {
    return {plane.extent / 2.0 + plane.R * std::tan(theta_h),
            plane.extent / 2.0 - plane.R * std::tan(theta_v)};
}

std::pair<double, double> angles_from_plane(const Vec2& p, const MosaicPlane& plane) {
    return {std::atan((p.x - plane.extent / 2.0) / plane.R),
            std::atan((plane.extent / 2.0 - p.y) / plane.R)};
}

Vec2 Homography::apply(const Vec2& p) const {
    double w = m[6] * p.x + m[7] * p.y + m[8];
    return {(m[0] * p.x + m[1] * p.y + m[2]) / w, (m[3] * p.x + m[4] * p.y + m[5]) / w};
}

double Homography::det() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Homography Homography::inverse() const {
    double d = det();
    if (std::abs(d) < 1e-300) throw std::runtime_error("homography is singular");
    Homography h;
    h.m[0] = (m[4] * m[8] - m[5] * m[7]) / d;
    h.m[1] = (m[2] * m[7] - m[1] * m[8]) / d;
    h.m[2] = (m[1] * m[5] - m[2] * m[4]) / d;
    h.m[3] = (m[5] * m[6] - m[3] * m[8]) / d;
    h.m[4] = (m[0] * m[8] - m[2] * m[6]) / d;
    h.m[5] = (m[2] * m[3] - m[0] * m[5]) / d;
    h.m[6] = (m[3] * m[7] - m[4] * m[6]) / d;
    h.m[7] = (m[1] * m[6] - m[0] * m[7]) / d;
    h.m[8] = (m[0] * m[4] - m[1] * m[3]) / d;
    return h;
}

namespace {

/// Homography through four point pairs (DLT with h33 = 1).
Homography solve_homography(const Vec2 src[4], const Vec2 dst[4]) {
    double a[8][9] = {};
    for (int i = 0; i < 4; ++i) {
        double x = src[i].x, y = src[i].y, u = dst[i].x, v = dst[i].y;
        double* r0 = a[2 * i];
        double* r1 = a[2 * i + 1];
        r0[0] = x; r0[1] = y; r0[2] = 1; r0[6] = -u * x; r0[7] = -u * y; r0[8] = u;
        r1[3] = x; r1[4] = y; r1[5] = 1; r1[6] = -v * x; r1[7] = -v * y; r1[8] = v;
    }
    for (int c = 0; c < 8; ++c) {
        int piv = c;
        for (int r = c + 1; r < 8; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (std::abs(a[piv][c]) < 1e-12)
            throw std::runtime_error("degenerate corner correspondence");
        std::swap(a[c], a[piv]);
        for (int r = 0; r < 8; ++r) {
            if (r == c) continue;
            double f = a[r][c] / a[c][c];
            for (int k = c; k < 9; ++k) a[r][k] -= f * a[c][k];
        }
    }
    Homography h;
    for (int i = 0; i < 8; ++i) h.m[i] = a[i][8] / a[i][i];
    h.m[8] = 1.0;
    return h;
}

Homography corner_homography(const SubcameraPose& pose, const ImagerSpec& spec,
                             const MosaicPlane& plane, int w, int h) {
    double az = pose.azimuth_deg * kDeg;
    double el = pose.elevation_deg * kDeg;
    Vec2 src[4] = {{0, 0},
                   {static_cast<double>(w), 0},
                   {static_cast<double>(w), static_cast<double>(h)},
                   {0, static_cast<double>(h)}};
    Vec2 dst[4];
    for (int i = 0; i < 4; ++i) {
        double th = az + (src[i].x - w / 2.0) * spec.delta_theta;
        double tv = el + (h / 2.0 - src[i].y) * spec.delta_theta;
        if (std::abs(th) >= kPi / 2.0 - 1e-9 || std::abs(tv) >= kPi / 2.0 - 1e-9)
            throw std::runtime_error("frame corner at or beyond the mosaic horizon");
        dst[i] = plane_from_angles(th, tv, plane);
    }
    return solve_homography(src, dst);
}

} // namespace

WarpedImage warp_to_mosaic(const Image& frame, const SubcameraPose& pose,
                           const ImagerSpec& spec, const MosaicPlane& plane) {
    WarpedImage out;
    out.pose = pose;
    out.to_plane = corner_homography(pose, spec, plane, frame.width, frame.height);
    Homography inv = out.to_plane.inverse();

    Vec2 corners[4] = {{0, 0},
                       {static_cast<double>(frame.width), 0},
                       {static_cast<double>(frame.width), static_cast<double>(frame.height)},
                       {0, static_cast<double>(frame.height)}};
    double x0 = 1e30, y0 = 1e30, x1 = -1e30, y1 = -1e30;
    for (const Vec2& c : corners) {
        Vec2 p = out.to_plane.apply(c);
        x0 = std::min(x0, p.x);
        y0 = std::min(y0, p.y);
        x1 = std::max(x1, p.x);
        y1 = std::max(y1, p.y);
    }
    out.x0 = std::max(0, static_cast<int>(std::floor(x0)));
    out.y0 = std::max(0, static_cast<int>(std::floor(y0)));
    int x2 = std::min(plane.extent, static_cast<int>(std::ceil(x1)));
    int y2 = std::min(plane.extent, static_cast<int>(std::ceil(y1)));
    int w = std::max(0, x2 - out.x0);
    int h = std::max(0, y2 - out.y0);
    out.img = Image(w, h);
    out.mask.assign(static_cast<std::size_t>(w) * h, 0);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            Vec2 s = inv.apply({out.x0 + x + 0.5, out.y0 + y + 0.5});
            int si = static_cast<int>(std::floor(s.x));
            int sj = static_cast<int>(std::floor(s.y));
            if (si < 0 || si >= frame.width || sj < 0 || sj >= frame.height) continue;
            std::memcpy(out.img.at(x, y), frame.at(si, sj), 3);
            out.mask[static_cast<std::size_t>(y) * w + x] = 1;
        }
    }
    return out;
}

double mean_warp_scale(const SubcameraPose& pose, const ImagerSpec& spec,
                       const MosaicPlane& plane) {
    Homography hg = corner_homography(pose, spec, plane, spec.ps_h, spec.ps_v);
    double d = std::abs(hg.det());
    double sum = 0.0;
    int n = 0;
    for (int j = 0; j <= 10; ++j) {
        for (int i = 0; i <= 10; ++i) {
            double x = spec.ps_h * i / 10.0;
            double y = spec.ps_v * j / 10.0;
            double w = hg.m[6] * x + hg.m[7] * y + hg.m[8];
            sum += std::sqrt(d / std::abs(w * w * w));
            ++n;
        }
    }
    return sum / n;
}

// ------------------------------------------------------------ compositing

namespace {

/// Plane pixel (x, y) under the nearest-boresight rule; first warp wins ties.
bool compose_pixel(const std::vector<WarpedImage>& warps, const MosaicPlane& plane,
                   int x, int y, std::uint8_t out[3]) {
    auto [th, tv] = angles_from_plane({x + 0.5, y + 0.5}, plane);
    const WarpedImage* best = nullptr;
    double best_d = 0.0;
    const std::uint8_t* best_px = nullptr;
    for (const WarpedImage& wi : warps) {
        int lx = x - wi.x0;
        int ly = y - wi.y0;
        if (lx < 0 || lx >= wi.img.width || ly < 0 || ly >= wi.img.height) continue;
        if (!wi.mask[static_cast<std::size_t>(ly) * wi.img.width + lx]) continue;
        double dh = th - wi.pose.azimuth_deg * kDeg;
        double dv = tv - wi.pose.elevation_deg * kDeg;
        double d = dh * dh + dv * dv;
        if (!best || d < best_d) {
            best = &wi;
            best_d = d;
            best_px = wi.img.at(lx, ly);
        }
    }
    if (!best) return false;
    std::memcpy(out, best_px, 3);
    return true;
}

} // namespace

TileSet stitch_tiles(const std::vector<WarpedImage>& warps, const MosaicPlane& plane,
                     std::array<std::uint8_t, 3> fill) {
    TileSet ts;
    ts.tile = plane.tile;
    ts.cols = (plane.extent + plane.tile - 1) / plane.tile;
    ts.rows = ts.cols;
    for (int tr = 0; tr < ts.rows; ++tr) {
        for (int tc = 0; tc < ts.cols; ++tc) {
            Image t(plane.tile, plane.tile, fill);
            bool any = false;
            for (int y = 0; y < plane.tile; ++y) {
                int py = tr * plane.tile + y;
                if (py >= plane.extent) break;
                for (int x = 0; x < plane.tile; ++x) {
                    int px = tc * plane.tile + x;
                    if (px >= plane.extent) break;
                    if (compose_pixel(warps, plane, px, py, t.at(x, y))) any = true;
                }
            }
            if (any)
                ts.tiles.emplace(std::make_pair(tr, tc), std::move(t));
            else
                ts.holes.emplace_back(tr, tc);
        }
    }
    return ts;
}

Image concatenate(const TileSet& ts, const MosaicPlane& plane,
                  std::array<std::uint8_t, 3> fill) {
    Image out(plane.extent, plane.extent, fill);
    for (const auto& [rc, tile] : ts.tiles) {
        int px0 = rc.second * ts.tile;
        int py0 = rc.first * ts.tile;
        for (int y = 0; y < ts.tile && py0 + y < plane.extent; ++y) {
            int n = std::min(ts.tile, plane.extent - px0);
            std::memcpy(out.at(px0, py0 + y), tile.at(0, y), static_cast<std::size_t>(n) * 3);
        }
    }
    return out;
}

Image compose_direct(const std::vector<WarpedImage>& warps, const MosaicPlane& plane,
                     std::array<std::uint8_t, 3> fill) {
    Image out(plane.extent, plane.extent, fill);
    for (int y = 0; y < plane.extent; ++y)
        for (int x = 0; x < plane.extent; ++x) compose_pixel(warps, plane, x, y, out.at(x, y));
    return out;
}

// -------------------------------------------------------------- infrared

IrModel default_ir_model() {
    IrModel m;
    m.magenta_lut.resize(256);
    for (int i = 0; i < 256; ++i) m.magenta_lut[i] = 293.0 + 47.0 * i / 255.0;
    return m;
}

double ir_pixel_temperature(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                            const IrModel& m) {
    if (!m.magenta_lut.empty() && r > g + 40 && b > g + 40)
        return m.magenta_lut[std::min<std::size_t>(r, m.magenta_lut.size() - 1)];
    double intensity = (r + g + b) / 3.0;
    return m.background_t_lo + (m.background_t_hi - m.background_t_lo) * intensity / 255.0;
}

namespace {

double band_radiance(double t, const IrModel& m) {
    double lo4 = std::pow(m.band_t_lo, 4.0);
    double hi4 = std::pow(m.band_t_hi, 4.0);
    return std::clamp((std::pow(t, 4.0) - lo4) / (hi4 - lo4), 0.0, 1.0);
}

} // namespace

GrayImage ir_transform(const Image& frame, const std::vector<double>& range_m,
                       const IrModel& m) {
    const std::size_t n = static_cast<std::size_t>(frame.width) * frame.height;
    if (range_m.size() != n)
        throw std::invalid_argument("ir: range map size does not match the frame");
    for (std::size_t i = 1; i < m.magenta_lut.size(); ++i)
        if (m.magenta_lut[i] < m.magenta_lut[i - 1])
            throw std::invalid_argument("ir: temperature lookup must be monotone");
    if (!m.gain.empty() && m.gain.size() != n)
        throw std::invalid_argument("ir: gain map size does not match the frame");
    if (!m.offset.empty() && m.offset.size() != n)
        throw std::invalid_argument("ir: offset map size does not match the frame");
    if (m.psf_w < 1 || m.psf.size() != static_cast<std::size_t>(m.psf_w) * m.psf_w)
        throw std::invalid_argument("ir: psf kernel must be psf_w x psf_w");

    std::vector<double> field(n);
    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) {
            const std::uint8_t* p = frame.at(x, y);
            double rad = band_radiance(ir_pixel_temperature(p[0], p[1], p[2], m), m);
            std::size_t i = static_cast<std::size_t>(y) * frame.width + x;
            if (m.kappa_per_km != 0.0 || m.path_radiance != 0.0) {
                double tau = std::exp(-m.kappa_per_km * range_m[i] / 1000.0);
                rad = rad * tau + m.path_radiance * (1.0 - tau);
            }
            field[i] = rad;
        }
    }

    if (m.psf_w > 1) {
        double ksum = 0.0;
        for (double k : m.psf) ksum += k;
        if (ksum <= 0.0) throw std::invalid_argument("ir: psf kernel sums to zero");
        std::vector<double> blurred(n);
        int half = m.psf_w / 2;
        for (int y = 0; y < frame.height; ++y) {
            for (int x = 0; x < frame.width; ++x) {
                double acc = 0.0;
                for (int ky = 0; ky < m.psf_w; ++ky) {
                    int sy = std::clamp(y + ky - half, 0, frame.height - 1);
                    for (int kx = 0; kx < m.psf_w; ++kx) {
                        int sx = std::clamp(x + kx - half, 0, frame.width - 1);
                        acc += m.psf[static_cast<std::size_t>(ky) * m.psf_w + kx] *
                               field[static_cast<std::size_t>(sy) * frame.width + sx];
                    }
                }
                blurred[static_cast<std::size_t>(y) * frame.width + x] = acc / ksum;
            }
        }
        field.swap(blurred);
    }

    Rng noise(m.noise_seed);
    const double cx = (frame.width - 1) / 2.0;
    const double cy = (frame.height - 1) / 2.0;
    const double r_max2 = cx * cx + cy * cy;
    const int levels = (1 << m.adc_bits) - 1;
    GrayImage out;
    out.width = frame.width;
    out.height = frame.height;
    out.px.resize(n);
    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) {
            std::size_t i = static_cast<std::size_t>(y) * frame.width + x;
            double v = field[i];
            if (m.vignette_strength != 0.0 && r_max2 > 0.0) {
                double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                v *= 1.0 - m.vignette_strength * r2 / r_max2;
            }
            if (!m.gain.empty()) v *= m.gain[i];
            if (!m.offset.empty()) v += m.offset[i];
            if (m.noise_sigma > 0.0) v += noise.normal(0.0, m.noise_sigma);
            long q = std::lround(v * levels);
            out.px[i] = static_cast<std::uint16_t>(std::clamp(q, 0l, static_cast<long>(levels)));
        }
    }
    return out;
}

} // namespace wams
