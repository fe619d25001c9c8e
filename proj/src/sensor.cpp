#include "wams/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wams {

namespace {
constexpr double kDeg = 3.14159265358979323846 / 180.0;
}

bool ImagerSpec::masked_in(int v, int h) const {
    if (v < 1 || v > n_v || h < 1 || h > n_h) return false;
    if (mask.empty()) return true;
    return mask[static_cast<std::size_t>(v - 1) * n_h + (h - 1)] != 0;
}

int ImagerSpec::active_cameras() const {
    if (mask.empty()) return n_v * n_h;
    int c = 0;
    for (std::uint8_t m : mask) c += m != 0;
    return c;
}

ImagerSpec argus_default() {
    ImagerSpec s;
    s.mask = calibrated_mask(s.n_v, s.n_h, s.n_cameras);
    return s;
}

ImagerSpec clif_preset() {
    ImagerSpec s;
    s.ps_h = 4008;
    s.ps_v = 2672;
    s.n_cameras = 6;
    s.n_h = 3;
    s.n_v = 2;
    return s;
}

ImagerSpec argus_desk() {
    ImagerSpec s;
    s.fov_deg = 54.0; // 18 deg spacing < 18.57 deg camera width: neighbors overlap
    s.ps_h = 324;
    s.ps_v = 243;
    s.delta_theta = 1.0e-3;
    s.n_cameras = 9;
    s.n_h = 3;
    s.n_v = 3;
    return s;
}

SubcameraPose subcamera_pose(int v, int h, const ImagerSpec& spec) {
    if (v < 1 || v > spec.n_v || h < 1 || h > spec.n_h)
        throw std::out_of_range("subcamera index outside the array");
    if (!spec.masked_in(v, h))
        throw std::invalid_argument("subcamera cell is masked out");
    SubcameraPose p;
    p.v = v;
    p.h = h;
    p.azimuth_deg = (spec.fov_deg / spec.n_h) * (h - 0.5) - spec.fov_deg / 2.0;
    p.elevation_deg = (spec.fov_deg / spec.n_v) * (v - 0.5) - spec.fov_deg / 2.0;
    p.roll_deg = 0.0;
    return p;
}

std::vector<std::uint8_t> ellipse_mask(int n_v, int n_h, double k) {
    std::vector<std::uint8_t> m(static_cast<std::size_t>(n_v) * n_h, 0);
    for (int v = 0; v < n_v; ++v) {
        for (int h = 0; h < n_h; ++h) {
            double y = (v + 0.5 - n_v / 2.0) / (n_v / 2.0);
            double x = (h + 0.5 - n_h / 2.0) / (n_h / 2.0);
            if (std::sqrt(x * x + y * y) <= k + 1e-12)
                m[static_cast<std::size_t>(v) * n_h + h] = 1;
        }
    }
    return m;
}

std::vector<std::uint8_t> calibrated_mask(int n_v, int n_h, int n_target,
                                          double* k_out, int* achieved) {
    std::vector<double> radii;
    radii.reserve(static_cast<std::size_t>(n_v) * n_h);
    for (int v = 0; v < n_v; ++v)
        for (int h = 0; h < n_h; ++h) {
            double y = (v + 0.5 - n_v / 2.0) / (n_v / 2.0);
            double x = (h + 0.5 - n_h / 2.0) / (n_h / 2.0);
            radii.push_back(std::sqrt(x * x + y * y));
        }
    std::vector<double> sorted = radii;
    std::sort(sorted.begin(), sorted.end());
    n_target = std::clamp(n_target, 1, static_cast<int>(sorted.size()));

    auto count_at = [&](double k) {
        return static_cast<int>(std::upper_bound(sorted.begin(), sorted.end(),
                                                 k + 1e-12) -
                                sorted.begin());
    };
    double k = sorted[n_target - 1];
    if (count_at(k) != n_target) {
        // radius ties make the exact count unreachable; take the nearest
        double best_k = k;
        int best_diff = std::abs(count_at(k) - n_target);
        for (double r : sorted) {
            int d = std::abs(count_at(r) - n_target);
            if (d < best_diff) {
                best_diff = d;
                best_k = r;
            }
        }
        k = best_k;
    }
    if (k_out) *k_out = k;
    if (achieved) *achieved = count_at(k);
    return ellipse_mask(n_v, n_h, k);
}

Footprint footprint(const SubcameraPose& pose, const PlatformPose& rig,
                    const ImagerSpec& spec, double terrain_z) {
    Footprint fp;
    double alt = rig.position.altitude - terrain_z;
    if (alt <= 0.0) return fp;

    double half_h = spec.ps_h * spec.delta_theta / 2.0; // rad
    double half_v = spec.ps_v * spec.delta_theta / 2.0;
    double az = pose.azimuth_deg * kDeg;
    double el = pose.elevation_deg * kDeg;
    double bank = rig.bank * kDeg;
    double pitch = rig.pitch * kDeg;
    double heading = rig.heading * kDeg;

    auto ground = [&](double dh, double dv) -> std::optional<Vec2> {
        // tangent-plane direction in the camera frame (boresight = -z)
        double u = std::tan(az + dh);
        double w = std::tan(el + dv);
        double ub = u * std::cos(bank) - w * std::sin(bank);
        double wb = u * std::sin(bank) + w * std::cos(bank);
        // pitch tilts the boresight off nadir about the camera x axis
        double y = wb * std::cos(pitch) + std::sin(pitch);
        double zc = wb * std::sin(pitch) - std::cos(pitch);
        if (zc >= -1e-9) return std::nullopt; // at or above the horizon
        double t = alt / -zc;
        double gx = ub * t;
        double gy = y * t;
        // heading, clockwise from north
        return Vec2{gx * std::cos(heading) + gy * std::sin(heading),
                    -gx * std::sin(heading) + gy * std::cos(heading)};
    };

    const double ch[4] = {-half_h, half_h, half_h, -half_h};
    const double cv[4] = {-half_v, -half_v, half_v, half_v};
    for (int i = 0; i < 4; ++i) {
        auto g = ground(ch[i], cv[i]);
        if (!g) return fp; // unbounded
        fp.corners.push_back(*g);
    }
    auto gc = ground(0.0, 0.0);
    if (!gc) return fp;
    fp.bounded = true;
    fp.center = *gc;
    fp.area = std::abs(signed_area(fp.corners));
    double gh = alt * spec.delta_theta / (std::cos(az) * std::cos(az));
    double gv = alt * spec.delta_theta / (std::cos(el + pitch) * std::cos(el + pitch));
    fp.center_gsd = std::sqrt(gh * gv);
    return fp;
}

double array_ground_radius(const ImagerSpec& spec) {
    return spec.z * std::tan(spec.fov_deg * kDeg / 2.0);
}

double array_ground_area(const ImagerSpec& spec) {
    double r = array_ground_radius(spec);
    return 3.14159265358979323846 * r * r;
}

std::uint64_t frame_bytes(const ImagerSpec& spec) {
    return static_cast<std::uint64_t>(spec.active_cameras()) * spec.ps_h * spec.ps_v * 3u;
}

std::optional<int> PatchLayout::patch_containing(const Vec2& lo, const Vec2& hi) const {
    for (int iy = 0; iy < patches_y; ++iy) {
        for (int ix = 0; ix < patches_x; ++ix) {
            Vec2 plo = origin + Vec2{ix * stride * polygon_m, iy * stride * polygon_m};
            Vec2 phi = plo + Vec2{patch_polys * polygon_m, patch_polys * polygon_m};
            if (lo.x >= plo.x && lo.y >= plo.y && hi.x <= phi.x && hi.y <= phi.y)
                return iy * patches_x + ix;
        }
    }
    return std::nullopt;
}

std::vector<RenderJob> build_batch(const std::vector<RenderJob>& jobs) {
    std::vector<RenderJob> out = jobs;
    std::stable_sort(out.begin(), out.end(), [](const RenderJob& a, const RenderJob& b) {
        return a.patch < b.patch;
    });
    return out;
}

int swap_count(const std::vector<RenderJob>& jobs) {
    int swaps = 0;
    for (std::size_t i = 1; i < jobs.size(); ++i)
        if (jobs[i].patch != jobs[i - 1].patch) ++swaps;
    return swaps;
}

std::vector<RenderJob> plan_batch(int frames, const ImagerSpec& spec,
                                  const PlatformPose& rig, const PatchLayout& layout,
                                  const Vec2& ground_pos, double terrain_z) {
    std::vector<RenderJob> jobs;
    for (int f = 0; f < frames; ++f) {
        for (int v = 1; v <= spec.n_v; ++v) {
            for (int h = 1; h <= spec.n_h; ++h) {
                if (!spec.masked_in(v, h)) continue;
                Footprint fp = footprint(subcamera_pose(v, h, spec), rig, spec, terrain_z);
                if (!fp.bounded)
                    throw std::runtime_error("subcamera footprint unbounded; job rejected");
                Vec2 lo = fp.corners[0] + ground_pos;
                Vec2 hi = lo;
                for (const Vec2& c : fp.corners) {
                    Vec2 p = c + ground_pos;
                    lo.x = std::min(lo.x, p.x);
                    lo.y = std::min(lo.y, p.y);
                    hi.x = std::max(hi.x, p.x);
                    hi.y = std::max(hi.y, p.y);
                }
                auto patch = layout.patch_containing(lo, hi);
                if (!patch)
                    throw std::runtime_error(
                        "subcamera footprint fits in no single texture patch");
                jobs.push_back({f, v, h, *patch});
            }
        }
    }
    return build_batch(jobs);
}

std::string job_list_to_string(const std::vector<RenderJob>& jobs) {
    std::ostringstream os;
    for (const RenderJob& j : jobs)
        os << j.frame << ' ' << j.v << ' ' << j.h << ' ' << j.patch << '\n';
    return os.str();
}

std::vector<RenderJob> job_list_from_string(const std::string& text) {
    std::vector<RenderJob> jobs;
    std::istringstream is(text);
    RenderJob j;
    while (is >> j.frame >> j.v >> j.h >> j.patch) jobs.push_back(j);
    return jobs;
}

} // namespace wams
