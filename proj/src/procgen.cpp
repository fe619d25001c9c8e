#include "wams/procgen.hpp"

#include "wams/rng.hpp"

namespace wams {

namespace {

BuildingClass draw_class(Rng& rng) {
    double u = rng.uniform01();
    if (u < 0.70) return BuildingClass::Residential;
    if (u < 0.85) return BuildingClass::Commercial;
    if (u < 0.92) return BuildingClass::Industrial;
    if (u < 0.97) return BuildingClass::Civic;
    return BuildingClass::Other;
}

BuildingFootprint rect(std::int64_t id, Vec2 lo, Vec2 hi, BuildingClass cls) {
    return {id, {{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}}, cls};
}

} // namespace

GridCity generate_grid_city(const GridCityConfig& cfg, std::uint64_t seed) {
    GridCity city;
    city.utm_zone = cfg.utm_zone;
    const double B = cfg.block;
    const Vec2 org{cfg.origin_easting, cfg.origin_northing};

    auto nid = [&](int r, int c) {
        return static_cast<NodeId>(r * (cfg.cols + 1) + c + 1);
    };
    for (int r = 0; r <= cfg.rows; ++r)
        for (int c = 0; c <= cfg.cols; ++c)
            city.roads.nodes[nid(r, c)] = org + Vec2{c * B, r * B};

    EdgeId next_edge = 1;
    auto add_edge = [&](NodeId a, NodeId b) {
        RoadEdge e;
        e.id = next_edge;
        e.from = a;
        e.to = b;
        e.lanes = 1;
        e.road_class = RoadClass::Residential;
        e.sidewalk = true;
        e.shape = {city.roads.nodes.at(a), city.roads.nodes.at(b)};
        city.roads.edges[next_edge++] = e;
    };
    for (int r = 0; r <= cfg.rows; ++r)
        for (int c = 0; c < cfg.cols; ++c) add_edge(nid(r, c), nid(r, c + 1));
    for (int r = 0; r < cfg.rows; ++r)
        for (int c = 0; c <= cfg.cols; ++c) add_edge(nid(r, c), nid(r + 1, c));

    detect_junctions(city.roads);
    OsmConfig ocfg;
    generate_sidewalks(city.roads, city.paths, ocfg);
    city.paths.relabel_components();

    // buildings line the inside of each block, front walls behind the sidewalk
    const double corridor = 1 * ocfg.lane_width + ocfg.sidewalk_margin; // half_width + margin
    const double front = corridor + cfg.setback;
    std::int64_t next_b = 1;
    auto place = [&](Vec2 lo, Vec2 hi) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(next_b)));
        BuildingClass cls = draw_class(rng);
        city.buildings.push_back(rect(next_b++, lo, hi, cls));
    };
    for (int r = 0; r < cfg.rows; ++r) {
        for (int c = 0; c < cfg.cols; ++c) {
            Vec2 cell = org + Vec2{c * B, r * B};
            for (int k = 0; k < cfg.per_long_side; ++k) {
                double xc = cell.x + B * (k + 1) / (cfg.per_long_side + 1);
                Rng rng(mix_seed(seed ^ 0x5b1d, static_cast<std::uint64_t>(next_b)));
                double w = rng.uniform(cfg.min_side, cfg.max_side);
                double d = rng.uniform(cfg.min_side, cfg.max_side);
                // south side
                place({xc - w / 2, cell.y + front}, {xc + w / 2, cell.y + front + d});
                // north side
                place({xc - w / 2, cell.y + B - front - d}, {xc + w / 2, cell.y + B - front});
            }
            for (int k = 0; k < cfg.per_short_side; ++k) {
                double yc = cell.y + B * (k + 1) / (cfg.per_short_side + 1);
                Rng rng(mix_seed(seed ^ 0x77aa, static_cast<std::uint64_t>(next_b)));
                double w = rng.uniform(cfg.min_side, cfg.max_side);
                double d = rng.uniform(cfg.min_side, cfg.max_side);
                // west side
                place({cell.x + front, yc - w / 2}, {cell.x + front + d, yc + w / 2});
                // east side
                place({cell.x + B - front - d, yc - w / 2}, {cell.x + B - front, yc + w / 2});
            }
            if (cfg.center_buildings) {
                Vec2 mid = cell + Vec2{B / 2, B / 2};
                city.buildings.push_back(rect(next_b, {mid.x - 8, mid.y - 8},
                                              {mid.x + 8, mid.y + 8}, BuildingClass::Other));
                ++next_b;
            }
        }
    }
    return city;
}

} // namespace wams
