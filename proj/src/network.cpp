#include "wams/network.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace wams {

const char* to_string(RoadClass c) {
    switch (c) {
        case RoadClass::Motorway: return "motorway";
        case RoadClass::Primary: return "primary";
        case RoadClass::Secondary: return "secondary";
        case RoadClass::Residential: return "residential";
        case RoadClass::Service: return "service";
        default: return "other";
    }
}

const char* to_string(BuildingClass c) {
    switch (c) {
        case BuildingClass::Residential: return "residential";
        case BuildingClass::Commercial: return "commercial";
        case BuildingClass::Industrial: return "industrial";
        case BuildingClass::Civic: return "civic";
        default: return "other";
    }
}

int default_lanes(RoadClass c) {
    switch (c) {
        case RoadClass::Motorway: return 3;
        case RoadClass::Primary: return 2;
        case RoadClass::Secondary: return 2;
        case RoadClass::Residential: return 1;
        case RoadClass::Service: return 1;
        default: return 1;
    }
}

void PathNetwork::relabel_components() {
    component.clear();
    std::map<NodeId, std::vector<NodeId>> adj;
    for (const auto& [id, e] : edges) {
        adj[e.from].push_back(e.to);
        adj[e.to].push_back(e.from);
    }
    int label = 0;
    for (const auto& [nid, pos] : nodes) {
        if (component.count(nid)) continue;
        // BFS flood fill
        std::vector<NodeId> stack{nid};
        component[nid] = label;
        while (!stack.empty()) {
            NodeId n = stack.back();
            stack.pop_back();
            auto it = adj.find(n);
            if (it == adj.end()) continue;
            for (NodeId m : it->second) {
                if (!component.count(m)) {
                    component[m] = label;
                    stack.push_back(m);
                }
            }
        }
        ++label;
    }
}

PolylineHit nearest_on_polyline(const Vec2& p, const std::vector<Vec2>& pts) {
    PolylineHit best;
    best.distance = std::numeric_limits<double>::max();
    double arc = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double t = 0.0;
        double d = point_segment_distance(p, pts[i], pts[i + 1], &t);
        double seg_len = dist(pts[i], pts[i + 1]);
        if (d < best.distance) {
            best.distance = d;
            best.arc = arc + t * seg_len;
            best.point = pts[i] + (pts[i + 1] - pts[i]) * t;
            best.segment = i;
        }
        arc += seg_len;
    }
    if (pts.size() == 1) {
        best = {dist(p, pts[0]), 0.0, pts[0], 0};
    }
    return best;
}

namespace {

struct Snap {
    EdgeId edge = 0;
    PolylineHit hit;
};

Snap snap_to_net(const PathNetwork& net, const Vec2& p) {
    Snap best;
    double bd = std::numeric_limits<double>::max();
    for (const auto& [id, e] : net.edges) {
        PolylineHit h = nearest_on_polyline(p, e.shape);
        if (h.distance < bd) {
            bd = h.distance;
            best = {id, h};
        }
    }
    return best;
}

std::vector<Vec2> sub_polyline(const std::vector<Vec2>& pts, double s0, double s1) {
    // portion of a polyline between arc lengths s0 < s1
    std::vector<Vec2> out;
    out.push_back(polyline_at(pts, s0));
    double arc = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double d = dist(pts[i], pts[i + 1]);
        double a1 = arc + d;
        if (a1 > s0 + 1e-9 && a1 < s1 - 1e-9) out.push_back(pts[i + 1]);
        arc = a1;
        if (arc >= s1) break;
    }
    out.push_back(polyline_at(pts, s1));
    return out;
}

} // namespace

std::optional<std::vector<Vec2>> route_on_paths(const PathNetwork& net,
                                                const Vec2& from, const Vec2& to) {
    if (net.edges.empty()) return std::nullopt;
    Snap sa = snap_to_net(net, from);
    Snap sb = snap_to_net(net, to);
    const PathEdge& ea = net.edges.at(sa.edge);
    const PathEdge& eb = net.edges.at(sb.edge);
    if (net.component.count(ea.from) && net.component.count(eb.from) &&
        net.component.at(ea.from) != net.component.at(eb.from))
        return std::nullopt;

    if (sa.edge == sb.edge) {
        double s0 = std::min(sa.hit.arc, sb.hit.arc);
        double s1 = std::max(sa.hit.arc, sb.hit.arc);
        std::vector<Vec2> mid = sub_polyline(ea.shape, s0, s1);
        if (sa.hit.arc > sb.hit.arc) std::reverse(mid.begin(), mid.end());
        std::vector<Vec2> out{from};
        out.insert(out.end(), mid.begin(), mid.end());
        out.push_back(to);
        return out;
    }

    // Dijkstra over nodes, seeded from both endpoints of the snapped edges.
    std::map<NodeId, std::vector<std::pair<EdgeId, NodeId>>> adj;
    for (const auto& [id, e] : net.edges) {
        adj[e.from].push_back({id, e.to});
        adj[e.to].push_back({id, e.from});
    }
    std::map<NodeId, double> dist_to;
    std::map<NodeId, std::pair<NodeId, EdgeId>> prev; // node -> (prev node, via edge)
    using QE = std::pair<double, NodeId>;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> q;
    double la = ea.length();
    auto seed = [&](NodeId n, double d) {
        if (!dist_to.count(n) || d < dist_to[n]) {
            dist_to[n] = d;
            q.push({d, n});
        }
    };
    seed(ea.from, sa.hit.arc);
    seed(ea.to, la - sa.hit.arc);
    while (!q.empty()) {
        auto [d, n] = q.top();
        q.pop();
        if (d > dist_to[n] + 1e-12) continue;
        for (auto [eid, m] : adj[n]) {
            double nd = d + net.edges.at(eid).length();
            if (!dist_to.count(m) || nd < dist_to[m] - 1e-12) {
                dist_to[m] = nd;
                prev[m] = {n, eid};
                q.push({nd, m});
            }
        }
    }

    double lb = eb.length();
    double best = std::numeric_limits<double>::max();
    NodeId entry = 0;
    bool entry_is_from = true;
    if (dist_to.count(eb.from) && dist_to.at(eb.from) + sb.hit.arc < best) {
        best = dist_to.at(eb.from) + sb.hit.arc;
        entry = eb.from;
        entry_is_from = true;
    }
    if (dist_to.count(eb.to) && dist_to.at(eb.to) + (lb - sb.hit.arc) < best) {
        best = dist_to.at(eb.to) + (lb - sb.hit.arc);
        entry = eb.to;
        entry_is_from = false;
    }
    if (best == std::numeric_limits<double>::max()) return std::nullopt;

    // node chain from a seed node to `entry`
    std::vector<std::pair<NodeId, EdgeId>> chain; // (node, edge arrived by)
    NodeId n = entry;
    while (prev.count(n)) {
        chain.push_back({n, prev[n].second});
        n = prev[n].first;
    }
    std::reverse(chain.begin(), chain.end());
    NodeId first_node = n; // one of ea.from / ea.to

    std::vector<Vec2> out{from};
    auto append = [&out](const std::vector<Vec2>& pts) {
        for (const Vec2& p : pts) {
            if (out.empty() || dist(out.back(), p) > 1e-9) out.push_back(p);
        }
    };
    // partial first edge: snapped point -> first_node
    if (first_node == ea.from) {
        std::vector<Vec2> part = sub_polyline(ea.shape, 0.0, sa.hit.arc);
        std::reverse(part.begin(), part.end());
        append(part);
    } else {
        append(sub_polyline(ea.shape, sa.hit.arc, la));
    }
    // full edges along the chain
    NodeId cur = first_node;
    for (auto& [node, eid] : chain) {
        const PathEdge& e = net.edges.at(eid);
        std::vector<Vec2> pts = e.shape;
        if (e.from != cur) std::reverse(pts.begin(), pts.end());
        append(pts);
        cur = node;
    }
    // partial last edge: entry -> snapped point
    if (entry_is_from) {
        append(sub_polyline(eb.shape, 0.0, sb.hit.arc));
    } else {
        std::vector<Vec2> part = sub_polyline(eb.shape, sb.hit.arc, lb);
        std::reverse(part.begin(), part.end());
        append(part);
    }
    out.push_back(to);
    return out;
}

double network_walk_distance(const PathNetwork& net, const Vec2& from, const Vec2& to) {
    auto r = route_on_paths(net, from, to);
    if (!r) return std::numeric_limits<double>::infinity();
    return polyline_length(*r);
}

std::optional<std::vector<EdgeId>> route_on_roads(const RoadNetwork& net,
                                                  NodeId from, NodeId to) {
    if (from == to) return std::vector<EdgeId>{};
    std::map<NodeId, std::vector<std::pair<EdgeId, NodeId>>> adj;
    for (const auto& [id, e] : net.edges) {
        adj[e.from].push_back({id, e.to});
        adj[e.to].push_back({id, e.from}); // one lane per direction
    }
    std::map<NodeId, double> dist_to{{from, 0.0}};
    std::map<NodeId, std::pair<NodeId, EdgeId>> prev;
    using QE = std::pair<double, NodeId>;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> q;
    q.push({0.0, from});
    while (!q.empty()) {
        auto [d, n] = q.top();
        q.pop();
        if (d > dist_to[n] + 1e-12) continue;
        if (n == to) break;
        for (auto [eid, m] : adj[n]) {
            double nd = d + net.edges.at(eid).length();
            if (!dist_to.count(m) || nd < dist_to[m] - 1e-12) {
                dist_to[m] = nd;
                prev[m] = {n, eid};
                q.push({nd, m});
            }
        }
    }
    if (!dist_to.count(to)) return std::nullopt;
    std::vector<EdgeId> out;
    NodeId n = to;
    while (n != from) {
        out.push_back(prev[n].second);
        n = prev[n].first;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

} // namespace wams
