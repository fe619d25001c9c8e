#include "wams/journey.hpp"

#include <algorithm>
#include <limits>

namespace wams {

namespace {

struct PlanResult {
    double cost = std::numeric_limits<double>::max();
    std::vector<BusLegChoice> legs;
};

struct Planner {
    const Vec2& dest;
    const std::vector<BusRoute>& routes;
    const std::map<std::int64_t, TransferPoint>& tps;
    std::map<std::pair<std::int64_t, int>, PlanResult> memo; // (stop tp id, legs left)

    const Vec2& stop_pos(int r, int idx) const {
        return tps.at(routes[r].stops[idx]).wait_point;
    }

    PlanResult solve(const Vec2& pos, std::int64_t pos_tp, int legs_left) {
        if (pos_tp >= 0) {
            auto it = memo.find({pos_tp, legs_left});
            if (it != memo.end()) return it->second;
        }
        PlanResult best;
        best.cost = dist(pos, dest); // finish on foot
        best.legs.clear();
        if (legs_left > 0) {
            for (int r = 0; r < static_cast<int>(routes.size()); ++r) {
                int S = static_cast<int>(routes[r].stops.size());
                for (int m = 0; m < S; ++m) {
                    double board = dist(pos, stop_pos(r, m));
                    for (int n = 0; n < S; ++n) {
                        if (n == m) continue;
                        PlanResult tail =
                            solve(stop_pos(r, n), routes[r].stops[n], legs_left - 1);
                        double total = board + tail.cost;
                        if (total < best.cost) {
                            int fwd = (n - m + S) % S;
                            int bwd = (m - n + S) % S;
                            BusLegChoice leg{r, m, n, fwd <= bwd, board};
                            best.cost = total;
                            best.legs.clear();
                            best.legs.push_back(leg);
                            best.legs.insert(best.legs.end(), tail.legs.begin(),
                                             tail.legs.end());
                        }
                    }
                }
            }
        }
        if (pos_tp >= 0) memo[{pos_tp, legs_left}] = best;
        return best;
    }
};

} // namespace

std::vector<BusLegChoice> select_bus_legs(const Vec2& start, const Vec2& dest,
                                          const std::vector<BusRoute>& routes,
                                          const std::map<std::int64_t, TransferPoint>& tps,
                                          int max_legs) {
    if (routes.empty() || max_legs < 1) return {};
    Planner pl{dest, routes, tps, {}};
    PlanResult best = pl.solve(start, -1, max_legs);
    double direct = dist(start, dest);
    if (best.legs.empty() || best.cost >= direct) return {};
    return best.legs;
}

double plan_walk_cost(const Vec2& start, const Vec2& dest,
                      const std::vector<BusLegChoice>& plan,
                      const std::vector<BusRoute>& routes,
                      const std::map<std::int64_t, TransferPoint>& tps) {
    if (plan.empty()) return dist(start, dest);
    double cost = 0.0;
    Vec2 pos = start;
    for (const BusLegChoice& leg : plan) {
        const Vec2& board = tps.at(routes[leg.r].stops[leg.m]).wait_point;
        cost += dist(pos, board);
        pos = tps.at(routes[leg.r].stops[leg.n]).wait_point;
    }
    return cost + dist(pos, dest);
}

Mode choose_mode(bool owns_vehicle, double direct_walk_dist, double bus_plan_walk,
                 bool bus_plan_exists, const JourneyConfig& cfg) {
    if (owns_vehicle) return Mode::Drive;
    if (direct_walk_dist <= cfg.walk_threshold) return Mode::Walk;
    if (bus_plan_exists && bus_plan_walk < cfg.bus_advantage * direct_walk_dist)
        return Mode::BusWalk;
    return Mode::Walk;
}

std::vector<std::vector<CarsharePassenger>>
carshare_plan(const Vec2& origin, const std::vector<CarsharePassenger>& passengers,
              std::int64_t driver) {
    std::vector<std::vector<CarsharePassenger>> vehicles;
    for (std::size_t i = 0; i < passengers.size(); i += 5) {
        std::vector<CarsharePassenger> group(
            passengers.begin() + i,
            passengers.begin() + std::min(i + 5, passengers.size()));
        // nearest-next ordering from the shared origin
        std::vector<CarsharePassenger> ordered;
        Vec2 pos = origin;
        while (!ordered.empty() || !group.empty()) {
            if (group.empty()) break;
            std::size_t best = 0;
            double bd = std::numeric_limits<double>::max();
            for (std::size_t k = 0; k < group.size(); ++k) {
                if (group[k].person == driver) continue; // driver alights last
                double d = dist(pos, group[k].dest);
                if (d < bd) {
                    bd = d;
                    best = k;
                }
            }
            if (bd == std::numeric_limits<double>::max()) best = 0; // only the driver left
            ordered.push_back(group[best]);
            pos = group[best].dest;
            group.erase(group.begin() + best);
        }
        vehicles.push_back(std::move(ordered));
    }
    return vehicles;
}

} // namespace wams
