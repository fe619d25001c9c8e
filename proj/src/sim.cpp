#include "wams/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace wams {

const Building* CityScene::building(std::int64_t id) const {
    for (const Building& b : buildings)
        if (b.footprint.id == id) return &b;
    return nullptr;
}

const TransferPoint* CityScene::transfer(std::int64_t id) const {
    auto it = tps.find(id);
    return it == tps.end() ? nullptr : &it->second;
}

const char* to_string(PersonState s) {
    switch (s) {
        case PersonState::WaitInBuilding: return "WAIT_IN_BUILDING";
        case PersonState::WalkFootpath: return "WALK_FOOTPATH";
        case PersonState::WalkInNetwork: return "WALK_IN_NETWORK";
        case PersonState::WaitForVehicle: return "WAIT_FOR_VEHICLE";
        case PersonState::EnterVehicle: return "ENTER_VEHICLE";
        case PersonState::InVehicle: return "IN_VEHICLE";
        case PersonState::ExitVehicle: return "EXIT_VEHICLE";
        case PersonState::WaitAtStop: return "WAIT_AT_STOP";
        case PersonState::RideBus: return "RIDE_BUS";
        case PersonState::WalkToGateway: return "WALK_TO_GATEWAY";
        case PersonState::Done: return "DONE";
        default: return "ABORTED";
    }
}

namespace {

Vec2 stop_world_point(const TransferPoint& tp) { return tp.stop_point; }

} // namespace

Simulation::Simulation(const CityScene& scene, std::vector<Person> persons,
                       std::vector<Trip> trips, std::vector<BusRoute> routes,
                       const SimConfig& cfg)
    : scene_(scene), cfg_(cfg), routes_(std::move(routes)) {
    world_.roads = &scene_.roads;
    for (const auto& [nid, j] : scene_.roads.junctions) {
        SignalPlan sp;
        sp.junction = nid;
        sp.offset = std::fmod(static_cast<double>(nid) * 7.0, 35.0); // staggered
        world_.signals[nid] = sp;
    }

    for (Person& pm : persons) {
        PersonSim p;
        p.meta = pm;
        p.building = pm.home;
        const Building* home = scene_.building(pm.home);
        p.pos = home ? home->doorway : Vec2{};
        persons_[pm.id] = std::move(p);
    }
    std::sort(trips.begin(), trips.end(), [](const Trip& a, const Trip& b) {
        return a.start_time < b.start_time ||
               (a.start_time == b.start_time && a.person < b.person);
    });
    for (const Trip& t : trips) persons_[t.person].trips.push_back(t);

    // bus fleet: one vehicle per route, parked at its first stop
    for (std::size_t r = 0; r < routes_.size(); ++r) {
        BusRoute& route = routes_[r];
        if (route.stops.size() < 2) continue;
        BusSim bs;
        bs.route = static_cast<int>(r);
        for (std::int64_t tid : route.stops) {
            const TransferPoint& tp = *scene_.transfer(tid);
            bs.stops.push_back({tp_lane(tp), tp_lane_pos(tp), tid, {}});
        }
        VehicleState bus;
        bus.id = next_vid_++;
        bus.type = VehicleType::Bus;
        bus.lane = bs.stops[0].lane;
        bus.pos = bs.stops[0].pos;
        bus.phase = VehiclePhase::StoppedAtStop;
        bus.stop_pos = bs.stops[0].pos;
        bus.idm = cfg_.idm;
        bs.vid = bus.id;
        bs.at_stop = true;
        bs.dwell_until = cfg_.journey.dwell_min;
        route.vehicle = bus.id;
        world_.vehicles[bus.id] = bus;
        emit("SPAWN_VEHICLE", bus.id, stop_world_point(*scene_.transfer(route.stops[0])),
             {{"type", "bus"}, {"route", std::to_string(route.route_id)}});

        if (route.driver >= 0 && persons_.count(route.driver)) {
            PersonSim& drv = persons_[route.driver];
            drv.state = PersonState::InVehicle;
            drv.outside = true;
            drv.bound_vehicle = bus.id;
            drv.pos = stop_world_point(*scene_.transfer(route.stops[0]));
        }
        bs.next = 1 % bs.stops.size();
        buses_.push_back(bs);
    }
}

void Simulation::emit(const std::string& kind, std::int64_t subject, Vec2 pos,
                      std::map<std::string, std::string> meta) {
    events_.push_back({world_.time, pos, kind, subject, std::move(meta)});
}

void Simulation::transition(PersonSim& p, PersonState to) {
    if (p.state == to) return;
    emit("STATE_TRANSITION", p.meta.id, p.pos,
         {{"from", to_string(p.state)}, {"to", to_string(to)}});
    p.state = to;
}

LaneRef Simulation::tp_lane(const TransferPoint& tp) const {
    return {tp.road_edge, tp.forward};
}

double Simulation::tp_lane_pos(const TransferPoint& tp) const {
    double L = scene_.roads.edges.at(tp.road_edge).length();
    return tp.forward ? tp.road_arc : L - tp.road_arc;
}

std::optional<std::vector<LaneRef>> Simulation::lane_route(const TransferPoint& from,
                                                           const TransferPoint& to,
                                                           double* start_pos,
                                                           double* end_pos) const {
    LaneRef fl = tp_lane(from);
    LaneRef tl = tp_lane(to);
    double fp = tp_lane_pos(from);
    double tpos = tp_lane_pos(to);
    if (start_pos) *start_pos = fp;
    if (end_pos) *end_pos = tpos;
    if (fl == tl && tpos >= fp) return std::vector<LaneRef>{};

    const RoadEdge& fe = scene_.roads.edges.at(fl.edge);
    const RoadEdge& te = scene_.roads.edges.at(tl.edge);
    NodeId fnode = fl.forward ? fe.to : fe.from;
    NodeId tnode = tl.forward ? te.from : te.to;
    if (fnode == tnode) return std::vector<LaneRef>{tl};
    auto edges = route_on_roads(scene_.roads, fnode, tnode);
    if (!edges) return std::nullopt;
    std::vector<LaneRef> lanes;
    NodeId cur = fnode;
    for (EdgeId eid : *edges) {
        const RoadEdge& e = scene_.roads.edges.at(eid);
        bool fwd = e.from == cur;
        lanes.push_back({eid, fwd});
        cur = fwd ? e.to : e.from;
    }
    lanes.push_back(tl);
    return lanes;
}

std::int64_t Simulation::spawn_car(const TransferPoint& at, std::int64_t driver,
                                   VehicleType type) {
    VehicleState v;
    v.id = next_vid_++;
    v.type = type;
    v.lane = tp_lane(at);
    v.pos = tp_lane_pos(at);
    v.phase = VehiclePhase::StoppedAtStop;
    v.stop_pos = v.pos;
    v.idm = cfg_.idm;
    world_.vehicles[v.id] = v;
    emit("SPAWN_VEHICLE", v.id, stop_world_point(at),
         {{"type", to_string(type)}, {"driver", std::to_string(driver)}});
    return v.id;
}

std::optional<std::vector<Simulation::Leg>>
Simulation::plan_legs(const PersonSim&, const Building& from, const Building& to,
                      Mode mode) {
    std::vector<Leg> legs;
    auto walk_leg = [&](std::vector<Vec2> path, PersonState tag) {
        Leg l;
        l.kind = Leg::Kind::Walk;
        l.path = std::move(path);
        l.tag = tag;
        legs.push_back(std::move(l));
    };
    walk_leg(from.footpath, PersonState::WalkFootpath);

    auto network_walk = [&](Vec2 a, Vec2 b) -> bool {
        if (dist(a, b) < 1e-9) return true;
        auto r = route_on_paths(scene_.paths, a, b);
        if (!r) return false;
        walk_leg(*r, PersonState::WalkInNetwork);
        return true;
    };

    if (mode == Mode::Walk) {
        if (!network_walk(from.gateway, to.gateway)) return std::nullopt;
    } else if (mode == Mode::Drive) {
        const TransferPoint* otp = from.transfer_id ? scene_.transfer(*from.transfer_id)
                                                    : nullptr;
        const TransferPoint* dtp = to.transfer_id ? scene_.transfer(*to.transfer_id)
                                                  : nullptr;
        if (!otp || !dtp) return std::nullopt;
        if (!lane_route(*otp, *dtp, nullptr, nullptr)) return std::nullopt;
        if (!network_walk(from.gateway, otp->wait_point)) return std::nullopt;
        Leg spawn;
        spawn.kind = Leg::Kind::Spawn;
        spawn.tp = otp->id;
        legs.push_back(spawn);
        Leg ride;
        ride.kind = Leg::Kind::Ride;
        ride.board_tp = otp->id;
        ride.alight_tp = dtp->id;
        ride.path = {otp->wait_point, stop_world_point(*otp)}; // walk to the door
        legs.push_back(ride);
        walk_leg({stop_world_point(*dtp), dtp->wait_point}, PersonState::ExitVehicle);
        if (!network_walk(dtp->wait_point, to.gateway)) return std::nullopt;
    } else { // bus + walk
        auto plan = select_bus_legs(from.gateway, to.gateway, routes_, scene_.tps,
                                    cfg_.journey.max_legs);
        if (plan.empty()) return std::nullopt;
        Vec2 cur = from.gateway;
        for (const BusLegChoice& leg : plan) {
            const TransferPoint& board = *scene_.transfer(routes_[leg.r].stops[leg.m]);
            const TransferPoint& alight = *scene_.transfer(routes_[leg.r].stops[leg.n]);
            if (!network_walk(cur, board.wait_point)) return std::nullopt;
            Leg ride;
            ride.kind = Leg::Kind::Ride;
            ride.route = leg.r;
            ride.board_tp = board.id;
            ride.alight_tp = alight.id;
            ride.path = {board.wait_point, stop_world_point(board)};
            legs.push_back(ride);
            walk_leg({stop_world_point(alight), alight.wait_point},
                     PersonState::ExitVehicle);
            cur = alight.wait_point;
        }
        if (!network_walk(cur, to.gateway)) return std::nullopt;
    }

    std::vector<Vec2> fp_in(to.footpath.rbegin(), to.footpath.rend());
    walk_leg(fp_in, PersonState::WalkToGateway);
    return legs;
}

void Simulation::start_trip(PersonSim& p, const Trip& trip) {
    const Building* from = scene_.building(trip.origin);
    const Building* to = scene_.building(trip.destination);
    if (!from || !to || !from->routable || !to->routable || p.building != trip.origin) {
        emit("ABORT_JOURNEY", p.meta.id, p.pos, {{"reason", "unroutable trip"}});
        ++aborted_;
        return;
    }

    double direct = std::numeric_limits<double>::max();
    if (auto r = route_on_paths(scene_.paths, from->gateway, to->gateway))
        direct = polyline_length(*r) + polyline_length(from->footpath) +
                 polyline_length(to->footpath);
    auto bus_plan = select_bus_legs(from->gateway, to->gateway, routes_, scene_.tps,
                                    cfg_.journey.max_legs);
    double bus_walk = plan_walk_cost(from->gateway, to->gateway, bus_plan, routes_,
                                     scene_.tps);
    Mode mode = choose_mode(p.meta.owns_vehicle, direct, bus_walk, !bus_plan.empty(),
                            cfg_.journey);

    auto legs = plan_legs(p, *from, *to, mode);
    if (!legs && mode != Mode::Walk) {
        mode = Mode::Walk;
        legs = plan_legs(p, *from, *to, mode);
    }
    if (!legs) {
        emit("ABORT_JOURNEY", p.meta.id, p.pos, {{"reason", "no feasible plan"}});
        ++aborted_;
        return;
    }

    p.legs = std::move(*legs);
    p.leg = 0;
    p.dest_building = trip.destination;
    p.outside = true;
    p.pos = from->doorway;
    emit("LEAVE_BUILDING", p.meta.id, p.pos,
         {{"building", std::to_string(trip.origin)},
          {"task", to_string(trip.task)}});
    p.building = -1;

    // owner's car, optionally shared with co-departing housemates
    if (mode == Mode::Drive) {
        const TransferPoint& otp = *scene_.transfer(*from->transfer_id);
        const Building* own_dest = scene_.building(trip.destination);
        const TransferPoint& dtp = *scene_.transfer(*own_dest->transfer_id);
        std::int64_t cid = -(static_cast<std::int64_t>(p.meta.id) + 1);
        CarSim car;
        car.vid = cid; // placeholder until the vehicle materializes
        car.driver = p.meta.id;
        for (Leg& l : p.legs)
            if (l.kind == Leg::Kind::Ride) l.vehicle = cid;

        std::vector<CarsharePassenger> riders;
        if (cfg_.enable_carshare) {
            for (auto& [pid, q] : persons_) {
                if (static_cast<int>(riders.size()) >= 4) break;
                if (pid == p.meta.id || q.outside || q.meta.owns_vehicle) continue;
                if (q.state != PersonState::WaitInBuilding &&
                    q.state != PersonState::Done)
                    continue;
                if (q.next_trip >= q.trips.size()) continue;
                const Trip& qt = q.trips[q.next_trip];
                if (qt.origin != trip.origin) continue;
                if (qt.start_time > world_.time + cfg_.carshare_window) continue;
                const Building* qdest = scene_.building(qt.destination);
                if (!qdest || !qdest->routable || !qdest->transfer_id) continue;
                const TransferPoint* qtp = scene_.transfer(*qdest->transfer_id);
                if (!qtp || !lane_route(otp, *qtp, nullptr, nullptr)) continue;
                riders.push_back({pid, stop_world_point(*qtp)});
            }
        }

        auto groups = carshare_plan(stop_world_point(otp), [&] {
            auto r = riders;
            r.push_back({p.meta.id, stop_world_point(dtp)});
            return r;
        }(), p.meta.id);
        // only the first vehicle exists here; later groups would need more owners
        for (const CarsharePassenger& cp : groups[0]) {
            std::int64_t dest_tp;
            if (cp.person == p.meta.id) {
                dest_tp = dtp.id;
            } else {
                PersonSim& q = persons_[cp.person];
                const Trip& qt = q.trips[q.next_trip];
                dest_tp = *scene_.building(qt.destination)->transfer_id;
            }
            bool merged = false;
            for (CarStop& st : car.stops)
                if (st.tp == dest_tp) {
                    st.alighters.push_back(cp.person);
                    merged = true;
                }
            if (!merged) {
                const TransferPoint& tp = *scene_.transfer(dest_tp);
                car.stops.push_back({tp_lane(tp), tp_lane_pos(tp), dest_tp, {cp.person}});
            }
        }
        car.pending_boarders.push_back(p.meta.id);

        // launch the riders of vehicle one on their own leg plans
        for (const CarsharePassenger& cp : groups[0]) {
            if (cp.person == p.meta.id) continue;
            PersonSim& q = persons_[cp.person];
            const Trip& qt = q.trips[q.next_trip];
            const Building* qfrom = scene_.building(qt.origin);
            const Building* qto = scene_.building(qt.destination);
            const TransferPoint* qtp = scene_.transfer(*qto->transfer_id);
            std::vector<Leg> qlegs;
            Leg l;
            l.kind = Leg::Kind::Walk;
            l.path = qfrom->footpath;
            l.tag = PersonState::WalkFootpath;
            qlegs.push_back(l);
            if (dist(qfrom->gateway, otp.wait_point) > 1e-9) {
                auto r = route_on_paths(scene_.paths, qfrom->gateway, otp.wait_point);
                if (!r) continue;
                Leg w;
                w.kind = Leg::Kind::Walk;
                w.path = *r;
                w.tag = PersonState::WalkInNetwork;
                qlegs.push_back(w);
            }
            Leg ride;
            ride.kind = Leg::Kind::Ride;
            ride.vehicle = cid; // placeholder id, fixed at spawn
            ride.board_tp = otp.id;
            ride.alight_tp = *qto->transfer_id;
            ride.path = {otp.wait_point, stop_world_point(otp)};
            qlegs.push_back(ride);
            Leg ex;
            ex.kind = Leg::Kind::Walk;
            ex.path = {stop_world_point(*qtp), qtp->wait_point};
            ex.tag = PersonState::ExitVehicle;
            qlegs.push_back(ex);
            if (dist(qtp->wait_point, qto->gateway) > 1e-9) {
                auto r = route_on_paths(scene_.paths, qtp->wait_point, qto->gateway);
                if (!r) continue;
                Leg w;
                w.kind = Leg::Kind::Walk;
                w.path = *r;
                w.tag = PersonState::WalkInNetwork;
                qlegs.push_back(w);
            }
            Leg in;
            in.kind = Leg::Kind::Walk;
            in.path = std::vector<Vec2>(qto->footpath.rbegin(), qto->footpath.rend());
            in.tag = PersonState::WalkToGateway;
            qlegs.push_back(in);

            q.legs = std::move(qlegs);
            q.leg = 0;
            q.dest_building = qt.destination;
            q.outside = true;
            q.pos = qfrom->doorway;
            ++q.next_trip;
            emit("LEAVE_BUILDING", q.meta.id, q.pos,
                 {{"building", std::to_string(qt.origin)},
                  {"task", to_string(qt.task)},
                  {"carshare", "1"}});
            q.building = -1;
            car.pending_boarders.push_back(cp.person);
            begin_leg(q);
        }
        cars_[cid] = car;
    }

    begin_leg(p);
}

void Simulation::begin_leg(PersonSim& p) {
    if (p.leg >= p.legs.size()) {
        finish_journey(p);
        return;
    }
    Leg& l = p.legs[p.leg];
    switch (l.kind) {
        case Leg::Kind::Walk:
            p.walker = {};
            p.walker.polyline = l.path;
            p.walker.speed = p.meta.walk_speed;
            transition(p, l.tag);
            if (l.path.size() < 2 || polyline_length(l.path) < 1e-9) {
                ++p.leg;
                begin_leg(p);
            }
            break;
        case Leg::Kind::Spawn:
            transition(p, PersonState::WaitForVehicle);
            p.wait_since = world_.time;
            break;
        case Leg::Kind::Ride:
            if (p.bound_vehicle >= 0) {
                transition(p, l.route >= 0 ? PersonState::RideBus : PersonState::InVehicle);
            } else if (l.route >= 0) {
                transition(p, PersonState::WaitAtStop);
                p.wait_since = world_.time;
                stop_queue_[l.board_tp].push_back(p.meta.id);
            } else {
                transition(p, PersonState::WaitForVehicle);
                p.wait_since = world_.time;
            }
            break;
    }
}

void Simulation::finish_journey(PersonSim& p) {
    p.outside = false;
    p.building = p.dest_building;
    transition(p, PersonState::Done);
    emit("ENTER_BUILDING", p.meta.id, p.pos,
         {{"building", std::to_string(p.dest_building)}});
    ++completed_;
}

void Simulation::abort_journey(PersonSim& p, const std::string& why) {
    transition(p, PersonState::Aborted);
    emit("ABORT_JOURNEY", p.meta.id, p.pos, {{"reason", why}});
    ++aborted_;
}

void Simulation::advance_person(PersonSim& p) {
    if (!p.outside) return;
    if (p.state == PersonState::Aborted) return;
    if (p.leg >= p.legs.size()) return;
    Leg& l = p.legs[p.leg];

    // attached to a moving vehicle: copy its position every tick
    if (p.bound_vehicle >= 0 && p.state != PersonState::EnterVehicle) {
        auto it = world_.vehicles.find(p.bound_vehicle);
        if (it == world_.vehicles.end() || it->second.phase == VehiclePhase::Despawned) {
            abort_journey(p, "vehicle despawned underneath");
            return;
        }
        p.pos = world_.vehicle_position(it->second);
        return;
    }

    switch (l.kind) {
        case Leg::Kind::Walk:
            p.pos = walk_step(p.walker, cfg_.dt);
            if (p.walker.done) {
                ++p.leg;
                begin_leg(p);
            }
            break;
        case Leg::Kind::Spawn:
            if (world_.time - p.wait_since > cfg_.wait_timeout)
                abort_journey(p, "vehicle spawn starved");
            break; // the car service owns spawn + boarding
        case Leg::Kind::Ride:
            if (p.state == PersonState::EnterVehicle) {
                p.pos = walk_step(p.walker, cfg_.dt);
                if (p.walker.done) {
                    p.bound_vehicle = l.vehicle;
                    auto& veh = world_.vehicles.at(l.vehicle);
                    veh.passengers.push_back(p.meta.id);
                    emit("BOARD_VEHICLE", p.meta.id, p.pos,
                         {{"vehicle", std::to_string(l.vehicle)}});
                    transition(p, l.route >= 0 ? PersonState::RideBus
                                               : PersonState::InVehicle);
                }
            } else if (world_.time - p.wait_since > cfg_.wait_timeout) {
                abort_journey(p, "ride never arrived");
            }
            break;
    }
}

void Simulation::service_cars() {
    std::vector<std::int64_t> done;
    for (auto& [cid, car] : cars_) {
        PersonSim& drv = persons_[car.driver];

        // spawn once the driver stands at the wait point
        if (cid < 0) {
            if (drv.state != PersonState::WaitForVehicle || drv.leg >= drv.legs.size() ||
                drv.legs[drv.leg].kind != Leg::Kind::Spawn)
                continue;
            const TransferPoint& tp = *scene_.transfer(drv.legs[drv.leg].tp);
            if (!insertion_clear(world_, tp_lane(tp), tp_lane_pos(tp), cfg_.idm))
                continue; // "only add a vehicle if safe to do so"
            std::int64_t vid = spawn_car(tp, car.driver, VehicleType::Car);
            CarSim real = car;
            real.vid = vid;
            // rewrite placeholder ride targets
            auto fix_rides = [&](PersonSim& q) {
                for (Leg& leg : q.legs)
                    if (leg.kind == Leg::Kind::Ride && leg.vehicle == cid)
                        leg.vehicle = vid;
            };
            fix_rides(drv);
            for (std::int64_t pid : real.pending_boarders) fix_rides(persons_[pid]);
            // the driver's Spawn leg completes into the Ride leg; start the
            // door walk for everyone already standing at the wait point
            ++drv.leg; // move onto the Ride leg
            done.push_back(cid);
            cars_[vid] = real;
            break; // restart iteration next tick (map mutated)
        }

        auto& veh = world_.vehicles.at(car.vid);

        if (!car.moving) {
            // boarding: trigger door walks, depart when everyone is in
            bool all_aboard = true;
            for (std::int64_t pid : car.pending_boarders) {
                PersonSim& q = persons_[pid];
                if (q.bound_vehicle == car.vid) continue;
                all_aboard = false;
                if (q.leg < q.legs.size() && q.legs[q.leg].kind == Leg::Kind::Ride &&
                    q.legs[q.leg].vehicle == car.vid &&
                    q.state == PersonState::WaitForVehicle) {
                    // at the wait point? start walking to the door
                    const Leg& rl = q.legs[q.leg];
                    if (dist(q.pos, rl.path.front()) < 0.5) {
                        q.walker = {};
                        q.walker.polyline = rl.path;
                        q.walker.speed = q.meta.walk_speed;
                        transition(q, PersonState::EnterVehicle);
                    }
                }
                if (q.state == PersonState::Aborted) all_aboard = true; // give up on them
            }
            if (all_aboard && car.next < car.stops.size()) {
                car.pending_boarders.clear();
                const TransferPoint& from_tp = *scene_.transfer(
                    car.next == 0 ? car.stops[0].tp : car.stops[car.next - 1].tp);
                (void)from_tp;
                // route from the current lane position to the next stop
                const CarStop& st = car.stops[car.next];
                TransferPoint here;
                here.road_edge = veh.lane.edge;
                here.forward = veh.lane.forward;
                here.road_arc = veh.lane.forward
                                    ? veh.pos
                                    : scene_.roads.edges.at(veh.lane.edge).length() -
                                          veh.pos;
                const TransferPoint& to_tp = *scene_.transfer(st.tp);
                auto lanes = lane_route(here, to_tp, nullptr, nullptr);
                if (!lanes) {
                    for (std::int64_t pid : veh.passengers)
                        abort_journey(persons_[pid], "no drivable route");
                    veh.phase = VehiclePhase::Despawned;
                    done.push_back(cid);
                    continue;
                }
                veh.route = *lanes;
                veh.stop_pos.reset();
                veh.phase = VehiclePhase::Driving;
                car.moving = true;
            }
        } else {
            const CarStop& st = car.stops[car.next];
            if (veh.route.empty() && veh.lane == st.lane && !veh.stop_pos)
                veh.stop_pos = st.pos;
            bool arrived = veh.phase == VehiclePhase::StoppedAtStop &&
                           veh.lane == st.lane && std::abs(veh.pos - st.pos) < 0.6;
            if (arrived) {
                for (std::int64_t pid : st.alighters) {
                    PersonSim& q = persons_[pid];
                    if (q.bound_vehicle != car.vid) continue;
                    q.bound_vehicle = -1;
                    auto& plist = veh.passengers;
                    plist.erase(std::remove(plist.begin(), plist.end(), pid),
                                plist.end());
                    q.pos = stop_world_point(*scene_.transfer(st.tp));
                    emit("ALIGHT_VEHICLE", pid, q.pos,
                         {{"vehicle", std::to_string(car.vid)}});
                    ++q.leg;
                    begin_leg(q);
                }
                car.moving = false;
                ++car.next;
                if (car.next >= car.stops.size()) {
                    veh.phase = VehiclePhase::Despawned;
                    emit("DESPAWN_VEHICLE", car.vid,
                         stop_world_point(*scene_.transfer(st.tp)), {});
                    done.push_back(cid);
                }
            }
        }
    }
    for (std::int64_t cid : done) cars_.erase(cid);
}

void Simulation::service_buses() {
    for (BusSim& bs : buses_) {
        auto& veh = world_.vehicles.at(bs.vid);
        const BusRoute& route = routes_[bs.route];

        if (bs.at_stop) {
            std::size_t here = (bs.next + bs.stops.size() - 1) % bs.stops.size();
            const CarStop& st = bs.stops[here];
            // alight first
            std::vector<std::int64_t> plist = veh.passengers;
            int moves = 0;
            for (std::int64_t pid : plist) {
                PersonSim& q = persons_[pid];
                if (q.leg >= q.legs.size()) continue;
                const Leg& l = q.legs[q.leg];
                if (l.kind != Leg::Kind::Ride || l.alight_tp != st.tp) continue;
                q.bound_vehicle = -1;
                auto& vp = veh.passengers;
                vp.erase(std::remove(vp.begin(), vp.end(), pid), vp.end());
                q.pos = stop_world_point(*scene_.transfer(st.tp));
                emit("ALIGHT_VEHICLE", pid, q.pos,
                     {{"vehicle", std::to_string(bs.vid)}});
                ++q.leg;
                begin_leg(q);
                ++moves;
            }
            // commit boarders for this route FIFO within capacity
            auto& queue = stop_queue_[st.tp];
            for (auto it = queue.begin(); it != queue.end();) {
                if (static_cast<int>(veh.passengers.size() + bs.boarding.size()) >=
                    route.capacity)
                    break;
                PersonSim& q = persons_[*it];
                if (q.leg >= q.legs.size() || q.legs[q.leg].kind != Leg::Kind::Ride ||
                    q.state == PersonState::Aborted) {
                    it = queue.erase(it); // stale entry
                    continue;
                }
                Leg& l = q.legs[q.leg];
                if (l.route != bs.route || q.state != PersonState::WaitAtStop) {
                    ++it; // waiting for another route, or not arrived yet
                    continue;
                }
                l.vehicle = bs.vid;
                q.walker = {};
                q.walker.polyline = l.path;
                q.walker.speed = q.meta.walk_speed;
                transition(q, PersonState::EnterVehicle);
                bs.boarding.push_back(*it);
                it = queue.erase(it);
                ++moves;
            }
            if (moves > 0)
                bs.dwell_until = std::max(
                    bs.dwell_until, world_.time + std::max(cfg_.journey.dwell_min,
                                                           cfg_.journey.dwell_per_person *
                                                               moves));
            // depart when dwell has elapsed and every boarder is inside
            bool boarding_done = true;
            for (std::int64_t pid : bs.boarding) {
                PersonSim& q = persons_[pid];
                if (q.bound_vehicle != bs.vid && q.state != PersonState::Aborted)
                    boarding_done = false;
            }
            if (world_.time >= bs.dwell_until && boarding_done) {
                bs.boarding.clear();
                const CarStop& nx = bs.stops[bs.next];
                TransferPoint here_tp;
                here_tp.road_edge = veh.lane.edge;
                here_tp.forward = veh.lane.forward;
                here_tp.road_arc = veh.lane.forward
                                       ? veh.pos
                                       : scene_.roads.edges.at(veh.lane.edge).length() -
                                             veh.pos;
                auto lanes = lane_route(here_tp, *scene_.transfer(nx.tp), nullptr,
                                        nullptr);
                if (lanes) {
                    veh.route = *lanes;
                    veh.stop_pos.reset();
                    veh.phase = VehiclePhase::Driving;
                    bs.at_stop = false;
                    emit("DEPART_STOP", bs.vid, world_.vehicle_position(veh),
                         {{"stop", std::to_string(st.tp)}});
                }
            }
        } else {
            const CarStop& st = bs.stops[bs.next];
            if (veh.route.empty() && veh.lane == st.lane && !veh.stop_pos)
                veh.stop_pos = st.pos;
            bool arrived = veh.phase == VehiclePhase::StoppedAtStop &&
                           veh.lane == st.lane && std::abs(veh.pos - st.pos) < 0.6;
            if (arrived) {
                emit("ARRIVE_STOP", bs.vid, world_.vehicle_position(veh),
                     {{"stop", std::to_string(st.tp)}});
                bs.at_stop = true;
                bs.dwell_until = world_.time + cfg_.journey.dwell_min;
                bs.next = (bs.next + 1) % bs.stops.size();
            }
        }
    }
}

void Simulation::record_snapshot() {
    Snapshot snap;
    snap.time = world_.time;
    for (const auto& [vid, v] : world_.vehicles) {
        if (v.phase == VehiclePhase::Despawned) continue;
        EntityRecord r;
        r.type = 'v';
        r.id = vid;
        r.pos = world_.vehicle_position(v);
        r.heading = world_.vehicle_heading(v);
        r.speed = v.speed;
        r.state = to_string(v.type);
        snap.entities.push_back(r);
    }
    for (const auto& [pid, p] : persons_) {
        if (!p.outside) continue; // only recorded outdoors
        EntityRecord r;
        r.type = 'p';
        r.id = pid;
        r.pos = p.pos;
        r.speed = p.bound_vehicle >= 0 ? 0.0 : p.walker.speed;
        r.state = to_string(p.state);
        r.vehicle = p.bound_vehicle;
        snap.entities.push_back(r);
    }
    snapshots_.push_back(std::move(snap));
}

void Simulation::step() {
    auto traffic_events = step_traffic(world_, cfg_.dt);
    for (const TrafficEvent& te : traffic_events) {
        if (te.kind == "collision-imminent")
            emit("COLLISION_IMMINENT", te.vehicle, {}, {});
    }

    service_buses();
    service_cars();

    for (auto& [pid, p] : persons_) {
        // launch due trips
        if (!p.outside &&
            (p.state == PersonState::WaitInBuilding || p.state == PersonState::Done) &&
            p.next_trip < p.trips.size() &&
            p.trips[p.next_trip].start_time <= world_.time) {
            Trip t = p.trips[p.next_trip];
            ++p.next_trip;
            start_trip(p, t);
        }
        advance_person(p);
    }

    // pedestrians physically on a junction block its traffic
    world_.occupied_crossings.clear();
    for (const auto& [pid, p] : persons_) {
        if (!p.outside || p.bound_vehicle >= 0) continue;
        for (const auto& [nid, j] : scene_.roads.junctions)
            if (dist(p.pos, scene_.roads.nodes.at(nid)) <= j.radius)
                world_.occupied_crossings.insert(nid);
    }

    record_snapshot();
}

void Simulation::run() {
    int steps = static_cast<int>(cfg_.duration / cfg_.dt + 0.5);
    for (int i = 0; i < steps; ++i) step();
}

void write_timestep_xml(std::ostream& os, const Snapshot& snap) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "<timestep t=\"%.3f\">\n", snap.time);
    os << buf;
    for (const EntityRecord& r : snap.entities) {
        if (r.type == 'v') {
            std::snprintf(buf, sizeof buf,
                          "  <vehicle id=\"%lld\" type=\"%s\" x=\"%.3f\" y=\"%.3f\" "
                          "heading=\"%.4f\" speed=\"%.3f\"/>\n",
                          static_cast<long long>(r.id), r.state.c_str(), r.pos.x,
                          r.pos.y, r.heading, r.speed);
        } else if (r.vehicle >= 0) {
            std::snprintf(buf, sizeof buf,
                          "  <person id=\"%lld\" x=\"%.3f\" y=\"%.3f\" state=\"%s\" "
                          "vehicle=\"%lld\"/>\n",
                          static_cast<long long>(r.id), r.pos.x, r.pos.y,
                          r.state.c_str(), static_cast<long long>(r.vehicle));
        } else {
            std::snprintf(buf, sizeof buf,
                          "  <person id=\"%lld\" x=\"%.3f\" y=\"%.3f\" state=\"%s\"/>\n",
                          static_cast<long long>(r.id), r.pos.x, r.pos.y,
                          r.state.c_str());
        }
        os << buf;
    }
    os << "</timestep>\n";
}

void write_events_xml(std::ostream& os, const std::vector<TruthEvent>& events) {
    os << "<events>\n";
    char buf[256];
    for (const TruthEvent& e : events) {
        std::snprintf(buf, sizeof buf,
                      "  <event t=\"%.3f\" kind=\"%s\" subject=\"%lld\" x=\"%.3f\" "
                      "y=\"%.3f\"",
                      e.time, e.kind.c_str(), static_cast<long long>(e.subject),
                      e.pos.x, e.pos.y);
        os << buf;
        for (const auto& [k, v] : e.meta) os << ' ' << k << "=\"" << v << '"';
        os << "/>\n";
    }
    os << "</events>\n";
}

} // namespace wams
