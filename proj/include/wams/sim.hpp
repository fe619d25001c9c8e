#pragma once

#include "wams/journey.hpp"
#include "wams/microsim.hpp"
#include "wams/population.hpp"

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wams {

/// Static world shared by the controller: networks, buildings, transfer points.
struct CityScene {
    RoadNetwork roads;
    PathNetwork paths;
    std::vector<Building> buildings;
    std::map<std::int64_t, TransferPoint> tps;
    int utm_zone = 30;
    bool north = true;

    const Building* building(std::int64_t id) const;
    const TransferPoint* transfer(std::int64_t id) const;
};

enum class PersonState {
    WaitInBuilding,
    WalkFootpath,
    WalkInNetwork,
    WaitForVehicle,
    EnterVehicle,
    InVehicle,
    ExitVehicle,
    WaitAtStop,
    RideBus,
    WalkToGateway,
    Done,
    Aborted,
};
const char* to_string(PersonState s);

struct TruthEvent {
    double time = 0.0;
    Vec2 pos;
    std::string kind; // LEAVE_BUILDING, ENTER_BUILDING, BOARD_VEHICLE, ...
    std::int64_t subject = 0;
    std::map<std::string, std::string> meta;
};

/// One per-timestep record of every outdoor entity.
struct EntityRecord {
    char type = 'p'; // 'p' person, 'v' vehicle
    std::int64_t id = 0;
    Vec2 pos;
    double heading = 0.0; // radians, vehicles only
    double speed = 0.0;
    std::string state;          // person state or vehicle type
    std::int64_t vehicle = -1;  // bound vehicle for persons
};

struct Snapshot {
    double time = 0.0;
    std::vector<EntityRecord> entities;
};

struct SimConfig {
    double dt = 0.5;
    double duration = 3600.0;
    JourneyConfig journey;
    IdmParams idm;
    double wait_timeout = 600.0;   // abort a starved WAIT_FOR_VEHICLE, s
    double carshare_window = 60.0; // departures this close share the owner's car
    bool enable_carshare = true;
};

class Simulation {
public:
    Simulation(const CityScene& scene, std::vector<Person> persons,
               std::vector<Trip> trips, std::vector<BusRoute> routes,
               const SimConfig& cfg);

    void step();
    void run(); // cfg.duration worth of steps
    double time() const { return world_.time; }

    const std::vector<TruthEvent>& events() const { return events_; }
    const std::vector<Snapshot>& snapshots() const { return snapshots_; }
    int aborted_journeys() const { return aborted_; }
    int completed_trips() const { return completed_; }

private:
    struct Leg {
        enum class Kind { Walk, Spawn, Ride } kind = Kind::Walk;
        // Walk
        std::vector<Vec2> path;
        PersonState tag = PersonState::WalkInNetwork;
        // Spawn: wait at the transfer point for the owned/shared car
        std::int64_t tp = -1;
        std::int64_t spawn_vehicle = -1; // filled when the car materializes
        // Ride: bus (route >= 0) or a known car (vehicle >= 0)
        int route = -1;
        std::int64_t vehicle = -1;
        std::int64_t board_tp = -1;
        std::int64_t alight_tp = -1;
    };
    struct PersonSim {
        Person meta;
        PersonState state = PersonState::WaitInBuilding;
        std::vector<Leg> legs;
        std::size_t leg = 0;
        WalkState walker;
        Vec2 pos;
        bool outside = false;
        std::int64_t bound_vehicle = -1;
        double wait_since = 0.0;
        std::int64_t building = 0; // current building while inside
        std::int64_t dest_building = -1;
        std::vector<Trip> trips;
        std::size_t next_trip = 0;
    };
    struct CarStop {
        LaneRef lane;
        double pos = 0.0;
        std::int64_t tp = -1;
        std::vector<std::int64_t> alighters;
    };
    struct CarSim {
        std::int64_t vid = 0;
        std::int64_t driver = -1;
        std::vector<CarStop> stops;
        std::size_t next = 0;
        std::vector<std::int64_t> pending_boarders; // walking to the car
        bool moving = false;
    };
    struct BusSim {
        int route = 0;
        std::int64_t vid = 0;
        std::vector<CarStop> stops;
        std::size_t next = 0;
        double dwell_until = -1.0;
        std::vector<std::int64_t> boarding; // committed, walking to the door
        bool at_stop = false;
    };

    void start_trip(PersonSim& p, const Trip& trip);
    std::optional<std::vector<Leg>> plan_legs(const PersonSim& p, const Building& from,
                                              const Building& to, Mode mode);
    void advance_person(PersonSim& p);
    void begin_leg(PersonSim& p);
    void finish_journey(PersonSim& p);
    void abort_journey(PersonSim& p, const std::string& why);
    void service_cars();
    void service_buses();
    void emit(const std::string& kind, std::int64_t subject, Vec2 pos,
              std::map<std::string, std::string> meta = {});
    void transition(PersonSim& p, PersonState to);
    std::optional<std::vector<LaneRef>> lane_route(const TransferPoint& from,
                                                   const TransferPoint& to,
                                                   double* start_pos, double* end_pos) const;
    LaneRef tp_lane(const TransferPoint& tp) const;
    double tp_lane_pos(const TransferPoint& tp) const;
    std::int64_t spawn_car(const TransferPoint& at, std::int64_t driver,
                           VehicleType type);
    void record_snapshot();

    const CityScene& scene_;
    SimConfig cfg_;
    TrafficWorld world_;
    std::map<std::int64_t, PersonSim> persons_;
    std::vector<BusRoute> routes_;
    std::map<std::int64_t, CarSim> cars_;
    std::vector<BusSim> buses_;
    std::map<std::int64_t, std::deque<std::int64_t>> stop_queue_; // tp -> waiting persons
    std::vector<TruthEvent> events_;
    std::vector<Snapshot> snapshots_;
    std::int64_t next_vid_ = 1;
    int aborted_ = 0;
    int completed_ = 0;
};

/// Truth serialization: one XML document per timestep plus an event stream.
void write_timestep_xml(std::ostream& os, const Snapshot& snap);
void write_events_xml(std::ostream& os, const std::vector<TruthEvent>& events);

} // namespace wams
