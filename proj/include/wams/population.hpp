#pragma once

#include "wams/citygen.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace wams {

enum class Task { GoToWork, GoHome, GoShopping, GoRecreation };
const char* to_string(Task t);

enum class Occupation { General, BusDriver };

struct Person {
    std::int64_t id = 0;
    std::int64_t home = 0;
    std::int64_t workplace = 0;
    std::int64_t shop = 0;
    std::int64_t recreation = 0;
    bool owns_vehicle = false;
    Occupation occupation = Occupation::General;
    int bus_route = -1; // for bus drivers
    double walk_speed = 1.4; // m/s
};

struct Trip {
    std::int64_t person = 0;
    Task task = Task::GoToWork;
    std::int64_t origin = 0;
    std::int64_t destination = 0;
    double start_time = 0.0; // simulation seconds
};

struct PopulationConfig {
    double cohabit_fraction = 0.25;
    double vehicle_fraction = 0.5;
    int bus_routes = 0;      // one driver allocated per route, before the rest
    double walk_speed = 1.4; // mean walk speed, +/-10% per person
};

struct TaskConfig {
    std::map<Task, double> proportions{
        {Task::GoToWork, 0.5}, {Task::GoShopping, 0.2}, {Task::GoRecreation, 0.2}};
    std::map<Task, double> mean_times{
        {Task::GoToWork, 8 * 3600.0},
        {Task::GoShopping, 12 * 3600.0},
        {Task::GoRecreation, 18 * 3600.0},
        {Task::GoHome, 17.5 * 3600.0},
    };
    double sigma = 1800.0; // start-time spread, s
};

/// Random homes/workplaces/shops/recreation over the routable buildings,
/// cohabitation reassignment for floor(cohabit_fraction * n) persons and
/// vehicles for floor(vehicle_fraction * n). Deterministic under seed.
std::vector<Person> generate_population(std::size_t n,
                                        const std::vector<Building>& buildings,
                                        const PopulationConfig& cfg, std::uint64_t seed);

/// One drawn task per person (remainder of the proportion mass = stay home);
/// start times Normal(mean, sigma) truncated at 0. Bus drivers are skipped —
/// their day is the bus service. Return trips are added by the scenario
/// assembler, keeping this contract at one drawn task per person.
std::vector<Trip> assign_tasks(const std::vector<Person>& persons, const TaskConfig& cfg,
                               std::uint64_t seed);

} // namespace wams
