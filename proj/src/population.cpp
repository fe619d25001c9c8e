#include "wams/population.hpp"

#include "wams/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace wams {

const char* to_string(Task t) {
    switch (t) {
        case Task::GoToWork: return "go-to-work";
        case Task::GoHome: return "go-home";
        case Task::GoShopping: return "go-shopping";
        default: return "go-recreation";
    }
}

namespace {

std::int64_t pick(const std::vector<std::int64_t>& pool, Rng& rng) {
    return pool[rng.bounded(pool.size())];
}

/// Fisher-Yates over 0..n-1 with the sequenced generator.
std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i > 1; --i)
        std::swap(idx[i - 1], idx[rng.bounded(i)]);
    return idx;
}

} // namespace

std::vector<Person> generate_population(std::size_t n,
                                        const std::vector<Building>& buildings,
                                        const PopulationConfig& cfg, std::uint64_t seed) {
    if (n == 0) return {};

    std::vector<std::int64_t> homes, works, shops, recs;
    for (const Building& b : buildings) {
        if (!b.routable) continue;
        std::int64_t id = b.footprint.id;
        switch (b.footprint.building_class) {
            case BuildingClass::Residential: homes.push_back(id); break;
            case BuildingClass::Commercial:
                works.push_back(id);
                shops.push_back(id);
                break;
            case BuildingClass::Industrial: works.push_back(id); break;
            case BuildingClass::Civic:
                works.push_back(id);
                recs.push_back(id);
                break;
            case BuildingClass::Other: recs.push_back(id); break;
        }
    }
    if (homes.empty()) throw std::runtime_error("no routable residential buildings");
    if (works.empty()) throw std::runtime_error("no routable workplace buildings");
    if (shops.empty()) shops = works;
    if (recs.empty()) recs = shops;

    Rng rng(mix_seed(seed, 0x9051));
    // Initial homes are drawn without replacement while the housing stock
    // lasts, so every multi-occupant home afterwards is a cohabitation
    // reassignment (exact census); with replacement once homes run out.
    std::vector<std::int64_t> home_draw = homes;
    std::size_t distinct = std::min(n, home_draw.size());
    for (std::size_t i = 0; i < distinct; ++i)
        std::swap(home_draw[i], home_draw[i + rng.bounded(home_draw.size() - i)]);

    std::vector<Person> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Person& p = out[i];
        p.id = static_cast<std::int64_t>(i + 1);
        p.home = i < distinct ? home_draw[i] : pick(homes, rng);
        p.workplace = pick(works, rng);
        p.shop = pick(shops, rng);
        p.recreation = pick(recs, rng);
        p.walk_speed = cfg.walk_speed * rng.uniform(0.9, 1.1);
        if (i < static_cast<std::size_t>(std::max(0, cfg.bus_routes))) {
            p.occupation = Occupation::BusDriver;
            p.bus_route = static_cast<int>(i);
        }
    }

    // cohabitation: floor(f*n) persons move in with someone from the rest
    std::size_t k = static_cast<std::size_t>(cfg.cohabit_fraction * n);
    if (k > 0 && k < n) {
        std::vector<std::size_t> idx = shuffled_indices(n, rng);
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t donor = idx[k + rng.bounded(n - k)];
            out[idx[i]].home = out[donor].home;
        }
    }

    // vehicle ownership for floor(f*n) persons
    std::size_t v = static_cast<std::size_t>(cfg.vehicle_fraction * n);
    std::vector<std::size_t> vidx = shuffled_indices(n, rng);
    for (std::size_t i = 0; i < std::min(v, n); ++i) out[vidx[i]].owns_vehicle = true;

    return out;
}

std::vector<Trip> assign_tasks(const std::vector<Person>& persons, const TaskConfig& cfg,
                               std::uint64_t seed) {
    if (cfg.sigma < 0.0) throw std::invalid_argument("negative start-time sigma");
    double total = 0.0;
    for (const auto& [task, f] : cfg.proportions) total += f;
    if (total > 1.0 + 1e-9) throw std::invalid_argument("task proportions sum above 1");

    Rng rng(mix_seed(seed, 0x7a5c));
    std::vector<Trip> out;
    for (const Person& p : persons) {
        double u = rng.uniform01();
        double nrm = rng.normal(0.0, 1.0); // drawn unconditionally: stable stream shape
        if (p.occupation == Occupation::BusDriver) continue;
        double acc = 0.0;
        std::optional<Task> chosen;
        static const Task kOrder[] = {Task::GoToWork, Task::GoHome, Task::GoShopping,
                                      Task::GoRecreation};
        for (Task t : kOrder) {
            auto it = cfg.proportions.find(t);
            if (it == cfg.proportions.end()) continue;
            acc += it->second;
            if (u < acc) {
                chosen = t;
                break;
            }
        }
        if (!chosen) continue; // remainder of the mass stays home

        Trip tr;
        tr.person = p.id;
        tr.task = *chosen;
        tr.origin = p.home;
        switch (*chosen) {
            case Task::GoToWork: tr.destination = p.workplace; break;
            case Task::GoShopping: tr.destination = p.shop; break;
            case Task::GoRecreation: tr.destination = p.recreation; break;
            case Task::GoHome:
                tr.origin = p.workplace;
                tr.destination = p.home;
                break;
        }
        if (tr.origin == tr.destination) continue; // degenerate draw, stays put
        tr.start_time = std::max(0.0, cfg.mean_times.at(*chosen) + cfg.sigma * nrm);
        out.push_back(tr);
    }
    return out;
}

} // namespace wams
