#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "swarmot/types.hpp"

namespace swarmot::sim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Vec2& a, const Vec2& b);

// A mission map: agent takeoff positions, waypoints to visit, and which
// waypoints carry a chemical signature.
struct Scenario {
    std::vector<Vec2> agent_starts;
    std::vector<Vec2> waypoints;
    std::set<int> chemical;
    double agent_speed = 5.0;
    long seed = 0;

    void check() const;
    // Largest pairwise distance over starts and waypoints; every reachable
    // position stays within this bound.
    double map_diagonal() const;

    // Seeded 3-agent, 12-waypoint scenario on a 200 m x 200 m map with a
    // 3-waypoint chemical cluster. Waypoints 0..2 are labeled so that
    // agent i -> waypoint i is the cheapest opening fan-out.
    static Scenario random(long seed);
    // Bundled fixture used by the CLI when no scenario file is given.
    static Scenario demo();
};

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

class WrongLength : public Error {
public:
    using Error::Error;
};

class InvalidReading : public Error {
public:
    using Error::Error;
};

class StalledError : public Error {
public:
    using Error::Error;
};

// The whole inter-agent vocabulary: who visited what and whether the sensor
// fired. Wire format is three little-endian signed 32-bit integers.
struct WaypointMessage {
    std::int32_t agent_id = 0;
    std::int32_t waypoint_id = 0;
    std::int32_t reading = 0;
};

std::array<std::uint8_t, 12> encode_message(const WaypointMessage& msg);
WaypointMessage decode_message(const std::uint8_t* data, std::size_t size);
WaypointMessage decode_message(const std::vector<std::uint8_t>& bytes);

// Affine map from distance to the agent-side utility scale [1, 10]:
// 1 + 9 (1 - distance / map_diagonal).
double distance_to_utility(double distance, double map_diagonal);

// Sensing-driven importance update: after a positive reading at the reached
// waypoint, the delta column of every still-active waypoint within radius is
// multiplied by boost and clamped to [1, 10].
void importance_update(UtilityParams& params, const NetworkTopology& topology, int reached,
                       int reading, const Scenario& scenario, double radius, double boost);

// Nearest-neighbor chains: agents in ascending id each claim a chain of
// quota = waypoints/agents unclaimed waypoints (remainder to the lowest ids),
// always extending from the chain's last position, ties to the lowest
// waypoint id.
std::map<int, std::vector<int>> greedy_allocate(const Scenario& scenario);

enum class Allocator { Greedy, DynamicOT };

struct MissionConfig {
    double eta = 10.0;
    double epsilon = 1e-6;
    // iteration budget for one warm-started solve between events
    long epoch_max_iterations = 5000;
    double sensor_radius = 30.0;
    double importance_boost = 2.0;
    double initial_delta = 5.0;
};

struct VisitRecord {
    int agent_id = 0;
    int waypoint_id = 0;
    double time = 0.0;
};

struct MissionReport {
    std::vector<double> per_agent_distance;
    double total_distance = 0.0;
    std::vector<VisitRecord> visit_order;
    std::map<int, int> readings;
};

// Flies the mission to completion and accounts straight-line distances.
//
// Both allocators move constant-speed point agents and report every visit
// through the message codec. DynamicOT starts with agent i -> waypoint i,
// re-extracts targets from the warm-started consensus solver after every
// visit, and retires surplus agents (keeping the crew that can cover the
// rest at least flight distance) once fewer waypoints than agents remain.
MissionReport run_mission(const Scenario& scenario, Allocator allocator,
                          const MissionConfig& config = {});

}  // namespace swarmot::sim
