#include <fstream>

#include "json.hpp"
#include "swarmot/sim.hpp"

namespace swarmot::sim {

namespace {

Vec2 parse_point(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw Error(std::string(what) + " entries must be [x, y] pairs");
    }
    return Vec2{j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scenario file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("scenario file " + path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw Error("scenario file must hold a JSON object");
    for (const char* key : {"agents", "waypoints", "chemical", "speed", "seed"}) {
        if (!j.contains(key)) throw Error(std::string("scenario is missing \"") + key + "\"");
    }

    Scenario s;
    if (!j["agents"].is_array()) throw Error("\"agents\" must be an array");
    for (const auto& p : j["agents"]) s.agent_starts.push_back(parse_point(p, "agents"));
    if (!j["waypoints"].is_array()) throw Error("\"waypoints\" must be an array");
    for (const auto& p : j["waypoints"]) s.waypoints.push_back(parse_point(p, "waypoints"));
    if (!j["chemical"].is_array()) throw Error("\"chemical\" must be an array of waypoint ids");
    for (const auto& c : j["chemical"]) {
        if (!c.is_number_integer()) throw Error("\"chemical\" must be an array of waypoint ids");
        s.chemical.insert(c.get<int>());
    }
    if (!j["speed"].is_number()) throw Error("\"speed\" must be a number");
    s.agent_speed = j["speed"].get<double>();
    if (!j["seed"].is_number_integer()) throw Error("\"seed\" must be an integer");
    s.seed = j["seed"].get<long>();
    s.check();
    return s;
}

void save_scenario(const Scenario& scenario, const std::string& path) {
    scenario.check();
    nlohmann::json j;
    j["agents"] = nlohmann::json::array();
    for (const auto& p : scenario.agent_starts) j["agents"].push_back({p.x, p.y});
    j["waypoints"] = nlohmann::json::array();
    for (const auto& p : scenario.waypoints) j["waypoints"].push_back({p.x, p.y});
    j["chemical"] = scenario.chemical;
    j["speed"] = scenario.agent_speed;
    j["seed"] = scenario.seed;

    std::ofstream out(path);
    if (!out) throw Error("cannot write scenario file " + path);
    out << j.dump(2) << "\n";
    if (!out) throw Error("failed writing scenario file " + path);
}

}  // namespace swarmot::sim
