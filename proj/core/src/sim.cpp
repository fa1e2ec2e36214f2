#include "swarmot/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "swarmot/admm.hpp"
#include "swarmot/dynamic.hpp"

namespace swarmot::sim {

namespace {

constexpr double kMapSize = 200.0;
constexpr double kArrivalSlack = 1e-9;

double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

void Scenario::check() const {
    if (agent_starts.empty()) throw Error("scenario has no agents");
    if (waypoints.empty()) throw Error("scenario has no waypoints");
    for (const auto& p : agent_starts) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error("non-finite agent start");
    }
    for (const auto& p : waypoints) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error("non-finite waypoint");
    }
    for (int y : chemical) {
        if (y < 0 || y >= static_cast<int>(waypoints.size())) {
            throw Error("chemical id " + std::to_string(y) + " is not a waypoint");
        }
    }
    if (!(agent_speed > 0.0) || !std::isfinite(agent_speed)) {
        throw Error("agent speed must be positive");
    }
}

double Scenario::map_diagonal() const {
    std::vector<Vec2> pts = agent_starts;
    pts.insert(pts.end(), waypoints.begin(), waypoints.end());
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            best = std::max(best, distance(pts[i], pts[j]));
        }
    }
    return best;
}

Scenario Scenario::random(long seed) {
    Scenario s;
    s.seed = seed;
    s.agent_starts = {{30.0, 0.0}, {100.0, 0.0}, {170.0, 0.0}};
    s.agent_speed = 5.0;

    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::vector<Vec2> raw(12);
    for (auto& w : raw) {
        w.x = kMapSize * unit_uniform(rng);
        w.y = kMapSize * unit_uniform(rng);
    }
    Vec2 source{kMapSize * unit_uniform(rng), kMapSize * unit_uniform(rng)};

    // Relabel so ids 0..2 form the cheapest opening fan-out for the fixed
    // agent i -> waypoint i start, and the rest fan out from the launch line.
    const int n = static_cast<int>(raw.size());
    std::array<int, 3> head{0, 1, 2};
    double best_cost = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            for (int k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                double cost = distance(s.agent_starts[0], raw[i]) +
                              distance(s.agent_starts[1], raw[j]) +
                              distance(s.agent_starts[2], raw[k]);
                if (cost < best_cost) {
                    best_cost = cost;
                    head = {i, j, k};
                }
            }
        }
    }
    Vec2 centroid{0.0, 0.0};
    for (const auto& p : s.agent_starts) {
        centroid.x += p.x;
        centroid.y += p.y;
    }
    centroid.x /= static_cast<double>(s.agent_starts.size());
    centroid.y /= static_cast<double>(s.agent_starts.size());

    std::vector<int> tail;
    for (int i = 0; i < n; ++i) {
        if (i != head[0] && i != head[1] && i != head[2]) tail.push_back(i);
    }
    std::sort(tail.begin(), tail.end(), [&](int a, int b) {
        double da = distance(raw[a], centroid);
        double db = distance(raw[b], centroid);
        if (da != db) return da < db;
        return a < b;
    });

    std::vector<int> order(head.begin(), head.end());
    order.insert(order.end(), tail.begin(), tail.end());
    s.waypoints.reserve(raw.size());
    for (int idx : order) s.waypoints.push_back(raw[idx]);

    std::vector<int> by_source(n);
    for (int i = 0; i < n; ++i) by_source[i] = i;
    std::sort(by_source.begin(), by_source.end(), [&](int a, int b) {
        double da = distance(s.waypoints[a], source);
        double db = distance(s.waypoints[b], source);
        if (da != db) return da < db;
        return a < b;
    });
    s.chemical = {by_source[0], by_source[1], by_source[2]};

    s.check();
    return s;
}

Scenario Scenario::demo() {
    return random(5);
}

std::array<std::uint8_t, 12> encode_message(const WaypointMessage& msg) {
    std::array<std::uint8_t, 12> out{};
    const std::int32_t fields[3] = {msg.agent_id, msg.waypoint_id, msg.reading};
    for (int f = 0; f < 3; ++f) {
        auto u = static_cast<std::uint32_t>(fields[f]);
        for (int b = 0; b < 4; ++b) {
            out[static_cast<std::size_t>(4 * f + b)] =
                static_cast<std::uint8_t>((u >> (8 * b)) & 0xFFu);
        }
    }
    return out;
}

WaypointMessage decode_message(const std::uint8_t* data, std::size_t size) {
    if (size != 12) {
        throw WrongLength("message must be 12 bytes, got " + std::to_string(size));
    }
    std::int32_t fields[3];
    for (int f = 0; f < 3; ++f) {
        std::uint32_t u = 0;
        for (int b = 0; b < 4; ++b) {
            u |= static_cast<std::uint32_t>(data[static_cast<std::size_t>(4 * f + b)])
                 << (8 * b);
        }
        fields[f] = static_cast<std::int32_t>(u);
    }
    if (fields[2] != 0 && fields[2] != 1) {
        throw InvalidReading("reading must be 0 or 1, got " + std::to_string(fields[2]));
    }
    return WaypointMessage{fields[0], fields[1], fields[2]};
}

WaypointMessage decode_message(const std::vector<std::uint8_t>& bytes) {
    return decode_message(bytes.data(), bytes.size());
}

double distance_to_utility(double d, double map_diagonal) {
    if (!(map_diagonal > 0.0)) throw Error("map diagonal must be positive");
    if (d < 0.0 || d > map_diagonal) throw Error("distance outside [0, diagonal]");
    return 1.0 + 9.0 * (1.0 - d / map_diagonal);
}

void importance_update(UtilityParams& params, const NetworkTopology& topology, int reached,
                       int reading, const Scenario& scenario, double radius, double boost) {
    if (reading == 0) return;
    const Vec2 at = scenario.waypoints.at(static_cast<std::size_t>(reached));
    for (int y : topology.active_waypoints) {
        if (distance(scenario.waypoints[static_cast<std::size_t>(y)], at) > radius) continue;
        for (int x = 0; x < params.delta.rows; ++x) {
            double v = params.delta(x, y) * boost;
            params.delta(x, y) = std::clamp(v, 1.0, 10.0);
        }
    }
}

std::map<int, std::vector<int>> greedy_allocate(const Scenario& scenario) {
    scenario.check();
    const int agents = static_cast<int>(scenario.agent_starts.size());
    const int wps = static_cast<int>(scenario.waypoints.size());
    std::map<int, std::vector<int>> lists;
    std::vector<bool> claimed(static_cast<std::size_t>(wps), false);
    for (int x = 0; x < agents; ++x) {
        int quota = wps / agents + (x < wps % agents ? 1 : 0);
        Vec2 at = scenario.agent_starts[static_cast<std::size_t>(x)];
        std::vector<int> chain;
        for (int step = 0; step < quota; ++step) {
            int pick = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int y = 0; y < wps; ++y) {
                if (claimed[static_cast<std::size_t>(y)]) continue;
                double d = distance(at, scenario.waypoints[static_cast<std::size_t>(y)]);
                if (d < best) {
                    best = d;
                    pick = y;
                }
            }
            if (pick < 0) break;
            claimed[static_cast<std::size_t>(pick)] = true;
            chain.push_back(pick);
            at = scenario.waypoints[static_cast<std::size_t>(pick)];
        }
        lists[x] = std::move(chain);
    }
    return lists;
}

namespace {

// Runs the warm-started solver until residual and drift settle, or until the
// episode budget runs out. Near-tied matchings can keep a sub-epsilon drift
// alive long after the split variables agree, so extraction below only needs
// the residual; a budget exit with a large residual is still an error.
void solve_epoch(DynamicState& dyn, const MissionConfig& config) {
    SolverConfig solver;
    solver.eta = config.eta;
    solver.epsilon = config.epsilon;
    solver.max_iterations = config.epoch_max_iterations;
    ConvergenceReport report;
    for (long i = 0; i < solver.max_iterations; ++i) {
        IterationResult r = admm_iterate(dyn.admm, dyn.topology, dyn.params, dyn.bounds);
        report.iterations += 1;
        report.primal_residual = r.primal_residual;
        report.drift = r.drift;
        if (r.primal_residual < solver.epsilon && r.drift < solver.epsilon) return;
    }
    if (!(report.primal_residual < solver.epsilon)) {
        throw MaxIterationsExceeded(dyn.admm, report);
    }
}

// Cheapest injective assignment of the given agents to active waypoints,
// by straight-line distance from their current positions.
double min_matching_distance(const std::vector<int>& agents, const NetworkTopology& topology,
                             const std::vector<Vec2>& pos, const Scenario& scenario) {
    std::vector<int> wps(topology.active_waypoints.begin(), topology.active_waypoints.end());
    std::vector<bool> used(wps.size(), false);
    double best = std::numeric_limits<double>::infinity();
    auto dfs = [&](auto&& self, std::size_t i, double acc) -> void {
        if (acc >= best) return;
        if (i == agents.size()) {
            best = acc;
            return;
        }
        for (std::size_t j = 0; j < wps.size(); ++j) {
            if (used[j]) continue;
            used[j] = true;
            self(self, i + 1,
                 acc + distance(pos[static_cast<std::size_t>(agents[i])],
                                scenario.waypoints[static_cast<std::size_t>(wps[j])]));
            used[j] = false;
        }
    };
    dfs(dfs, 0, 0.0);
    return best;
}

// Picks the surplus agent whose removal leaves the survivors the cheapest
// matching to the remaining waypoints, ties to the lowest id.
int retirement_candidate(const DynamicState& dyn, const std::vector<Vec2>& pos,
                         const Scenario& scenario) {
    int pick = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int drop : dyn.topology.active_agents) {
        std::vector<int> rest;
        for (int x : dyn.topology.active_agents) {
            if (x != drop) rest.push_back(x);
        }
        double cost = min_matching_distance(rest, dyn.topology, pos, scenario);
        if (cost < best) {
            best = cost;
            pick = drop;
        }
    }
    return pick;
}

struct MissionRun {
    const Scenario& scenario;
    Allocator allocator;
    const MissionConfig& config;

    int agents = 0;
    int wps = 0;
    double diag = 0.0;
    std::vector<Vec2> pos;
    std::vector<double> traveled;
    std::map<int, int> targets;
    std::set<int> flying;
    double now = 0.0;
    MissionReport report;

    // DynamicOT only
    DynamicState dyn = DynamicState{};
    std::map<int, std::vector<int>> lists;

    explicit MissionRun(const Scenario& s, Allocator a, const MissionConfig& c)
        : scenario(s), allocator(a), config(c) {
        scenario.check();
        agents = static_cast<int>(scenario.agent_starts.size());
        wps = static_cast<int>(scenario.waypoints.size());
        diag = scenario.map_diagonal();
        pos = scenario.agent_starts;
        traveled.assign(static_cast<std::size_t>(agents), 0.0);
        for (int x = 0; x < agents; ++x) flying.insert(x);
    }

    double gamma_at(int x, int y) const {
        double d = distance(pos[static_cast<std::size_t>(x)],
                            scenario.waypoints[static_cast<std::size_t>(y)]);
        return distance_to_utility(std::min(d, diag), diag);
    }

    void refresh_gamma() {
        for (const auto& [x, y] : dyn.topology.active_edges) {
            dyn.params.gamma(x, y) = gamma_at(x, y);
        }
    }

    void setup_dynamic() {
        if (agents > wps) throw Error("more agents than waypoints");
        NetworkTopology topology = NetworkTopology::full(agents, wps);
        UtilityParams params{Matrix(agents, wps), Matrix(agents, wps, config.initial_delta)};
        for (int x = 0; x < agents; ++x) {
            for (int y = 0; y < wps; ++y) params.gamma(x, y) = gamma_at(x, y);
        }
        dyn = DynamicState::initial(topology, params, Bounds::matching(agents, wps), config.eta);
        // The opening fan-out is pinned to agent i -> waypoint i, but the
        // solver still converges once up front so later epochs warm-start
        // from a consistent state.
        solve_epoch(dyn, config);
        for (int x = 0; x < agents; ++x) targets[x] = x;
    }

    void setup_greedy() {
        lists = greedy_allocate(scenario);
        for (int x = 0; x < agents; ++x) {
            if (lists[x].empty()) {
                flying.erase(x);
            } else {
                targets[x] = lists[x].front();
            }
        }
    }

    int remaining() const {
        if (allocator == Allocator::DynamicOT) {
            return static_cast<int>(dyn.topology.active_waypoints.size());
        }
        return wps - static_cast<int>(report.visit_order.size());
    }

    void record_visit(int x, int y) {
        int reading = scenario.chemical.count(y) ? 1 : 0;
        auto wire = encode_message(WaypointMessage{x, y, reading});
        WaypointMessage msg = decode_message(wire.data(), wire.size());
        report.visit_order.push_back(VisitRecord{msg.agent_id, msg.waypoint_id, now});
        report.readings[msg.waypoint_id] = msg.reading;
    }

    void arrive_dynamic(int x, int y) {
        record_visit(x, y);
        int reading = report.readings[y];
        DeltaRule rule = [this](DynamicState& state, const WaypointReached& ev) {
            importance_update(state.params, state.topology, ev.waypoint_id, ev.reading,
                              scenario, config.sensor_radius, config.importance_boost);
        };
        apply_event(dyn, WaypointReached{x, y, reading}, rule);
        targets.erase(x);
        if (dyn.topology.active_waypoints.empty()) {
            flying.clear();
            targets.clear();
            return;
        }
        refresh_gamma();
        while (static_cast<int>(dyn.topology.active_agents.size()) > remaining()) {
            int drop = retirement_candidate(dyn, pos, scenario);
            apply_event(dyn, AgentDropout{drop});
            flying.erase(drop);
            targets.erase(drop);
        }
        solve_epoch(dyn, config);
        Assignment next = extract_assignment(dyn.admm, dyn.topology, dyn.params, config.epsilon);
        targets.clear();
        for (const auto& [a, w] : next.pairs) targets[a] = w;
    }

    void arrive_greedy(int x, int y) {
        record_visit(x, y);
        auto& chain = lists[x];
        chain.erase(chain.begin());
        if (chain.empty()) {
            flying.erase(x);
            targets.erase(x);
        } else {
            targets[x] = chain.front();
        }
    }

    MissionReport run() {
        if (allocator == Allocator::DynamicOT) {
            setup_dynamic();
        } else {
            setup_greedy();
        }
        while (remaining() > 0) {
            if (flying.empty()) {
                throw StalledError("waypoints left but no agent has a target");
            }
            double step = std::numeric_limits<double>::infinity();
            for (int x : flying) {
                const Vec2& goal = scenario.waypoints[static_cast<std::size_t>(targets.at(x))];
                step = std::min(step, distance(pos[static_cast<std::size_t>(x)], goal));
            }
            now += step / scenario.agent_speed;
            std::vector<int> arrived;
            for (int x : flying) {
                auto xi = static_cast<std::size_t>(x);
                const Vec2 goal = scenario.waypoints[static_cast<std::size_t>(targets.at(x))];
                double d = distance(pos[xi], goal);
                if (d <= step + kArrivalSlack) {
                    traveled[xi] += d;
                    pos[xi] = goal;
                    arrived.push_back(x);
                } else {
                    double f = step / d;
                    pos[xi].x += f * (goal.x - pos[xi].x);
                    pos[xi].y += f * (goal.y - pos[xi].y);
                    traveled[xi] += step;
                }
            }
            for (int x : arrived) {
                auto it = targets.find(x);
                if (it == targets.end()) continue;
                int y = it->second;
                if (distance(pos[static_cast<std::size_t>(x)],
                             scenario.waypoints[static_cast<std::size_t>(y)]) > kArrivalSlack) {
                    continue;
                }
                if (allocator == Allocator::DynamicOT) {
                    arrive_dynamic(x, y);
                } else {
                    arrive_greedy(x, y);
                }
            }
        }
        report.per_agent_distance = traveled;
        report.total_distance = 0.0;
        for (double d : traveled) report.total_distance += d;
        return report;
    }
};

}  // namespace

MissionReport run_mission(const Scenario& scenario, Allocator allocator,
                          const MissionConfig& config) {
    MissionRun run(scenario, allocator, config);
    return run.run();
}

}  // namespace swarmot::sim
