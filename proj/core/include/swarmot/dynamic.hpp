#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "swarmot/admm.hpp"
#include "swarmot/types.hpp"

namespace swarmot {

class NotConvergedError : public Error {
public:
    using Error::Error;
};

class UnknownEntity : public Error {
public:
    using Error::Error;
};

class RevisitAttempt : public Error {
public:
    using Error::Error;
};

struct WaypointReached {
    int agent_id = 0;
    int waypoint_id = 0;
    int reading = 0;  // 0 or 1
};

struct AgentDropout {
    int agent_id = 0;
};

struct ParamEdit {
    int agent_id = 0;
    int waypoint_id = 0;
    std::optional<double> gamma;
    std::optional<double> delta;
};

struct ParamUpdate {
    std::vector<ParamEdit> edits;
};

using SwarmEvent = std::variant<WaypointReached, AgentDropout, ParamUpdate>;

// Full state of an in-flight dynamic optimization.
struct DynamicState {
    long epoch = 0;
    AdmmState admm;
    NetworkTopology topology;
    UtilityParams params;
    Bounds bounds;
    std::set<int> visited;
    std::vector<std::pair<long, Assignment>> assignment_log;

    static DynamicState initial(NetworkTopology topology, UtilityParams params, Bounds bounds,
                                double eta);
};

// Caller-supplied parameter adjustment applied after a WaypointReached event
// (for example a sensing-driven delta update). May freely edit state.params.
using DeltaRule = std::function<void(DynamicState&, const WaypointReached&)>;

// Reads the converged plan into an injective assignment. Per active agent the
// argmax of pi over its active edges, ties to the lowest waypoint id. When two
// agents select the same waypoint the higher pi keeps it (exact tie: lower
// agent id) and the loser re-selects among unclaimed waypoints.
//
// When several assignments share the optimal value the consensus plan can stop
// on a fractional mixture of them, and independent per-agent argmax may then
// combine rows from different optima into a lower-value result. To keep the
// extracted value exact, the argmax reading is checked against the best
// injective assignment supported by the plan (entries above 100 * epsilon) and
// replaced only when that completion is strictly better.
//
// Throws NotConvergedError when the primal residual is not below epsilon, and
// InfeasibleError when conflict resolution runs out of waypoints.
Assignment extract_assignment(const AdmmState& state, const NetworkTopology& topology,
                              const UtilityParams& params, double epsilon = 1e-6);

// Applies one event atomically between iterations. Surviving plan and dual
// entries are preserved as the warm start; dropped rows/columns are zeroed.
void apply_event(DynamicState& state, const SwarmEvent& event, const DeltaRule& rule = {});

// True when the primal residual and the most recent iterate drift are both
// below epsilon.
bool check_convergence(const AdmmState& state, double epsilon);

struct ScheduledEvent {
    long iteration = 0;  // applied once state.admm.iteration reaches this count
    SwarmEvent event;
};

struct EpochRecord {
    long epoch = 0;
    Assignment assignment;
    ConvergenceReport report;
};

// Interleaves solver iterations with scheduled events. On each convergence the
// extracted assignment is recorded and the epoch advances; further iterations
// do not re-record until an event perturbs the state. Each record's report
// counts iterations since the episode began (loop start or latest event).
//
// config.max_iterations bounds a single episode's search; exceeding it without
// convergence throws MaxIterationsExceeded. Terminates when no active agents
// or waypoints remain, or when the schedule is exhausted and the current
// episode has converged.
std::vector<EpochRecord> dynamic_loop(DynamicState& state,
                                      const std::vector<ScheduledEvent>& schedule,
                                      const SolverConfig& config, const DeltaRule& rule = {});

}  // namespace swarmot
