// swarmot: experiment harness for the consensus transport matcher.
//
// Subcommands:
//   case-study   solve the reference 3x10 instance and check the known optimum
//   converge     emit a per-iteration convergence trace for a seeded instance
//   dynamic      replay a schedule of parameter updates through the warm-started solver
//   sim          fly a full mission under the transport allocator
//   compare      race the transport allocator against the greedy baseline
//
// Every run is deterministic: identical flags and seed produce byte-identical
// output files. CSV files carry full round-trip precision (%.17g).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "swarmot/admm.hpp"
#include "swarmot/case_study.hpp"
#include "swarmot/dynamic.hpp"
#include "swarmot/sim.hpp"
#include "swarmot/types.hpp"

namespace {

using namespace swarmot;

struct Options {
    double eta = 10.0;
    double epsilon = 1e-6;
    long max_iterations = 0;  // 0 = per-subcommand default
    long seed = 0;
    std::string scenario_path;
    std::string out_path;
    int random_scenarios = 0;

    long solver_budget() const { return max_iterations > 0 ? max_iterations : 10000; }
    long epoch_budget() const { return max_iterations > 0 ? max_iterations : 5000; }
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Agents and waypoints are displayed 1-based; internal ids are 0-based.
std::string format_assignment(const Assignment& assignment) {
    std::string out = "{";
    bool first = true;
    for (const auto& [agent, waypoint] : assignment.pairs) {
        if (!first) out += ", ";
        first = false;
        out += std::to_string(agent + 1) + "→" + std::to_string(waypoint + 1);
    }
    return out + "}";
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file " + path);
    return out;
}

struct TraceRow {
    long iteration = 0;
    double utility = 0.0;
    double residual = 0.0;
};

// Same loop as run_until_converged, but keeping the residual of every
// iteration so the trace can be written out.
std::vector<TraceRow> traced_solve(AdmmState& state, const NetworkTopology& topology,
                                   const UtilityParams& params, const Bounds& bounds,
                                   const SolverConfig& config) {
    topology.check();
    validate_params(topology, params);
    std::vector<TraceRow> rows;
    IterationResult step;
    for (long k = 0; k < config.max_iterations; ++k) {
        step = admm_iterate(state, topology, params, bounds);
        rows.push_back({state.iteration, step.utility, step.primal_residual});
        if (step.primal_residual < config.epsilon && step.drift < config.epsilon) return rows;
    }
    ConvergenceReport report;
    report.iterations = state.iteration;
    report.primal_residual = step.primal_residual;
    report.drift = step.drift;
    throw MaxIterationsExceeded(std::move(state), std::move(report));
}

void write_trace(const std::string& path, const std::vector<TraceRow>& rows) {
    if (path.empty()) return;
    std::ofstream out = open_out(path);
    out << "iteration,aggregate_utility,primal_residual\n";
    for (const TraceRow& row : rows)
        out << row.iteration << "," << num(row.utility) << "," << num(row.residual) << "\n";
}

// Seeded dense matching instance with integer coefficients in 1..10.
std::pair<NetworkTopology, UtilityParams> random_instance(std::mt19937_64& rng, int agents,
                                                          int waypoints) {
    NetworkTopology topology = NetworkTopology::full(agents, waypoints);
    UtilityParams params;
    params.gamma = Matrix(agents, waypoints);
    params.delta = Matrix(agents, waypoints);
    for (int x = 0; x < agents; ++x)
        for (int y = 0; y < waypoints; ++y) {
            params.gamma(x, y) = 1.0 + static_cast<double>(rng() % 10);
            params.delta(x, y) = 1.0 + static_cast<double>(rng() % 10);
        }
    return {std::move(topology), std::move(params)};
}

int cmd_case_study(const Options& opt) {
    const NetworkTopology topology = NetworkTopology::full(3, 10);
    const UtilityParams params = case_study_params();
    const Bounds bounds = Bounds::matching(3, 10);
    const SolverConfig config{opt.eta, opt.epsilon, opt.solver_budget()};

    AdmmState state = init_state(topology, config.eta);
    const std::vector<TraceRow> rows = traced_solve(state, topology, params, bounds, config);
    write_trace(opt.out_path, rows);

    const Assignment got = extract_assignment(state, topology, params, config.epsilon);
    std::cout << "converged in " << rows.size() << " iterations\n";
    std::cout << "assignment " << format_assignment(got) << "\n";
    std::cout << "aggregate utility " << num(aggregate_utility(got, params)) << "\n";

    const Assignment& expected = case_study_expected_assignment();
    if (!(got == expected)) {
        std::cerr << "error: assignment deviates from the reference optimum "
                  << format_assignment(expected) << "\n";
        return 1;
    }
    return 0;
}

int cmd_converge(const Options& opt) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(opt.seed));
    auto [topology, params] = random_instance(rng, 3, 10);
    const Bounds bounds = Bounds::matching(3, 10);
    const SolverConfig config{opt.eta, opt.epsilon, opt.solver_budget()};

    AdmmState state = init_state(topology, config.eta);
    const std::vector<TraceRow> rows = traced_solve(state, topology, params, bounds, config);
    write_trace(opt.out_path, rows);

    const Assignment got = extract_assignment(state, topology, params, config.epsilon);
    std::cout << "seed " << opt.seed << "\n";
    std::cout << "converged in " << rows.size() << " iterations\n";
    std::cout << "assignment " << format_assignment(got) << "\n";
    std::cout << "aggregate utility " << num(aggregate_utility(got, params)) << "\n";
    return 0;
}

int cmd_dynamic(const Options& opt) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(opt.seed));
    auto [topology, params] = random_instance(rng, 3, 10);
    const Bounds bounds = Bounds::matching(3, 10);
    const SolverConfig config{opt.eta, opt.epsilon, opt.solver_budget()};

    // Three bursts of delta edits, one every 250 iterations.
    std::vector<ScheduledEvent> schedule;
    for (int burst = 1; burst <= 3; ++burst) {
        ParamUpdate update;
        for (int k = 0; k < 3; ++k) {
            ParamEdit edit;
            edit.agent_id = static_cast<int>(rng() % 3);
            edit.waypoint_id = static_cast<int>(rng() % 10);
            edit.delta = 1.0 + static_cast<double>(rng() % 10);
            update.edits.push_back(edit);
        }
        schedule.push_back({250L * burst, SwarmEvent{update}});
    }

    DynamicState state = DynamicState::initial(topology, params, bounds, config.eta);
    const std::vector<EpochRecord> records = dynamic_loop(state, schedule, config);

    if (!opt.out_path.empty()) {
        std::ofstream out = open_out(opt.out_path);
        out << "epoch,iterations,aggregate_utility\n";
        for (const EpochRecord& record : records)
            out << record.epoch << "," << record.report.iterations << ","
                << num(record.report.utility_trace.back()) << "\n";
    }

    std::cout << "seed " << opt.seed << "\n";
    std::cout << "epochs " << records.size() << "\n";
    for (const EpochRecord& record : records)
        std::cout << "epoch " << record.epoch << " converged in " << record.report.iterations
                  << " iterations: " << format_assignment(record.assignment) << "\n";
    return 0;
}

sim::Scenario pick_scenario(const Options& opt, bool seed_given) {
    if (!opt.scenario_path.empty()) return sim::load_scenario(opt.scenario_path);
    if (seed_given) return sim::Scenario::random(opt.seed);
    return sim::Scenario::demo();
}

sim::MissionConfig mission_config(const Options& opt) {
    sim::MissionConfig config;
    config.eta = opt.eta;
    config.epsilon = opt.epsilon;
    config.epoch_max_iterations = opt.epoch_budget();
    return config;
}

int cmd_sim(const Options& opt, bool seed_given) {
    const sim::Scenario scenario = pick_scenario(opt, seed_given);
    const sim::MissionReport report =
        sim::run_mission(scenario, sim::Allocator::DynamicOT, mission_config(opt));

    if (!opt.out_path.empty()) {
        std::ofstream out = open_out(opt.out_path);
        out << "agent,waypoint,time,reading\n";
        for (const sim::VisitRecord& visit : report.visit_order)
            out << visit.agent_id + 1 << "," << visit.waypoint_id + 1 << "," << num(visit.time)
                << "," << report.readings.at(visit.waypoint_id) << "\n";
    }

    int detections = 0;
    for (const auto& [waypoint, reading] : report.readings) detections += reading;

    std::cout << scenario.agent_starts.size() << " agents, " << scenario.waypoints.size()
              << " waypoints, " << scenario.chemical.size() << " chemical\n";
    std::cout << "visits " << report.visit_order.size() << "\n";
    std::cout << "detections " << detections << "\n";
    for (size_t x = 0; x < report.per_agent_distance.size(); ++x)
        std::cout << "agent " << x + 1 << " distance " << num(report.per_agent_distance[x])
                  << "\n";
    std::cout << "total distance " << num(report.total_distance) << "\n";
    return 0;
}

int cmd_compare_single(const Options& opt) {
    const sim::Scenario scenario =
        opt.scenario_path.empty() ? sim::Scenario::demo() : sim::load_scenario(opt.scenario_path);
    const sim::MissionConfig config = mission_config(opt);
    const sim::MissionReport ot = sim::run_mission(scenario, sim::Allocator::DynamicOT, config);
    const sim::MissionReport greedy = sim::run_mission(scenario, sim::Allocator::Greedy, config);

    if (!opt.out_path.empty()) {
        std::ofstream out = open_out(opt.out_path);
        out << "allocator,agent,distance\n";
        for (size_t x = 0; x < ot.per_agent_distance.size(); ++x)
            out << "ot," << x + 1 << "," << num(ot.per_agent_distance[x]) << "\n";
        out << "ot,total," << num(ot.total_distance) << "\n";
        for (size_t x = 0; x < greedy.per_agent_distance.size(); ++x)
            out << "greedy," << x + 1 << "," << num(greedy.per_agent_distance[x]) << "\n";
        out << "greedy,total," << num(greedy.total_distance) << "\n";
    }

    std::cout << "ot total " << num(ot.total_distance) << "\n";
    std::cout << "greedy total " << num(greedy.total_distance) << "\n";
    std::cout << "winner " << (ot.total_distance <= greedy.total_distance ? "ot" : "greedy")
              << "\n";
    return 0;
}

int cmd_compare_random(const Options& opt) {
    const sim::MissionConfig config = mission_config(opt);
    std::mt19937_64 master(static_cast<std::uint64_t>(opt.seed));

    std::ofstream out;
    if (!opt.out_path.empty()) {
        out = open_out(opt.out_path);
        out << "scenario,seed,ot_total,greedy_total\n";
    }

    const int n = opt.random_scenarios;
    double ot_sum = 0.0;
    double greedy_sum = 0.0;
    int wins = 0;
    for (int i = 0; i < n; ++i) {
        const long seed = static_cast<long>(master() >> 33);
        const sim::Scenario scenario = sim::Scenario::random(seed);
        const sim::MissionReport ot =
            sim::run_mission(scenario, sim::Allocator::DynamicOT, config);
        const sim::MissionReport greedy =
            sim::run_mission(scenario, sim::Allocator::Greedy, config);
        ot_sum += ot.total_distance;
        greedy_sum += greedy.total_distance;
        if (ot.total_distance <= greedy.total_distance) ++wins;
        if (out.is_open())
            out << i + 1 << "," << seed << "," << num(ot.total_distance) << ","
                << num(greedy.total_distance) << "\n";
    }

    char rate[32];
    std::snprintf(rate, sizeof(rate), "%g", static_cast<double>(wins) / n);
    std::cout << "scenarios " << n << "\n";
    std::cout << "mean ot total " << num(ot_sum / n) << "\n";
    std::cout << "mean greedy total " << num(greedy_sum / n) << "\n";
    std::cout << "wins " << wins << " of " << n << "\n";
    std::cout << "win rate " << rate << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"consensus transport matching toolkit"};
    app.require_subcommand(1);

    Options opt;
    auto add_solver_flags = [&](CLI::App* sub, long budget) {
        sub->add_option("--eta", opt.eta, "consensus penalty weight")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--epsilon", opt.epsilon, "convergence tolerance")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--max-iterations", opt.max_iterations,
                        "iteration budget (default " + std::to_string(budget) + ")")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* case_study = app.add_subcommand(
        "case-study", "solve the reference 3-agent, 10-waypoint instance");
    add_solver_flags(case_study, 10000);
    case_study->add_option("--out", opt.out_path, "write the per-iteration trace CSV here");

    CLI::App* converge =
        app.add_subcommand("converge", "trace convergence on a seeded random instance");
    add_solver_flags(converge, 10000);
    converge->add_option("--seed", opt.seed, "instance seed")->capture_default_str();
    converge->add_option("--out", opt.out_path, "write the per-iteration trace CSV here");

    CLI::App* dynamic = app.add_subcommand(
        "dynamic", "re-converge through scheduled parameter updates on a seeded instance");
    add_solver_flags(dynamic, 10000);
    dynamic->add_option("--seed", opt.seed, "instance seed")->capture_default_str();
    dynamic->add_option("--out", opt.out_path, "write the per-epoch CSV here");

    CLI::App* sim_cmd =
        app.add_subcommand("sim", "fly one mission under the transport allocator");
    add_solver_flags(sim_cmd, 5000);
    CLI::Option* sim_scenario =
        sim_cmd->add_option("--scenario", opt.scenario_path, "scenario JSON file");
    sim_cmd->add_option("--seed", opt.seed, "generate the scenario from this seed")
        ->excludes(sim_scenario);
    sim_cmd->add_option("--out", opt.out_path, "write the visit log CSV here");

    CLI::App* compare =
        app.add_subcommand("compare", "race the transport allocator against greedy");
    add_solver_flags(compare, 5000);
    CLI::Option* compare_scenario =
        compare->add_option("--scenario", opt.scenario_path, "scenario JSON file");
    compare->add_option("--seed", opt.seed, "master seed for --random-scenarios")
        ->capture_default_str();
    compare->add_option("--random-scenarios", opt.random_scenarios,
                        "compare on this many generated scenarios")
        ->check(CLI::PositiveNumber)
        ->excludes(compare_scenario);
    compare->add_option("--out", opt.out_path, "write the comparison CSV here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (case_study->parsed()) return cmd_case_study(opt);
        if (converge->parsed()) return cmd_converge(opt);
        if (dynamic->parsed()) return cmd_dynamic(opt);
        if (sim_cmd->parsed()) return cmd_sim(opt, sim_cmd->count("--seed") > 0);
        if (compare->parsed())
            return opt.random_scenarios > 0 ? cmd_compare_random(opt) : cmd_compare_single(opt);
    } catch (const MaxIterationsExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
