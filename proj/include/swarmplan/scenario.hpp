#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmplan/voxel_map.hpp"

namespace swarmplan {

// Raised on malformed or inconsistent input files (exit code 3 territory).
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct AgentSpec {
    int id = 0;
    double radius = 0.15;
    Vec3 start{0.0, 0.0, 0.0};
    Vec3 goal{0.0, 0.0, 0.0};
};

struct PlannerConfig {
    double downwash = 2.0;      // vertical safety multiplier c_dw
    double ecbs_bound = 1.3;    // suboptimality factor c_w
    double grid_xy = 0.5;       // planning grid spacing in x,y (m)
    double grid_z = 1.0;        // planning grid spacing in z (m)
    int degree = 5;             // polynomial degree N
    int deriv_order = 3;        // cost derivative order (3 = jerk)
    double t_step = 1.0;        // discrete step duration (s)
    double v_max = 1.7;         // speed limit for post-scaling (m/s)
    double a_max = 6.0;         // acceleration limit for post-scaling (m/s^2)
    double init_box_size = 0.5; // initial corridor side length (m)
    double sample_dt = 0.01;    // verification sampling step (s)

    // Runtime knobs, not part of the scenario file schema.
    bool rsfc_delay = true;        // half-step delay on relative-corridor transitions
    long long mapf_budget = 4'000'000;  // low-level node expansion budget
    double qp_eps = 1e-6;
    int qp_max_iter = 20000;
    int workers = 0;            // 0 = hardware concurrency
};

struct Scenario {
    VoxelMap map;
    std::vector<AgentSpec> agents;
    PlannerConfig config;
};

// Parsers for the two input files. Both throw ScenarioError with a
// human-readable message on malformed input.
VoxelMap loadMapJson(const std::string& path);
void loadScenarioJson(const std::string& path, std::vector<AgentSpec>& agents,
                      PlannerConfig& config);

// Checks agents against the map: ids unique, radii positive, start/goal in
// free space under per-agent inflation. Throws ScenarioError on violation.
void validateScenario(const VoxelMap& map, const std::vector<AgentSpec>& agents,
                      const PlannerConfig& config);

// Loads both files and validates.
Scenario loadScenario(const std::string& map_file, const std::string& scenario_file);

void saveMapJson(const std::string& path, const VoxelMap& map);
void saveScenarioJson(const std::string& path, const std::vector<AgentSpec>& agents,
                      const PlannerConfig& config);

// Random-forest benchmark scenario: pillars of footprint 0.3 m x 0.3 m and
// height 1-2.5 m in a 10 m x 10 m x 2.5 m map; agent starts evenly spaced on
// the boundary ring at 1 m height, goals point-reflected through the map
// center. Deterministic in `seed`. Throws ScenarioError when a pillar cannot
// be placed clear of every start/goal after bounded retries.
void generateForestScenario(std::uint32_t seed, int n_agents, int n_pillars,
                            VoxelMap& map, std::vector<AgentSpec>& agents,
                            double agent_radius = 0.15);

}  // namespace swarmplan
