#include "swarmplan/scenario.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "swarmplan/util.hpp"

namespace swarmplan {

using nlohmann::json;

namespace {

json parseFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ScenarioError("parse error in " + path + ": " + e.what());
    }
    return j;
}

Vec3 parseVec3(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 3)
        throw ScenarioError(what + " must be an array of 3 numbers");
    for (const auto& v : j)
        if (!v.is_number()) throw ScenarioError(what + " must be numeric");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3Json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

VoxelMap loadMapJson(const std::string& path) {
    const json j = parseFile(path);
    for (const auto& key : {"origin", "voxel_size", "dims"})
        if (!j.contains(key)) throw ScenarioError(path + ": missing key '" + key + "'");

    const Vec3 origin = parseVec3(j.at("origin"), "origin");
    const double vs = j.at("voxel_size").get<double>();
    if (vs <= 0.0) throw ScenarioError(path + ": voxel_size must be positive");
    const auto& jd = j.at("dims");
    if (!jd.is_array() || jd.size() != 3)
        throw ScenarioError(path + ": dims must be an array of 3 integers");
    Vec3i dims;
    for (int a = 0; a < 3; ++a) {
        if (!jd[a].is_number_integer() || jd[a].get<long long>() <= 0)
            throw ScenarioError(path + ": dims must be positive integers");
        dims[a] = jd[a].get<int>();
    }

    VoxelMap map(origin, vs, dims);
    if (j.contains("boxes")) {
        for (const auto& jb : j.at("boxes")) {
            const Box3 box{parseVec3(jb.at("min"), "box min"),
                           parseVec3(jb.at("max"), "box max")};
            if (!box.wellFormed()) throw ScenarioError(path + ": box min > max");
            map.addObstacleBox(box);
        }
    }
    return map;
}

void saveMapJson(const std::string& path, const VoxelMap& map) {
    json j;
    j["origin"] = vec3Json(map.origin());
    j["voxel_size"] = map.voxelSize();
    j["dims"] = json::array({map.dims().x(), map.dims().y(), map.dims().z()});
    json boxes = json::array();
    for (const auto& b : map.obstacleBoxes())
        boxes.push_back({{"min", vec3Json(b.lo)}, {"max", vec3Json(b.hi)}});
    j["boxes"] = boxes;
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot write " + path);
    out << j.dump(2) << "\n";
}

void loadScenarioJson(const std::string& path, std::vector<AgentSpec>& agents,
                      PlannerConfig& config) {
    const json j = parseFile(path);
    if (!j.contains("agents") || !j.at("agents").is_array() || j.at("agents").empty())
        throw ScenarioError(path + ": 'agents' must be a non-empty array");

    agents.clear();
    for (const auto& ja : j.at("agents")) {
        AgentSpec a;
        if (!ja.contains("id") || !ja.at("id").is_number_integer())
            throw ScenarioError(path + ": agent missing integer 'id'");
        a.id = ja.at("id").get<int>();
        a.radius = ja.value("radius", 0.15);
        a.start = parseVec3(ja.at("start"), "agent start");
        a.goal = parseVec3(ja.at("goal"), "agent goal");
        agents.push_back(a);
    }

    config = PlannerConfig{};
    bool init_box_given = false;
    if (j.contains("config")) {
        const json& jc = j.at("config");
        if (!jc.is_object()) throw ScenarioError(path + ": 'config' must be an object");
        for (const auto& [key, val] : jc.items()) {
            if (key == "downwash") config.downwash = val.get<double>();
            else if (key == "ecbs_bound") config.ecbs_bound = val.get<double>();
            else if (key == "grid_xy") config.grid_xy = val.get<double>();
            else if (key == "grid_z") config.grid_z = val.get<double>();
            else if (key == "degree") config.degree = val.get<int>();
            else if (key == "deriv_order") config.deriv_order = val.get<int>();
            else if (key == "t_step") config.t_step = val.get<double>();
            else if (key == "v_max") config.v_max = val.get<double>();
            else if (key == "a_max") config.a_max = val.get<double>();
            else if (key == "init_box_size") { config.init_box_size = val.get<double>(); init_box_given = true; }
            else if (key == "sample_dt") config.sample_dt = val.get<double>();
            else if (key == "rsfc_delay") config.rsfc_delay = val.get<bool>();
            else throw ScenarioError(path + ": unknown config key '" + key + "'");
        }
    }
    if (!init_box_given) config.init_box_size = config.grid_xy;

    if (config.downwash < 1.0) throw ScenarioError("downwash must be >= 1");
    if (config.ecbs_bound < 1.0) throw ScenarioError("ecbs_bound must be >= 1");
    if (config.grid_xy <= 0.0 || config.grid_z <= 0.0)
        throw ScenarioError("grid spacing must be positive");
    if (config.degree < 5) throw ScenarioError("degree must be >= 5 for acceleration continuity");
    if (config.deriv_order > config.degree || config.deriv_order < 1)
        throw ScenarioError("deriv_order must be in [1, degree]");
    if (config.t_step <= 0.0 || config.v_max <= 0.0 || config.a_max <= 0.0 ||
        config.init_box_size <= 0.0 || config.sample_dt <= 0.0)
        throw ScenarioError("t_step, v_max, a_max, init_box_size, sample_dt must be positive");
}

void saveScenarioJson(const std::string& path, const std::vector<AgentSpec>& agents,
                      const PlannerConfig& config) {
    json j;
    json ja = json::array();
    for (const auto& a : agents)
        ja.push_back({{"id", a.id},
                      {"radius", a.radius},
                      {"start", vec3Json(a.start)},
                      {"goal", vec3Json(a.goal)}});
    j["agents"] = ja;
    j["config"] = {{"downwash", config.downwash},
                   {"ecbs_bound", config.ecbs_bound},
                   {"grid_xy", config.grid_xy},
                   {"grid_z", config.grid_z},
                   {"degree", config.degree},
                   {"deriv_order", config.deriv_order},
                   {"t_step", config.t_step},
                   {"v_max", config.v_max},
                   {"a_max", config.a_max},
                   {"init_box_size", config.init_box_size},
                   {"sample_dt", config.sample_dt}};
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot write " + path);
    out << j.dump(2) << "\n";
}

void validateScenario(const VoxelMap& map, const std::vector<AgentSpec>& agents,
                      const PlannerConfig& config) {
    (void)config;
    if (map.cellCount() == 0) throw ScenarioError("map is empty");
    std::set<int> ids;
    for (const auto& a : agents) {
        if (!ids.insert(a.id).second)
            throw ScenarioError("duplicate agent id " + std::to_string(a.id));
        if (a.radius <= 0.0)
            throw ScenarioError("agent " + std::to_string(a.id) + ": radius must be positive");
        if (!map.bounds().contains(a.start) || !map.bounds().contains(a.goal))
            throw ScenarioError("agent " + std::to_string(a.id) + ": start/goal out of bounds");
        if (!pointInFreeSpace(map, a.start, a.radius))
            throw ScenarioError("agent " + std::to_string(a.id) + ": start in collision");
        if (!pointInFreeSpace(map, a.goal, a.radius))
            throw ScenarioError("agent " + std::to_string(a.id) + ": goal in collision");
    }
}

Scenario loadScenario(const std::string& map_file, const std::string& scenario_file) {
    Scenario s;
    s.map = loadMapJson(map_file);
    loadScenarioJson(scenario_file, s.agents, s.config);
    validateScenario(s.map, s.agents, s.config);
    return s;
}

void generateForestScenario(std::uint32_t seed, int n_agents, int n_pillars,
                            VoxelMap& map, std::vector<AgentSpec>& agents,
                            double agent_radius) {
    if (n_agents < 1) throw ScenarioError("n_agents must be >= 1");

    // 10 m x 10 m x 2.5 m at 0.1 m voxels, centered on the origin.
    const Vec3 origin(-5.0, -5.0, 0.0);
    map = VoxelMap(origin, 0.1, Vec3i(100, 100, 25));

    // Starts on the boundary ring of the planning grid, 0.5 m inside the map
    // edge, z = 1 m; goals are point reflections through the map center.
    const double ring = 4.5;
    const double step = 0.5;
    std::vector<Vec3> slots;
    const int per_side = static_cast<int>(std::round(2.0 * ring / step));  // 18
    for (int k = 0; k < per_side; ++k)  // bottom edge, left to right
        slots.emplace_back(-ring + k * step, -ring, 1.0);
    for (int k = 0; k < per_side; ++k)  // right edge, bottom to top
        slots.emplace_back(ring, -ring + k * step, 1.0);
    for (int k = 0; k < per_side; ++k)  // top edge, right to left
        slots.emplace_back(ring - k * step, ring, 1.0);
    for (int k = 0; k < per_side; ++k)  // left edge, top to bottom
        slots.emplace_back(-ring, ring - k * step, 1.0);

    const int n_slots = static_cast<int>(slots.size());
    if (n_agents > n_slots)
        throw ScenarioError("too many agents for the boundary ring (" +
                            std::to_string(n_slots) + " slots)");

    agents.clear();
    for (int a = 0; a < n_agents; ++a) {
        AgentSpec spec;
        spec.id = a;
        spec.radius = agent_radius;
        spec.start = slots[static_cast<int>(static_cast<long long>(a) * n_slots / n_agents)];
        spec.goal = Vec3(-spec.start.x(), -spec.start.y(), spec.start.z());
        agents.push_back(spec);
    }

    std::mt19937 rng(seed);
    const int max_retries = 200;
    for (int p = 0; p < n_pillars; ++p) {
        bool placed = false;
        for (int attempt = 0; attempt < max_retries && !placed; ++attempt) {
            const double cx = uniformReal(rng, -4.0, 4.0);
            const double cy = uniformReal(rng, -4.0, 4.0);
            const double h = uniformReal(rng, 1.0, 2.5);
            const Box3 pillar{Vec3(cx - 0.15, cy - 0.15, 0.0), Vec3(cx + 0.15, cy + 0.15, h)};

            bool clear = true;
            for (const auto& a : agents) {
                const Box3 keepout = pillar.inflated(a.radius);
                if (keepout.containsInterior(a.start) || keepout.containsInterior(a.goal)) {
                    clear = false;
                    break;
                }
            }
            if (clear) {
                map.addObstacleBox(pillar);
                placed = true;
            }
        }
        if (!placed)
            throw ScenarioError("pillar placement failed after " +
                                std::to_string(max_retries) + " retries");
    }
}

}  // namespace swarmplan
