#include "swarmplan/mapf.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace swarmplan {

namespace {

constexpr long long kInf = std::numeric_limits<long long>::max() / 4;

const std::array<Vec3i, 6> kMoves = {Vec3i(1, 0, 0),  Vec3i(-1, 0, 0), Vec3i(0, 1, 0),
                                     Vec3i(0, -1, 0), Vec3i(0, 0, 1),  Vec3i(0, 0, -1)};

}  // namespace

std::optional<Vec3i> GridGraph::nearestCoord(const Vec3& p) const {
    Vec3i c;
    c.x() = static_cast<int>(std::lround((p.x() - origin.x()) / step_xy));
    c.y() = static_cast<int>(std::lround((p.y() - origin.y()) / step_xy));
    c.z() = static_cast<int>(std::lround((p.z() - origin.z()) / step_z));
    if (!inRange(c)) return std::nullopt;
    return c;
}

GridGraph buildGridGraph(const VoxelMap& map, const std::vector<AgentSpec>& agents,
                         const PlannerConfig& config) {
    GridGraph g;
    g.origin = map.origin();
    g.step_xy = config.grid_xy;
    g.step_z = config.grid_z;
    const Vec3 size = map.bounds().size();
    g.n.x() = static_cast<int>(std::floor(size.x() / config.grid_xy + 1e-9)) + 1;
    g.n.y() = static_cast<int>(std::floor(size.y() / config.grid_xy + 1e-9)) + 1;
    g.n.z() = static_cast<int>(std::floor(size.z() / config.grid_z + 1e-9)) + 1;

    g.blocked.assign(agents.size(), std::vector<std::uint8_t>(g.nodeCount(), 0));
    for (std::size_t a = 0; a < agents.size(); ++a) {
        for (int id = 0; id < g.nodeCount(); ++id) {
            const Vec3 p = g.nodePos(id);
            g.blocked[a][id] = pointInFreeSpace(map, p, agents[a].radius) ? 0 : 1;
        }
    }
    return g;
}

int ConflictAvoidanceTable::vertexConflicts(int node, int t) const {
    if (paths == nullptr) return 0;
    int count = 0;
    for (std::size_t a = 0; a < paths->size(); ++a) {
        if (static_cast<int>(a) == skip_agent || (*paths)[a].empty()) continue;
        const auto& p = (*paths)[a];
        const int pos = p[std::min<std::size_t>(t, p.size() - 1)];
        if (pos == node) ++count;
    }
    return count;
}

int ConflictAvoidanceTable::edgeConflicts(int from, int to, int t) const {
    if (paths == nullptr) return 0;
    int count = 0;
    for (std::size_t a = 0; a < paths->size(); ++a) {
        if (static_cast<int>(a) == skip_agent || (*paths)[a].empty()) continue;
        const auto& p = (*paths)[a];
        const int at_t = p[std::min<std::size_t>(t, p.size() - 1)];
        const int at_t1 = p[std::min<std::size_t>(t + 1, p.size() - 1)];
        if (at_t == to && at_t1 == from) ++count;
    }
    return count;
}

namespace {

// BFS distance-to-goal over one agent's free nodes; kInf where unreachable.
std::vector<long long> goalDistances(const GridGraph& graph, int agent, int goal_node) {
    std::vector<long long> dist(graph.nodeCount(), kInf);
    if (graph.isBlocked(agent, goal_node)) return dist;
    std::deque<int> queue;
    dist[goal_node] = 0;
    queue.push_back(goal_node);
    while (!queue.empty()) {
        const int cur = queue.front();
        queue.pop_front();
        const Vec3i c = graph.nodeCoord(cur);
        for (const auto& m : kMoves) {
            const Vec3i nc = c + m;
            if (!graph.inRange(nc)) continue;
            const int nid = graph.nodeId(nc);
            if (graph.isBlocked(agent, nid) || dist[nid] != kInf) continue;
            dist[nid] = dist[cur] + 1;
            queue.push_back(nid);
        }
    }
    return dist;
}

struct SearchRecord {
    int node;
    int t;
    long long f;
    int d;       // accumulated conflicts with the avoidance table
    int parent;  // index into the record arena
};

SearchOutcome lowLevelSearch(const GridGraph& graph, int agent, int start_node,
                             int goal_node, const ConstraintSet& constraints, double bound,
                             const ConflictAvoidanceTable& cat,
                             const std::vector<long long>& h, long long expansion_budget,
                             LowLevelResult& out) {
    out = LowLevelResult{};
    if (graph.isBlocked(agent, start_node) || h[start_node] >= kInf) return SearchOutcome::NoPath;

    int latest_constraint = constraints.max_goal_constraint_t;
    for (const auto& key : constraints.vertex)
        latest_constraint = std::max(latest_constraint, static_cast<int>(key & 0xFFFFFF));
    const int t_max = latest_constraint + graph.nodeCount() + 2;

    std::vector<SearchRecord> arena;
    // (f, -g) ordered open list over arena indices; focal keyed (d, f, -g).
    std::set<std::tuple<long long, long long, int>> open;
    std::set<std::tuple<int, long long, long long, int>> focal;
    std::map<std::pair<int, int>, int> best;  // (node, t) -> arena index of best d
    std::vector<std::uint8_t> closed_flag;

    auto stateKey = [](int node, int t) { return std::make_pair(node, t); };
    auto pushState = [&](int node, int t, int d, int parent) {
        const long long f = t + h[node];
        const auto key = stateKey(node, t);
        auto it = best.find(key);
        if (it != best.end()) {
            const auto& existing = arena[it->second];
            if (existing.d <= d || closed_flag[it->second]) return;
            open.erase({existing.f, -static_cast<long long>(existing.t), it->second});
            focal.erase({existing.d, existing.f, -static_cast<long long>(existing.t), it->second});
        }
        const int idx = static_cast<int>(arena.size());
        arena.push_back({node, t, f, d, parent});
        closed_flag.push_back(0);
        best[key] = idx;
        open.insert({f, -static_cast<long long>(t), idx});
        focal.insert({d, f, -static_cast<long long>(t), idx});
        (void)bound;
    };

    pushState(start_node, 0, 0, -1);
    long long lb = 0;

    while (!open.empty()) {
        const long long f_min = std::get<0>(*open.begin());
        lb = std::max(lb, f_min);
        const long long focal_bound =
            static_cast<long long>(std::floor(bound * static_cast<double>(lb) + 1e-9));

        // Select min-d among open states with f <= focal_bound. `focal` holds
        // every open state; skip the ones outside the bound.
        int chosen = -1;
        for (auto it = focal.begin(); it != focal.end(); ++it) {
            if (std::get<1>(*it) <= focal_bound) {
                chosen = std::get<3>(*it);
                break;
            }
        }
        if (chosen < 0) chosen = std::get<2>(*open.begin());

        const SearchRecord rec = arena[chosen];
        open.erase({rec.f, -static_cast<long long>(rec.t), chosen});
        focal.erase({rec.d, rec.f, -static_cast<long long>(rec.t), chosen});
        closed_flag[chosen] = 1;

        if (rec.node == goal_node && rec.t > constraints.max_goal_constraint_t) {
            std::vector<int> path(rec.t + 1);
            int idx = chosen;
            for (int t = rec.t; t >= 0; --t) {
                path[t] = arena[idx].node;
                idx = arena[idx].parent;
            }
            out.path = std::move(path);
            out.cost = rec.t;
            out.f_min = lb;
            return SearchOutcome::Found;
        }

        if (++out.expansions > expansion_budget) return SearchOutcome::BudgetExceeded;
        if (rec.t + 1 > t_max) continue;

        const Vec3i c = graph.nodeCoord(rec.node);
        auto tryStep = [&](int next_node) {
            if (graph.isBlocked(agent, next_node) || h[next_node] >= kInf) return;
            if (constraints.blocksVertex(next_node, rec.t + 1)) return;
            if (constraints.blocksEdge(rec.node, next_node, rec.t)) return;
            const int d = rec.d + cat.vertexConflicts(next_node, rec.t + 1) +
                          cat.edgeConflicts(rec.node, next_node, rec.t);
            pushState(next_node, rec.t + 1, d, chosen);
        };
        tryStep(rec.node);  // wait
        for (const auto& m : kMoves) {
            const Vec3i nc = c + m;
            if (graph.inRange(nc)) tryStep(graph.nodeId(nc));
        }
    }
    return SearchOutcome::NoPath;
}

}  // namespace

SearchOutcome ecbsLowLevel(const GridGraph& graph, int agent, int start_node,
                           int goal_node, const ConstraintSet& constraints, double bound,
                           const ConflictAvoidanceTable& cat, long long expansion_budget,
                           LowLevelResult& out) {
    const auto h = goalDistances(graph, agent, goal_node);
    return lowLevelSearch(graph, agent, start_node, goal_node, constraints, bound, cat, h,
                          expansion_budget, out);
}

namespace {

struct Conflict {
    bool is_edge = false;
    int agent_a = -1, agent_b = -1;
    int node_a = -1, node_b = -1;  // vertex: node_a; edge: a moves node_a->node_b
    int t = -1;
};

int pathNodeAt(const std::vector<int>& path, int t) {
    return path[std::min<std::size_t>(t, path.size() - 1)];
}

// Counts all conflicts and reports the earliest one.
int scanConflicts(const std::vector<std::vector<int>>& paths, Conflict* first) {
    int count = 0;
    std::size_t makespan = 1;
    for (const auto& p : paths) makespan = std::max(makespan, p.size());
    const int n = static_cast<int>(paths.size());
    for (int t = 0; t < static_cast<int>(makespan); ++t) {
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const int pi = pathNodeAt(paths[i], t);
                const int pj = pathNodeAt(paths[j], t);
                if (pi == pj) {
                    if (count == 0 && first != nullptr)
                        *first = {false, i, j, pi, -1, t};
                    ++count;
                }
                const int qi = pathNodeAt(paths[i], t + 1);
                const int qj = pathNodeAt(paths[j], t + 1);
                if (pi == qj && pj == qi && pi != pj) {
                    if (count == 0 && first != nullptr)
                        *first = {true, i, j, pi, qi, t};
                    ++count;
                }
            }
        }
    }
    return count;
}

struct CtNode {
    std::vector<ConstraintSet> constraints;
    std::vector<std::vector<int>> paths;
    std::vector<long long> costs;
    std::vector<long long> lbs;
    long long cost_sum = 0;
    long long lb_sum = 0;
    int conflicts = 0;
    Conflict first;
};

}  // namespace

std::string findPlanConflict(const std::vector<std::vector<int>>& paths) {
    Conflict c;
    if (scanConflicts(paths, &c) == 0) return {};
    std::ostringstream os;
    if (c.is_edge)
        os << "edge conflict: agents " << c.agent_a << " and " << c.agent_b << " swap nodes "
           << c.node_a << "<->" << c.node_b << " at t=" << c.t;
    else
        os << "vertex conflict: agents " << c.agent_a << " and " << c.agent_b << " at node "
           << c.node_a << " t=" << c.t;
    return os.str();
}

MapfResult planDiscrete(const VoxelMap& map, const std::vector<AgentSpec>& agents,
                        const PlannerConfig& config) {
    MapfResult result;
    const int n = static_cast<int>(agents.size());
    const GridGraph graph = buildGridGraph(map, agents, config);

    // Snap start/goal to the nearest free node, allowing a one-step search
    // around the rounded coordinate for off-grid endpoints near obstacles.
    auto snap = [&](int agent, const Vec3& p) -> int {
        const auto c0 = graph.nearestCoord(p);
        if (!c0) return -1;
        int best = -1;
        double best_d2 = std::numeric_limits<double>::max();
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const Vec3i c = *c0 + Vec3i(dx, dy, dz);
                    if (!graph.inRange(c)) continue;
                    const int id = graph.nodeId(c);
                    if (graph.isBlocked(agent, id)) continue;
                    const double d2 = (graph.nodePos(c) - p).squaredNorm();
                    if (d2 < best_d2) {
                        best_d2 = d2;
                        best = id;
                    }
                }
        return best;
    };

    std::vector<int> starts(n), goals(n);
    for (int a = 0; a < n; ++a) {
        starts[a] = snap(a, agents[a].start);
        goals[a] = snap(a, agents[a].goal);
        if (starts[a] < 0 || goals[a] < 0) {
            result.failure = MapfFailure::Unreachable;
            result.message = "agent " + std::to_string(agents[a].id) +
                             ": no free grid node near start/goal";
            return result;
        }
    }
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            if (starts[a] == starts[b] || goals[a] == goals[b]) {
                result.failure = MapfFailure::Unreachable;
                result.message = "agents " + std::to_string(agents[a].id) + " and " +
                                 std::to_string(agents[b].id) +
                                 " share a start or goal grid node";
                return result;
            }
        }

    // Per-agent heuristics reused across all low-level calls.
    std::vector<std::vector<long long>> heur(n);
    for (int a = 0; a < n; ++a) heur[a] = goalDistances(graph, a, goals[a]);

    long long budget = config.mapf_budget;
    long long used = 0;
    auto replan = [&](CtNode& node, int agent) -> SearchOutcome {
        ConflictAvoidanceTable cat{&node.paths, agent};
        LowLevelResult res;
        const auto outcome =
            lowLevelSearch(graph, agent, starts[agent], goals[agent], node.constraints[agent],
                           config.ecbs_bound, cat, heur[agent], budget - used, res);
        used += res.expansions;
        if (outcome == SearchOutcome::Found) {
            node.paths[agent] = std::move(res.path);
            node.costs[agent] = res.cost;
            node.lbs[agent] = res.f_min;
        }
        return outcome;
    };

    // Root node: plan agents in order against the already-planned prefix.
    CtNode root;
    root.constraints.assign(n, ConstraintSet{});
    root.paths.assign(n, {});
    root.costs.assign(n, 0);
    root.lbs.assign(n, 0);
    for (int a = 0; a < n; ++a) {
        const auto outcome = replan(root, a);
        if (outcome == SearchOutcome::NoPath) {
            result.failure = MapfFailure::Unreachable;
            result.message = "agent " + std::to_string(agents[a].id) + ": goal unreachable";
            result.expansions = used;
            return result;
        }
        if (outcome == SearchOutcome::BudgetExceeded) {
            result.failure = MapfFailure::Timeout;
            result.message = "node expansion budget exhausted";
            result.expansions = used;
            return result;
        }
    }

    auto finalize = [&](CtNode& node) {
        node.cost_sum = 0;
        node.lb_sum = 0;
        for (int a = 0; a < n; ++a) {
            node.cost_sum += node.costs[a];
            node.lb_sum += node.lbs[a];
        }
        node.conflicts = scanConflicts(node.paths, &node.first);
    };
    finalize(root);

    // High-level focal search over the constraint tree. The tree stays small
    // at desk scale, so the focal pick is a linear scan.
    std::deque<CtNode> open;
    open.push_back(std::move(root));
    const CtNode* solution = nullptr;
    CtNode solution_node;
    long long lb_at_solution = 0;

    while (!open.empty()) {
        long long lb_min = kInf;
        for (const auto& nd : open) lb_min = std::min(lb_min, nd.lb_sum);
        const double focal_bound = config.ecbs_bound * static_cast<double>(lb_min);

        int pick = -1;
        for (int i = 0; i < static_cast<int>(open.size()); ++i) {
            const auto& nd = open[i];
            if (static_cast<double>(nd.cost_sum) <= focal_bound + 1e-9) {
                if (pick < 0 || nd.conflicts < open[pick].conflicts ||
                    (nd.conflicts == open[pick].conflicts && nd.cost_sum < open[pick].cost_sum))
                    pick = i;
            }
        }
        if (pick < 0) {  // numerical safety; lb_min node always qualifies
            for (int i = 0; i < static_cast<int>(open.size()); ++i)
                if (open[i].lb_sum == lb_min) pick = i;
        }

        CtNode node = std::move(open[pick]);
        open.erase(open.begin() + pick);

        if (node.conflicts == 0) {
            solution_node = std::move(node);
            solution = &solution_node;
            lb_at_solution = lb_min;
            break;
        }
        if (used >= budget) {
            result.failure = MapfFailure::Timeout;
            result.message = "node expansion budget exhausted";
            result.expansions = used;
            return result;
        }

        const Conflict& c = node.first;
        for (int side = 0; side < 2; ++side) {
            const int agent = side == 0 ? c.agent_a : c.agent_b;
            CtNode child = node;
            if (c.is_edge) {
                const int from = side == 0 ? c.node_a : c.node_b;
                const int to = side == 0 ? c.node_b : c.node_a;
                child.constraints[agent].edge.insert(ConstraintSet::ekey(from, to, c.t));
            } else {
                child.constraints[agent].vertex.insert(ConstraintSet::vkey(c.node_a, c.t));
                if (c.node_a == goals[agent])
                    child.constraints[agent].max_goal_constraint_t =
                        std::max(child.constraints[agent].max_goal_constraint_t, c.t);
            }
            const auto outcome = replan(child, agent);
            if (outcome == SearchOutcome::BudgetExceeded) {
                result.failure = MapfFailure::Timeout;
                result.message = "node expansion budget exhausted";
                result.expansions = used;
                return result;
            }
            if (outcome == SearchOutcome::NoPath) continue;  // prune
            finalize(child);
            open.push_back(std::move(child));
        }
    }

    if (solution == nullptr) {
        result.failure = MapfFailure::Unreachable;
        result.message = "constraint tree exhausted without solution";
        result.expansions = used;
        return result;
    }

    // Assemble the plan: pad node paths to a common length, then append true
    // start/goal points when they are off-grid (uniformly across agents so the
    // shared time indexing stays aligned).
    DiscretePlan plan;
    std::size_t max_len = 1;
    for (const auto& p : solution->paths) max_len = std::max(max_len, p.size());

    bool any_off_start = false, any_off_goal = false;
    const double tol = 1e-9;
    for (int a = 0; a < n; ++a) {
        if ((graph.nodePos(starts[a]) - agents[a].start).norm() > tol) any_off_start = true;
        if ((graph.nodePos(goals[a]) - agents[a].goal).norm() > tol) any_off_goal = true;
    }

    plan.waypoints.assign(n, {});
    plan.nodes.assign(n, {});
    for (int a = 0; a < n; ++a) {
        auto& wp = plan.waypoints[a];
        auto& nd = plan.nodes[a];
        if (any_off_start) {
            wp.push_back(agents[a].start);
            nd.push_back(starts[a]);
        }
        for (std::size_t k = 0; k < max_len; ++k) {
            const int node = pathNodeAt(solution->paths[a], static_cast<int>(k));
            wp.push_back(graph.nodePos(node));
            nd.push_back(node);
        }
        if (any_off_goal) {
            wp.push_back(agents[a].goal);
            nd.push_back(goals[a]);
        }
    }
    plan.l_max = static_cast<int>(plan.waypoints.front().size());
    plan.cost = solution->cost_sum;
    plan.lower_bound = lb_at_solution;

    result.ok = true;
    result.plan = std::move(plan);
    result.expansions = used;
    return result;
}

}  // namespace swarmplan
