#pragma once

#include <string>
#include <vector>

#include "swarmplan/postprocess.hpp"
#include "swarmplan/sfc.hpp"

namespace swarmplan {

// Deterministic top-down SVG: obstacles gray, corridors translucent,
// trajectories colored per agent, start/goal markers. Corridors may be empty.
void writeSvgPlot(const std::string& path, const VoxelMap& map,
                  const TrajectoryBundle& bundle, const std::vector<AgentSpec>& agents,
                  const std::vector<CorridorSequence>& corridors, double sample_dt);

}  // namespace swarmplan
