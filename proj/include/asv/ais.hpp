#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "asv/scenario.hpp"
#include "asv/terrain.hpp"

namespace asv {

// One vessel's recorded track, already projected to the planar world frame
// (x north, y east). Long transmission gaps split a vessel's data into
// separate tracks.
struct AisTrack {
  std::string vessel_id;
  std::vector<double> times;               // s, strictly increasing
  std::vector<Eigen::Vector2d> positions;  // world frame
  std::vector<double> speeds;              // m/s, NaN when absent
  std::vector<double> headings;            // rad, NaN when absent
};

struct AisLoadResult {
  std::vector<AisTrack> tracks;
  int skipped_rows = 0;
};

// Delimited text with a header row: id,timestamp,lat,lon[,speed[,heading]].
// Timestamps in seconds, speed in m/s, heading in degrees. Rows that do not
// parse are skipped and counted.
AisLoadResult load_ais(const std::string& path, double gap_split_seconds = 600.0);
AisLoadResult ais_from_text(const std::string& text, double gap_split_seconds = 600.0);

struct ReplayParams {
  double target_length = 30.0;
  double target_width = 6.0;
  double goal_radius = 100.0;
  int max_steps = 10000;
  double fillet_radius = 100.0;
  double simplify_tolerance = 5.0;
};

// Builds a scenario in which the recorded vessels replay their tracks over
// [t_begin, t_end] (episode time zero maps to t_begin) and the terrain
// coastline provides the static obstacles. The desired path must stay clear
// of land.
Scenario build_replay_scenario(const TerrainGrid* terrain,
                               const std::vector<AisTrack>& tracks,
                               const std::vector<Eigen::Vector2d>& path_waypoints,
                               double t_begin, double t_end,
                               const ReplayParams& params = {});

}  // namespace asv
