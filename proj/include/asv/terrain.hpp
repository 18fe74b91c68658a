#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "asv/sensing.hpp"

namespace asv {

// Georeferenced elevation raster in the plain-text ESRI ASCII grid layout
// (ncols/nrows/xllcorner/yllcorner/cellsize header, then row-major values,
// first row northernmost). Coordinates are planar zone-33 easting/northing;
// the world frame maps x to northing and y to easting.
struct TerrainGrid {
  int rows = 0;
  int cols = 0;
  double xll = 0.0;       // easting of the lower-left corner (m)
  double yll = 0.0;       // northing of the lower-left corner (m)
  double cell = 10.0;     // m
  Eigen::MatrixXd elevation;  // rows x cols, m above sea level

  // cell-center position in the world frame (x north, y east)
  Eigen::Vector2d cell_center_world(int row, int col) const {
    return {yll + (rows - 1 - row + 0.5) * cell, xll + (col + 0.5) * cell};
  }
};

// No-data cells are replaced by a sentinel far below sea level.
TerrainGrid load_terrain(const std::string& path);
TerrainGrid terrain_from_text(const std::string& text);

// Marching-squares coastline extraction at the given sea level, polygon
// simplification by maximum deviation, optional area floor (default keeps
// every islet).
std::vector<Obstacle> terrain_to_obstacles(const TerrainGrid& grid, double sea_level = 0.0,
                                           double simplify_tolerance = 5.0,
                                           double min_area = 0.0);

}  // namespace asv
