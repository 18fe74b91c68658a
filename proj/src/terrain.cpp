#include "asv/terrain.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace asv {

namespace {
constexpr double kNoDataSentinel = -10000.0;
}

TerrainGrid terrain_from_text(const std::string& text) {
  std::istringstream in(text);
  TerrainGrid g;
  double nodata = -9999.0;
  bool have_nodata = false;

  // header: key value pairs until the first purely numeric line
  std::map<std::string, double> header;
  std::string line;
  int lineno = 0;
  std::streampos data_start = 0;
  while (true) {
    data_start = in.tellg();
    if (!std::getline(in, line)) break;
    ++lineno;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    const bool numeric = key.find_first_not_of("0123456789+-.eE") == std::string::npos;
    if (numeric) break;
    double value;
    if (!(ls >> value))
      throw std::invalid_argument("terrain grid line " + std::to_string(lineno) +
                                  ": header key '" + key + "' has no value");
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    header[key] = value;
  }

  auto require = [&](const char* key) {
    auto it = header.find(key);
    if (it == header.end())
      throw std::invalid_argument(std::string("terrain grid: missing header key '") + key + "'");
    return it->second;
  };
  g.cols = static_cast<int>(require("ncols"));
  g.rows = static_cast<int>(require("nrows"));
  g.xll = require("xllcorner");
  g.yll = require("yllcorner");
  g.cell = require("cellsize");
  if (auto it = header.find("nodata_value"); it != header.end()) {
    nodata = it->second;
    have_nodata = true;
  }
  if (g.cols <= 0 || g.rows <= 0 || !(g.cell > 0.0))
    throw std::invalid_argument("terrain grid: dimensions and cellsize must be positive");

  in.clear();
  in.seekg(data_start);
  g.elevation.resize(g.rows, g.cols);
  for (int i = 0; i < g.rows; ++i) {
    for (int j = 0; j < g.cols; ++j) {
      double z;
      if (!(in >> z))
        throw std::invalid_argument("terrain grid: expected " +
                                    std::to_string(g.rows * g.cols) + " values, got " +
                                    std::to_string(i * g.cols + j));
      if (!std::isfinite(z) || (have_nodata && z == nodata)) z = kNoDataSentinel;
      g.elevation(i, j) = z;
    }
  }
  double extra;
  if (in >> extra)
    throw std::invalid_argument("terrain grid: more values than nrows*ncols");
  return g;
}

TerrainGrid load_terrain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("terrain grid: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return terrain_from_text(ss.str());
}

namespace {

// edge of the sample lattice: horizontal joins (i,j)-(i,j+1), vertical joins
// (i,j)-(i+1,j); indices may extend one ring beyond the grid (sea padding)
struct EdgeKey {
  int i, j;
  bool horizontal;
  bool operator<(const EdgeKey& o) const {
    if (i != o.i) return i < o.i;
    if (j != o.j) return j < o.j;
    return horizontal < o.horizontal;
  }
  bool operator==(const EdgeKey& o) const {
    return i == o.i && j == o.j && horizontal == o.horizontal;
  }
};

struct ContourSegment {
  EdgeKey a, b;
  Eigen::Vector2d pa, pb;
};

double ring_area(const std::vector<Eigen::Vector2d>& ring) {
  double s = 0.0;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++)
    s += ring[j].x() * ring[i].y() - ring[i].x() * ring[j].y();
  return 0.5 * std::abs(s);
}

void douglas_peucker(const std::vector<Eigen::Vector2d>& pts, std::size_t lo, std::size_t hi,
                     double tol, std::vector<bool>& keep) {
  if (hi <= lo + 1) return;
  const Eigen::Vector2d a = pts[lo], b = pts[hi];
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  double worst = -1.0;
  std::size_t worst_i = lo;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    double d;
    if (len2 < 1e-18) {
      d = (pts[i] - a).norm();
    } else {
      const double t = std::clamp((pts[i] - a).dot(ab) / len2, 0.0, 1.0);
      d = (pts[i] - (a + t * ab)).norm();
    }
    if (d > worst) {
      worst = d;
      worst_i = i;
    }
  }
  if (worst <= tol) return;
  keep[worst_i] = true;
  douglas_peucker(pts, lo, worst_i, tol, keep);
  douglas_peucker(pts, worst_i, hi, tol, keep);
}

std::vector<Eigen::Vector2d> simplify_ring(const std::vector<Eigen::Vector2d>& ring,
                                           double tol) {
  if (tol <= 0.0 || ring.size() <= 4) return ring;
  std::vector<Eigen::Vector2d> closed = ring;
  closed.push_back(ring.front());
  std::vector<bool> keep(closed.size(), false);
  keep.front() = keep.back() = true;
  douglas_peucker(closed, 0, closed.size() - 1, tol, keep);
  std::vector<Eigen::Vector2d> out;
  for (std::size_t i = 0; i + 1 < closed.size(); ++i)
    if (keep[i]) out.push_back(closed[i]);
  return out;
}

}  // namespace

std::vector<Obstacle> terrain_to_obstacles(const TerrainGrid& grid, double sea_level,
                                           double simplify_tolerance, double min_area) {
  // one ring of virtual sea samples closes every coastline loop
  auto sample = [&](int i, int j) -> double {
    if (i < 0 || j < 0 || i >= grid.rows || j >= grid.cols) return sea_level - 1000.0;
    return grid.elevation(i, j);
  };
  auto pos = [&](int i, int j) -> Eigen::Vector2d {
    return {grid.yll + (grid.rows - 1 - i + 0.5) * grid.cell,
            grid.xll + (j + 0.5) * grid.cell};
  };
  auto interp = [&](int i0, int j0, int i1, int j1) -> Eigen::Vector2d {
    const double v0 = sample(i0, j0), v1 = sample(i1, j1);
    const double t = std::clamp((sea_level - v0) / (v1 - v0), 0.0, 1.0);
    return pos(i0, j0) + t * (pos(i1, j1) - pos(i0, j0));
  };

  std::vector<ContourSegment> segments;
  for (int i = -1; i < grid.rows; ++i) {
    for (int j = -1; j < grid.cols; ++j) {
      const bool nw = sample(i, j) >= sea_level;
      const bool ne = sample(i, j + 1) >= sea_level;
      const bool se = sample(i + 1, j + 1) >= sea_level;
      const bool sw = sample(i + 1, j) >= sea_level;
      const int idx = (nw ? 1 : 0) | (ne ? 2 : 0) | (se ? 4 : 0) | (sw ? 8 : 0);
      if (idx == 0 || idx == 15) continue;

      const EdgeKey top{i, j, true}, right{i, j + 1, false};
      const EdgeKey bottom{i + 1, j, true}, left{i, j, false};
      const Eigen::Vector2d pt = interp(i, j, i, j + 1);
      const Eigen::Vector2d pr = interp(i, j + 1, i + 1, j + 1);
      const Eigen::Vector2d pb = interp(i + 1, j, i + 1, j + 1);
      const Eigen::Vector2d pl = interp(i, j, i + 1, j);

      auto emit = [&](EdgeKey ka, const Eigen::Vector2d& a, EdgeKey kb,
                      const Eigen::Vector2d& b) {
        segments.push_back({ka, kb, a, b});
      };
      switch (idx) {
        case 1: case 14: emit(top, pt, left, pl); break;
        case 2: case 13: emit(top, pt, right, pr); break;
        case 3: case 12: emit(left, pl, right, pr); break;
        case 4: case 11: emit(right, pr, bottom, pb); break;
        case 6: case 9:  emit(top, pt, bottom, pb); break;
        case 7: case 8:  emit(left, pl, bottom, pb); break;
        case 5: case 10: {
          // saddle: disambiguate with the cell-center mean
          const double center = 0.25 * (sample(i, j) + sample(i, j + 1) +
                                        sample(i + 1, j + 1) + sample(i + 1, j));
          const bool center_land = center >= sea_level;
          const bool nw_land_diag = (idx == 5);  // land at NW+SE, else NE+SW
          if (nw_land_diag == center_land) {
            emit(top, pt, right, pr);
            emit(left, pl, bottom, pb);
          } else {
            emit(top, pt, left, pl);
            emit(right, pr, bottom, pb);
          }
          break;
        }
        default: break;
      }
    }
  }

  // chain segments into closed rings via shared lattice edges
  std::map<EdgeKey, std::vector<int>> by_edge;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    by_edge[segments[s].a].push_back(static_cast<int>(s));
    by_edge[segments[s].b].push_back(static_cast<int>(s));
  }
  std::vector<bool> used(segments.size(), false);
  std::vector<Obstacle> out;
  for (std::size_t s0 = 0; s0 < segments.size(); ++s0) {
    if (used[s0]) continue;
    std::vector<Eigen::Vector2d> ring;
    int current = static_cast<int>(s0);
    EdgeKey enter = segments[s0].a;
    while (true) {
      used[current] = true;
      const ContourSegment& seg = segments[current];
      const bool forward = seg.a == enter;
      ring.push_back(forward ? seg.pa : seg.pb);
      const EdgeKey exit = forward ? seg.b : seg.a;
      const auto& candidates = by_edge[exit];
      int next = -1;
      for (int c : candidates)
        if (!used[c]) next = c;
      if (next < 0) break;  // loop closed (back at s0's other end)
      enter = exit;
      current = next;
    }
    if (ring.size() < 3) continue;
    const std::vector<Eigen::Vector2d> simplified = simplify_ring(ring, simplify_tolerance);
    if (simplified.size() < 3) continue;
    if (ring_area(simplified) <= std::max(min_area, 1e-9)) continue;
    out.push_back(Obstacle::make_polygon(simplified, static_cast<int>(out.size())));
  }
  return out;
}

}  // namespace asv
