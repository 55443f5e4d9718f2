#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spco/types.hpp"

namespace spco {

enum class Cell : std::uint8_t { free, occupied, unknown };

struct CellIndex {
  int col = 0;
  int row = 0;  // row 0 is the bottom edge (smallest y)
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Key-value map metadata that accompanies a P5 image.
struct MapMetadata {
  double resolution = 0.05;  // meters per cell
  Vec2 origin = Vec2::Zero();  // world position of the lower-left corner of cell (0, 0)
  int occupied_thresh = 50;    // pixel < this -> occupied
  int free_thresh = 250;       // pixel > this -> free

  static MapMetadata parse(const std::string& text);
  std::string format() const;
};

class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(int width, int height, double resolution, const Vec2& origin,
                Cell fill = Cell::free);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  const Vec2& origin() const { return origin_; }

  bool in_bounds(CellIndex c) const {
    return c.col >= 0 && c.row >= 0 && c.col < width_ && c.row < height_;
  }
  Cell at(CellIndex c) const { return cells_[index(c)]; }
  void set(CellIndex c, Cell v) { cells_[index(c)] = v; }
  bool is_free(CellIndex c) const { return in_bounds(c) && at(c) == Cell::free; }

  std::size_t index(CellIndex c) const {
    return static_cast<std::size_t>(c.row) * width_ + c.col;
  }
  CellIndex cell_at(std::size_t i) const {
    return {static_cast<int>(i % width_), static_cast<int>(i / width_)};
  }

  // Cell containing a world point; the point may lie outside the map.
  CellIndex cell_of(const Vec2& p) const;
  Vec2 center(CellIndex c) const;

  const std::vector<Cell>& cells() const { return cells_; }
  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  int width_ = 0, height_ = 0;
  double resolution_ = 0.05;
  Vec2 origin_ = Vec2::Zero();
  std::vector<Cell> cells_;
};

// Binary P5 graymap; the first image row is the top of the map (largest y).
OccupancyGrid load_map(std::string_view pgm, const MapMetadata& meta);
OccupancyGrid load_map_files(const std::string& pgm_path, const std::string& meta_path);
// Writes free 254, occupied 0, unknown 205, which round-trips under the
// default thresholds.
std::string encode_pgm(const OccupancyGrid& grid);
MapMetadata metadata_of(const OccupancyGrid& grid);

struct CandidateSet {
  std::vector<Vec2> points;     // id = position in the list
  std::vector<CellIndex> cells;  // cell containing each point

  int size() const { return static_cast<int>(points.size()); }
};

// Lattice points at `spacing` anchored at the map origin whose cell is free
// and that have no occupied, unknown or off-map cell center within
// `clearance` (inclusive).
CandidateSet generate_candidates(const OccupancyGrid& grid, double spacing = 0.8,
                                 double clearance = 0.5);

// Shortest 4-connected path through free cells, counted in moves.
std::optional<int> astar_path_length(const OccupancyGrid& grid, CellIndex from, CellIndex to);
std::optional<int> astar_path_length(const OccupancyGrid& grid, const Vec2& from, const Vec2& to);

// Breadth-first distances from one free cell to every cell; -1 = unreachable.
std::vector<int> distance_field(const OccupancyGrid& grid, CellIndex from);

/// Path lengths between all candidate pairs; +inf when unreachable.
class TravelCosts {
 public:
  TravelCosts() = default;
  TravelCosts(const OccupancyGrid& grid, const CandidateSet& candidates);

  int size() const { return n_; }
  double at(int from, int to) const { return cost_[static_cast<std::size_t>(from) * n_ + to]; }
  std::vector<double> row(int from) const;

 private:
  int n_ = 0;
  std::vector<double> cost_;
};

}  // namespace spco
