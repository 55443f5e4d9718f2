#include "spco/grid.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace spco {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::string_view data, std::size_t& pos) {
  for (;;) {
    while (pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    if (pos < data.size() && data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  if (start == pos) throw FormatError("truncated PGM header");
  return std::string(data.substr(start, pos - start));
}

int header_int(std::string_view data, std::size_t& pos) {
  const std::string t = header_token(data, pos);
  try {
    std::size_t used = 0;
    const int v = std::stoi(t, &used);
    if (used != t.size() || v <= 0) throw FormatError("bad PGM header value: " + t);
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("bad PGM header value: " + t);
  }
}

}  // namespace

MapMetadata MapMetadata::parse(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw FormatError(std::string("map metadata: ") + e.what());
  }
  MapMetadata m;
  try {
    m.resolution = tree.get<double>("resolution", m.resolution);
    m.origin.x() = tree.get<double>("origin_x", m.origin.x());
    m.origin.y() = tree.get<double>("origin_y", m.origin.y());
    m.occupied_thresh = tree.get<int>("occupied_thresh", m.occupied_thresh);
    m.free_thresh = tree.get<int>("free_thresh", m.free_thresh);
  } catch (const pt::ptree_bad_data& e) {
    throw FormatError(std::string("map metadata: ") + e.what());
  }
  if (!(m.resolution > 0)) throw FormatError("map metadata: resolution must be > 0");
  if (m.occupied_thresh > m.free_thresh)
    throw FormatError("map metadata: occupied_thresh exceeds free_thresh");
  return m;
}

std::string MapMetadata::format() const {
  std::ostringstream out;
  out.precision(17);
  out << "resolution=" << resolution << "\norigin_x=" << origin.x() << "\norigin_y="
      << origin.y() << "\noccupied_thresh=" << occupied_thresh << "\nfree_thresh=" << free_thresh
      << "\n";
  return out.str();
}

OccupancyGrid::OccupancyGrid(int width, int height, double resolution, const Vec2& origin,
                             Cell fill)
    : width_(width), height_(height), resolution_(resolution), origin_(origin) {
  if (width < 0 || height < 0) throw DimensionError("negative grid size");
  if (!(resolution > 0)) throw DimensionError("grid resolution must be > 0");
  cells_.assign(static_cast<std::size_t>(width) * height, fill);
}

CellIndex OccupancyGrid::cell_of(const Vec2& p) const {
  // The epsilon keeps lattice points that land on a cell edge in the upper cell.
  const Vec2 v = (p - origin_) / resolution_;
  return {static_cast<int>(std::floor(v.x() + 1e-9)), static_cast<int>(std::floor(v.y() + 1e-9))};
}

Vec2 OccupancyGrid::center(CellIndex c) const {
  return origin_ + Vec2(c.col + 0.5, c.row + 0.5) * resolution_;
}

OccupancyGrid load_map(std::string_view pgm, const MapMetadata& meta) {
  std::size_t pos = 0;
  if (header_token(pgm, pos) != "P5") throw FormatError("not a binary P5 graymap");
  const int w = header_int(pgm, pos);
  const int h = header_int(pgm, pos);
  const int maxval = header_int(pgm, pos);
  if (maxval > 255) throw FormatError("only 8-bit graymaps are supported");
  ++pos;  // single whitespace before the raster
  const std::size_t need = static_cast<std::size_t>(w) * h;
  if (pgm.size() < pos + need) throw FormatError("PGM raster shorter than header dimensions");
  if (pgm.size() > pos + need) throw FormatError("PGM raster longer than header dimensions");

  OccupancyGrid grid(w, h, meta.resolution, meta.origin, Cell::unknown);
  for (int i = 0; i < h; ++i)
    for (int c = 0; c < w; ++c) {
      const int px = static_cast<unsigned char>(pgm[pos + static_cast<std::size_t>(i) * w + c]);
      Cell v = Cell::unknown;
      if (px > meta.free_thresh)
        v = Cell::free;
      else if (px < meta.occupied_thresh)
        v = Cell::occupied;
      grid.set({c, h - 1 - i}, v);
    }
  return grid;
}

OccupancyGrid load_map_files(const std::string& pgm_path, const std::string& meta_path) {
  return load_map(read_file(pgm_path), MapMetadata::parse(read_file(meta_path)));
}

std::string encode_pgm(const OccupancyGrid& grid) {
  std::string out = "P5\n" + std::to_string(grid.width()) + " " + std::to_string(grid.height()) +
                    "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + static_cast<std::size_t>(grid.width()) * grid.height());
  for (int i = 0; i < grid.height(); ++i)
    for (int c = 0; c < grid.width(); ++c) {
      const Cell v = grid.at({c, grid.height() - 1 - i});
      const unsigned char px = v == Cell::free ? 254 : v == Cell::occupied ? 0 : 205;
      out[header + static_cast<std::size_t>(i) * grid.width() + c] = static_cast<char>(px);
    }
  return out;
}

MapMetadata metadata_of(const OccupancyGrid& grid) {
  MapMetadata m;
  m.resolution = grid.resolution();
  m.origin = grid.origin();
  return m;
}

CandidateSet generate_candidates(const OccupancyGrid& grid, double spacing, double clearance) {
  if (!(spacing > 0) || clearance < 0) throw DimensionError("bad candidate spacing/clearance");
  CandidateSet out;
  const double res = grid.resolution();
  const double extent_x = grid.width() * res, extent_y = grid.height() * res;
  const int reach = static_cast<int>(std::ceil(clearance / res)) + 1;
  for (int j = 0; j * spacing < extent_y; ++j)
    for (int i = 0; i * spacing < extent_x; ++i) {
      const Vec2 p = grid.origin() + Vec2(i * spacing, j * spacing);
      const CellIndex home = grid.cell_of(p);
      if (!grid.is_free(home)) continue;
      bool clear = true;
      for (int dr = -reach; dr <= reach && clear; ++dr)
        for (int dc = -reach; dc <= reach; ++dc) {
          const CellIndex c{home.col + dc, home.row + dr};
          if (grid.is_free(c)) continue;
          if ((grid.center(c) - p).norm() <= clearance) {
            clear = false;
            break;
          }
        }
      if (!clear) continue;
      out.points.push_back(p);
      out.cells.push_back(home);
    }
  return out;
}

std::optional<int> astar_path_length(const OccupancyGrid& grid, CellIndex from, CellIndex to) {
  if (!grid.is_free(from) || !grid.is_free(to)) return std::nullopt;
  if (from == to) return 0;
  auto heuristic = [&](CellIndex c) { return std::abs(c.col - to.col) + std::abs(c.row - to.row); };
  const std::size_t n = grid.cells().size();
  std::vector<int> g(n, std::numeric_limits<int>::max());
  using Entry = std::pair<int, std::size_t>;  // (f, cell)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  g[grid.index(from)] = 0;
  open.emplace(heuristic(from), grid.index(from));
  constexpr int dc[4] = {1, -1, 0, 0}, dr[4] = {0, 0, 1, -1};
  const std::size_t goal = grid.index(to);
  while (!open.empty()) {
    const auto [f, i] = open.top();
    open.pop();
    const CellIndex c = grid.cell_at(i);
    if (f - heuristic(c) > g[i]) continue;
    if (i == goal) return g[i];
    for (int d = 0; d < 4; ++d) {
      const CellIndex nb{c.col + dc[d], c.row + dr[d]};
      if (!grid.is_free(nb)) continue;
      const std::size_t j = grid.index(nb);
      if (g[i] + 1 < g[j]) {
        g[j] = g[i] + 1;
        open.emplace(g[j] + heuristic(nb), j);
      }
    }
  }
  return std::nullopt;
}

std::optional<int> astar_path_length(const OccupancyGrid& grid, const Vec2& from,
                                     const Vec2& to) {
  return astar_path_length(grid, grid.cell_of(from), grid.cell_of(to));
}

std::vector<int> distance_field(const OccupancyGrid& grid, CellIndex from) {
  std::vector<int> dist(grid.cells().size(), -1);
  if (!grid.is_free(from)) return dist;
  std::deque<std::size_t> queue{grid.index(from)};
  dist[grid.index(from)] = 0;
  constexpr int dc[4] = {1, -1, 0, 0}, dr[4] = {0, 0, 1, -1};
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    const CellIndex c = grid.cell_at(i);
    for (int d = 0; d < 4; ++d) {
      const CellIndex nb{c.col + dc[d], c.row + dr[d]};
      if (!grid.is_free(nb)) continue;
      const std::size_t j = grid.index(nb);
      if (dist[j] >= 0) continue;
      dist[j] = dist[i] + 1;
      queue.push_back(j);
    }
  }
  return dist;
}

TravelCosts::TravelCosts(const OccupancyGrid& grid, const CandidateSet& candidates)
    : n_(candidates.size()) {
  cost_.assign(static_cast<std::size_t>(n_) * n_, std::numeric_limits<double>::infinity());
  for (int a = 0; a < n_; ++a) {
    const auto dist = distance_field(grid, candidates.cells[a]);
    for (int b = 0; b < n_; ++b) {
      const int d = dist[grid.index(candidates.cells[b])];
      if (d >= 0) cost_[static_cast<std::size_t>(a) * n_ + b] = d;
    }
  }
}

std::vector<double> TravelCosts::row(int from) const {
  return {cost_.begin() + static_cast<std::ptrdiff_t>(from) * n_,
          cost_.begin() + static_cast<std::ptrdiff_t>(from + 1) * n_};
}

}  // namespace spco
